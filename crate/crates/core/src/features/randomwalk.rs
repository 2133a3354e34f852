//! Ratios of feasible boundary crossings along simple random walks.

use rand::Rng;
use rayon::prelude::*;

use crate::problem::ProblemInstance;
use crate::rng::{stream, Stream};
use crate::stats::min_med_max;
use crate::{Error, Result};

use super::{FeatureName, FeatureSet, RandomWalkConfig};

/// Redraws of an out-of-bounds step before falling back to reflection.
const MAX_REDRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomWalkFeatures {
    pub rfb_min: f64,
    pub rfb_med: f64,
    pub rfb_max: f64,
}

impl RandomWalkFeatures {
    pub fn to_set(&self) -> FeatureSet {
        let mut s = FeatureSet::new();
        s.set(FeatureName::RfbMin, Some(self.rfb_min));
        s.set(FeatureName::RfbMed, Some(self.rfb_med));
        s.set(FeatureName::RfbMax, Some(self.rfb_max));
        s
    }
}

/// One walk: visited points and their feasibility bits (`true` = infeasible).
#[derive(Debug, Clone, PartialEq)]
pub struct WalkTrace {
    pub points: Vec<Vec<f64>>,
    pub violations: Vec<f64>,
    pub infeasible: Vec<bool>,
}

fn reflect(y: f64, lo: f64, hi: f64) -> f64 {
    let r = if y < lo {
        lo + (lo - y)
    } else if y > hi {
        hi - (y - hi)
    } else {
        y
    };
    r.clamp(lo, hi)
}

/// Runs walk number `run` of `config` from a uniform random start.
pub fn simple_random_walk(
    problem: &ProblemInstance,
    config: &RandomWalkConfig,
    seed: u64,
    run: u32,
) -> Result<WalkTrace> {
    if config.steps < 2 {
        return Err(Error::InvalidParameter(
            "a walk needs at least 2 points".into(),
        ));
    }
    if !(config.step_fraction.is_finite() && config.step_fraction > 0.0) {
        return Err(Error::InvalidParameter(
            "step fraction must be positive".into(),
        ));
    }
    let mut rng = stream(seed, Stream::RandomWalk(run));
    let bounds = problem.bounds();
    let half: Vec<f64> = bounds
        .iter()
        .map(|&(lo, hi)| config.step_fraction * (hi - lo))
        .collect();
    let mut x: Vec<f64> = bounds
        .iter()
        .map(|&(lo, hi)| rng.gen_range(lo..=hi))
        .collect();
    let mut trace = WalkTrace {
        points: Vec::with_capacity(config.steps),
        violations: Vec::with_capacity(config.steps),
        infeasible: Vec::with_capacity(config.steps),
    };
    for step in 0..config.steps {
        if step > 0 {
            let mut proposal = Vec::new();
            for _ in 0..MAX_REDRAWS {
                proposal = x
                    .iter()
                    .zip(&half)
                    .map(|(&xi, &h)| xi + rng.gen_range(-h..=h))
                    .collect();
                if proposal
                    .iter()
                    .zip(bounds)
                    .all(|(&y, &(lo, hi))| y >= lo && y <= hi)
                {
                    break;
                }
            }
            x = proposal
                .iter()
                .zip(bounds)
                .map(|(&y, &(lo, hi))| reflect(y, lo, hi))
                .collect();
        }
        let p = problem.evaluate(&x)?;
        trace.violations.push(p.v);
        trace.infeasible.push(!p.is_feasible);
        trace.points.push(x.clone());
    }
    Ok(trace)
}

/// Fraction of steps whose endpoints differ in feasibility.
pub fn boundary_crossing_ratio(b: &[bool]) -> f64 {
    if b.len() < 2 {
        return 0.0;
    }
    let crossings = b.windows(2).filter(|w| w[0] != w[1]).count();
    crossings as f64 / (b.len() - 1) as f64
}

/// Per-walk ratios, in run order.
pub fn walk_ratios(
    problem: &ProblemInstance,
    config: &RandomWalkConfig,
    seed: u64,
) -> Result<Vec<f64>> {
    (0..config.walks as u32)
        .into_par_iter()
        .map(|run| {
            simple_random_walk(problem, config, seed, run)
                .map(|t| boundary_crossing_ratio(&t.infeasible))
        })
        .collect()
}

pub fn randomwalk_features(
    problem: &ProblemInstance,
    config: &RandomWalkConfig,
    seed: u64,
) -> Result<RandomWalkFeatures> {
    if config.walks == 0 {
        return Err(Error::InvalidParameter(
            "at least one walk is required".into(),
        ));
    }
    let ratios = walk_ratios(problem, config, seed)?;
    let (rfb_min, rfb_med, rfb_max) = min_med_max(&ratios).expect("walks > 0");
    Ok(RandomWalkFeatures {
        rfb_min,
        rfb_med,
        rfb_max,
    })
}
