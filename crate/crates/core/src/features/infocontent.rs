//! Information content of the constraint-violation sequence along a
//! nearest-neighbour tour of a Latin hypercube sample.

use rand::{Rng as _, RngCore};
use rayon::prelude::*;

use crate::problem::{EvaluatedPoint, ProblemInstance};
use crate::rng::{stream, Stream};
use crate::sampling::{evaluate_plan, SampleCache, SamplePlan};
use crate::{Error, Result};

use super::{FeatureName, FeatureSet, InfoContentConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    Down,
    Flat,
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoContentFeatures {
    pub h_max: f64,
    /// `log10` of the smallest positive grid threshold with settled entropy.
    pub eps_s: Option<f64>,
    pub m0: f64,
}

impl InfoContentFeatures {
    pub fn to_set(&self) -> FeatureSet {
        let mut s = FeatureSet::new();
        s.set(FeatureName::HMax, Some(self.h_max));
        s.set(FeatureName::EpsS, self.eps_s);
        s.set(FeatureName::M0, Some(self.m0));
        s
    }
}

/// `{0}` followed by `10^k` for `k = -8, -7.75, ..., 16`.
pub fn default_lambdas() -> Vec<f64> {
    std::iter::once(0.0)
        .chain((0..=96).map(|i| 10f64.powf(-8.0 + 0.25 * f64::from(i))))
        .collect()
}

/// Greedy tour: from `start`, repeatedly move to the nearest unvisited point.
/// Ties go to the lowest index.
pub fn nearest_neighbor_tour<V: AsRef<[f64]> + Sync>(points: &[V], start: usize) -> Vec<usize> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let mut visited = vec![false; n];
    let mut tour = Vec::with_capacity(n);
    let mut current = start;
    visited[current] = true;
    tour.push(current);
    for _ in 1..n {
        let here = points[current].as_ref();
        let next = (0..n)
            .into_par_iter()
            .filter(|&j| !visited[j])
            .map(|j| {
                let d2: f64 = here
                    .iter()
                    .zip(points[j].as_ref())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d2, j)
            })
            .reduce_with(|a, b| {
                if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            })
            .map(|(_, j)| j)
            .expect("unvisited points remain");
        visited[next] = true;
        tour.push(next);
        current = next;
    }
    tour
}

/// Slopes `dv / |dx|` between consecutive points; `0/0` counts as flat.
pub fn slopes<V: AsRef<[f64]>>(x: &[V], v: &[f64]) -> Vec<f64> {
    (1..v.len())
        .map(|i| {
            let dx: f64 = x[i]
                .as_ref()
                .iter()
                .zip(x[i - 1].as_ref())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let dv = v[i] - v[i - 1];
            if dv == 0.0 {
                0.0
            } else {
                dv / dx
            }
        })
        .collect()
}

pub fn symbols(slopes: &[f64], lambda: f64) -> Vec<Symbol> {
    slopes
        .iter()
        .map(|&s| {
            if s < -lambda {
                Symbol::Down
            } else if s > lambda {
                Symbol::Up
            } else {
                Symbol::Flat
            }
        })
        .collect()
}

/// Base-6 entropy of the six mixed blocks over the `len - 1` consecutive
/// symbol pairs.
pub fn entropy(symbols: &[Symbol]) -> f64 {
    if symbols.len() < 2 {
        return 0.0;
    }
    let blocks = symbols.len() - 1;
    let mut counts = [[0usize; 3]; 3];
    for w in symbols.windows(2) {
        counts[w[0] as usize][w[1] as usize] += 1;
    }
    let mut h = 0.0;
    for (a, row) in counts.iter().enumerate() {
        for (b, &c) in row.iter().enumerate() {
            if a != b && c > 0 {
                let p = c as f64 / blocks as f64;
                h -= p * p.ln() / 6f64.ln();
            }
        }
    }
    h
}

/// Partial information: length of the sequence left after dropping flat
/// symbols and then repeats, divided by the symbol count.
pub fn partial_information(symbols: &[Symbol]) -> f64 {
    if symbols.is_empty() {
        return 0.0;
    }
    let mut kept = 0usize;
    let mut last = None;
    for &s in symbols.iter().filter(|&&s| s != Symbol::Flat) {
        if last != Some(s) {
            kept += 1;
            last = Some(s);
        }
    }
    kept as f64 / symbols.len() as f64
}

/// Features from a sequence of slopes.
pub fn features_from_slopes(
    slopes: &[f64],
    lambdas: &[f64],
    settling_threshold: f64,
) -> InfoContentFeatures {
    let hs: Vec<f64> = lambdas
        .par_iter()
        .map(|&l| entropy(&symbols(slopes, l)))
        .collect();
    let h_max = hs.iter().copied().fold(0.0, f64::max);
    let eps_s = lambdas
        .iter()
        .zip(&hs)
        .filter(|(&l, &h)| l > 0.0 && h < settling_threshold)
        .map(|(&l, _)| l)
        .reduce(f64::min)
        // Rounded so that grid points like 10^0.25 print as 0.25.
        .map(|l| (l.log10() * 1e12).round() / 1e12);
    InfoContentFeatures {
        h_max,
        eps_s,
        m0: partial_information(&symbols(slopes, 0.0)),
    }
}

/// Features from an evaluated sample, touring from `start`.
pub fn features_from_sample(
    problem: &ProblemInstance,
    sample: &[EvaluatedPoint],
    start: usize,
    config: &InfoContentConfig,
) -> Result<InfoContentFeatures> {
    if sample.len() < 3 {
        return Err(Error::InvalidParameter(
            "information content needs at least 3 points".into(),
        ));
    }
    let unit: Vec<Vec<f64>> = sample.iter().map(|p| problem.to_unit(&p.x)).collect();
    let tour = nearest_neighbor_tour(&unit, start);
    let x: Vec<&[f64]> = tour.iter().map(|&i| unit[i].as_slice()).collect();
    let v: Vec<f64> = tour.iter().map(|&i| sample[i].v).collect();
    Ok(features_from_slopes(
        &slopes(&x, &v),
        &config.lambdas,
        config.settling_threshold,
    ))
}

pub fn info_features(
    problem: &ProblemInstance,
    config: &InfoContentConfig,
    seed: u64,
    cache: Option<&SampleCache>,
) -> Result<InfoContentFeatures> {
    let mut rng = stream(seed, Stream::InfoContent);
    let plan = SamplePlan::latin_hypercube(config.samples, problem.dimension(), rng.next_u64());
    let sample = evaluate_plan(problem, &plan, cache)?;
    let start = rng.gen_range(0..sample.len());
    features_from_sample(problem, &sample, start, config)
}
