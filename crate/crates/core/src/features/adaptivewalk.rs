//! Basins of attraction of the violation landscape.
//!
//! A deterministic local search minimizes the overall constraint violation
//! from every point of a Latin hypercube sample; the terminal points are
//! clustered into local minimum-violation components, and each start belongs
//! to the basin of the component its terminal falls in.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dbscan::{self, ClusterLabeling, DbscanParams};
use crate::pareto::nondominated_mask;
use crate::problem::{EvaluatedPoint, ProblemInstance};
use crate::rng::{derive_seed, Stream};
use crate::sampling::{evaluate_plan, SampleCache, SamplePlan};
use crate::stats::{median, min_med_max};
use crate::{Error, Result};

use super::spacefill::argmax;
use super::{AdaptiveWalkConfig, FeatureName, FeatureSet};

/// Projected quasi-Newton descent on `v` with forward-difference gradients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalSearchConfig {
    pub max_iterations: usize,
    /// Finite-difference step as a fraction of each axis range.
    pub gradient_step: f64,
    /// Stop when an accepted step is shorter than this (unit-box norm).
    pub step_tolerance: f64,
    /// Terminal violation at or below which a terminal counts as feasible.
    pub feasibility_tolerance: f64,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        LocalSearchConfig {
            max_iterations: 500,
            gradient_step: 1e-8,
            step_tolerance: 1e-10,
            feasibility_tolerance: 1e-10,
        }
    }
}

impl LocalSearchConfig {
    pub fn is_feasible(&self, v: f64) -> bool {
        v <= self.feasibility_tolerance
    }
}

/// Numeric feasibility of a local-search terminal: `v <= 1e-10`.
pub fn feasibility_tolerance_check(v: f64) -> bool {
    LocalSearchConfig::default().is_feasible(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchResult {
    pub terminal: EvaluatedPoint,
    pub start_v: f64,
    pub iterations: usize,
    /// False if the iteration limit was reached.
    pub converged: bool,
}

/// Violation as a function of unit-box coordinates.
struct Objective<'a> {
    problem: &'a ProblemInstance,
    evaluations: usize,
}

impl Objective<'_> {
    fn eval(&mut self, u: &[f64]) -> Result<EvaluatedPoint> {
        self.evaluations += 1;
        let p = self.problem.evaluate(&self.problem.from_unit(u))?;
        if !p.v.is_finite() {
            return Err(Error::NonFinite(format!("violation at {:?}", p.x)));
        }
        Ok(p)
    }

    fn v(&mut self, u: &[f64]) -> Result<f64> {
        self.eval(u).map(|p| p.v)
    }

    /// Forward differences, backward where the forward point leaves the box.
    fn gradient(&mut self, u: &[f64], v: f64, h: f64) -> Result<Vec<f64>> {
        let mut g = vec![0.0; u.len()];
        let mut probe = u.to_vec();
        for j in 0..u.len() {
            let forward = u[j] + h <= 1.0;
            probe[j] = if forward { u[j] + h } else { u[j] - h };
            let vj = self.v(&probe)?;
            probe[j] = u[j];
            g[j] = if forward { (vj - v) / h } else { (v - vj) / h };
        }
        Ok(g)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes the overall constraint violation from `x0`.
///
/// The search is monotone: every accepted iterate has a violation no larger
/// than its predecessor. A feasible start is returned unchanged.
pub fn local_search(
    problem: &ProblemInstance,
    x0: &[f64],
    config: &LocalSearchConfig,
) -> Result<LocalSearchResult> {
    problem.check_point(x0)?;
    let d = problem.dimension();
    let mut obj = Objective {
        problem,
        evaluations: 0,
    };
    let mut u: Vec<f64> = problem
        .to_unit(x0)
        .iter()
        .map(|v| v.clamp(0.0, 1.0))
        .collect();
    let mut point = obj.eval(&u)?;
    let start_v = point.v;
    if point.v == 0.0 {
        return Ok(LocalSearchResult {
            terminal: problem.evaluate(x0)?,
            start_v,
            iterations: 0,
            converged: true,
        });
    }
    let h = config.gradient_step;
    let mut g = obj.gradient(&u, point.v, h)?;
    let identity = |d: usize| -> Vec<f64> {
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            m[i * d + i] = 1.0;
        }
        m
    };
    let mut hinv = identity(d);
    let mut fresh = true;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        iterations += 1;
        let blocked = |j: usize, dj: f64| (u[j] <= 0.0 && dj < 0.0) || (u[j] >= 1.0 && dj > 0.0);
        let mut dir: Vec<f64> = (0..d)
            .map(|i| -(0..d).map(|k| hinv[i * d + k] * g[k]).sum::<f64>())
            .collect();
        for (j, dj) in dir.iter_mut().enumerate() {
            if blocked(j, *dj) {
                *dj = 0.0;
            }
        }
        if dot(&dir, &g) >= 0.0 || !dir.iter().all(|v| v.is_finite()) {
            hinv = identity(d);
            fresh = true;
            dir = g.iter().map(|&gj| -gj).collect();
            for (j, dj) in dir.iter_mut().enumerate() {
                if blocked(j, *dj) {
                    *dj = 0.0;
                }
            }
        }
        let len = norm(&dir);
        if len == 0.0 || !len.is_finite() {
            converged = true;
            break;
        }
        // Keep trial steps inside a box-sized trust region.
        let cap = 0.5;
        if len > cap {
            for v in &mut dir {
                *v *= cap / len;
            }
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = u
                .iter()
                .zip(&dir)
                .map(|(&ui, &di)| (ui + t * di).clamp(0.0, 1.0))
                .collect();
            let s: Vec<f64> = trial.iter().zip(&u).map(|(a, b)| a - b).collect();
            if norm(&s) < config.step_tolerance {
                break;
            }
            let p = obj.eval(&trial)?;
            if p.v <= point.v && p.v <= point.v + 1e-4 * dot(&g, &s) {
                accepted = Some((trial, s, p));
                break;
            }
            t *= 0.5;
        }
        let Some((next, s, next_point)) = accepted else {
            converged = true;
            break;
        };
        let step = norm(&s);
        u = next;
        point = next_point;
        if point.v == 0.0 || step < config.step_tolerance {
            converged = true;
            break;
        }
        let g_next = obj.gradient(&u, point.v, h)?;
        let y: Vec<f64> = g_next.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) && sy > 0.0 {
            if fresh {
                let scale = sy / dot(&y, &y);
                for v in &mut hinv {
                    *v *= scale;
                }
                fresh = false;
            }
            // H+ = (I - r s y^T) H (I - r y s^T) + r s s^T
            let r = 1.0 / sy;
            let hy: Vec<f64> = (0..d)
                .map(|i| (0..d).map(|k| hinv[i * d + k] * y[k]).sum())
                .collect();
            let yhy = dot(&y, &hy);
            for i in 0..d {
                for k in 0..d {
                    hinv[i * d + k] +=
                        -r * (s[i] * hy[k] + hy[i] * s[k]) + (r * r * yhy + r) * s[i] * s[k];
                }
            }
        }
        g = g_next;
    }
    let terminal = problem.evaluate(&problem.from_unit(&u))?;
    debug_assert!(terminal.v <= start_v);
    Ok(LocalSearchResult {
        terminal,
        start_v,
        iterations,
        converged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Basin {
    /// Fraction of all starts whose terminal lies in this basin's cluster.
    pub size: f64,
    pub terminals: usize,
    /// Minimum terminal violation in the cluster.
    pub v: f64,
    pub feasible: bool,
    /// Nondominated feasible terminals in the cluster.
    pub nondominated: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinFeatures {
    pub n_basins: Option<usize>,
    pub b_min: Option<f64>,
    pub b_med: Option<f64>,
    pub b_max: Option<f64>,
    pub bf_min: Option<f64>,
    pub bf_med: Option<f64>,
    pub bf_max: Option<f64>,
    pub union_bf: Option<f64>,
    pub v_med: Option<f64>,
    pub v_max: Option<f64>,
    pub v_of_bmax: Option<f64>,
    pub opt_in_bmax: Option<f64>,
    pub b_opt: Option<f64>,
}

impl BasinFeatures {
    fn undefined() -> Self {
        BasinFeatures {
            n_basins: None,
            b_min: None,
            b_med: None,
            b_max: None,
            bf_min: None,
            bf_med: None,
            bf_max: None,
            union_bf: None,
            v_med: None,
            v_max: None,
            v_of_bmax: None,
            opt_in_bmax: None,
            b_opt: None,
        }
    }

    pub fn to_set(&self) -> FeatureSet {
        let mut s = FeatureSet::new();
        s.set(FeatureName::NBasin, self.n_basins.map(|n| n as f64));
        s.set(FeatureName::BasinMin, self.b_min);
        s.set(FeatureName::BasinMed, self.b_med);
        s.set(FeatureName::BasinMax, self.b_max);
        s.set(FeatureName::FbasinMin, self.bf_min);
        s.set(FeatureName::FbasinMed, self.bf_med);
        s.set(FeatureName::FbasinMax, self.bf_max);
        s.set(FeatureName::UnionFbasin, self.union_bf);
        s.set(FeatureName::VBasinMed, self.v_med);
        s.set(FeatureName::VBasinMax, self.v_max);
        s.set(FeatureName::VBasinOfMax, self.v_of_bmax);
        s.set(FeatureName::OptBasinMax, self.opt_in_bmax);
        s.set(FeatureName::BasinOpt, self.b_opt);
        s
    }
}

#[derive(Debug, Clone)]
pub struct BasinAnalysis {
    pub features: BasinFeatures,
    pub basins: Vec<Basin>,
    /// One entry per start; `None` where the search hit a non-finite value.
    pub results: Vec<Option<LocalSearchResult>>,
    /// Start indices of the clustered terminals, aligned with `labeling`.
    pub valid: Vec<usize>,
    pub labeling: ClusterLabeling,
    /// Fraction of starts whose terminal is DBSCAN noise.
    pub noise_mass: f64,
}

/// Local search from every start, then clustering of the terminals.
pub fn analyze_basins(
    problem: &ProblemInstance,
    starts: &[Vec<f64>],
    config: &AdaptiveWalkConfig,
) -> Result<BasinAnalysis> {
    let ls = config.local_search;
    let results: Vec<Option<LocalSearchResult>> = starts
        .par_iter()
        .map(|x0| match local_search(problem, x0, &ls) {
            Ok(r) => Ok(Some(r)),
            Err(Error::NonFinite(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    analyze_terminals(problem, results, &config.dbscan, &ls)
}

/// Clusters precomputed local-search results.
pub fn analyze_terminals(
    problem: &ProblemInstance,
    results: Vec<Option<LocalSearchResult>>,
    params: &DbscanParams,
    ls: &LocalSearchConfig,
) -> Result<BasinAnalysis> {
    let total = results.len() as f64;
    let valid: Vec<usize> = (0..results.len())
        .filter(|&i| results[i].is_some())
        .collect();
    let terminal = |i: usize| &results[i].as_ref().expect("valid start").terminal;
    let unit: Vec<Vec<f64>> = valid
        .iter()
        .map(|&i| problem.to_unit(&terminal(i).x))
        .collect();
    let labeling = dbscan::cluster(&unit, params)?;
    if valid.is_empty() {
        return Ok(BasinAnalysis {
            features: BasinFeatures::undefined(),
            basins: vec![],
            results,
            valid,
            noise_mass: 0.0,
            labeling,
        });
    }

    let feasible_terms: Vec<usize> = (0..valid.len())
        .filter(|&j| ls.is_feasible(terminal(valid[j]).v))
        .collect();
    let objectives: Vec<&[f64]> = feasible_terms
        .iter()
        .map(|&j| terminal(valid[j]).f.as_slice())
        .collect();
    let nd_mask = nondominated_mask(&objectives);

    let k = labeling.n_clusters;
    let mut basins: Vec<Basin> = (0..k)
        .map(|_| Basin {
            size: 0.0,
            terminals: 0,
            v: f64::INFINITY,
            feasible: false,
            nondominated: 0,
        })
        .collect();
    for (j, &label) in labeling.labels.iter().enumerate() {
        if label >= 0 {
            let b = &mut basins[label as usize];
            b.terminals += 1;
            b.v = b.v.min(terminal(valid[j]).v);
        }
    }
    for (&j, &nd) in feasible_terms.iter().zip(&nd_mask) {
        let label = labeling.labels[j];
        if nd && label >= 0 {
            basins[label as usize].nondominated += 1;
        }
    }
    for b in &mut basins {
        b.size = b.terminals as f64 / total;
        b.feasible = ls.is_feasible(b.v);
    }
    let noise_mass = labeling.noise_count() as f64 / total;

    let sizes: Vec<f64> = basins.iter().map(|b| b.size).collect();
    let feasible_sizes: Vec<f64> = basins
        .iter()
        .filter(|b| b.feasible)
        .map(|b| b.size)
        .collect();
    let basin_v: Vec<f64> = basins.iter().map(|b| b.v).collect();
    let counts: Vec<usize> = basins.iter().map(|b| b.terminals).collect();
    let nd_counts: Vec<usize> = basins.iter().map(|b| b.nondominated).collect();
    let largest = argmax(&counts);
    let split = |v: Option<(f64, f64, f64)>| match v {
        Some((a, b, c)) => (Some(a), Some(b), Some(c)),
        None => (None, None, None),
    };
    let (b_min, b_med, b_max) = split(min_med_max(&sizes));
    let (bf_min, bf_med, bf_max) = split(min_med_max(&feasible_sizes));

    let features = BasinFeatures {
        n_basins: Some(k),
        b_min,
        b_med,
        b_max,
        bf_min,
        bf_med,
        bf_max,
        union_bf: Some(feasible_sizes.iter().fold(0.0, |a, b| a + b)),
        v_med: median(&basin_v),
        v_max: basin_v.iter().copied().reduce(f64::max),
        v_of_bmax: largest.map(|c| basins[c].v),
        opt_in_bmax: largest.map(|c| basins[c].nondominated as f64 / basins[c].terminals as f64),
        b_opt: argmax(&nd_counts)
            .filter(|&c| nd_counts[c] > 0)
            .map(|c| basins[c].size),
    };
    Ok(BasinAnalysis {
        features,
        basins,
        results,
        valid,
        labeling,
        noise_mass,
    })
}

/// Start sample used by the adaptive-walk family for `seed`.
pub fn plan(problem: &ProblemInstance, config: &AdaptiveWalkConfig, seed: u64) -> SamplePlan {
    SamplePlan::latin_hypercube(
        config.samples,
        problem.dimension(),
        derive_seed(seed, Stream::AdaptiveWalk),
    )
}

pub fn basin_features(
    problem: &ProblemInstance,
    config: &AdaptiveWalkConfig,
    seed: u64,
    cache: Option<&SampleCache>,
) -> Result<BasinFeatures> {
    let starts: Vec<Vec<f64>> = evaluate_plan(problem, &plan(problem, config, seed), cache)?
        .into_iter()
        .map(|p| p.x)
        .collect();
    Ok(analyze_basins(problem, &starts, config)?.features)
}
