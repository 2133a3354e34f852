//! Sensitivity of the feasible-component count to sample size and
//! clustering radius.

use serde::{Deserialize, Serialize};

use crate::dbscan::DbscanParams;
use crate::features::spacefill::count_components;
use crate::problem::ProblemInstance;
use crate::rng::{derive_seed, Stream};
use crate::sampling::{evaluate_plan, SampleCache, SamplePlan};
use crate::stats::median;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub repetitions: usize,
    pub min_samples: usize,
}

impl Default for SweepConfig {
    /// Sizes 10k to 500k, radii 0.01 to 0.15, 30 repetitions.
    fn default() -> Self {
        SweepConfig {
            sizes: vec![10_000, 25_000, 50_000, 100_000, 250_000, 500_000],
            epsilons: (1..=15).map(|i| f64::from(i) / 100.0).collect(),
            repetitions: 30,
            min_samples: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub samples: usize,
    pub epsilon: f64,
    /// Component count per repetition.
    pub counts: Vec<usize>,
    /// Median of `ln(1 + |count - exact| / exact)` over repetitions.
    pub score: f64,
    /// Repetitions that found exactly `exact` components.
    pub hits: usize,
}

/// `ln(1 + |found - exact| / exact)`; zero for a perfect match.
pub fn log_difference(found: usize, exact: usize) -> f64 {
    let diff = found.abs_diff(exact) as f64;
    (diff / exact.max(1) as f64).ln_1p()
}

/// Sample plan of repetition `rep` at size `samples`.
pub fn repetition_plan(dimension: usize, samples: usize, seed: u64, rep: usize) -> SamplePlan {
    SamplePlan::latin_hypercube(
        samples,
        dimension,
        derive_seed(seed, Stream::Repetition(rep as u32)),
    )
}

/// Runs every (size, radius) combination `repetitions` times. Each
/// repetition's sample is evaluated once and clustered at every radius.
pub fn sweep(
    problem: &ProblemInstance,
    exact: usize,
    config: &SweepConfig,
    seed: u64,
    cache: Option<&SampleCache>,
) -> Result<Vec<SweepCell>> {
    if config.repetitions == 0 || config.sizes.is_empty() || config.epsilons.is_empty() {
        return Err(Error::InvalidParameter("empty sensitivity sweep".into()));
    }
    let params: Vec<DbscanParams> = config
        .epsilons
        .iter()
        .map(|&e| DbscanParams::new(e, config.min_samples))
        .collect::<Result<_>>()?;
    let mut cells = Vec::new();
    for &samples in &config.sizes {
        let mut counts = vec![Vec::with_capacity(config.repetitions); params.len()];
        for rep in 0..config.repetitions {
            let plan = repetition_plan(problem.dimension(), samples, seed, rep);
            let sample = evaluate_plan(problem, &plan, cache)?;
            for (k, p) in params.iter().enumerate() {
                counts[k].push(count_components(problem, &sample, p)?);
            }
        }
        for (p, counts) in params.iter().zip(counts) {
            let scores: Vec<f64> = counts.iter().map(|&c| log_difference(c, exact)).collect();
            cells.push(SweepCell {
                samples,
                epsilon: p.epsilon,
                hits: counts.iter().filter(|&&c| c == exact).count(),
                score: median(&scores).expect("repetitions > 0"),
                counts,
            });
        }
    }
    Ok(cells)
}

/// Writes `samples,epsilon,score,hits,repetitions` rows.
pub fn write_summary_csv<W: std::io::Write>(cells: &[SweepCell], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["samples", "epsilon", "score", "hits", "repetitions"])?;
    for c in cells {
        w.write_record([
            c.samples.to_string(),
            c.epsilon.to_string(),
            c.score.to_string(),
            c.hits.to_string(),
            c.counts.len().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `samples,epsilon,repetition,n_com` rows.
pub fn write_counts_csv<W: std::io::Write>(cells: &[SweepCell], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["samples", "epsilon", "repetition", "n_com"])?;
    for c in cells {
        for (rep, n) in c.counts.iter().enumerate() {
            w.write_record([
                c.samples.to_string(),
                c.epsilon.to_string(),
                rep.to_string(),
                n.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
