//! Space-filling design features: feasible components found by clustering
//! the feasible part of a Latin hypercube sample.

use crate::dbscan::{self, ClusterLabeling, DbscanParams};
use crate::pareto::nondominated_filter;
use crate::problem::{EvaluatedPoint, ProblemInstance};
use crate::rng::{derive_seed, Stream};
use crate::sampling::{evaluate_plan, SampleCache, SamplePlan};
use crate::stats::{min_med_max, spearman};
use crate::Result;

use super::{FeatureName, FeatureSet, SpacefillConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SpacefillFeatures {
    pub n_components: usize,
    pub c_min: Option<f64>,
    pub c_med: Option<f64>,
    pub c_max: Option<f64>,
    pub opt_in_cmax: Option<f64>,
    pub c_opt: Option<f64>,
    pub feas_ratio: f64,
    pub corr_min: Option<f64>,
    pub corr_max: Option<f64>,
    pub boundary_opt: Option<f64>,
}

impl SpacefillFeatures {
    pub fn to_set(&self) -> FeatureSet {
        let mut s = FeatureSet::new();
        s.set(FeatureName::NCom, Some(self.n_components as f64));
        s.set(FeatureName::ComMin, self.c_min);
        s.set(FeatureName::ComMed, self.c_med);
        s.set(FeatureName::ComMax, self.c_max);
        s.set(FeatureName::OptComMax, self.opt_in_cmax);
        s.set(FeatureName::ComOpt, self.c_opt);
        s.set(FeatureName::RhoF, Some(self.feas_ratio));
        s.set(FeatureName::CorrMin, self.corr_min);
        s.set(FeatureName::CorrMax, self.corr_max);
        s.set(FeatureName::RhoBoundOpt, self.boundary_opt);
        s
    }
}

/// Intermediate results, kept for diagnostics and tests.
#[derive(Debug, Clone)]
pub struct SpacefillAnalysis {
    pub features: SpacefillFeatures,
    /// Sample indices of the feasible points, in sample order.
    pub feasible: Vec<usize>,
    /// DBSCAN labeling of the feasible points.
    pub labeling: ClusterLabeling,
    /// Nondominated flag per feasible point.
    pub nondominated: Vec<bool>,
}

/// Sample plan used by the space-filling family for `seed`.
pub fn plan(problem: &ProblemInstance, config: &SpacefillConfig, seed: u64) -> SamplePlan {
    SamplePlan::latin_hypercube(
        config.samples,
        problem.dimension(),
        derive_seed(seed, Stream::SpaceFill),
    )
}

pub fn spacefill_features(
    problem: &ProblemInstance,
    config: &SpacefillConfig,
    seed: u64,
    cache: Option<&SampleCache>,
) -> Result<SpacefillFeatures> {
    let sample = evaluate_plan(problem, &plan(problem, config, seed), cache)?;
    Ok(analyze(problem, &sample, &config.dbscan)?.features)
}

/// Number of feasible components among the feasible points of `sample`.
pub fn count_components(
    problem: &ProblemInstance,
    sample: &[EvaluatedPoint],
    params: &DbscanParams,
) -> Result<usize> {
    let unit: Vec<Vec<f64>> = sample
        .iter()
        .filter(|p| p.is_feasible)
        .map(|p| problem.to_unit(&p.x))
        .collect();
    Ok(dbscan::cluster(&unit, params)?.n_clusters)
}

/// Computes the features from an evaluated sample.
pub fn analyze(
    problem: &ProblemInstance,
    sample: &[EvaluatedPoint],
    params: &DbscanParams,
) -> Result<SpacefillAnalysis> {
    let n = sample.len() as f64;
    let feasible: Vec<usize> = (0..sample.len())
        .filter(|&i| sample[i].is_feasible)
        .collect();
    let unit: Vec<Vec<f64>> = feasible
        .iter()
        .map(|&i| problem.to_unit(&sample[i].x))
        .collect();
    let labeling = dbscan::cluster(&unit, params)?;
    let feasible_points: Vec<EvaluatedPoint> =
        feasible.iter().map(|&i| sample[i].clone()).collect();
    let nondominated = nondominated_filter(&feasible_points, true);

    let k = labeling.n_clusters;
    let sizes = labeling.cluster_sizes();
    let mut nd_per_cluster = vec![0usize; k];
    for (j, &nd) in nondominated.iter().enumerate() {
        if nd && labeling.labels[j] >= 0 {
            nd_per_cluster[labeling.labels[j] as usize] += 1;
        }
    }
    let fractions: Vec<f64> = sizes.iter().map(|&s| s as f64 / n).collect();
    let (c_min, c_med, c_max) = match min_med_max(&fractions) {
        Some((a, b, c)) => (Some(a), Some(b), Some(c)),
        None => (None, None, None),
    };
    // Ties go to the lowest cluster label.
    let largest = argmax(&sizes);
    let opt_in_cmax = largest.map(|c| nd_per_cluster[c] as f64 / sizes[c] as f64);
    let c_opt = argmax(&nd_per_cluster)
        .filter(|&c| nd_per_cluster[c] > 0)
        .map(|c| fractions[c]);

    let v: Vec<f64> = sample.iter().map(|p| p.v).collect();
    let correlations: Vec<f64> = (0..problem.num_objectives())
        .filter_map(|m| {
            let fm: Vec<f64> = sample.iter().map(|p| p.f[m]).collect();
            spearman(&fm, &v)
        })
        .collect();
    let corr_min = correlations.iter().copied().reduce(f64::min);
    let corr_max = correlations.iter().copied().reduce(f64::max);

    let nd_total = nondominated.iter().filter(|&&b| b).count();
    let boundary_opt = (nd_total > 0).then(|| {
        let on_border = (0..feasible.len())
            .filter(|&j| nondominated[j] && labeling.is_border(j))
            .count();
        on_border as f64 / nd_total as f64
    });

    let features = SpacefillFeatures {
        n_components: k,
        c_min,
        c_med,
        c_max,
        opt_in_cmax,
        c_opt,
        feas_ratio: feasible.len() as f64 / n,
        corr_min,
        corr_max,
        boundary_opt,
    };
    Ok(SpacefillAnalysis {
        features,
        feasible,
        labeling,
        nondominated,
    })
}

/// Index of the first maximum.
pub(crate) fn argmax(values: &[usize]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Problem, RawEvaluation};
    use std::sync::Arc;

    /// Two objectives; the first equals the violation `max(0, x1 - 0.5)`.
    #[derive(Debug)]
    struct Toy;

    impl Problem for Toy {
        fn dimension(&self) -> usize {
            2
        }
        fn bounds(&self) -> Vec<(f64, f64)> {
            vec![(0.0, 1.0); 2]
        }
        fn num_objectives(&self) -> usize {
            2
        }
        fn num_inequality(&self) -> usize {
            1
        }
        fn evaluate(&self, x: &[f64]) -> RawEvaluation {
            RawEvaluation {
                objectives: vec![x[0], -x[0]],
                inequalities: vec![x[0] - 0.5],
                equalities: vec![],
            }
        }
    }

    #[test]
    fn toy_problem_features() {
        let p = ProblemInstance::new("toy", "test", Arc::new(Toy)).unwrap();
        let cfg = SpacefillConfig {
            samples: 4000,
            dbscan: DbscanParams::new(0.05, 5).unwrap(),
        };
        let f = spacefill_features(&p, &cfg, 1, None).unwrap();
        assert_eq!(f.n_components, 1);
        assert!((f.feas_ratio - 0.5).abs() < 1e-3);
        assert!(f.c_max.unwrap() <= f.feas_ratio + 1e-12);
        // f1 = x1 is monotone in v = max(0, x1 - 0.5) but with ties at 0.
        assert!(f.corr_max.unwrap() > 0.8);
        assert!(f.corr_min.unwrap() < -0.8);
        assert!(f.c_opt.is_some());
    }

    #[test]
    fn argmax_prefers_first() {
        assert_eq!(argmax(&[1, 3, 3]), Some(1));
        assert_eq!(argmax(&[]), None);
    }
}
