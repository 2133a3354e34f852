//! Constrained multiobjective problems, overall constraint violation and
//! Pareto dominance.
//!
//! A problem model implements [`Problem`] and reports raw objective,
//! inequality (`g(x) <= 0`) and equality (`h(x) = 0`) values. Wrapping it in a
//! [`ProblemInstance`] adds bounds checking and the violation model: each
//! equality is relaxed to `|h(x)| - eta <= 0` and the overall violation is
//! `v(x) = sum_i max(0, g_i(x))`.

mod ctp;
mod dascmop;
mod dtlz;
mod mw;
mod registry;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use ctp::Ctp;
pub use dascmop::{DasCmop, DasCmopDifficulty};
pub use dtlz::{CDtlz, CDtlzKind, DcDtlz, DcDtlzKind};
pub use mw::Mw;
pub use registry::{BuiltinOptions, Constructor, ObjectiveCount, ProblemRegistry, RegistryEntry};

/// Default tolerance used to relax equality constraints.
pub const DEFAULT_EQUALITY_TOLERANCE: f64 = 1e-4;

/// Raw output of a problem model before the violation model is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RawEvaluation {
    pub objectives: Vec<f64>,
    /// Inequality constraints in `g(x) <= 0` form.
    pub inequalities: Vec<f64>,
    /// Equality constraints in `h(x) = 0` form.
    pub equalities: Vec<f64>,
}

/// A box-constrained CMOP model.
///
/// Implementations must be pure: the same input yields bitwise-identical
/// output, and the model is shared between worker threads.
pub trait Problem: Send + Sync + fmt::Debug {
    fn dimension(&self) -> usize;
    fn bounds(&self) -> Vec<(f64, f64)>;
    fn num_objectives(&self) -> usize;
    fn num_inequality(&self) -> usize;
    fn num_equality(&self) -> usize {
        0
    }
    /// Evaluates an in-bounds point of length [`Problem::dimension`].
    fn evaluate(&self, x: &[f64]) -> RawEvaluation;
}

/// A search vector together with its objective and constraint values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedPoint {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    /// Constraint values in `g(x) <= 0` form, equalities already relaxed.
    pub g: Vec<f64>,
    /// Overall constraint violation.
    pub v: f64,
    pub is_feasible: bool,
}

impl EvaluatedPoint {
    pub fn new(x: Vec<f64>, f: Vec<f64>, g: Vec<f64>) -> Self {
        let v = overall_violation(&g);
        EvaluatedPoint {
            x,
            f,
            g,
            v,
            is_feasible: v == 0.0,
        }
    }
}

/// Overall constraint violation: the sum of the positive parts of `g`.
pub fn overall_violation(g: &[f64]) -> f64 {
    g.iter().map(|&gi| gi.max(0.0)).sum()
}

/// Relaxes an equality value `h` into inequality form `|h| - eta`.
pub fn relax_equality(h: f64, eta: f64) -> f64 {
    h.abs() - eta
}

/// `true` iff `a` is no worse than `b` in every objective and strictly better in
/// at least one.
///
/// Both slices must have the same length; this is not checked here.
#[inline]
pub fn objectives_dominate(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strict = false;
    for (&fa, &fb) in a.iter().zip(b) {
        if fa > fb {
            return false;
        }
        if fa < fb {
            strict = true;
        }
    }
    strict
}

/// Pareto dominance between two evaluated points of the same problem.
///
/// Only a feasible point can dominate; an infeasible `a` never dominates.
pub fn dominates(a: &EvaluatedPoint, b: &EvaluatedPoint) -> Result<bool> {
    if a.f.len() != b.f.len() {
        return Err(Error::ObjectiveMismatch(a.f.len(), b.f.len()));
    }
    Ok(a.is_feasible && objectives_dominate(&a.f, &b.f))
}

/// A registered CMOP at a concrete dimension.
///
/// Cheap to clone; the underlying model is shared and immutable.
#[derive(Clone)]
pub struct ProblemInstance {
    id: String,
    suite: String,
    bounds: Vec<(f64, f64)>,
    num_objectives: usize,
    num_inequality: usize,
    num_equality: usize,
    equality_tolerance: f64,
    model: Arc<dyn Problem>,
}

impl fmt::Debug for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("id", &self.id)
            .field("suite", &self.suite)
            .field("dimension", &self.dimension())
            .field("num_objectives", &self.num_objectives)
            .field("num_inequality", &self.num_inequality)
            .field("num_equality", &self.num_equality)
            .field("equality_tolerance", &self.equality_tolerance)
            .finish()
    }
}

impl ProblemInstance {
    pub fn new(
        id: impl Into<String>,
        suite: impl Into<String>,
        model: Arc<dyn Problem>,
    ) -> Result<Self> {
        let bounds = model.bounds();
        if bounds.len() != model.dimension() || bounds.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "model reports dimension {} but {} bounds",
                model.dimension(),
                bounds.len()
            )));
        }
        if let Some((i, &(lo, hi))) = bounds
            .iter()
            .enumerate()
            .find(|(_, (lo, hi))| !(lo.is_finite() && hi.is_finite() && lo < hi))
        {
            return Err(Error::InvalidParameter(format!(
                "bound {i} is not a finite interval with lower < upper: [{lo}, {hi}]"
            )));
        }
        if model.num_objectives() == 0 {
            return Err(Error::InvalidParameter("problem has no objectives".into()));
        }
        Ok(ProblemInstance {
            id: id.into(),
            suite: suite.into(),
            num_objectives: model.num_objectives(),
            num_inequality: model.num_inequality(),
            num_equality: model.num_equality(),
            equality_tolerance: DEFAULT_EQUALITY_TOLERANCE,
            bounds,
            model,
        })
    }

    /// Overrides the equality relaxation tolerance (default `1e-4`).
    pub fn with_equality_tolerance(mut self, eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "equality tolerance must be positive, got {eta}"
            )));
        }
        self.equality_tolerance = eta;
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn suite(&self) -> &str {
        &self.suite
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn num_objectives(&self) -> usize {
        self.num_objectives
    }

    pub fn num_inequality(&self) -> usize {
        self.num_inequality
    }

    pub fn num_equality(&self) -> usize {
        self.num_equality
    }

    pub fn num_constraints(&self) -> usize {
        self.num_inequality + self.num_equality
    }

    pub fn equality_tolerance(&self) -> f64 {
        self.equality_tolerance
    }

    /// Rejects vectors of the wrong length or with components outside the box.
    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: x.len(),
            });
        }
        for (index, (&value, &(lower, upper))) in x.iter().zip(&self.bounds).enumerate() {
            if !(value >= lower && value <= upper) {
                return Err(Error::OutOfBounds {
                    index,
                    value,
                    lower,
                    upper,
                });
            }
        }
        Ok(())
    }

    /// Evaluates `x`, relaxing equalities and aggregating the violation.
    pub fn evaluate(&self, x: &[f64]) -> Result<EvaluatedPoint> {
        self.check_point(x)?;
        let raw = self.model.evaluate(x);
        debug_assert_eq!(raw.objectives.len(), self.num_objectives);
        debug_assert_eq!(raw.inequalities.len(), self.num_inequality);
        debug_assert_eq!(raw.equalities.len(), self.num_equality);
        let mut g = raw.inequalities;
        g.extend(
            raw.equalities
                .iter()
                .map(|&h| relax_equality(h, self.equality_tolerance)),
        );
        Ok(EvaluatedPoint::new(x.to_vec(), raw.objectives, g))
    }

    /// Overall constraint violation at `x`.
    pub fn violation(&self, x: &[f64]) -> Result<f64> {
        self.evaluate(x).map(|p| p.v)
    }

    /// Maps a point of the problem box onto the unit box.
    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.bounds)
            .map(|(&xi, &(lo, hi))| (xi - lo) / (hi - lo))
            .collect()
    }

    /// Maps a point of the unit box into the problem box, clamped to the bounds.
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(&self.bounds)
            .map(|(&ui, &(lo, hi))| (lo + ui * (hi - lo)).clamp(lo, hi))
            .collect()
    }

    pub fn summary(&self) -> ProblemSummary {
        ProblemSummary {
            id: self.id.clone(),
            suite: self.suite.clone(),
            dimension: self.dimension(),
            objectives: self.num_objectives,
            constraints: self.num_constraints(),
            bounds: self.bounds.clone(),
        }
    }
}

/// Row of the exported problem list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSummary {
    pub id: String,
    pub suite: String,
    pub dimension: usize,
    pub objectives: usize,
    pub constraints: usize,
    pub bounds: Vec<(f64, f64)>,
}

/// Square root that treats tiny negative round-off as zero.
#[inline]
pub(crate) fn sqrt0(x: f64) -> f64 {
    x.max(0.0).sqrt()
}
