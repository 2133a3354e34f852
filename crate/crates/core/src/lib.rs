//! Exploratory landscape analysis for constrained multiobjective optimization
//! problems (CMOPs).
//!
//! The crate computes 29 landscape features in four families:
//!
//! - space-filling design ([`features::spacefill`]): feasible components found by
//!   clustering the feasible part of a Latin hypercube sample,
//! - information content ([`features::infocontent`]) of the constraint-violation
//!   sequence along a nearest-neighbour tour,
//! - random walks ([`features::randomwalk`]): ratios of feasible boundary crossings,
//! - adaptive walks ([`features::adaptivewalk`]): basins of attraction of the
//!   violation landscape under a deterministic local search.
//!
//! Feature records from many problems can be compared with the suite coverage
//! metric in [`coverage`].
//!
//! ```
//! use cmop_ela::problem::ProblemRegistry;
//!
//! let registry = ProblemRegistry::with_builtins();
//! let problem = registry.instantiate("C2-DTLZ2", 2).unwrap();
//! let point = problem.evaluate(&[0.1, 0.5]).unwrap();
//! assert!(point.is_feasible);
//! ```

pub mod coverage;
pub mod dbscan;
mod error;
pub mod features;
pub mod gridscan;
pub mod pareto;
pub mod problem;
pub mod rng;
pub mod sampling;
pub mod sensitivity;
pub mod stats;

pub use error::{Error, Result};
pub use features::{FeatureName, FeatureRecord, FeatureSet, FEATURE_NAMES};
pub use problem::{EvaluatedPoint, ProblemInstance, ProblemRegistry};
