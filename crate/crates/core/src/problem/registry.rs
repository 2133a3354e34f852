use std::fmt;
use std::sync::Arc;

use super::{
    CDtlz, CDtlzKind, Ctp, DasCmop, DasCmopDifficulty, DcDtlz, DcDtlzKind, Mw, Problem,
    ProblemInstance, DEFAULT_EQUALITY_TOLERANCE,
};
use crate::{Error, Result};

/// Builds a problem model for `(dimension, objectives)`.
pub type Constructor = Arc<dyn Fn(usize, usize) -> Result<Arc<dyn Problem>> + Send + Sync>;

/// Number of objectives a registered problem supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveCount {
    Fixed(usize),
    /// Any `M >= 2`; instantiated with `default` unless overridden.
    Scalable {
        default: usize,
    },
}

impl ObjectiveCount {
    pub fn default_count(self) -> usize {
        match self {
            ObjectiveCount::Fixed(m) | ObjectiveCount::Scalable { default: m } => m,
        }
    }
}

pub struct RegistryEntry {
    pub id: String,
    pub suite: String,
    pub objectives: ObjectiveCount,
    pub min_dimension: usize,
    constructor: Constructor,
}

impl fmt::Debug for RegistryEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RegistryEntry")
            .field("id", &self.id)
            .field("suite", &self.suite)
            .field("objectives", &self.objectives)
            .field("min_dimension", &self.min_dimension)
            .finish()
    }
}

/// Options for the built-in suites.
#[derive(Debug, Clone, Copy)]
pub struct BuiltinOptions {
    pub das_difficulty: DasCmopDifficulty,
    pub equality_tolerance: f64,
}

impl Default for BuiltinOptions {
    fn default() -> Self {
        BuiltinOptions {
            das_difficulty: DasCmopDifficulty::reference(),
            equality_tolerance: DEFAULT_EQUALITY_TOLERANCE,
        }
    }
}

/// Maps problem ids to constructors, in registration order.
///
/// Problems outside the built-in suites (for example real-world CMOPs) are
/// added with [`ProblemRegistry::register`].
#[derive(Debug, Default)]
pub struct ProblemRegistry {
    entries: Vec<RegistryEntry>,
    equality_tolerance: f64,
}

impl ProblemRegistry {
    pub fn new() -> Self {
        ProblemRegistry {
            entries: Vec::new(),
            equality_tolerance: DEFAULT_EQUALITY_TOLERANCE,
        }
    }

    pub fn with_builtins() -> Self {
        Self::with_builtin_options(BuiltinOptions::default())
    }

    pub fn with_builtin_options(options: BuiltinOptions) -> Self {
        let mut r = ProblemRegistry {
            entries: Vec::new(),
            equality_tolerance: options.equality_tolerance,
        };
        let scalable = ObjectiveCount::Scalable { default: 2 };
        let two = ObjectiveCount::Fixed(2);

        for (id, kind) in [
            ("C1-DTLZ1", CDtlzKind::C1Dtlz1),
            ("C1-DTLZ3", CDtlzKind::C1Dtlz3),
            ("C2-DTLZ2", CDtlzKind::C2Dtlz2),
            ("C3-DTLZ1", CDtlzKind::C3Dtlz1),
            ("C3-DTLZ4", CDtlzKind::C3Dtlz4),
        ] {
            r.push(id, "C-DTLZ", scalable, 2, move |d, m| {
                Ok(Arc::new(CDtlz::new(kind, d, m)?))
            });
        }
        for (id, kind) in [
            ("DC1-DTLZ1", DcDtlzKind::Dc1Dtlz1),
            ("DC1-DTLZ3", DcDtlzKind::Dc1Dtlz3),
            ("DC2-DTLZ1", DcDtlzKind::Dc2Dtlz1),
            ("DC2-DTLZ3", DcDtlzKind::Dc2Dtlz3),
            ("DC3-DTLZ1", DcDtlzKind::Dc3Dtlz1),
            ("DC3-DTLZ3", DcDtlzKind::Dc3Dtlz3),
        ] {
            r.push(id, "DC-DTLZ", scalable, 2, move |d, m| {
                Ok(Arc::new(DcDtlz::new(kind, d, m)?))
            });
        }
        let difficulty = options.das_difficulty;
        for n in 1..=9u8 {
            let (m, min_d) = if n <= 6 { (2, 2) } else { (3, 3) };
            r.push(
                &format!("DAS-CMOP{n}"),
                "DAS-CMOP",
                ObjectiveCount::Fixed(m),
                min_d,
                move |d, _| Ok(Arc::new(DasCmop::new(n, d, difficulty)?)),
            );
        }
        for n in 1..=14u8 {
            let objectives = if Mw::is_scalable(n) { scalable } else { two };
            r.push(&format!("MW{n}"), "MW", objectives, 2, move |d, m| {
                Ok(Arc::new(Mw::new(n, d, m)?))
            });
        }
        for n in 1..=8u8 {
            r.push(&format!("CTP{n}"), "CTP", two, 2, move |d, _| {
                Ok(Arc::new(Ctp::new(n, d)?))
            });
        }
        r
    }

    fn push(
        &mut self,
        id: &str,
        suite: &str,
        objectives: ObjectiveCount,
        min_dimension: usize,
        constructor: impl Fn(usize, usize) -> Result<Arc<dyn Problem>> + Send + Sync + 'static,
    ) {
        self.entries.push(RegistryEntry {
            id: id.to_string(),
            suite: suite.to_string(),
            objectives,
            min_dimension,
            constructor: Arc::new(constructor),
        });
    }

    /// Adds a problem. Fails if the id is already taken.
    pub fn register(
        &mut self,
        id: &str,
        suite: &str,
        objectives: ObjectiveCount,
        min_dimension: usize,
        constructor: impl Fn(usize, usize) -> Result<Arc<dyn Problem>> + Send + Sync + 'static,
    ) -> Result<()> {
        if self.get(id).is_some() {
            return Err(Error::InvalidParameter(format!(
                "problem id `{id}` is already registered"
            )));
        }
        self.push(id, suite, objectives, min_dimension.max(1), constructor);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&RegistryEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn entries(&self) -> impl Iterator<Item = &RegistryEntry> {
        self.entries.iter()
    }

    /// Entries of one suite, matched case-insensitively.
    pub fn suite<'a>(&'a self, suite: &'a str) -> impl Iterator<Item = &'a RegistryEntry> + 'a {
        self.entries
            .iter()
            .filter(move |e| e.suite.eq_ignore_ascii_case(suite))
    }

    /// Distinct suite names in registration order.
    pub fn suites(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.suite.as_str()) {
                out.push(&e.suite);
            }
        }
        out
    }

    pub fn instantiate(&self, id: &str, dimension: usize) -> Result<ProblemInstance> {
        let entry = self
            .get(id)
            .ok_or_else(|| Error::UnknownProblem(id.to_string()))?;
        self.build(entry, dimension, entry.objectives.default_count())
    }

    /// Instantiates a scalable problem with `objectives` objectives.
    pub fn instantiate_with_objectives(
        &self,
        id: &str,
        dimension: usize,
        objectives: usize,
    ) -> Result<ProblemInstance> {
        let entry = self
            .get(id)
            .ok_or_else(|| Error::UnknownProblem(id.to_string()))?;
        match entry.objectives {
            ObjectiveCount::Fixed(m) if m != objectives => Err(Error::InvalidParameter(format!(
                "{id} has a fixed number of objectives ({m})"
            ))),
            _ => self.build(entry, dimension, objectives),
        }
    }

    fn build(
        &self,
        entry: &RegistryEntry,
        dimension: usize,
        objectives: usize,
    ) -> Result<ProblemInstance> {
        let unsupported = |reason: String| Error::UnsupportedDimension {
            id: entry.id.clone(),
            dimension,
            reason,
        };
        if dimension < entry.min_dimension.max(objectives) {
            return Err(unsupported(format!(
                "needs at least {} variables",
                entry.min_dimension.max(objectives)
            )));
        }
        let model = (entry.constructor)(dimension, objectives).map_err(|e| match e {
            Error::InvalidParameter(reason) => unsupported(reason),
            other => other,
        })?;
        if model.dimension() != dimension {
            return Err(unsupported(format!(
                "constructor returned a {}-dimensional model",
                model.dimension()
            )));
        }
        ProblemInstance::new(entry.id.clone(), entry.suite.clone(), model)?
            .with_equality_tolerance(self.equality_tolerance)
    }
}
