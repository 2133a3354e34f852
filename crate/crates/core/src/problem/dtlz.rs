//! Constrained DTLZ problems (C-DTLZ and DC-DTLZ).

use std::f64::consts::PI;

use super::{Problem, RawEvaluation};
use crate::{Error, Result};

/// Distance function applied to the last `k` variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Distance {
    /// Multimodal distance of DTLZ1 and DTLZ3.
    Rastrigin,
    /// Sphere distance of DTLZ2 and DTLZ4.
    Sphere,
}

/// Shape of the unconstrained front.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Front {
    Linear,
    Spherical { alpha: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Dtlz {
    dimension: usize,
    objectives: usize,
    distance: Distance,
    front: Front,
}

impl Dtlz {
    fn new(dimension: usize, objectives: usize, distance: Distance, front: Front) -> Result<Self> {
        if objectives < 2 || dimension < objectives {
            return Err(Error::InvalidParameter(format!(
                "DTLZ problems need 2 <= M <= D, got D={dimension}, M={objectives}"
            )));
        }
        Ok(Dtlz {
            dimension,
            objectives,
            distance,
            front,
        })
    }

    fn k(&self) -> usize {
        self.dimension - self.objectives + 1
    }

    /// Returns the objectives and the distance value `g`.
    fn evaluate(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let m = self.objectives;
        let (xp, xm) = x.split_at(m - 1);
        let g = match self.distance {
            Distance::Rastrigin => {
                100.0
                    * (self.k() as f64
                        + xm.iter()
                            .map(|&xi| (xi - 0.5).powi(2) - (20.0 * PI * (xi - 0.5)).cos())
                            .sum::<f64>())
            }
            Distance::Sphere => xm.iter().map(|&xi| (xi - 0.5).powi(2)).sum(),
        };
        let f = (0..m)
            .map(|i| {
                let head = &xp[..m - 1 - i];
                match self.front {
                    Front::Linear => {
                        let mut fi = 0.5 * (1.0 + g) * head.iter().product::<f64>();
                        if i > 0 {
                            fi *= 1.0 - xp[m - 1 - i];
                        }
                        fi
                    }
                    Front::Spherical { alpha } => {
                        let mut fi = (1.0 + g)
                            * head
                                .iter()
                                .map(|&xj| (xj.powf(alpha) * PI / 2.0).cos())
                                .product::<f64>();
                        if i > 0 {
                            fi *= (xp[m - 1 - i].powf(alpha) * PI / 2.0).sin();
                        }
                        fi
                    }
                }
            })
            .collect();
        (f, g)
    }
}

/// Variant of the C-DTLZ suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CDtlzKind {
    C1Dtlz1,
    C1Dtlz3,
    C2Dtlz2,
    C3Dtlz1,
    C3Dtlz4,
}

/// C-DTLZ problem: DTLZ objectives with constraints defined in objective space.
#[derive(Debug, Clone)]
pub struct CDtlz {
    kind: CDtlzKind,
    base: Dtlz,
    radius: f64,
}

impl CDtlz {
    pub fn new(kind: CDtlzKind, dimension: usize, objectives: usize) -> Result<Self> {
        let (distance, front) = match kind {
            CDtlzKind::C1Dtlz1 | CDtlzKind::C3Dtlz1 => (Distance::Rastrigin, Front::Linear),
            CDtlzKind::C1Dtlz3 => (Distance::Rastrigin, Front::Spherical { alpha: 1.0 }),
            CDtlzKind::C2Dtlz2 => (Distance::Sphere, Front::Spherical { alpha: 1.0 }),
            CDtlzKind::C3Dtlz4 => (Distance::Sphere, Front::Spherical { alpha: 100.0 }),
        };
        let radius = match kind {
            CDtlzKind::C1Dtlz3 => match objectives {
                ..=3 => 9.0,
                4..=12 => 12.5,
                _ => 15.0,
            },
            CDtlzKind::C2Dtlz2 => match objectives {
                2 => 0.2,
                3 => 0.4,
                _ => 0.5,
            },
            _ => 0.0,
        };
        Ok(CDtlz {
            kind,
            base: Dtlz::new(dimension, objectives, distance, front)?,
            radius,
        })
    }
}

impl Problem for CDtlz {
    fn dimension(&self) -> usize {
        self.base.dimension
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0); self.base.dimension]
    }

    fn num_objectives(&self) -> usize {
        self.base.objectives
    }

    fn num_inequality(&self) -> usize {
        match self.kind {
            CDtlzKind::C3Dtlz1 | CDtlzKind::C3Dtlz4 => self.base.objectives,
            _ => 1,
        }
    }

    fn evaluate(&self, x: &[f64]) -> RawEvaluation {
        let (f, _) = self.base.evaluate(x);
        let m = f.len();
        let sum: f64 = f.iter().sum();
        let sum_sq: f64 = f.iter().map(|fi| fi * fi).sum();
        let inequalities = match self.kind {
            CDtlzKind::C1Dtlz1 => {
                let head: f64 = f[..m - 1].iter().map(|fi| fi / 0.5).sum();
                vec![-(1.0 - f[m - 1] / 0.6 - head)]
            }
            CDtlzKind::C1Dtlz3 => {
                vec![-(sum_sq - 16.0) * (sum_sq - self.radius * self.radius)]
            }
            CDtlzKind::C2Dtlz2 => {
                let r2 = self.radius * self.radius;
                let v1 = f
                    .iter()
                    .map(|fi| (fi - 1.0).powi(2) + (sum_sq - fi * fi) - r2)
                    .fold(f64::INFINITY, f64::min);
                let a = 1.0 / (m as f64).sqrt();
                let v2 = f.iter().map(|fi| (fi - a).powi(2)).sum::<f64>() - r2;
                vec![v1.min(v2)]
            }
            CDtlzKind::C3Dtlz1 => f.iter().map(|fi| 1.0 - fi / 0.5 - (sum - fi)).collect(),
            CDtlzKind::C3Dtlz4 => f
                .iter()
                .map(|fi| 1.0 - fi * fi / 4.0 - (sum_sq - fi * fi))
                .collect(),
        };
        RawEvaluation {
            objectives: f,
            inequalities,
            equalities: vec![],
        }
    }
}

/// Variant of the DC-DTLZ suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcDtlzKind {
    Dc1Dtlz1,
    Dc1Dtlz3,
    Dc2Dtlz1,
    Dc2Dtlz3,
    Dc3Dtlz1,
    Dc3Dtlz3,
}

/// DC-DTLZ problem: DTLZ objectives with constraints on the decision vector or
/// on the distance function.
#[derive(Debug, Clone)]
pub struct DcDtlz {
    kind: DcDtlzKind,
    base: Dtlz,
}

impl DcDtlz {
    pub fn new(kind: DcDtlzKind, dimension: usize, objectives: usize) -> Result<Self> {
        let front = match kind {
            DcDtlzKind::Dc1Dtlz1 | DcDtlzKind::Dc2Dtlz1 | DcDtlzKind::Dc3Dtlz1 => Front::Linear,
            _ => Front::Spherical { alpha: 1.0 },
        };
        Ok(DcDtlz {
            kind,
            base: Dtlz::new(dimension, objectives, Distance::Rastrigin, front)?,
        })
    }
}

impl Problem for DcDtlz {
    fn dimension(&self) -> usize {
        self.base.dimension
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0); self.base.dimension]
    }

    fn num_objectives(&self) -> usize {
        self.base.objectives
    }

    fn num_inequality(&self) -> usize {
        match self.kind {
            DcDtlzKind::Dc1Dtlz1 | DcDtlzKind::Dc1Dtlz3 => 1,
            DcDtlzKind::Dc2Dtlz1 | DcDtlzKind::Dc2Dtlz3 => 2,
            DcDtlzKind::Dc3Dtlz1 | DcDtlzKind::Dc3Dtlz3 => self.base.objectives,
        }
    }

    fn evaluate(&self, x: &[f64]) -> RawEvaluation {
        let (f, g) = self.base.evaluate(x);
        let inequalities = match self.kind {
            DcDtlzKind::Dc1Dtlz1 | DcDtlzKind::Dc1Dtlz3 => {
                vec![0.95 - (5.0 * PI * x[0]).cos()]
            }
            DcDtlzKind::Dc2Dtlz1 | DcDtlzKind::Dc2Dtlz3 => {
                vec![0.9 - (g / 100.0 * PI * 3.0).cos(), 0.9 - (-g / 100.0).exp()]
            }
            DcDtlzKind::Dc3Dtlz1 | DcDtlzKind::Dc3Dtlz3 => {
                let m = self.base.objectives;
                std::iter::once(0.5 - (5.0 * PI * g).cos())
                    .chain(x[..m - 1].iter().map(|&xi| 0.5 - (5.0 * PI * xi).cos()))
                    .collect()
            }
        };
        RawEvaluation {
            objectives: f,
            inequalities,
            equalities: vec![],
        }
    }
}
