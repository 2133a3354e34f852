//! DAS-CMOP problems with a configurable difficulty triplet.

use std::f64::consts::PI;

use super::{Problem, RawEvaluation};
use crate::{Error, Result};

/// Difficulty triplet `(eta, zeta, gamma)` controlling feasibility-,
/// convergence- and diversity-hardness, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DasCmopDifficulty {
    pub eta: f64,
    pub zeta: f64,
    pub gamma: f64,
}

impl DasCmopDifficulty {
    pub fn new(eta: f64, zeta: f64, gamma: f64) -> Result<Self> {
        for (name, value) in [("eta", eta), ("zeta", zeta), ("gamma", gamma)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidParameter(format!(
                    "DAS-CMOP difficulty {name} must lie in [0, 1], got {value}"
                )));
            }
        }
        Ok(DasCmopDifficulty { eta, zeta, gamma })
    }

    /// The triplet whose landscapes match the published reference figures.
    pub fn reference() -> Self {
        DasCmopDifficulty {
            eta: 0.0,
            zeta: 0.0,
            gamma: 0.5,
        }
    }
}

impl Default for DasCmopDifficulty {
    fn default() -> Self {
        Self::reference()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Distance {
    G1,
    G2,
    G3,
}

/// DAS-CMOP1 to DAS-CMOP9.
#[derive(Debug, Clone)]
pub struct DasCmop {
    number: u8,
    dimension: usize,
    difficulty: DasCmopDifficulty,
}

const P_K: [f64; 9] = [0.0, 1.0, 0.0, 1.0, 2.0, 0.0, 1.0, 2.0, 3.0];
const Q_K: [f64; 9] = [1.5, 0.5, 2.5, 1.5, 0.5, 3.5, 2.5, 1.5, 0.5];

impl DasCmop {
    pub fn new(number: u8, dimension: usize, difficulty: DasCmopDifficulty) -> Result<Self> {
        if !(1..=9).contains(&number) {
            return Err(Error::InvalidParameter(format!(
                "DAS-CMOP number must be 1..=9, got {number}"
            )));
        }
        let p = DasCmop {
            number,
            dimension,
            difficulty,
        };
        if dimension < p.objectives() {
            return Err(Error::InvalidParameter(format!(
                "DAS-CMOP{number} needs at least {} variables",
                p.objectives()
            )));
        }
        Ok(p)
    }

    fn objectives(&self) -> usize {
        if self.number <= 6 {
            2
        } else {
            3
        }
    }

    fn distance(&self) -> Distance {
        match self.number {
            1..=3 => Distance::G1,
            4..=8 => Distance::G2,
            _ => Distance::G3,
        }
    }

    fn g(&self, x: &[f64]) -> f64 {
        let m = self.objectives();
        let n = self.dimension as f64;
        let tail = &x[m - 1..];
        match self.distance() {
            Distance::G1 => {
                let s = (0.5 * PI * x[0]).sin();
                tail.iter().map(|&xi| (xi - s).powi(2)).sum()
            }
            Distance::G2 => {
                (n - m as f64 + 1.0)
                    + tail
                        .iter()
                        .map(|&xi| {
                            let z = xi - 0.5;
                            z * z - (20.0 * PI * z).cos()
                        })
                        .sum::<f64>()
            }
            Distance::G3 => tail
                .iter()
                .enumerate()
                .map(|(i, &xi)| {
                    let j = (m + i) as f64;
                    (xi - (0.25 * j / n * PI * (x[0] + x[1])).cos()).powi(2)
                })
                .sum(),
        }
    }

    /// Common pieces of the constraint set: `(b, d, e, r)`.
    fn parameters(&self) -> (f64, f64, f64, f64) {
        let DasCmopDifficulty { eta, zeta, gamma } = self.difficulty;
        let b = 2.0 * eta - 1.0;
        let d = if zeta != 0.0 { 0.5 } else { 0.0 };
        let e = if zeta > 0.0 { d - zeta.ln() } else { 1e30 };
        (b, d, e, 0.5 * gamma)
    }

    fn distance_constraint(&self, g: f64, d: f64, e: f64) -> f64 {
        if self.difficulty.zeta == 1.0 {
            1e-4 - (e - g).abs()
        } else {
            (e - g) * (g - d)
        }
    }
}

impl Problem for DasCmop {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0); self.dimension]
    }

    fn num_objectives(&self) -> usize {
        self.objectives()
    }

    fn num_inequality(&self) -> usize {
        if self.number <= 6 {
            11
        } else {
            7
        }
    }

    fn evaluate(&self, x: &[f64]) -> RawEvaluation {
        let g = self.g(x);
        let (b, d, e, r) = self.parameters();
        let a = 20.0;
        // Constraints are built in `c >= 0` form and negated at the end.
        let (objectives, c) = if self.number <= 6 {
            let f0 = x[0] + g;
            let f1 = match self.number {
                1 | 4 => 1.0 - x[0] * x[0] + g,
                2 | 5 => 1.0 - x[0].sqrt() + g,
                _ => 1.0 - x[0].sqrt() + 0.5 * (5.0 * PI * x[0]).sin().abs() + g,
            };
            let (st, ct) = (-0.25 * PI).sin_cos();
            let mut c = Vec::with_capacity(11);
            c.push((a * PI * x[0]).sin() - b);
            c.push(self.distance_constraint(g, d, e));
            for (&p, &q) in P_K.iter().zip(&Q_K) {
                let u = (f0 - p) * ct - (f1 - q) * st;
                let w = (f0 - p) * st + (f1 - q) * ct;
                c.push(u * u / 0.3 + w * w / 1.2 - r);
            }
            (vec![f0, f1], c)
        } else {
            let f = if self.number == 7 {
                vec![x[0] * x[1] + g, x[1] * (1.0 - x[0]) + g, 1.0 - x[1] + g]
            } else {
                let (s0, c0) = (0.5 * PI * x[0]).sin_cos();
                let (s1, c1) = (0.5 * PI * x[1]).sin_cos();
                vec![c0 * c1 + g, c0 * s1 + g, s0 + g]
            };
            let s = 1.0 / 3f64.sqrt();
            let centers = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [s, s, s]];
            let mut c = Vec::with_capacity(7);
            c.push((a * PI * x[0]).sin() - b);
            c.push((a * PI * x[1]).cos() - b);
            c.push(self.distance_constraint(g, d, e));
            for k in centers {
                c.push(
                    (f[0] - k[0]).powi(2) + (f[1] - k[1]).powi(2) + (f[2] - k[2]).powi(2) - r * r,
                );
            }
            (f, c)
        };
        RawEvaluation {
            objectives,
            inequalities: c.into_iter().map(|ci| -ci).collect(),
            equalities: vec![],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraint_and_objective_counts() {
        let d = DasCmopDifficulty::default();
        for n in 1..=6 {
            let p = DasCmop::new(n, 3, d).unwrap();
            let raw = p.evaluate(&[0.3, 0.4, 0.5]);
            assert_eq!(raw.objectives.len(), 2);
            assert_eq!(raw.inequalities.len(), 11);
        }
        for n in 7..=9 {
            let p = DasCmop::new(n, 3, d).unwrap();
            let raw = p.evaluate(&[0.3, 0.4, 0.5]);
            assert_eq!(raw.objectives.len(), 3);
            assert_eq!(raw.inequalities.len(), 7);
        }
        assert!(DasCmop::new(7, 2, d).is_err());
        assert!(DasCmop::new(10, 3, d).is_err());
        assert!(DasCmopDifficulty::new(0.5, 1.5, 0.5).is_err());
    }

    #[test]
    fn reference_triplet_relaxes_first_two_constraints() {
        // With eta = zeta = 0 the sine constraint and the distance band are
        // always satisfied, so only the ellipses remain.
        let p = DasCmop::new(1, 2, DasCmopDifficulty::reference()).unwrap();
        for x0 in [0.0, 0.13, 0.5, 0.77, 1.0] {
            let raw = p.evaluate(&[x0, 0.2]);
            assert!(raw.inequalities[0] <= 0.0);
            assert!(raw.inequalities[1] <= 0.0);
        }
    }
}
