//! CTP problems with the linear distance function.

use std::f64::consts::PI;

use super::{Problem, RawEvaluation};
use crate::{Error, Result};

/// Parameters `(theta, a, b, c, d, e)` of one tunnel-shaped constraint.
type Tunnel = (f64, f64, f64, f64, f64, f64);

/// CTP1 to CTP8.
#[derive(Debug, Clone)]
pub struct Ctp {
    number: u8,
    dimension: usize,
    /// Exponential constraint coefficients of CTP1.
    ctp1: Vec<(f64, f64)>,
}

impl Ctp {
    pub fn new(number: u8, dimension: usize) -> Result<Self> {
        if !(1..=8).contains(&number) {
            return Err(Error::InvalidParameter(format!(
                "CTP number must be 1..=8, got {number}"
            )));
        }
        if dimension < 2 {
            return Err(Error::InvalidParameter(format!(
                "CTP{number} needs at least 2 variables"
            )));
        }
        Ok(Ctp {
            number,
            dimension,
            ctp1: if number == 1 {
                ctp1_coefficients(2)
            } else {
                vec![]
            },
        })
    }

    fn tunnels(&self) -> &'static [Tunnel] {
        const P: f64 = PI;
        match self.number {
            2 => &[(-0.2 * P, 0.2, 10.0, 1.0, 6.0, 1.0)],
            3 => &[(-0.2 * P, 0.1, 10.0, 1.0, 0.5, 1.0)],
            4 => &[(-0.2 * P, 0.75, 10.0, 1.0, 0.5, 1.0)],
            5 => &[(-0.2 * P, 0.1, 10.0, 2.0, 0.5, 1.0)],
            6 => &[(0.1 * P, 40.0, 0.5, 1.0, 2.0, -2.0)],
            7 => &[(-0.05 * P, 40.0, 5.0, 1.0, 6.0, 0.0)],
            8 => &[
                (0.1 * P, 40.0, 0.5, 1.0, 2.0, -2.0),
                (-0.05 * P, 40.0, 2.0, 1.0, 6.0, 0.0),
            ],
            _ => &[],
        }
    }
}

fn ctp1_coefficients(count: usize) -> Vec<(f64, f64)> {
    let mut a = vec![1.0];
    let mut b = vec![1.0];
    let delta = 1.0 / (count + 1) as f64;
    let mut alpha = delta;
    for j in 0..count {
        let beta = a[j] * (-b[j] * alpha).exp();
        let next_a = (a[j] + beta) / 2.0;
        a.push(next_a);
        b.push(-1.0 / alpha * (beta / next_a).ln());
        alpha += delta;
    }
    a.into_iter().zip(b).skip(1).collect()
}

/// `a |sin(b pi u^c)|^d - w <= 0` with `(w, u)` the objectives rotated by `theta`.
fn tunnel(&(theta, a, b, c, d, e): &Tunnel, f1: f64, f2: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    let w = (f2 - e) * ct - f1 * st;
    let u = (f2 - e) * st + f1 * ct;
    a * (b * PI * u.powf(c)).sin().abs().powf(d) - w
}

impl Problem for Ctp {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        let upper = if matches!(self.number, 6 | 8) {
            20.0
        } else {
            1.0
        };
        let mut b = vec![(0.0, upper); self.dimension];
        b[0] = (0.0, 1.0);
        b
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn num_inequality(&self) -> usize {
        if matches!(self.number, 1 | 8) {
            2
        } else {
            1
        }
    }

    fn evaluate(&self, x: &[f64]) -> RawEvaluation {
        let f1 = x[0];
        let g = 1.0 + x[1..].iter().sum::<f64>();
        if self.number == 1 {
            let f2 = g * (-f1 / g).exp();
            let inequalities = self
                .ctp1
                .iter()
                .map(|&(a, b)| -(f2 - a * (-b * f1).exp()))
                .collect();
            return RawEvaluation {
                objectives: vec![f1, f2],
                inequalities,
                equalities: vec![],
            };
        }
        let f2 = g * (1.0 - (f1 / g).sqrt());
        RawEvaluation {
            objectives: vec![f1, f2],
            inequalities: self.tunnels().iter().map(|t| tunnel(t, f1, f2)).collect(),
            equalities: vec![],
        }
    }
}
