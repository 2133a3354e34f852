//! MW problems.

use std::f64::consts::{PI, SQRT_2};

use super::{sqrt0, Problem, RawEvaluation};
use crate::{Error, Result};

/// `A * sin(B * pi * theta^C)^D`.
fn la1(a: f64, b: f64, c: i32, d: i32, theta: f64) -> f64 {
    a * (b * PI * theta.powi(c)).sin().powi(d)
}

/// `A * sin(B * theta^C)^D`.
fn la2(a: f64, b: f64, c: i32, d: i32, theta: f64) -> f64 {
    a * (b * theta.powi(c)).sin().powi(d)
}

/// `A * cos(B * theta^C)^D`.
fn la3(a: f64, b: f64, c: i32, d: i32, theta: f64) -> f64 {
    a * (b * theta.powi(c)).cos().powi(d)
}

/// MW1 to MW14. MW4, MW8 and MW14 are scalable in the number of objectives.
#[derive(Debug, Clone)]
pub struct Mw {
    number: u8,
    dimension: usize,
    objectives: usize,
}

impl Mw {
    pub fn new(number: u8, dimension: usize, objectives: usize) -> Result<Self> {
        if !(1..=14).contains(&number) {
            return Err(Error::InvalidParameter(format!(
                "MW number must be 1..=14, got {number}"
            )));
        }
        if !Self::is_scalable(number) && objectives != 2 {
            return Err(Error::InvalidParameter(format!(
                "MW{number} is bi-objective, got M={objectives}"
            )));
        }
        if objectives < 2 || dimension < objectives {
            return Err(Error::InvalidParameter(format!(
                "MW{number} needs 2 <= M <= D, got D={dimension}, M={objectives}"
            )));
        }
        Ok(Mw {
            number,
            dimension,
            objectives,
        })
    }

    pub fn is_scalable(number: u8) -> bool {
        matches!(number, 4 | 8 | 14)
    }

    fn g1(&self, x: &[f64]) -> f64 {
        let d = self.dimension;
        let m = self.objectives;
        let n = (d - m) as i32;
        let mut s = 0.0;
        for (i, &xi) in x.iter().enumerate().skip(m - 1) {
            let t = xi.powi(n) - 0.5 - i as f64 / (2 * d) as f64;
            s += 1.0 - (-10.0 * t * t).exp();
        }
        1.0 + s
    }

    fn g2(&self, x: &[f64]) -> f64 {
        let n = self.dimension as f64;
        let mut s = 0.0;
        for (i, &xi) in x.iter().enumerate().skip(self.objectives - 1) {
            let t = xi - i as f64 / n;
            let z = 1.0 - (-10.0 * t * t).exp();
            s += (0.1 / n) * z * z + 1.5 - 1.5 * (2.0 * PI * z).cos();
        }
        1.0 + s
    }

    fn g3(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in self.objectives - 1..self.dimension {
            let p = x[i - 1] - 0.5;
            s += 2.0 * (x[i] + p * p - 1.0).powi(2);
        }
        1.0 + s
    }

    /// DTLZ-style front shared by MW4 and MW8.
    fn scalable_front(
        &self,
        g: f64,
        x: &[f64],
        head: impl Fn(f64) -> f64,
        tail: impl Fn(f64) -> f64,
    ) -> Vec<f64> {
        let m = self.objectives;
        (0..m)
            .map(|j| {
                let mut fj = g;
                for &xi in &x[..m - 1 - j] {
                    fj *= head(xi);
                }
                if j > 0 {
                    fj *= tail(x[m - 1 - j]);
                }
                fj
            })
            .collect()
    }
}

impl Problem for Mw {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        let upper = match self.number {
            6 => 1.1,
            11 => SQRT_2,
            13 | 14 => 1.5,
            _ => 1.0,
        };
        vec![(0.0, upper); self.dimension]
    }

    fn num_objectives(&self) -> usize {
        self.objectives
    }

    fn num_inequality(&self) -> usize {
        match self.number {
            3 | 7 | 12 | 13 => 2,
            5 | 10 => 3,
            11 => 4,
            _ => 1,
        }
    }

    fn evaluate(&self, x: &[f64]) -> RawEvaluation {
        let (objectives, inequalities) = match self.number {
            1 => {
                let g = self.g1(x);
                let f0 = x[0];
                let f1 = g * (1.0 - 0.85 * f0 / g);
                let c = f0 + f1 - 1.0 - la1(0.5, 2.0, 1, 8, SQRT_2 * f1 - SQRT_2 * f0);
                (vec![f0, f1], vec![c])
            }
            2 => {
                let g = self.g2(x);
                let f0 = x[0];
                let f1 = g * (1.0 - f0 / g);
                let c = f0 + f1 - 1.0 - la1(0.5, 3.0, 1, 8, SQRT_2 * f1 - SQRT_2 * f0);
                (vec![f0, f1], vec![c])
            }
            3 => {
                let g = self.g3(x);
                let f0 = x[0];
                let f1 = g * (1.0 - f0 / g);
                let l = SQRT_2 * f1 - SQRT_2 * f0;
                let c0 = f0 + f1 - 1.05 - la1(0.45, 0.75, 1, 6, l);
                let c1 = 0.85 - f0 - f1 + la1(0.3, 0.75, 1, 2, l);
                (vec![f0, f1], vec![c0, c1])
            }
            4 => {
                let g = self.g1(x);
                let f = self.scalable_front(g, x, |xi| 1.0 - xi, |xi| xi);
                let m = f.len();
                let l = f[m - 1] - f[..m - 1].iter().sum::<f64>();
                let c = f.iter().sum::<f64>() - 1.0 - la1(0.4, 2.5, 1, 8, l);
                (f, vec![c])
            }
            5 => {
                let g = self.g1(x);
                let f0 = g * x[0];
                let f1 = g * sqrt0(1.0 - (f0 / g).powi(2));
                let at = f1.atan2(f0);
                let r2 = f0 * f0 + f1 * f1;
                let c0 = r2 - (1.7 - la2(0.2, 2.0, 1, 1, at)).powi(2);
                let t = 0.5 * PI - 2.0 * (at - 0.25 * PI).abs();
                let c1 = (1.0 + la2(0.5, 6.0, 3, 1, t)).powi(2) - r2;
                let c2 = (1.0 - la2(0.45, 6.0, 3, 1, t)).powi(2) - r2;
                (vec![f0, f1], vec![c0, c1, c2])
            }
            6 => {
                let g = self.g2(x);
                let f0 = g * x[0];
                let f1 = g * sqrt0(1.1 * 1.1 - (f0 / g).powi(2));
                let at = f1.atan2(f0);
                let c = f0 * f0 / (1.0 + la3(0.15, 6.0, 4, 10, at)).powi(2)
                    + f1 * f1 / (1.0 + la3(0.75, 6.0, 4, 10, at)).powi(2)
                    - 1.0;
                (vec![f0, f1], vec![c])
            }
            7 => {
                let g = self.g3(x);
                let f0 = g * x[0];
                let f1 = g * sqrt0(1.0 - (f0 / g).powi(2));
                let at = f1.atan2(f0);
                let r2 = f0 * f0 + f1 * f1;
                let c0 = r2 - (1.2 + la2(0.4, 4.0, 1, 16, at).abs()).powi(2);
                let c1 = (1.15 - la2(0.2, 4.0, 1, 8, at)).powi(2) - r2;
                (vec![f0, f1], vec![c0, c1])
            }
            8 => {
                let g = self.g2(x);
                let f = self.scalable_front(
                    g,
                    x,
                    |xi| (0.5 * PI * xi).cos(),
                    |xi| (0.5 * PI * xi).sin(),
                );
                let sq: f64 = f.iter().map(|v| v * v).sum();
                let ratio = (f[f.len() - 1] / sq.sqrt()).clamp(-1.0, 1.0);
                let b = 1.25 - la2(0.5, 6.0, 1, 2, ratio.asin());
                (f, vec![sq - b * b])
            }
            9 => {
                let g = self.g1(x);
                let f0 = g * x[0];
                let f1 = g * (1.0 - (f0 / g).powf(0.6));
                let t1 = (1.0 - 0.64 * f0 * f0 - f1) * (1.0 - 0.36 * f0 * f0 - f1);
                let t2 = (1.35 * 1.35 - (f0 + 0.35).powi(2) - f1)
                    * (1.15 * 1.15 - (f0 + 0.15).powi(2) - f1);
                (vec![f0, f1], vec![t1.min(t2)])
            }
            10 => {
                let g = self.g2(x);
                let f0 = g * x[0].powi(self.dimension as i32);
                let f1 = g * (1.0 - (f0 / g).powi(2));
                let q = f0 * f0;
                let c0 = -(2.0 - 4.0 * q - f1) * (2.0 - 8.0 * q - f1);
                let c1 = (2.0 - 2.0 * q - f1) * (2.0 - 16.0 * q - f1);
                let c2 = (1.0 - q - f1) * (1.2 - 1.2 * q - f1);
                (vec![f0, f1], vec![c0, c1, c2])
            }
            11 => {
                let g = self.g3(x);
                let f0 = g * x[0];
                let f1 = g * sqrt0(2.0 - (f0 / g).powi(2));
                let q = f0 * f0;
                let c0 = -(3.0 - q - f1) * (3.0 - 2.0 * q - f1);
                let c1 = (3.0 - 0.625 * q - f1) * (3.0 - 7.0 * q - f1);
                let c2 = -(1.62 - 0.18 * q - f1) * (1.125 - 0.125 * q - f1);
                let c3 = (2.07 - 0.23 * q - f1) * (0.63 - 0.07 * q - f1);
                (vec![f0, f1], vec![c0, c1, c2, c3])
            }
            12 => {
                let g = self.g1(x);
                let f0 = g * x[0];
                let r = f0 / g;
                let f1 = g * (0.85 - 0.8 * r - 0.08 * (3.2 * PI * r).sin().abs());
                let s = |t: f64| 0.08 * (2.0 * PI * t).sin();
                let c0 = -(1.0 - 0.625 * f0 - f1 + s(f1 - f0 / 1.6))
                    * (1.4 - 0.875 * f0 - f1 + s(f1 / 1.4 - f0 / 1.6));
                let c1 = (1.0 - 0.8 * f0 - f1 + s(f1 - f0 / 1.5))
                    * (1.8 - 1.125 * f0 - f1 + s(f1 / 1.8 - f0 / 1.6));
                (vec![f0, f1], vec![c0, c1])
            }
            13 => {
                let g = self.g2(x);
                let f0 = g * x[0];
                let r = f0 / g;
                let f1 = g * (5.0 - r.exp() - (0.5 * (3.0 * PI * r).sin()).abs());
                let s = 0.5 * (3.0 * PI * f0).sin();
                let c0 = -(5.0 - (1.0 + f0 + 0.5 * f0 * f0) - s - f1)
                    * (5.0 - (1.0 + 0.7 * f0) - s - f1);
                let c1 = (5.0 - f0.exp() - s - f1) * (5.0 - (1.0 + 0.4 * f0) - s - f1);
                (vec![f0, f1], vec![c0, c1])
            }
            _ => {
                let g = self.g3(x);
                let m = self.objectives;
                let head = &x[..m - 1];
                let la: Vec<f64> = head.iter().map(|&fi| la1(1.5, 1.1, 2, 1, fi)).collect();
                let inter: f64 = head
                    .iter()
                    .zip(&la)
                    .map(|(&fi, &l)| 6.0 - fi.exp() - l)
                    .sum();
                let last = g / (m - 1) as f64 * inter;
                let alpha: f64 = head
                    .iter()
                    .zip(&la)
                    .map(|(&fi, &l)| 6.1 - 1.0 - fi - 0.5 * fi * fi - l)
                    .sum();
                let c = last - alpha / (m - 1) as f64;
                let mut f = head.to_vec();
                f.push(last);
                (f, vec![c])
            }
        };
        RawEvaluation {
            objectives,
            inequalities,
            equalities: vec![],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_follow_definitions() {
        assert_eq!(Mw::new(6, 2, 2).unwrap().bounds()[0].1, 1.1);
        assert_eq!(Mw::new(11, 2, 2).unwrap().bounds()[1].1, SQRT_2);
        assert_eq!(Mw::new(14, 3, 2).unwrap().bounds()[0].1, 1.5);
        assert_eq!(Mw::new(1, 2, 2).unwrap().bounds()[0].1, 1.0);
    }

    #[test]
    fn mw6_upper_corner_is_finite() {
        // f0 / g = 1.1 makes the radicand zero up to round-off.
        let p = Mw::new(6, 2, 2).unwrap();
        let raw = p.evaluate(&[1.1, 0.7]);
        assert!(raw.objectives.iter().all(|v| v.is_finite()));
        assert!(raw.inequalities[0].is_finite());
    }

    #[test]
    fn all_finite_on_corners() {
        for n in 1..=14u8 {
            for d in [2usize, 3, 5] {
                let p = Mw::new(n, d, 2).unwrap();
                for (lo, hi) in [(true, true), (true, false), (false, true), (false, false)] {
                    let x: Vec<f64> = p
                        .bounds()
                        .iter()
                        .enumerate()
                        .map(|(i, &(l, u))| if (i % 2 == 0) == lo || hi { l } else { u })
                        .collect();
                    let raw = p.evaluate(&x);
                    assert_eq!(raw.inequalities.len(), p.num_inequality());
                    assert!(
                        raw.objectives
                            .iter()
                            .chain(&raw.inequalities)
                            .all(|v| v.is_finite()),
                        "MW{n} D={d} x={x:?} -> {raw:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_invalid_objective_counts() {
        assert!(Mw::new(1, 5, 3).is_err());
        assert!(Mw::new(4, 5, 3).is_ok());
        assert!(Mw::new(15, 5, 2).is_err());
    }
}
