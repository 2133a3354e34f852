//! Latin hypercube and grid samples of the search space, evaluation of
//! samples, CSV export and an on-disk evaluation cache.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::problem::{EvaluatedPoint, ProblemInstance};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    LatinHypercube,
    /// `size` is the number of points per axis.
    FullGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SamplePlan {
    pub kind: SampleKind,
    pub size: usize,
    pub seed: u64,
    pub dimension: usize,
}

impl SamplePlan {
    pub fn latin_hypercube(size: usize, dimension: usize, seed: u64) -> Self {
        SamplePlan {
            kind: SampleKind::LatinHypercube,
            size,
            seed,
            dimension,
        }
    }

    pub fn grid(points_per_axis: usize, dimension: usize) -> Self {
        SamplePlan {
            kind: SampleKind::FullGrid,
            size: points_per_axis,
            seed: 0,
            dimension,
        }
    }

    /// Number of points the plan generates.
    pub fn len(&self) -> usize {
        match self.kind {
            SampleKind::LatinHypercube => self.size,
            SampleKind::FullGrid => self.size.saturating_pow(self.dimension as u32),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn generate(&self, bounds: &[(f64, f64)]) -> Result<Vec<Vec<f64>>> {
        if bounds.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                actual: bounds.len(),
            });
        }
        match self.kind {
            SampleKind::LatinHypercube => latin_hypercube(self, bounds),
            SampleKind::FullGrid => grid(self.size, bounds),
        }
    }
}

/// Latin hypercube sample with uniform placement inside each stratum.
pub fn latin_hypercube(plan: &SamplePlan, bounds: &[(f64, f64)]) -> Result<Vec<Vec<f64>>> {
    let n = plan.size;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "sample size must be positive".into(),
        ));
    }
    if bounds.is_empty() {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut points = vec![Vec::with_capacity(bounds.len()); n];
    let mut strata: Vec<usize> = (0..n).collect();
    for &(lo, hi) in bounds {
        strata.shuffle(&mut rng);
        for (point, &s) in points.iter_mut().zip(&strata) {
            let u: f64 = rng.gen();
            let t = (s as f64 + u) / n as f64;
            point.push((lo + t * (hi - lo)).clamp(lo, hi));
        }
    }
    Ok(points)
}

/// Regular lattice with both endpoints on every axis; the last axis varies
/// fastest.
pub fn grid(points_per_axis: usize, bounds: &[(f64, f64)]) -> Result<Vec<Vec<f64>>> {
    if points_per_axis < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least 2 points per axis, got {points_per_axis}"
        )));
    }
    let d = bounds.len();
    let k = points_per_axis;
    let total = k
        .checked_pow(d as u32)
        .ok_or_else(|| Error::InvalidParameter("grid is too large".into()))?;
    let axes: Vec<Vec<f64>> = bounds
        .iter()
        .map(|&(lo, hi)| {
            (0..k)
                .map(|i| {
                    if i == k - 1 {
                        hi
                    } else {
                        lo + (hi - lo) * i as f64 / (k - 1) as f64
                    }
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        out.push(idx.iter().zip(&axes).map(|(&i, a)| a[i]).collect());
        for j in (0..d).rev() {
            idx[j] += 1;
            if idx[j] < k {
                break;
            }
            idx[j] = 0;
        }
    }
    Ok(out)
}

/// Evaluates every point in parallel, preserving order.
pub fn evaluate_all(problem: &ProblemInstance, points: &[Vec<f64>]) -> Result<Vec<EvaluatedPoint>> {
    points.par_iter().map(|x| problem.evaluate(x)).collect()
}

/// Writes `x1..xD, f1..fM, g1..gC, v` rows.
pub fn write_csv(path: &Path, points: &[EvaluatedPoint]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    if let Some(first) = points.first() {
        let header: Vec<String> = (1..=first.x.len())
            .map(|i| format!("x{i}"))
            .chain((1..=first.f.len()).map(|i| format!("f{i}")))
            .chain((1..=first.g.len()).map(|i| format!("g{i}")))
            .chain(std::iter::once("v".to_string()))
            .collect();
        w.write_record(&header).map_err(|e| csv_error(path, e))?;
    }
    for p in points {
        let row: Vec<String> =
            p.x.iter()
                .chain(&p.f)
                .chain(&p.g)
                .chain(std::iter::once(&p.v))
                .map(|v| v.to_string())
                .collect();
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::format(path, e.to_string())
}

/// Cache of evaluated samples keyed by problem id and a hash of the plan.
#[derive(Debug, Clone)]
pub struct SampleCache {
    dir: PathBuf,
}

const CACHE_MAGIC: &[u8; 8] = b"CMOPSMP1";

impl SampleCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        SampleCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Hex SHA-256 over everything that determines the evaluated sample.
    pub fn key(problem: &ProblemInstance, plan: &SamplePlan) -> String {
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update(problem.id().as_bytes());
        h.update([0]);
        h.update((problem.dimension() as u64).to_le_bytes());
        h.update((problem.num_objectives() as u64).to_le_bytes());
        for &(lo, hi) in problem.bounds() {
            h.update(lo.to_le_bytes());
            h.update(hi.to_le_bytes());
        }
        h.update(problem.equality_tolerance().to_le_bytes());
        h.update([plan.kind as u8]);
        h.update((plan.size as u64).to_le_bytes());
        h.update(plan.seed.to_le_bytes());
        h.update((plan.dimension as u64).to_le_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn path(&self, problem: &ProblemInstance, plan: &SamplePlan) -> PathBuf {
        let id: String = problem
            .id()
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '-' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        self.dir
            .join(format!("{id}-{}.bin", &Self::key(problem, plan)[..16]))
    }

    /// Returns the cached sample, or evaluates and stores it.
    pub fn get_or_evaluate(
        &self,
        problem: &ProblemInstance,
        plan: &SamplePlan,
    ) -> Result<Vec<EvaluatedPoint>> {
        let path = self.path(problem, plan);
        if path.exists() {
            if let Ok(points) = read_cache(&path, problem, plan) {
                return Ok(points);
            }
        }
        let points = evaluate_all(problem, &plan.generate(problem.bounds())?)?;
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let tmp = path.with_extension("tmp");
        write_cache(&tmp, &points)?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(points)
    }
}

/// Evaluates a plan, through the cache when one is given.
pub fn evaluate_plan(
    problem: &ProblemInstance,
    plan: &SamplePlan,
    cache: Option<&SampleCache>,
) -> Result<Vec<EvaluatedPoint>> {
    match cache {
        Some(c) => c.get_or_evaluate(problem, plan),
        None => evaluate_all(problem, &plan.generate(problem.bounds())?),
    }
}

fn write_cache(path: &Path, points: &[EvaluatedPoint]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let (d, m, c) = points
        .first()
        .map_or((0, 0, 0), |p| (p.x.len(), p.f.len(), p.g.len()));
    let mut buf = Vec::with_capacity(40 + points.len() * 8 * (d + m + c));
    buf.extend_from_slice(CACHE_MAGIC);
    for n in [points.len(), d, m, c] {
        buf.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for p in points {
        for v in p.x.iter().chain(&p.f).chain(&p.g) {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_cache(
    path: &Path,
    problem: &ProblemInstance,
    plan: &SamplePlan,
) -> Result<Vec<EvaluatedPoint>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    BufReader::new(file)
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    let bad = |msg: &str| Error::format(path, msg);
    if bytes.len() < 40 || &bytes[..8] != CACHE_MAGIC {
        return Err(bad("not a sample cache file"));
    }
    let word =
        |i: usize| u64::from_le_bytes(bytes[8 + 8 * i..16 + 8 * i].try_into().unwrap()) as usize;
    let (n, d, m, c) = (word(0), word(1), word(2), word(3));
    if n != plan.len()
        || d != problem.dimension()
        || m != problem.num_objectives()
        || c != problem.num_constraints()
    {
        return Err(bad("cache header does not match the problem"));
    }
    let width = d + m + c;
    if bytes.len() != 40 + n * width * 8 {
        return Err(bad("truncated cache file"));
    }
    let values: Vec<f64> = bytes[40..]
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    Ok(values
        .chunks_exact(width.max(1))
        .take(n)
        .map(|row| {
            EvaluatedPoint::new(
                row[..d].to_vec(),
                row[d..d + m].to_vec(),
                row[d + m..].to_vec(),
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ProblemRegistry;

    fn strata_ok(points: &[Vec<f64>], bounds: &[(f64, f64)]) -> bool {
        let n = points.len();
        bounds.iter().enumerate().all(|(j, &(lo, hi))| {
            let mut seen = vec![0u32; n];
            for p in points {
                let s = (((p[j] - lo) / (hi - lo)) * n as f64).floor() as usize;
                seen[s.min(n - 1)] += 1;
            }
            seen.iter().all(|&c| c == 1)
        })
    }

    #[test]
    fn lhs_one_point_per_stratum() {
        let plan = SamplePlan::latin_hypercube(4, 1, 3);
        let pts = plan.generate(&[(0.0, 1.0)]).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(strata_ok(&pts, &[(0.0, 1.0)]));

        let bounds = [(0.0, 1.1), (-2.0, 5.0)];
        let plan = SamplePlan::latin_hypercube(25_000, 2, 11);
        let pts = plan.generate(&bounds).unwrap();
        assert_eq!(pts.len(), 25_000);
        assert!(strata_ok(&pts, &bounds));
        assert!(pts.iter().all(|p| p
            .iter()
            .zip(&bounds)
            .all(|(&v, &(lo, hi))| v >= lo && v <= hi)));
    }

    #[test]
    fn lhs_is_deterministic() {
        let plan = SamplePlan::latin_hypercube(100, 3, 42);
        let b = [(0.0, 1.0); 3];
        assert_eq!(plan.generate(&b).unwrap(), plan.generate(&b).unwrap());
        let other = SamplePlan::latin_hypercube(100, 3, 43);
        assert_ne!(plan.generate(&b).unwrap(), other.generate(&b).unwrap());
    }

    #[test]
    fn grid_shapes() {
        let g = grid(3, &[(0.0, 1.0); 2]).unwrap();
        assert_eq!(g.len(), 9);
        assert!(g.contains(&vec![0.0, 0.0]) && g.contains(&vec![1.0, 1.0]));
        assert!(g.contains(&vec![0.0, 1.0]) && g.contains(&vec![1.0, 0.0]));
        assert_eq!(grid(501, &[(0.0, 1.0); 2]).unwrap().len(), 251_001);
        let corners = grid(2, &[(0.0, 1.0); 3]).unwrap();
        assert_eq!(corners.len(), 8);
        assert!(corners
            .iter()
            .all(|p| p.iter().all(|&v| v == 0.0 || v == 1.0)));
        assert!(grid(1, &[(0.0, 1.0)]).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SampleCache::new(dir.path());
        let problem = ProblemRegistry::with_builtins()
            .instantiate("MW7", 2)
            .unwrap();
        let plan = SamplePlan::latin_hypercube(200, 2, 5);
        let cold = cache.get_or_evaluate(&problem, &plan).unwrap();
        assert!(cache.path(&problem, &plan).exists());
        let warm = cache.get_or_evaluate(&problem, &plan).unwrap();
        assert_eq!(cold, warm);
        assert_eq!(cold, evaluate_plan(&problem, &plan, None).unwrap());

        let other = SamplePlan::latin_hypercube(200, 2, 6);
        assert_ne!(cache.path(&problem, &plan), cache.path(&problem, &other));
    }

    #[test]
    fn csv_has_expected_columns() {
        let dir = tempfile::tempdir().unwrap();
        let problem = ProblemRegistry::with_builtins()
            .instantiate("C2-DTLZ2", 2)
            .unwrap();
        let pts = evaluate_all(&problem, &grid(2, problem.bounds()).unwrap()).unwrap();
        let path = dir.path().join("s.csv");
        write_csv(&path, &pts).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x1,x2,f1,f2,g1,v");
        assert_eq!(lines.count(), 4);
    }
}
