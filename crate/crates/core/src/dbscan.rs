//! DBSCAN over a uniform-grid spatial index.
//!
//! Core flags are computed in parallel; cluster expansion is a sequential
//! breadth-first pass in ascending point order, so a border point reachable
//! from several clusters joins the one discovered first.

use std::collections::HashMap;
use std::collections::VecDeque;

use rayon::prelude::*;

use crate::{Error, Result};

/// Label of points that belong to no cluster.
pub const NOISE: i32 = -1;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DbscanParams {
    pub epsilon: f64,
    /// Neighbourhood size, the point itself included, that makes a core point.
    pub min_samples: usize,
}

impl DbscanParams {
    pub fn new(epsilon: f64, min_samples: usize) -> Result<Self> {
        let p = DbscanParams {
            epsilon,
            min_samples,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "DBSCAN epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.min_samples == 0 {
            return Err(Error::InvalidParameter(
                "DBSCAN min_samples must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

impl Default for DbscanParams {
    fn default() -> Self {
        DbscanParams {
            epsilon: 0.02,
            min_samples: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLabeling {
    /// Cluster index per point, or [`NOISE`].
    pub labels: Vec<i32>,
    pub is_core: Vec<bool>,
    pub n_clusters: usize,
}

impl ClusterLabeling {
    /// Number of points in each cluster.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters];
        for &l in &self.labels {
            if l >= 0 {
                sizes[l as usize] += 1;
            }
        }
        sizes
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == NOISE).count()
    }

    /// Clustered points that are not core points.
    pub fn is_border(&self, i: usize) -> bool {
        self.labels[i] >= 0 && !self.is_core[i]
    }
}

struct Cell {
    start: usize,
    end: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

/// Exact fixed-radius neighbour queries over a uniform grid of cells.
pub struct GridIndex {
    dim: usize,
    epsilon: f64,
    /// Coordinates, reordered so that each cell's points are contiguous.
    coords: Vec<f64>,
    /// Original index of each reordered point.
    original: Vec<usize>,
    /// Reordered position of each original point.
    position: Vec<usize>,
    /// Cell of each reordered point.
    cell_of: Vec<usize>,
    cells: Vec<Cell>,
    /// Indices of cells adjacent to each cell (itself included).
    adjacent: Vec<Vec<usize>>,
}

impl GridIndex {
    pub fn new<V: AsRef<[f64]>>(points: &[V], epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        let n = points.len();
        let dim = points.first().map_or(0, |p| p.as_ref().len());
        let mut flat = Vec::with_capacity(n * dim);
        for (i, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: p.len(),
                });
            }
            if let Some(v) = p.iter().find(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("coordinate {v} of point {i}")));
            }
            flat.extend_from_slice(p);
        }
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for p in flat.chunks_exact(dim.max(1)).take(n) {
            for j in 0..dim {
                min[j] = min[j].min(p[j]);
                max[j] = max[j].max(p[j]);
            }
        }
        // Slightly wider than epsilon so that points exactly epsilon apart are
        // never more than one cell apart after rounding. A wider cell keeps
        // queries exact and only widens the candidate set.
        let mut width = epsilon * (1.0 + 1e-9);
        let (extent, radix) = loop {
            let extent: Vec<u128> = (0..dim)
                .map(|j| ((max[j] - min[j]) / width).floor() as u128 + 1)
                .collect();
            let mut radix = Vec::with_capacity(dim);
            let mut acc: Option<u128> = Some(1);
            for &e in &extent {
                radix.push(acc.unwrap_or(0));
                acc = acc.and_then(|a| a.checked_mul(e));
            }
            if acc.is_some() {
                break (extent, radix);
            }
            width *= 2.0;
        };
        let cell_coord = |p: &[f64], j: usize| -> u128 {
            (((p[j] - min[j]) / width).floor() as u128).min(extent[j] - 1)
        };
        let keys: Vec<u128> = (0..n)
            .into_par_iter()
            .map(|i| {
                let p = &flat[i * dim..(i + 1) * dim];
                (0..dim).map(|j| cell_coord(p, j) * radix[j]).sum()
            })
            .collect();
        let mut original: Vec<usize> = (0..n).collect();
        original.sort_by_key(|&i| (keys[i], i));

        let mut coords = Vec::with_capacity(n * dim);
        for &i in &original {
            coords.extend_from_slice(&flat[i * dim..(i + 1) * dim]);
        }
        let mut position = vec![0; n];
        for (pos, &i) in original.iter().enumerate() {
            position[i] = pos;
        }
        let mut cells = Vec::new();
        let mut cell_keys = Vec::new();
        let mut cell_of = vec![0; n];
        let mut start = 0;
        while start < n {
            let key = keys[original[start]];
            let mut end = start + 1;
            while end < n && keys[original[end]] == key {
                end += 1;
            }
            let mut lo = vec![f64::INFINITY; dim];
            let mut hi = vec![f64::NEG_INFINITY; dim];
            for pos in start..end {
                cell_of[pos] = cells.len();
                for j in 0..dim {
                    let v = coords[pos * dim + j];
                    lo[j] = lo[j].min(v);
                    hi[j] = hi[j].max(v);
                }
            }
            cells.push(Cell { start, end, lo, hi });
            cell_keys.push(key);
            start = end;
        }
        let lookup: HashMap<u128, usize> =
            cell_keys.iter().enumerate().map(|(c, &k)| (k, c)).collect();
        let adjacent: Vec<Vec<usize>> = cell_keys
            .par_iter()
            .map(|&key| {
                let mut coord = vec![0u128; dim];
                let mut rest = key;
                for j in (0..dim).rev() {
                    coord[j] = rest / radix[j];
                    rest %= radix[j];
                }
                let mut out = Vec::new();
                let total = 3usize.pow(dim as u32);
                'offsets: for code in 0..total {
                    let mut c = code;
                    let mut k = 0u128;
                    for j in 0..dim {
                        let off = (c % 3) as i64 - 1;
                        c /= 3;
                        let v = coord[j] as i128 + i128::from(off);
                        if v < 0 || v >= extent[j] as i128 {
                            continue 'offsets;
                        }
                        k += v as u128 * radix[j];
                    }
                    if let Some(&cell) = lookup.get(&k) {
                        out.push(cell);
                    }
                }
                out.sort_unstable();
                out
            })
            .collect();
        Ok(GridIndex {
            dim,
            epsilon,
            coords,
            original,
            position,
            cell_of,
            cells,
            adjacent,
        })
    }

    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    fn point(&self, pos: usize) -> &[f64] {
        &self.coords[pos * self.dim..(pos + 1) * self.dim]
    }

    #[inline]
    fn within(&self, a: &[f64], b: &[f64], eps2: f64) -> bool {
        let mut d2 = 0.0;
        for (x, y) in a.iter().zip(b) {
            let d = x - y;
            d2 += d * d;
            if d2 > eps2 {
                return false;
            }
        }
        true
    }

    /// Squared distance from `p` to the bounding box of `cell`.
    fn box_distance2(&self, p: &[f64], cell: &Cell) -> f64 {
        let mut d2 = 0.0;
        for ((&pj, &lo), &hi) in p.iter().zip(&cell.lo).zip(&cell.hi).take(self.dim) {
            let d = if pj < lo {
                lo - pj
            } else if pj > hi {
                pj - hi
            } else {
                0.0
            };
            d2 += d * d;
        }
        d2
    }

    /// Visits reordered positions within epsilon of reordered position `pos`,
    /// skipping cells for which `skip_cell` returns true. Stops early when
    /// `visit` returns false.
    fn for_each_neighbor(
        &self,
        pos: usize,
        mut skip_cell: impl FnMut(usize) -> bool,
        mut visit: impl FnMut(usize) -> bool,
    ) {
        let eps2 = self.epsilon * self.epsilon;
        let p = self.point(pos);
        for &c in &self.adjacent[self.cell_of[pos]] {
            if skip_cell(c) {
                continue;
            }
            let cell = &self.cells[c];
            if self.box_distance2(p, cell) > eps2 {
                continue;
            }
            for q in cell.start..cell.end {
                if self.within(p, self.point(q), eps2) && !visit(q) {
                    return;
                }
            }
        }
    }

    /// Original indices of all points within epsilon of point `index`,
    /// inclusive and including the point itself, in ascending order.
    pub fn neighbors(&self, index: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_neighbor(
            self.position[index],
            |_| false,
            |q| {
                out.push(self.original[q]);
                true
            },
        );
        out.sort_unstable();
        out
    }
}

/// All points within `epsilon` of `points[index]`, the point itself included.
pub fn neighbor_query<V: AsRef<[f64]>>(
    points: &[V],
    index: usize,
    epsilon: f64,
) -> Result<Vec<usize>> {
    if index >= points.len() {
        return Err(Error::InvalidParameter(format!(
            "index {index} out of range for {} points",
            points.len()
        )));
    }
    Ok(GridIndex::new(points, epsilon)?.neighbors(index))
}

/// Clusters `points` with DBSCAN.
pub fn cluster<V: AsRef<[f64]>>(points: &[V], params: &DbscanParams) -> Result<ClusterLabeling> {
    params.validate()?;
    let n = points.len();
    if n == 0 {
        return Ok(ClusterLabeling {
            labels: vec![],
            is_core: vec![],
            n_clusters: 0,
        });
    }
    let index = GridIndex::new(points, params.epsilon)?;
    let min_samples = params.min_samples;

    // Core flags by reordered position.
    let core: Vec<bool> = (0..n)
        .into_par_iter()
        .map(|pos| {
            let mut count = 0;
            index.for_each_neighbor(
                pos,
                |_| false,
                |_| {
                    count += 1;
                    count < min_samples
                },
            );
            count >= min_samples
        })
        .collect();

    let mut labels = vec![NOISE; n];
    let mut unassigned: Vec<usize> = index.cells.iter().map(|c| c.end - c.start).collect();
    let mut queue = VecDeque::new();
    let mut n_clusters = 0usize;
    for i in 0..n {
        let start = index.position[i];
        if labels[start] != NOISE || !core[start] {
            continue;
        }
        let label = n_clusters as i32;
        n_clusters += 1;
        labels[start] = label;
        unassigned[index.cell_of[start]] -= 1;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            let mut found = Vec::new();
            index.for_each_neighbor(
                p,
                |c| unassigned[c] == 0,
                |q| {
                    if labels[q] == NOISE {
                        found.push(q);
                    }
                    true
                },
            );
            // Sorting by original index keeps expansion order independent of
            // the cell layout.
            found.sort_unstable_by_key(|&q| index.original[q]);
            for q in found {
                if labels[q] == NOISE {
                    labels[q] = label;
                    unassigned[index.cell_of[q]] -= 1;
                    if core[q] {
                        queue.push_back(q);
                    }
                }
            }
        }
    }

    let mut out_labels = vec![NOISE; n];
    let mut out_core = vec![false; n];
    for (pos, &i) in index.original.iter().enumerate() {
        out_labels[i] = labels[pos];
        out_core[i] = core[pos];
    }
    Ok(ClusterLabeling {
        labels: out_labels,
        is_core: out_core,
        n_clusters,
    })
}
