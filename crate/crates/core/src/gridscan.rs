//! Full-grid scans of two-variable problems: violation, feasibility and
//! dominance structure on a regular lattice.

use std::collections::VecDeque;
use std::path::{Path, PathBuf};

use crate::dbscan::{self, DbscanParams};
use crate::pareto::{dominance_ratio, nondominated_filter};
use crate::problem::{EvaluatedPoint, ProblemInstance};
use crate::sampling::{evaluate_all, grid};
use crate::{Error, Result};

type RowFn<'a> = Box<dyn Fn(usize) -> Vec<String> + 'a>;

#[derive(Debug, Clone)]
pub struct GridScan {
    /// Points per axis.
    pub resolution: usize,
    /// Row-major: index `i * resolution + j` has `x1` index `i`, `x2` index `j`.
    pub points: Vec<EvaluatedPoint>,
    /// Fraction of grid points dominating each point, ignoring feasibility.
    pub dominance_ratio: Vec<f64>,
    /// Nondominated among all grid points, ignoring feasibility.
    pub nondominated: Vec<bool>,
    /// Nondominated among the feasible grid points.
    pub feasible_nondominated: Vec<bool>,
}

impl GridScan {
    pub fn feasibility_mask(&self) -> Vec<bool> {
        self.points.iter().map(|p| p.is_feasible).collect()
    }

    /// Feasible components under 8-connectivity of the grid.
    pub fn feasible_components(&self) -> usize {
        flood_fill_components(&self.feasibility_mask(), self.resolution, self.resolution)
    }

    /// Writes `violation.csv`, `feasibility.csv`, `dominance_ratio.csv` and
    /// `nondominated.csv` into `dir`; returns the paths.
    pub fn write_csvs(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let fmt_bool = |b: bool| if b { "1" } else { "0" }.to_string();
        let tables: [(&str, Vec<&str>, RowFn); 4] = [
            (
                "violation.csv",
                vec!["v"],
                Box::new(|i| vec![self.points[i].v.to_string()]),
            ),
            (
                "feasibility.csv",
                vec!["feasible"],
                Box::new(|i| vec![fmt_bool(self.points[i].is_feasible)]),
            ),
            (
                "dominance_ratio.csv",
                vec!["dominance_ratio"],
                Box::new(|i| vec![self.dominance_ratio[i].to_string()]),
            ),
            (
                "nondominated.csv",
                vec!["nondominated", "feasible_nondominated"],
                Box::new(|i| {
                    vec![
                        fmt_bool(self.nondominated[i]),
                        fmt_bool(self.feasible_nondominated[i]),
                    ]
                }),
            ),
        ];
        let mut written = Vec::new();
        for (name, columns, row) in &tables {
            let path = dir.join(name);
            let err = |e: csv::Error| Error::format(&path, e.to_string());
            let mut w = csv::Writer::from_path(&path).map_err(err)?;
            let mut header = vec!["x1", "x2"];
            header.extend(columns);
            w.write_record(&header).map_err(err)?;
            for (i, p) in self.points.iter().enumerate() {
                let mut rec = vec![p.x[0].to_string(), p.x[1].to_string()];
                rec.extend(row(i));
                w.write_record(&rec).map_err(err)?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Evaluates a `resolution x resolution` grid over the bounds of a
/// two-variable problem.
pub fn scan(problem: &ProblemInstance, resolution: usize) -> Result<GridScan> {
    if problem.dimension() != 2 {
        return Err(Error::UnsupportedDimension {
            id: problem.id().to_string(),
            dimension: problem.dimension(),
            reason: "grid scans need exactly 2 variables".into(),
        });
    }
    let xs = grid(resolution, problem.bounds())?;
    let points = evaluate_all(problem, &xs)?;
    let objectives: Vec<&[f64]> = points.iter().map(|p| p.f.as_slice()).collect();
    let ratio = dominance_ratio(&objectives);
    let nondominated = ratio.iter().map(|&r| r == 0.0).collect();
    let feasible_nondominated = nondominated_filter(&points, true);
    Ok(GridScan {
        resolution,
        points,
        dominance_ratio: ratio,
        nondominated,
        feasible_nondominated,
    })
}

/// Connected `true` regions of a row-major `rows x cols` mask under
/// 8-connectivity.
pub fn flood_fill_components(mask: &[bool], rows: usize, cols: usize) -> usize {
    assert_eq!(mask.len(), rows * cols, "mask size");
    let mut seen = vec![false; mask.len()];
    let mut queue = VecDeque::new();
    let mut count = 0;
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            let (r, k) = ((c / cols) as isize, (c % cols) as isize);
            for dr in -1..=1 {
                for dk in -1..=1 {
                    let (nr, nk) = (r + dr, k + dk);
                    if nr < 0 || nk < 0 || nr >= rows as isize || nk >= cols as isize {
                        continue;
                    }
                    let n = nr as usize * cols + nk as usize;
                    if mask[n] && !seen[n] {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
    }
    count
}

/// DBSCAN over the feasible grid points in unit coordinates with a radius of
/// 1.5 grid pitches and `min_samples = 1`, which links exactly the
/// 8-neighbours of the lattice.
pub fn dbscan_grid_components(problem: &ProblemInstance, scan: &GridScan) -> Result<usize> {
    let pitch = 1.0 / (scan.resolution - 1) as f64;
    let unit: Vec<Vec<f64>> = scan
        .points
        .iter()
        .filter(|p| p.is_feasible)
        .map(|p| problem.to_unit(&p.x))
        .collect();
    let params = DbscanParams::new(1.5 * pitch, 1)?;
    Ok(dbscan::cluster(&unit, &params)?.n_clusters)
}
