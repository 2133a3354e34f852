//! Suite coverage of feature values.
//!
//! Feature values are min-max normalized over all loaded records; the
//! coverage of a target set `T` by a candidate suite `S` is
//! `1 - mean_{t in T} min_{s in S} |t - s|`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::features::{FeatureName, FeatureRecord, FeatureSet};
use crate::{Error, Result};

/// Observed range of one feature over all records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureBounds {
    pub min: f64,
    pub max: f64,
    /// Number of non-null values.
    pub count: usize,
}

/// Per-feature bounds; features with no values map to `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub bounds: BTreeMap<String, Option<FeatureBounds>>,
}

impl Normalization {
    pub fn from_records(records: &[FeatureRecord]) -> Self {
        let bounds = FeatureName::ALL
            .iter()
            .map(|&name| {
                let values: Vec<f64> = records
                    .iter()
                    .filter_map(|r| r.features.get(name))
                    .collect();
                let b = (!values.is_empty()).then(|| FeatureBounds {
                    min: values.iter().copied().fold(f64::INFINITY, f64::min),
                    max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    count: values.len(),
                });
                (name.key().to_string(), b)
            })
            .collect();
        Normalization { bounds }
    }

    pub fn get(&self, name: FeatureName) -> Option<FeatureBounds> {
        self.bounds.get(name.key()).copied().flatten()
    }

    /// Maps `value` into `[0, 1]`; a constant feature maps to 0.5.
    pub fn apply(&self, name: FeatureName, value: Option<f64>) -> Option<f64> {
        let b = self.get(name)?;
        let v = value?;
        if b.max > b.min {
            Some(((v - b.min) / (b.max - b.min)).clamp(0.0, 1.0))
        } else {
            Some(0.5)
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

/// Min-max normalization of one column; nulls stay null.
pub fn normalize_values(values: &[Option<f64>]) -> Vec<Option<f64>> {
    let present = values.iter().flatten();
    let lo = present.clone().copied().fold(f64::INFINITY, f64::min);
    let hi = present.copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|v| v.map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 0.5 }))
        .collect()
}

/// Normalizes every record over the union of `records`.
pub fn normalize_features(records: &[FeatureRecord]) -> (Vec<FeatureSet>, Normalization) {
    let norm = Normalization::from_records(records);
    let sets = records
        .iter()
        .map(|r| {
            let mut s = FeatureSet::new();
            for (name, v) in r.features.iter() {
                s.set(name, norm.apply(name, v));
            }
            s
        })
        .collect();
    (sets, norm)
}

/// `1 - mean over t of min over s of |t - s|`; `None` if either set is empty.
pub fn coverage(target: &[f64], candidate: &[f64]) -> Option<f64> {
    if target.is_empty() || candidate.is_empty() {
        return None;
    }
    let mut sorted = candidate.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total: f64 = target
        .iter()
        .map(|&t| {
            let i = sorted.partition_point(|&s| s < t);
            let above = sorted.get(i).map_or(f64::INFINITY, |&s| s - t);
            let below = i.checked_sub(1).map_or(f64::INFINITY, |j| t - sorted[j]);
            above.min(below)
        })
        .sum();
    Some(1.0 - total / target.len() as f64)
}

/// Reference set the suites are compared against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// Union of all records, including the candidate suite's own.
    All,
    Suite(String),
}

impl Target {
    pub fn parse(s: &str) -> Self {
        if s.eq_ignore_ascii_case("all") {
            Target::All
        } else {
            Target::Suite(s.to_string())
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Target::All => "all",
            Target::Suite(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageMatrix {
    pub target: String,
    pub features: Vec<FeatureName>,
    pub suites: Vec<String>,
    /// `cells[feature][suite]`.
    pub cells: Vec<Vec<Option<f64>>>,
    /// Features without a single value; their rows are all null.
    pub excluded: Vec<FeatureName>,
    pub normalization: Normalization,
}

impl CoverageMatrix {
    pub fn get(&self, feature: FeatureName, suite: &str) -> Option<f64> {
        let r = self.features.iter().position(|&f| f == feature)?;
        let c = self.suites.iter().position(|s| s == suite)?;
        self.cells[r][c]
    }

    /// Rows are features, columns suites; null cells are empty fields.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["feature".to_string()];
        header.extend(self.suites.iter().cloned());
        w.write_record(&header)?;
        for (name, row) in self.features.iter().zip(&self.cells) {
            let mut rec = vec![name.key().to_string()];
            rec.extend(
                row.iter()
                    .map(|c| c.map_or(String::new(), |v| format!("{v:.6}"))),
            );
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Suites in order of first appearance.
pub fn suites_of(records: &[FeatureRecord]) -> Vec<String> {
    let mut suites: Vec<String> = Vec::new();
    for r in records {
        if !suites.contains(&r.suite) {
            suites.push(r.suite.clone());
        }
    }
    suites
}

pub fn coverage_matrix(records: &[FeatureRecord], target: &Target) -> Result<CoverageMatrix> {
    let suites = suites_of(records);
    if suites.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "coverage needs records from at least 2 suites, found {}",
            suites.len()
        )));
    }
    if let Target::Suite(t) = target {
        if !suites.contains(t) {
            return Err(Error::InvalidParameter(format!(
                "no records for target suite `{t}`"
            )));
        }
    }
    let (normalized, normalization) = normalize_features(records);
    let features = FeatureName::ALL.to_vec();
    let excluded: Vec<FeatureName> = features
        .iter()
        .copied()
        .filter(|&f| normalization.get(f).is_none())
        .collect();
    let column = |f: FeatureName, suite: Option<&str>| -> Vec<f64> {
        records
            .iter()
            .zip(&normalized)
            .filter(|(r, _)| suite.is_none_or(|s| r.suite == s))
            .filter_map(|(_, n)| n.get(f))
            .collect()
    };
    let cells = features
        .iter()
        .map(|&f| {
            let t = match target {
                Target::All => column(f, None),
                Target::Suite(s) => column(f, Some(s)),
            };
            suites
                .iter()
                .map(|s| coverage(&t, &column(f, Some(s))))
                .collect()
        })
        .collect();
    Ok(CoverageMatrix {
        target: target.name().to_string(),
        features,
        suites,
        cells,
        excluded,
        normalization,
    })
}

/// Loads every `*.json` record in `dir`, in file-name order.
pub fn load_records(dir: &Path) -> Result<Vec<FeatureRecord>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            FeatureRecord::from_json(&text).map_err(|e| Error::format(p, e.to_string()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(
            normalize_values(&[Some(2.0), Some(4.0), Some(6.0)]),
            vec![Some(0.0), Some(0.5), Some(1.0)]
        );
        assert_eq!(normalize_values(&[Some(3.0); 3]), vec![Some(0.5); 3]);
        assert_eq!(normalize_values(&[None, Some(1.0)]), vec![None, Some(0.5)]);
    }

    #[test]
    fn coverage_examples() {
        assert_eq!(coverage(&[0.0, 1.0], &[0.5]), Some(0.5));
        assert_eq!(coverage(&[0.0], &[1.0]), Some(0.0));
        assert_eq!(coverage(&[0.2, 0.7], &[0.9, 0.7, 0.2]), Some(1.0));
        assert_eq!(coverage(&[], &[1.0]), None);
        assert_eq!(coverage(&[0.3], &[]), None);
        let c = coverage(&[0.1, 0.4, 0.9], &[0.5]).unwrap();
        assert!((c - (1.0 - (0.4 + 0.1 + 0.4) / 3.0)).abs() < 1e-15);
    }
}
