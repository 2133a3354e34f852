//! The 29 landscape features, their record format and the driver that
//! computes them.

pub mod adaptivewalk;
pub mod infocontent;
pub mod randomwalk;
pub mod spacefill;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dbscan::DbscanParams;
use crate::problem::ProblemInstance;
use crate::sampling::SampleCache;
use crate::{Error, Result};

use adaptivewalk::LocalSearchConfig;

/// Version of the [`FeatureRecord`] JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

macro_rules! feature_names {
    ($($variant:ident => $key:literal, $family:ident;)*) => {
        /// Feature identifiers in record order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum FeatureName {
            $($variant,)*
        }

        /// JSON keys of all features in record order.
        pub const FEATURE_NAMES: [&str; 29] = [$($key,)*];

        impl FeatureName {
            pub const ALL: [FeatureName; 29] = [$(FeatureName::$variant,)*];

            pub fn key(self) -> &'static str {
                FEATURE_NAMES[self as usize]
            }

            pub fn family(self) -> Family {
                match self {
                    $(FeatureName::$variant => Family::$family,)*
                }
            }
        }
    };
}

feature_names! {
    NCom => "n_com", SpaceFill;
    ComMin => "com_min", SpaceFill;
    ComMed => "com_med", SpaceFill;
    ComMax => "com_max", SpaceFill;
    OptComMax => "opt_com_max", SpaceFill;
    ComOpt => "com_opt", SpaceFill;
    RhoF => "rho_f", SpaceFill;
    CorrMin => "corr_min", SpaceFill;
    CorrMax => "corr_max", SpaceFill;
    RhoBoundOpt => "rho_bound_opt", SpaceFill;
    HMax => "h_max", InfoContent;
    EpsS => "eps_s", InfoContent;
    M0 => "m0", InfoContent;
    RfbMin => "rfb_min", RandomWalk;
    RfbMed => "rfb_med", RandomWalk;
    RfbMax => "rfb_max", RandomWalk;
    NBasin => "n_basin", AdaptiveWalk;
    BasinMin => "basin_min", AdaptiveWalk;
    BasinMed => "basin_med", AdaptiveWalk;
    BasinMax => "basin_max", AdaptiveWalk;
    FbasinMin => "fbasin_min", AdaptiveWalk;
    FbasinMed => "fbasin_med", AdaptiveWalk;
    FbasinMax => "fbasin_max", AdaptiveWalk;
    UnionFbasin => "union_fbasin", AdaptiveWalk;
    VBasinMed => "v_basin_med", AdaptiveWalk;
    VBasinMax => "v_basin_max", AdaptiveWalk;
    VBasinOfMax => "v_basin_of_max", AdaptiveWalk;
    OptBasinMax => "opt_basin_max", AdaptiveWalk;
    BasinOpt => "basin_opt", AdaptiveWalk;
}

impl FeatureName {
    /// Count-valued features, serialized as integers.
    pub fn is_count(self) -> bool {
        matches!(self, FeatureName::NCom | FeatureName::NBasin)
    }
}

impl fmt::Display for FeatureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for FeatureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FEATURE_NAMES
            .iter()
            .position(|&k| k == s)
            .map(|i| FeatureName::ALL[i])
            .ok_or_else(|| Error::InvalidParameter(format!("unknown feature `{s}`")))
    }
}

/// Feature extraction technique.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    SpaceFill,
    InfoContent,
    RandomWalk,
    AdaptiveWalk,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::SpaceFill,
        Family::InfoContent,
        Family::RandomWalk,
        Family::AdaptiveWalk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::SpaceFill => "spacefill",
            Family::InfoContent => "infocontent",
            Family::RandomWalk => "randomwalk",
            Family::AdaptiveWalk => "adaptivewalk",
        }
    }

    pub fn features(self) -> impl Iterator<Item = FeatureName> {
        FeatureName::ALL
            .into_iter()
            .filter(move |f| f.family() == self)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown feature family `{s}`")))
    }
}

/// The 29 feature values; `None` marks an undefined feature.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FeatureSet([Option<f64>; 29]);

impl FeatureSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: FeatureName) -> Option<f64> {
        self.0[name as usize]
    }

    pub fn set(&mut self, name: FeatureName, value: Option<f64>) {
        self.0[name as usize] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (FeatureName, Option<f64>)> + '_ {
        FeatureName::ALL.into_iter().map(|n| (n, self.get(n)))
    }

    pub fn defined_count(&self) -> usize {
        self.0.iter().filter(|v| v.is_some()).count()
    }

    /// Copies the features of `family` from `other`.
    pub fn merge_family(&mut self, family: Family, other: &FeatureSet) {
        for n in family.features() {
            self.set(n, other.get(n));
        }
    }
}

impl Serialize for FeatureSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(29))?;
        for (name, value) in self.iter() {
            match value {
                Some(v) if name.is_count() && v.fract() == 0.0 && v >= 0.0 => {
                    map.serialize_entry(name.key(), &(v as u64))?
                }
                Some(v) if !v.is_finite() => {
                    return Err(serde::ser::Error::custom(format!(
                        "feature {name} is not finite ({v})"
                    )))
                }
                other => map.serialize_entry(name.key(), &other)?,
            }
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for FeatureSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct SetVisitor;

        impl<'de> Visitor<'de> for SetVisitor {
            type Value = FeatureSet;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map with the 29 feature keys")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<FeatureSet, A::Error> {
                let mut set = FeatureSet::new();
                let mut seen = BTreeSet::new();
                while let Some(key) = access.next_key::<String>()? {
                    let name: FeatureName = key
                        .parse()
                        .map_err(|_| de::Error::unknown_field(&key, &FEATURE_NAMES))?;
                    if !seen.insert(name) {
                        return Err(de::Error::duplicate_field(name.key()));
                    }
                    set.set(name, access.next_value::<Option<f64>>()?);
                }
                if let Some(missing) = FeatureName::ALL.iter().find(|n| !seen.contains(n)) {
                    return Err(de::Error::missing_field(missing.key()));
                }
                Ok(set)
            }
        }

        deserializer.deserialize_map(SetVisitor)
    }
}

/// Sample sizes and clustering radius used by the space-filling and
/// adaptive-walk families at dimension `d`.
pub fn default_sizes(d: usize) -> (usize, usize, f64) {
    match d {
        0..=2 => (25_000, 10_000, 0.02),
        3 => (100_000, 25_000, 0.04),
        _ => (250_000, 50_000, 0.12),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacefillConfig {
    pub samples: usize,
    pub dbscan: DbscanParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoContentConfig {
    pub samples: usize,
    /// Threshold below which the information content counts as settled.
    pub settling_threshold: f64,
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomWalkConfig {
    pub steps: usize,
    pub walks: usize,
    /// Maximum step per axis as a fraction of the axis range.
    pub step_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveWalkConfig {
    pub samples: usize,
    pub dbscan: DbscanParams,
    pub local_search: LocalSearchConfig,
}

/// All parameters of a feature run; echoed into every record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub spacefill: SpacefillConfig,
    pub infocontent: InfoContentConfig,
    pub randomwalk: RandomWalkConfig,
    pub adaptivewalk: AdaptiveWalkConfig,
}

impl FeatureConfig {
    pub fn for_dimension(d: usize) -> Self {
        let (xs, xa, eps) = default_sizes(d);
        let dbscan = DbscanParams {
            epsilon: eps,
            min_samples: 5,
        };
        FeatureConfig {
            spacefill: SpacefillConfig {
                samples: xs,
                dbscan,
            },
            infocontent: InfoContentConfig {
                samples: 1000 * d.max(1),
                settling_threshold: 0.05,
                lambdas: infocontent::default_lambdas(),
            },
            randomwalk: RandomWalkConfig {
                steps: 10_000,
                walks: 30,
                step_fraction: 0.01,
            },
            adaptivewalk: AdaptiveWalkConfig {
                samples: xa,
                dbscan,
                local_search: LocalSearchConfig::default(),
            },
        }
    }
}

/// Features of one problem at one dimension, with everything needed to
/// reproduce them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub schema_version: u32,
    pub problem: String,
    pub suite: String,
    pub dimension: usize,
    pub seed: u64,
    pub families: Vec<Family>,
    pub equality_tolerance: f64,
    pub parameters: FeatureConfig,
    pub features: FeatureSet,
}

impl FeatureRecord {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidParameter(format!("cannot serialize record: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: FeatureRecord = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("malformed feature record: {e}")))?;
        if record.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                record.schema_version
            )));
        }
        Ok(record)
    }
}

/// Computes the requested families. Families not requested stay undefined.
pub fn compute_features(
    problem: &ProblemInstance,
    config: &FeatureConfig,
    seed: u64,
    families: &[Family],
    cache: Option<&SampleCache>,
) -> Result<FeatureRecord> {
    let mut families: Vec<Family> = families.to_vec();
    families.sort();
    families.dedup();
    let mut set = FeatureSet::new();
    for &family in &families {
        let part = match family {
            Family::SpaceFill => {
                spacefill::spacefill_features(problem, &config.spacefill, seed, cache)?.to_set()
            }
            Family::InfoContent => {
                infocontent::info_features(problem, &config.infocontent, seed, cache)?.to_set()
            }
            Family::RandomWalk => {
                randomwalk::randomwalk_features(problem, &config.randomwalk, seed)?.to_set()
            }
            Family::AdaptiveWalk => {
                adaptivewalk::basin_features(problem, &config.adaptivewalk, seed, cache)?.to_set()
            }
        };
        set.merge_family(family, &part);
    }
    Ok(FeatureRecord {
        schema_version: SCHEMA_VERSION,
        problem: problem.id().to_string(),
        suite: problem.suite().to_string(),
        dimension: problem.dimension(),
        seed,
        families,
        equality_tolerance: problem.equality_tolerance(),
        parameters: config.clone(),
        features: set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_families() {
        assert_eq!(FEATURE_NAMES.len(), 29);
        assert_eq!(Family::SpaceFill.features().count(), 10);
        assert_eq!(Family::InfoContent.features().count(), 3);
        assert_eq!(Family::RandomWalk.features().count(), 3);
        assert_eq!(Family::AdaptiveWalk.features().count(), 13);
        assert_eq!("rho_f".parse::<FeatureName>().unwrap(), FeatureName::RhoF);
        assert_eq!(
            "AdaptiveWalk".parse::<Family>().unwrap(),
            Family::AdaptiveWalk
        );
        assert!("nope".parse::<FeatureName>().is_err());
    }

    #[test]
    fn feature_set_json_round_trip() {
        let mut s = FeatureSet::new();
        s.set(FeatureName::NCom, Some(3.0));
        s.set(FeatureName::RhoF, Some(0.25));
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.starts_with("{\"n_com\":3,\"com_min\":null"));
        assert!(json.contains("\"rho_f\":0.25"));
        let back: FeatureSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn feature_set_rejects_bad_keys() {
        let json = serde_json::to_string(&FeatureSet::new()).unwrap();
        let missing = json.replacen("\"n_com\":null,", "", 1);
        assert!(serde_json::from_str::<FeatureSet>(&missing).is_err());
        let extra = json.replacen("{", "{\"bogus\":1,", 1);
        assert!(serde_json::from_str::<FeatureSet>(&extra).is_err());
        let mut nan = FeatureSet::new();
        nan.set(FeatureName::HMax, Some(f64::NAN));
        assert!(serde_json::to_string(&nan).is_err());
    }
}
