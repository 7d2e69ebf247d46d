//! Class rebalancing: SMOTE interpolation, Borderline-SMOTE, Tomek links and
//! the SMOTE-Tomek hybrid.
//!
//! Both samplers oversample the minority class until it matches the majority
//! count exactly. Synthetic rows are appended after the original rows.

mod knn;
mod smote;
mod tomek;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use knn::NeighborQuery;
pub use smote::{
    borderline_classify, borderline_smote, smote, smote_synthesize, BorderlineCategory,
    SyntheticOrigin,
};
pub use tomek::{smote_tomek, tomek_links};

use crate::data::Dataset;

/// Default danger-neighbourhood size for Borderline-SMOTE.
pub const DEFAULT_M: usize = 5;
/// Default synthesis neighbourhood size.
pub const DEFAULT_K: usize = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ResampleError {
    #[error("resampling needs both classes present")]
    SingleClass,
    #[error("neighbourhood size {k} must be smaller than the number of points ({points})")]
    NeighborhoodTooLarge { k: usize, points: usize },
    #[error("neighbourhood size must be positive")]
    ZeroNeighborhood,
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("unknown sampler `{0}` (expected bs, st or none)")]
    UnknownSampler(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    #[serde(alias = "bs", alias = "borderline-smote")]
    BorderlineSmote,
    #[serde(alias = "st", alias = "smote-tomek")]
    SmoteTomek,
    None,
}

impl Sampler {
    pub fn short_name(&self) -> &'static str {
        match self {
            Sampler::BorderlineSmote => "bs",
            Sampler::SmoteTomek => "st",
            Sampler::None => "none",
        }
    }

    /// Applies the sampler with the default neighbourhood sizes.
    pub fn apply(&self, ds: &Dataset, seed: u64) -> Result<(Dataset, SamplingReport), ResampleError> {
        match self {
            Sampler::BorderlineSmote => borderline_smote(ds, DEFAULT_M, DEFAULT_K, seed),
            Sampler::SmoteTomek => smote_tomek(ds, DEFAULT_K, seed),
            Sampler::None => {
                let counts = ClassCounts::of(ds);
                Ok((
                    ds.clone(),
                    SamplingReport {
                        method: Sampler::None,
                        before: counts,
                        after: counts,
                        synthetic_created: 0,
                        tomek_pairs_removed: 0,
                        fallback_to_plain_smote: false,
                        origins: Vec::new(),
                    },
                ))
            }
        }
    }
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Sampler {
    type Err = ResampleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bs" | "borderline_smote" | "borderline-smote" => Ok(Sampler::BorderlineSmote),
            "st" | "smote_tomek" | "smote-tomek" => Ok(Sampler::SmoteTomek),
            "none" => Ok(Sampler::None),
            other => Err(ResampleError::UnknownSampler(other.to_string())),
        }
    }
}

/// Majority/minority counts. The minority class is the smaller one; on a tie
/// the defective class counts as minority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub majority: usize,
    pub minority: usize,
}

impl ClassCounts {
    pub fn of(ds: &Dataset) -> Self {
        let (pos, neg) = ds.class_counts();
        Self {
            majority: pos.max(neg),
            minority: pos.min(neg),
        }
    }
}

/// Label value of the minority class.
pub(crate) fn minority_label(ds: &Dataset) -> bool {
    let (pos, neg) = ds.class_counts();
    pos <= neg
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingReport {
    pub method: Sampler,
    pub before: ClassCounts,
    pub after: ClassCounts,
    pub synthetic_created: usize,
    pub tomek_pairs_removed: usize,
    /// Set when Borderline-SMOTE found no DANGER sample and seeded from the
    /// non-noise minority rows instead.
    pub fallback_to_plain_smote: bool,
    /// Provenance of every synthetic row, in output order.
    #[serde(skip)]
    pub origins: Vec<SyntheticOrigin>,
}
