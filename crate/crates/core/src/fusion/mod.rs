//! Fusion of Pareto fronts into a single feature ranking, baseline rankers,
//! and prefix-sweep subset selection.

mod baselines;
mod fuse;
mod sweep;

use thiserror::Error;

use crate::classify::ClassifyError;

pub use baselines::{
    fisher_scores, greedy_forward_select, pearson_scores, rank_by_scores, rank_fisher, rank_pearson,
    Baseline,
};
pub use fuse::{fuse, vote_fuse, weight_fuse, FusedEntry, FusedRanking, FusionMode};
pub use sweep::{prefix_sweep, PrefixSweep};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("no Pareto front members to fuse")]
    EmptyInput,
    #[error("fronts disagree on the feature count ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("ranking is empty")]
    EmptyRanking,
    #[error("both classes are required")]
    SingleClass,
    #[error("unknown {kind} `{value}`")]
    Unknown { kind: &'static str, value: String },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}
