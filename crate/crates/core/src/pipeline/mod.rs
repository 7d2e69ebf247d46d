//! Experiment orchestration: configuration, the per-fold runner, aggregation
//! and report output.

mod config;
mod experiment;
mod latch;
mod report;

use thiserror::Error;

pub use config::{ExperimentConfig, Profile, WORKERS_ENV};
pub use experiment::{build_pool, run_experiment, run_experiment_on, run_fold, test_metrics, ALL_FEATURES};
pub use latch::{Completion, CompletionLatch};
pub use report::{
    BaselineOutcome, DatasetSummary, ExperimentReport, FoldReport, FoldSeeds, FriedmanSummary,
    FrontMember, FusionOutcome, LatchSummary, MethodAggregate, MethodResult, OptimizerOutcome,
    StatisticsReport, WilcoxonSummary,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write report: {0}")]
    Report(String),
    #[error("every fold failed; first error: {0}")]
    AllFoldsFailed(String),
}
