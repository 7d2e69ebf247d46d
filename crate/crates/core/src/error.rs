use thiserror::Error;

use crate::classify::ClassifyError;
use crate::data::DataError;
use crate::fusion::FusionError;
use crate::moo::MooError;
use crate::pipeline::PipelineError;
use crate::resample::ResampleError;
use crate::stats::StatsError;

/// Crate-level error wrapping the per-stage errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Resample(#[from] ResampleError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Moo(#[from] MooError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
