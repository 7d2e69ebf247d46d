//! The wrapped evaluator: an RBF-kernel soft-margin SVM trained by sequential
//! minimal optimisation, and the ACC / F-score / AUC metrics.

mod metrics;
mod svm;

use ndarray::ArrayView2;
use thiserror::Error;

pub use metrics::{auc_from_scores, compute_metrics, Metrics};
pub use svm::{train_svm_rbf, SvmModel, SvmParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("training data must contain both classes")]
    SingleClass,
    #[error("AUC is undefined when only one class is present")]
    AucUndefined,
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("every feature multiplier is zero; no usable features")]
    NoActiveFeatures,
    #[error("expected {expected} columns, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// A trained scorer. Positive scores predict the defective class.
pub trait Model: Send + Sync {
    fn decision_scores(&self, samples: ArrayView2<f64>) -> Result<Vec<f64>, ClassifyError>;

    fn predict(&self, samples: ArrayView2<f64>) -> Result<Vec<bool>, ClassifyError> {
        Ok(self
            .decision_scores(samples)?
            .into_iter()
            .map(|s| s > 0.0)
            .collect())
    }
}

/// Trains models on column-weighted data. A multiplier of 0 drops the column,
/// 1 keeps it, anything else scales it.
pub trait Classifier: Send + Sync {
    fn fit(
        &self,
        features: ArrayView2<f64>,
        labels: &[bool],
        multipliers: &[f64],
    ) -> Result<Box<dyn Model>, ClassifyError>;
}

impl Model for SvmModel {
    fn decision_scores(&self, samples: ArrayView2<f64>) -> Result<Vec<f64>, ClassifyError> {
        SvmModel::decision_scores(self, samples)
    }
}

impl Classifier for SvmParams {
    fn fit(
        &self,
        features: ArrayView2<f64>,
        labels: &[bool],
        multipliers: &[f64],
    ) -> Result<Box<dyn Model>, ClassifyError> {
        Ok(Box::new(train_svm_rbf(features, labels, multipliers, self)?))
    }
}
