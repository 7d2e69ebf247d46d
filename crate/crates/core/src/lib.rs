//! Software defect prediction with hybrid resampling and multi-objective
//! wrapper feature selection.
//!
//! The crate is organised around the stages of the experiment:
//!
//! * [`data`] loads CSV/ARFF defect datasets, min-max normalises them and
//!   builds stratified folds. [`data::synthetic`] generates surrogate datasets
//!   with the class layout of the public NASA/PROMISE sets.
//! * [`resample`] rebalances classes with Borderline-SMOTE or SMOTE followed
//!   by Tomek-link cleaning.
//! * [`classify`] is the wrapped evaluator: an RBF-kernel SVM trained by SMO
//!   plus ACC/F-score/AUC metrics.
//! * [`moo`] holds the binary-chromosome machinery and the NSGA-II, MOPSO and
//!   MODE optimizers.
//! * [`fusion`] merges Pareto fronts by vote or weight and provides the
//!   Pearson/Fisher/greedy baseline rankers.
//! * [`stats`] implements Wilcoxon signed-rank, Friedman and Nemenyi tests.
//! * [`pipeline`] orchestrates cross-validated experiments and writes reports.

pub mod classify;
pub mod data;
pub mod fusion;
pub mod moo;
pub mod pipeline;
pub mod resample;
pub mod rng;
pub mod stats;

mod error;

pub use error::{Error, Result};
