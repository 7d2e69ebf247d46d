//! Nonparametric comparison of methods across datasets: Wilcoxon signed-rank,
//! Friedman with tie correction, and the Nemenyi critical difference.

mod friedman;
mod matrix;
mod nemenyi;
mod wilcoxon;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use friedman::{friedman, rank_row, FriedmanResult};
pub use matrix::ScoreMatrix;
pub use nemenyi::{nemenyi_cd, nemenyi_pairs, q_alpha, PairComparison};
pub use wilcoxon::{wilcoxon_exact_cdf, wilcoxon_signed_rank};

/// Significance threshold for [`TestResult::significant`].
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("every paired difference is zero")]
    AllZeroDifferences,
    #[error("need at least {needed} {what}, got {got}")]
    TooSmall {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("every row is fully tied; the statistic is undefined")]
    AllTied,
    #[error("rows have different lengths")]
    Ragged,
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("no critical value for k = {0} (table covers 2..=10)")]
    KOutOfTable(usize),
    #[error("no critical values for alpha = {0} (use 0.05 or 0.10)")]
    UnsupportedAlpha(f64),
    #[error("invalid score table: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    WilcoxonExact,
    WilcoxonNormal,
    Friedman,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    /// `p_value < 0.05`.
    pub significant: bool,
    pub method: Method,
}

impl TestResult {
    pub fn new(statistic: f64, p_value: f64, method: Method) -> Self {
        Self {
            statistic,
            p_value,
            significant: p_value < ALPHA,
            method,
        }
    }
}

/// Average ranks (1-based) of `values`, ascending; exactly equal values share
/// the mean of their positions. Also returns the sizes of tied groups.
pub(crate) fn average_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        if end - start > 1 {
            ties.push(end - start);
        }
        start = end;
    }
    (ranks, ties)
}
