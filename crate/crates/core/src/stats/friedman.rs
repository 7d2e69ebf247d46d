use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{average_ranks, Method, StatsError, TestResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    /// Tie-corrected chi-square statistic.
    pub statistic: f64,
    pub p_value: f64,
    pub significant: bool,
    /// Mean within-row rank of each column; higher values rank higher.
    pub mean_ranks: Vec<f64>,
    pub n_datasets: usize,
    pub k_algorithms: usize,
}

impl FriedmanResult {
    pub fn test_result(&self) -> TestResult {
        TestResult::new(self.statistic, self.p_value, Method::Friedman)
    }
}

/// Ranks within one row: the smallest value gets rank 1, ties share the
/// average rank.
pub fn rank_row(row: &[f64]) -> Vec<f64> {
    average_ranks(row).0
}

/// Friedman test on a `datasets x algorithms` matrix, with the chi-square
/// approximation (`k - 1` degrees of freedom).
pub fn friedman(values: &[Vec<f64>]) -> Result<FriedmanResult, StatsError> {
    let n = values.len();
    if n < 2 {
        return Err(StatsError::TooSmall {
            what: "rows",
            needed: 2,
            got: n,
        });
    }
    let k = values[0].len();
    if k < 2 {
        return Err(StatsError::TooSmall {
            what: "columns",
            needed: 2,
            got: k,
        });
    }
    if values.iter().any(|r| r.len() != k) {
        return Err(StatsError::Ragged);
    }
    if values.iter().flatten().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }

    let mut rank_sums = vec![0.0; k];
    let mut tie_sum = 0.0;
    for row in values {
        let (ranks, ties) = average_ranks(row);
        for (s, r) in rank_sums.iter_mut().zip(ranks) {
            *s += r;
        }
        tie_sum += ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>();
    }
    let (nf, kf) = (n as f64, k as f64);
    let correction = 1.0 - tie_sum / (nf * (kf * kf * kf - kf));
    if correction <= 0.0 {
        return Err(StatsError::AllTied);
    }
    let sum_sq: f64 = rank_sums.iter().map(|r| r * r).sum();
    let chi2 = 12.0 / (nf * kf * (kf + 1.0)) * sum_sq - 3.0 * nf * (kf + 1.0);
    let statistic = (chi2 / correction).max(0.0);
    let dist = ChiSquared::new(kf - 1.0).expect("positive degrees of freedom");
    let p_value = dist.sf(statistic);
    Ok(FriedmanResult {
        statistic,
        p_value,
        significant: p_value < super::ALPHA,
        mean_ranks: rank_sums.iter().map(|s| s / nf).collect(),
        n_datasets: n,
        k_algorithms: k,
    })
}
