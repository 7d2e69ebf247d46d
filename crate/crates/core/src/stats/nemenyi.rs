use serde::{Deserialize, Serialize};

use super::StatsError;

/// Critical values `q_alpha` of the two-tailed Nemenyi test for k = 2..=10
/// (studentized range statistic divided by sqrt(2)), as tabulated by Demšar,
/// "Statistical Comparisons of Classifiers over Multiple Data Sets", JMLR 7
/// (2006), Table 5.
const Q_005: [f64; 9] = [1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164];
const Q_010: [f64; 9] = [1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920];

pub fn q_alpha(k: usize, alpha: f64) -> Result<f64, StatsError> {
    if !(2..=10).contains(&k) {
        return Err(StatsError::KOutOfTable(k));
    }
    let table = if (alpha - 0.05).abs() < 1e-9 {
        &Q_005
    } else if (alpha - 0.10).abs() < 1e-9 {
        &Q_010
    } else {
        return Err(StatsError::UnsupportedAlpha(alpha));
    };
    Ok(table[k - 2])
}

/// Critical difference of mean ranks for `k` methods over `n` datasets.
pub fn nemenyi_cd(k: usize, n: usize, alpha: f64) -> Result<f64, StatsError> {
    if n < 2 {
        return Err(StatsError::TooSmall {
            what: "datasets",
            needed: 2,
            got: n,
        });
    }
    let q = q_alpha(k, alpha)?;
    Ok(q * ((k * (k + 1)) as f64 / (6.0 * n as f64)).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairComparison {
    pub a: usize,
    pub b: usize,
    /// `|mean_rank[a] - mean_rank[b]|`.
    pub difference: f64,
    pub significant: bool,
}

/// All `a < b` pairs, significant when the rank difference exceeds `cd`.
pub fn nemenyi_pairs(mean_ranks: &[f64], cd: f64) -> Vec<PairComparison> {
    let mut out = Vec::new();
    for a in 0..mean_ranks.len() {
        for b in (a + 1)..mean_ranks.len() {
            let difference = (mean_ranks[a] - mean_ranks[b]).abs();
            out.push(PairComparison {
                a,
                b,
                difference,
                significant: difference > cd,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cd_examples() {
        assert!((nemenyi_cd(3, 8, 0.05).unwrap() - 2.343 * 0.5).abs() < 1e-12);
        assert!((nemenyi_cd(3, 6, 0.05).unwrap() - 2.343 * (12.0f64 / 36.0).sqrt()).abs() < 1e-12);
        assert!((nemenyi_cd(3, 6, 0.05).unwrap() - 1.3529).abs() < 1e-3);
        assert!(nemenyi_cd(11, 8, 0.05).is_err());
        assert!(nemenyi_cd(1, 8, 0.05).is_err());
        assert!(nemenyi_cd(3, 8, 0.01).is_err());
    }

    #[test]
    fn cd_shrinks_with_more_datasets() {
        for k in 2..=10 {
            for alpha in [0.05, 0.10] {
                let cds: Vec<f64> = (2..40).map(|n| nemenyi_cd(k, n, alpha).unwrap()).collect();
                assert!(cds.windows(2).all(|w| w[1] < w[0]));
            }
        }
    }

    #[test]
    fn tables_increase_with_k() {
        assert!(Q_005.windows(2).all(|w| w[1] > w[0]));
        assert!(Q_010.windows(2).all(|w| w[1] > w[0]));
        assert!(Q_005.iter().zip(&Q_010).all(|(a, b)| a > b));
    }

    #[test]
    fn pairs() {
        let p = nemenyi_pairs(&[1.0, 3.0, 1.5], 1.2);
        assert_eq!(p.len(), 3);
        assert!(p[0].significant && p[1].difference == 0.5 && !p[1].significant);
        assert!(p[2].significant);
    }
}
