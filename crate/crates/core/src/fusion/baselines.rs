use std::fmt;
use std::str::FromStr;

use ndarray::Axis;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FusionError;
use crate::data::Dataset;
use crate::moo::EvalData;

/// Single-criterion feature rankers used for comparison with fusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    Pearson,
    Fisher,
    Greedy,
}

impl Baseline {
    pub const ALL: [Baseline; 3] = [Baseline::Pearson, Baseline::Fisher, Baseline::Greedy];

    pub fn name(&self) -> &'static str {
        match self {
            Baseline::Pearson => "pearson",
            Baseline::Fisher => "fisher",
            Baseline::Greedy => "greedy",
        }
    }

    /// Full feature order. `train` is the resampled training data; `data` is
    /// its internal split, used by the greedy ranker.
    pub fn rank(&self, train: &Dataset, data: &EvalData) -> Result<Vec<usize>, FusionError> {
        match self {
            Baseline::Pearson => Ok(rank_pearson(train)),
            Baseline::Fisher => rank_fisher(train),
            Baseline::Greedy => greedy_forward_select(data),
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Baseline {
    type Err = FusionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pearson" => Ok(Baseline::Pearson),
            "fisher" => Ok(Baseline::Fisher),
            "greedy" => Ok(Baseline::Greedy),
            _ => Err(FusionError::Unknown {
                kind: "baseline",
                value: s.to_string(),
            }),
        }
    }
}

/// Indices sorted by score descending, ties by ascending index.
pub fn rank_by_scores(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Pearson correlation of each feature with the 0/1 label; 0 for constant
/// columns.
pub fn pearson_scores(ds: &Dataset) -> Vec<f64> {
    let y: Vec<f64> = ds.labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();
    let n = y.len() as f64;
    let y_mean = y.iter().sum::<f64>() / n;
    ds.features
        .axis_iter(Axis(1))
        .map(|col| {
            let x_mean = col.sum() / n;
            let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
            for (x, yv) in col.iter().zip(&y) {
                let dx = x - x_mean;
                let dy = yv - y_mean;
                sxy += dx * dy;
                sxx += dx * dx;
                syy += dy * dy;
            }
            if sxx == 0.0 || syy == 0.0 {
                0.0
            } else {
                sxy / (sxx * syy).sqrt()
            }
        })
        .collect()
}

/// Features by `|r|` descending.
pub fn rank_pearson(ds: &Dataset) -> Vec<usize> {
    let scores: Vec<f64> = pearson_scores(ds).iter().map(|r| r.abs()).collect();
    rank_by_scores(&scores)
}

/// `(mu1 - mu0)^2 / (var1 + var0)` per feature, population variances; 0 when
/// the denominator is 0.
pub fn fisher_scores(ds: &Dataset) -> Result<Vec<f64>, FusionError> {
    let (pos, neg) = ds.class_counts();
    if pos == 0 || neg == 0 {
        return Err(FusionError::SingleClass);
    }
    let moments = |col: &ndarray::ArrayView1<f64>, class: bool, count: usize| {
        let values = col.iter().zip(&ds.labels).filter(|(_, &l)| l == class).map(|(v, _)| *v);
        let mean = values.clone().sum::<f64>() / count as f64;
        let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
        (mean, var)
    };
    Ok(ds
        .features
        .axis_iter(Axis(1))
        .map(|col| {
            let (m1, v1) = moments(&col, true, pos);
            let (m0, v0) = moments(&col, false, neg);
            let denom = v1 + v0;
            if denom > 0.0 {
                (m1 - m0) * (m1 - m0) / denom
            } else {
                0.0
            }
        })
        .collect())
}

pub fn rank_fisher(ds: &Dataset) -> Result<Vec<usize>, FusionError> {
    Ok(rank_by_scores(&fisher_scores(ds)?))
}

/// Orders all features by greedy forward selection on the internal split: each
/// step adds the feature that maximises validation AUC (ties by index).
pub fn greedy_forward_select(data: &EvalData) -> Result<Vec<usize>, FusionError> {
    let l = data.n_features();
    let mut selected: Vec<usize> = Vec::with_capacity(l);
    let mut mask = vec![0.0; l];
    while selected.len() < l {
        let candidates: Vec<usize> = (0..l).filter(|j| mask[*j] == 0.0).collect();
        let aucs: Vec<f64> = candidates
            .par_iter()
            .map(|&j| {
                let mut m = mask.clone();
                m[j] = 1.0;
                data.validation_auc(&m)
            })
            .collect::<Result<_, _>>()?;
        let mut best = 0;
        for (i, auc) in aucs.iter().enumerate() {
            if *auc > aucs[best] {
                best = i;
            }
        }
        let j = candidates[best];
        mask[j] = 1.0;
        selected.push(j);
    }
    Ok(selected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use ndarray::Array2;
    use rand::Rng as _;

    fn dataset(columns: Vec<Vec<f64>>, labels: Vec<bool>) -> Dataset {
        let n = labels.len();
        let w = columns.len();
        let features = Array2::from_shape_fn((n, w), |(i, j)| columns[j][i]);
        let names = (0..w).map(|j| format!("f{j}")).collect();
        Dataset::new("t", names, features, labels).unwrap()
    }

    #[test]
    fn pearson_examples() {
        let labels = vec![true, false, true, false, false, true];
        let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();
        let ds = dataset(vec![vec![5.0; 6], vec![0.3, 0.1, 0.2, 0.5, 0.4, 0.9], y], labels);
        let r = pearson_scores(&ds);
        assert_eq!(r[0], 0.0);
        assert!((r[2] - 1.0).abs() < 1e-12);
        assert_eq!(rank_pearson(&ds), vec![2, 1, 0]);
    }

    /// Textbook formula with sample moments (the n - 1 factors cancel).
    fn covariance_oracle(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let cov = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (n - 1.0);
        let sx = (x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let sy = (y.iter().map(|b| (b - my).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        cov / (sx * sy)
    }

    fn random_fixture(seed: u64) -> (Vec<Vec<f64>>, Vec<bool>) {
        let mut rng = rng_from_seed(seed);
        let labels: Vec<bool> = (0..40).map(|i| i % 3 == 0 || rng.gen_bool(0.2)).collect();
        let cols = (0..5)
            .map(|j| {
                labels
                    .iter()
                    .map(|&l| rng.gen::<f64>() + if l { 0.2 * j as f64 } else { 0.0 })
                    .collect()
            })
            .collect();
        (cols, labels)
    }

    #[test]
    fn pearson_matches_formula() {
        let (cols, labels) = random_fixture(7);
        let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();
        let ds = dataset(cols.clone(), labels);
        for (j, r) in pearson_scores(&ds).iter().enumerate() {
            assert!((r - covariance_oracle(&cols[j], &y)).abs() < 1e-12);
        }
    }

    #[test]
    fn fisher_matches_per_class_moments() {
        let (cols, labels) = random_fixture(8);
        let ds = dataset(cols.clone(), labels.clone());
        let scores = fisher_scores(&ds).unwrap();
        for (j, col) in cols.iter().enumerate() {
            let split = |class: bool| -> Vec<f64> {
                col.iter().zip(&labels).filter(|(_, &l)| l == class).map(|(v, _)| *v).collect()
            };
            let (a, b) = (split(true), split(false));
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let var = |v: &[f64]| {
                let m = mean(v);
                v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
            };
            let expected = (mean(&a) - mean(&b)).powi(2) / (var(&a) + var(&b));
            assert!((scores[j] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn fisher_examples() {
        let labels = vec![true, true, false, false];
        let ds = dataset(
            vec![
                vec![1.0, 3.0, 3.0, 1.0],
                vec![1.001, 0.999, 0.001, -0.001],
                vec![2.0, 2.0, 2.0, 2.0],
            ],
            labels,
        );
        let s = fisher_scores(&ds).unwrap();
        assert_eq!(s[0], 0.0);
        assert!(s[1] > 1e4);
        assert_eq!(s[2], 0.0);
        assert_eq!(rank_fisher(&ds).unwrap(), vec![1, 0, 2]);

        let single = dataset(vec![vec![1.0, 2.0]], vec![true, true]);
        assert_eq!(fisher_scores(&single), Err(FusionError::SingleClass));
    }

    #[test]
    fn ranking_ties_by_index() {
        assert_eq!(rank_by_scores(&[0.5, 0.9, 0.5, 0.9]), vec![1, 3, 0, 2]);
    }
}
