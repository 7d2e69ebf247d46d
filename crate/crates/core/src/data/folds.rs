use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::DataError;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<Fold>,
}

/// Indices of each class, shuffled with the given generator.
fn shuffled_classes(labels: &[bool], seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = rng_from_seed(seed);
    let mut pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let mut neg: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    (pos, neg)
}

/// Stratified k-fold plan.
///
/// Each class is shuffled with ChaCha8 (`seed_from_u64(seed)`, defective class
/// first) and dealt round-robin onto the folds; the non-defective class
/// continues the rotation where the defective class stopped so fold sizes
/// differ by at most one.
pub fn stratified_kfold(labels: &[bool], k: usize, seed: u64) -> Result<FoldPlan, DataError> {
    if k < 2 {
        return Err(DataError::InvalidK(k));
    }
    let (pos, neg) = shuffled_classes(labels, seed);
    let smallest = pos.len().min(neg.len());
    if smallest < k {
        return Err(DataError::Stratification {
            k,
            members: smallest,
        });
    }
    let mut assignment = vec![0usize; labels.len()];
    for (slot, &row) in pos.iter().chain(neg.iter()).enumerate() {
        assignment[row] = slot % k;
    }
    let folds = (0..k)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..labels.len()).partition(|&row| assignment[row] == f);
            Fold { train, test }
        })
        .collect();
    Ok(FoldPlan { k, seed, folds })
}

/// Stratified holdout split returning `(train, validation)` index lists, both
/// sorted ascending.
///
/// Each class contributes `round(fraction * n)` rows to validation, clamped so
/// that a class with at least two members appears on both sides.
pub fn stratified_split(labels: &[bool], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let (pos, neg) = shuffled_classes(labels, seed);
    let mut train = Vec::with_capacity(labels.len());
    let mut validation = Vec::new();
    for class in [pos, neg] {
        let n = class.len();
        let mut n_val = (fraction * n as f64).round() as usize;
        if n >= 2 {
            n_val = n_val.clamp(1, n - 1);
        } else {
            n_val = 0;
        }
        validation.extend_from_slice(&class[..n_val]);
        train.extend_from_slice(&class[n_val..]);
    }
    train.sort_unstable();
    validation.sort_unstable();
    (train, validation)
}
