use serde::{Deserialize, Serialize};

use super::ClassifyError;

/// Confusion counts and derived scores for the defective class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub acc: f64,
    pub f_score: f64,
    /// `None` when the labels hold a single class.
    pub auc: Option<f64>,
}

/// Rank-based AUC: the fraction of (positive, negative) pairs where the
/// positive scores higher, ties counting one half.
pub fn auc_from_scores(labels: &[bool], scores: &[f64]) -> Result<f64, ClassifyError> {
    if labels.len() != scores.len() {
        return Err(ClassifyError::LengthMismatch(labels.len(), scores.len()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(ClassifyError::NonFinite);
    }
    let n_pos = labels.iter().filter(|&&l| l).count() as u64;
    let n_neg = labels.len() as u64 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(ClassifyError::AucUndefined);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // twice the Mann-Whitney U, kept integral
    let mut twice_u: u64 = 0;
    let mut neg_below: u64 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let (mut pos, mut neg) = (0u64, 0u64);
        for &i in &order[start..end] {
            if labels[i] {
                pos += 1;
            } else {
                neg += 1;
            }
        }
        twice_u += 2 * pos * neg_below + pos * neg;
        neg_below += neg;
        start = end;
    }
    Ok(twice_u as f64 / (2 * n_pos * n_neg) as f64)
}

pub fn compute_metrics(
    labels: &[bool],
    predictions: &[bool],
    scores: &[f64],
) -> Result<Metrics, ClassifyError> {
    if labels.len() != predictions.len() {
        return Err(ClassifyError::LengthMismatch(labels.len(), predictions.len()));
    }
    if labels.len() != scores.len() {
        return Err(ClassifyError::LengthMismatch(labels.len(), scores.len()));
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (&y, &p) in labels.iter().zip(predictions) {
        match (y, p) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let total = (tp + fp + fn_ + tn) as f64;
    let acc = if total > 0.0 { (tp + tn) as f64 / total } else { 0.0 };
    let f_score = if tp == 0 {
        0.0
    } else {
        let precision = tp as f64 / (tp + fp) as f64;
        let recall = tp as f64 / (tp + fn_) as f64;
        2.0 * precision * recall / (precision + recall)
    };
    let auc = match auc_from_scores(labels, scores) {
        Ok(a) => Some(a),
        Err(ClassifyError::AucUndefined) => None,
        Err(e) => return Err(e),
    };
    Ok(Metrics {
        tp,
        fp,
        fn_,
        tn,
        acc,
        f_score,
        auc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct pair counting.
    fn brute_force_auc(labels: &[bool], scores: &[f64]) -> f64 {
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, &li) in labels.iter().enumerate() {
            if !li {
                continue;
            }
            for (j, &lj) in labels.iter().enumerate() {
                if lj {
                    continue;
                }
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc_from_scores(&[true, false], &[0.9, 0.1]).unwrap(), 1.0);
        assert_eq!(auc_from_scores(&[true, false, true], &[0.3; 3]).unwrap(), 0.5);
        assert_eq!(
            auc_from_scores(&[true, false, true, false], &[0.9, 0.8, 0.3, 0.1]).unwrap(),
            0.75
        );
        assert_eq!(
            auc_from_scores(&[true, true], &[0.1, 0.2]),
            Err(ClassifyError::AucUndefined)
        );
    }

    #[test]
    fn metrics_examples() {
        // tp=2, fp=1, fn=1, tn=6
        let labels = [true, true, true, false, false, false, false, false, false, false];
        let preds = [true, true, false, true, false, false, false, false, false, false];
        let scores = [0.9, 0.8, -0.1, 0.5, -0.5, -0.6, -0.7, -0.8, -0.9, -1.0];
        let m = compute_metrics(&labels, &preds, &scores).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_, m.tn), (2, 1, 1, 6));
        assert!((m.acc - 0.8).abs() < 1e-12);
        assert!((m.f_score - 2.0 / 3.0).abs() < 1e-12);

        let m = compute_metrics(&[true, false], &[true, false], &[1.0, -1.0]).unwrap();
        assert_eq!((m.acc, m.f_score, m.auc), (1.0, 1.0, Some(1.0)));

        let m = compute_metrics(&[true, false], &[false, false], &[0.2, 0.1]).unwrap();
        assert_eq!(m.f_score, 0.0);
    }

    #[test]
    fn single_class_labels_keep_other_metrics() {
        let m = compute_metrics(&[false, false], &[false, true], &[0.1, 0.2]).unwrap();
        assert_eq!(m.auc, None);
        assert_eq!(m.acc, 0.5);
    }

    fn instance() -> impl Strategy<Value = (Vec<bool>, Vec<f64>)> {
        (2usize..200).prop_flat_map(|n| {
            (
                proptest::collection::vec(any::<bool>(), n),
                // coarse grid so ties are common
                proptest::collection::vec((0i32..20).prop_map(|v| v as f64 / 4.0), n),
            )
        })
    }

    proptest! {
        #[test]
        fn matches_pair_counting((labels, scores) in instance()) {
            let pos = labels.iter().filter(|&&l| l).count();
            prop_assume!(pos > 0 && pos < labels.len());
            let auc = auc_from_scores(&labels, &scores).unwrap();
            prop_assert_eq!(auc, brute_force_auc(&labels, &scores));
            let flipped: Vec<bool> = labels.iter().map(|l| !l).collect();
            let complement = auc_from_scores(&flipped, &scores).unwrap();
            prop_assert!((auc + complement - 1.0).abs() < 1e-12);
            let transformed: Vec<f64> = scores.iter().map(|s| (s * 3.0).exp() - 7.0).collect();
            prop_assert_eq!(auc_from_scores(&labels, &transformed).unwrap(), auc);
        }
    }
}
