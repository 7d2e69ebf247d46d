use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FusionError;
use crate::moo::EvalData;

/// Validation AUC of every ranking prefix and the chosen cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefixSweep {
    /// `(prefix length, AUC)` for lengths `1..=len`.
    pub curve: Vec<(usize, f64)>,
    pub best_length: usize,
    pub best_auc: f64,
    /// Column multipliers of the best prefix (0 for unselected features).
    pub multipliers: Vec<f64>,
}

impl PrefixSweep {
    /// Picks the maximal value of `curve`, shortest length on ties.
    pub fn best_of(curve: &[(usize, f64)]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for &(len, auc) in curve {
            if best.map_or(true, |(_, b)| auc > b) {
                best = Some((len, auc));
            }
        }
        best
    }

    pub fn selected(&self) -> Vec<usize> {
        (0..self.multipliers.len()).filter(|&j| self.multipliers[j] != 0.0).collect()
    }

    /// Writes `length,auc` rows.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["length", "auc"])?;
        for (len, auc) in &self.curve {
            w.write_record([len.to_string(), auc.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Multipliers of the first `len` entries of `order`.
pub(crate) fn prefix_multipliers(order: &[(usize, f64)], len: usize, n_features: usize) -> Vec<f64> {
    let mut m = vec![0.0; n_features];
    for &(j, w) in &order[..len] {
        m[j] = w;
    }
    m
}

/// Evaluates every prefix of `order`, given as `(feature, multiplier)` pairs,
/// on the internal split of `data`.
pub fn prefix_sweep(order: &[(usize, f64)], data: &EvalData) -> Result<PrefixSweep, FusionError> {
    if order.is_empty() {
        return Err(FusionError::EmptyRanking);
    }
    let l = data.n_features();
    let curve: Vec<(usize, f64)> = (1..=order.len())
        .into_par_iter()
        .map(|len| {
            let auc = data.validation_auc(&prefix_multipliers(order, len, l))?;
            Ok((len, auc))
        })
        .collect::<Result<_, FusionError>>()?;
    let (best_length, best_auc) = PrefixSweep::best_of(&curve).expect("non-empty curve");
    Ok(PrefixSweep {
        multipliers: prefix_multipliers(order, best_length, l),
        curve,
        best_length,
        best_auc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_and_max_rule() {
        let curve = [(1, 0.7), (2, 0.9), (3, 0.9), (4, 0.85)];
        assert_eq!(PrefixSweep::best_of(&curve), Some((2, 0.9)));
        let rising = [(1, 0.6), (2, 0.7), (3, 0.8)];
        assert_eq!(PrefixSweep::best_of(&rising), Some((3, 0.8)));
        assert_eq!(PrefixSweep::best_of(&[]), None);
    }

    #[test]
    fn multipliers_follow_prefix() {
        let order = [(2, 1.0), (0, 0.5), (3, 0.25)];
        assert_eq!(prefix_multipliers(&order, 2, 4), vec![0.5, 0.0, 1.0, 0.0]);
    }
}
