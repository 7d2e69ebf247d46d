use ndarray::{ArrayView1, ArrayView2};
use rayon::prelude::*;

use super::ResampleError;

/// Brute-force Euclidean neighbour search over the rows of a matrix.
///
/// The query row itself is never returned. Ties are broken by lower index.
#[derive(Debug, Clone, Copy)]
pub struct NeighborQuery<'a> {
    points: ArrayView2<'a, f64>,
}

fn squared_distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl<'a> NeighborQuery<'a> {
    pub fn new(points: ArrayView2<'a, f64>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    /// The `k` nearest rows to `target` among all other rows.
    pub fn knn_indices(&self, target: usize, k: usize) -> Result<Vec<usize>, ResampleError> {
        if k == 0 {
            return Err(ResampleError::ZeroNeighborhood);
        }
        if k >= self.len() {
            return Err(ResampleError::NeighborhoodTooLarge {
                k,
                points: self.len(),
            });
        }
        Ok(self.nearest_among(target, 0..self.len(), k))
    }

    /// The `k` nearest rows to `target` drawn from `candidates` (target
    /// excluded). Returns fewer than `k` when there are not enough candidates.
    pub fn nearest_among(
        &self,
        target: usize,
        candidates: impl IntoIterator<Item = usize>,
        k: usize,
    ) -> Vec<usize> {
        let query = self.points.row(target);
        let mut scored: Vec<(f64, usize)> = candidates
            .into_iter()
            .filter(|&c| c != target)
            .map(|c| (squared_distance(query, self.points.row(c)), c))
            .collect();
        let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < scored.len() {
            scored.select_nth_unstable_by(k, order);
            scored.truncate(k);
        }
        scored.sort_unstable_by(order);
        scored.into_iter().map(|(_, i)| i).collect()
    }

    /// Single nearest neighbour of every row, computed in parallel.
    pub fn nearest_of_each(&self) -> Vec<Option<usize>> {
        (0..self.len())
            .into_par_iter()
            .map(|i| {
                let row = self.points.row(i);
                let mut best: Option<(f64, usize)> = None;
                for j in 0..self.len() {
                    if j == i {
                        continue;
                    }
                    let d = squared_distance(row, self.points.row(j));
                    if best.map_or(true, |(bd, _)| d < bd) {
                        best = Some((d, j));
                    }
                }
                best.map(|(_, j)| j)
            })
            .collect()
    }
}
