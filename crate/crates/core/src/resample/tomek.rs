use super::smote::smote;
use super::{ClassCounts, NeighborQuery, ResampleError, Sampler, SamplingReport};
use crate::data::Dataset;

/// All opposite-label pairs `(a, b)`, `a < b`, that are each other's single
/// nearest neighbour. Sorted by `a`.
pub fn tomek_links(ds: &Dataset) -> Vec<(usize, usize)> {
    if !ds.has_both_classes() {
        return Vec::new();
    }
    let nearest = NeighborQuery::new(ds.features.view()).nearest_of_each();
    nearest
        .iter()
        .enumerate()
        .filter_map(|(a, &nb)| {
            let b = nb?;
            (a < b && nearest[b] == Some(a) && ds.labels[a] != ds.labels[b]).then_some((a, b))
        })
        .collect()
}

/// SMOTE to exact balance, then one pass of Tomek-link cleaning that drops
/// both rows of every link.
///
/// Each link holds one row of each class, so the classes stay balanced.
pub fn smote_tomek(
    ds: &Dataset,
    k: usize,
    seed: u64,
) -> Result<(Dataset, SamplingReport), ResampleError> {
    let (balanced, mut report) = smote(ds, k, seed)?;
    let links = tomek_links(&balanced);
    let mut drop = vec![false; balanced.n_rows()];
    for &(a, b) in &links {
        drop[a] = true;
        drop[b] = true;
    }
    let keep: Vec<usize> = (0..balanced.n_rows()).filter(|&i| !drop[i]).collect();
    let out = balanced.select_rows(&keep);
    report.method = Sampler::SmoteTomek;
    report.after = ClassCounts::of(&out);
    report.tomek_pairs_removed = links.len();
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::Rng;

    fn dataset(features: Array2<f64>, labels: Vec<bool>) -> Dataset {
        let names = (0..features.ncols()).map(|j| format!("f{j}")).collect();
        Dataset::new("t", names, features, labels).unwrap()
    }

    #[test]
    fn single_class_has_no_links() {
        let ds = dataset(array![[0.0], [1.0], [2.0]], vec![false, false, false]);
        assert!(tomek_links(&ds).is_empty());
    }

    #[test]
    fn two_opposite_points_form_one_link() {
        let ds = dataset(array![[0.0, 0.0], [1.0, 1.0]], vec![true, false]);
        assert_eq!(tomek_links(&ds), vec![(0, 1)]);
    }

    /// Exhaustive mutual-nearest-neighbour scan with explicit distances.
    fn oracle_links(ds: &Dataset) -> Vec<(usize, usize)> {
        let n = ds.n_rows();
        let dist = |a: usize, b: usize| -> f64 {
            (0..ds.n_features())
                .map(|j| (ds.features[[a, j]] - ds.features[[b, j]]).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let nn: Vec<usize> = (0..n)
            .map(|a| {
                let mut best = usize::MAX;
                let mut best_d = f64::INFINITY;
                for b in 0..n {
                    if b != a && dist(a, b) < best_d {
                        best_d = dist(a, b);
                        best = b;
                    }
                }
                best
            })
            .collect();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if nn[a] == b && nn[b] == a && ds.labels[a] != ds.labels[b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    #[test]
    fn twelve_point_fixture_matches_exhaustive_scan() {
        for seed in 0..20 {
            let mut rng = crate::rng::rng_from_seed(seed);
            let features = Array2::from_shape_fn((12, 2), |_| rng.gen_range(0.0..1.0));
            let labels = (0..12).map(|i| i % 3 == 0).collect();
            let ds = dataset(features, labels);
            assert_eq!(tomek_links(&ds), oracle_links(&ds));
        }
    }

    #[test]
    fn smote_tomek_balances() {
        let mut rng = crate::rng::rng_from_seed(5);
        let n = 60;
        let labels: Vec<bool> = (0..n).map(|i| i < 10).collect();
        let features = Array2::from_shape_fn((n, 2), |(i, _)| {
            rng.gen_range(0.0..1.0) + if labels[i] { 0.2 } else { 0.0 }
        });
        let ds = dataset(features, labels);
        let (out, report) = smote_tomek(&ds, 5, 1).unwrap();
        let (pos, neg) = out.class_counts();
        assert_eq!(pos, neg);
        assert_eq!(pos, 50 - report.tomek_pairs_removed);
        assert_eq!(report.synthetic_created, 40);
        assert_eq!(report.method, Sampler::SmoteTomek);
    }

    #[test]
    fn far_apart_pair_keeps_everything() {
        // two defective rows far from three clean rows; after synthesis the
        // nearest neighbour of each row is same-class
        let ds = dataset(
            array![[0.0], [0.1], [10.0], [10.1], [10.2]],
            vec![true, true, false, false, false],
        );
        let (out, report) = smote_tomek(&ds, 1, 0).unwrap();
        assert_eq!(report.tomek_pairs_removed, 0);
        assert_eq!(out.class_counts(), (3, 3));
    }

    #[test]
    fn single_class_is_an_error() {
        let ds = dataset(array![[0.0], [1.0]], vec![true, true]);
        assert_eq!(smote_tomek(&ds, 5, 0).unwrap_err(), ResampleError::SingleClass);
    }
}
