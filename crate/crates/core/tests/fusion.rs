use std::collections::HashMap;

use ndarray::Array2;
use rand::Rng as _;
use sdp_core::data::Dataset;
use sdp_core::fusion::{greedy_forward_select, prefix_sweep, vote_fuse, weight_fuse};
use sdp_core::moo::{Algorithm, Chromosome, EvalData, Individual, ObjectiveVector, ParetoFront};
use sdp_core::rng::rng_from_seed;

fn fixture(width: usize, seed: u64) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let n = 80;
    let labels: Vec<bool> = (0..n).map(|i| i % 4 == 0).collect();
    let features = Array2::from_shape_fn((n, width), |(i, j)| {
        let signal = if labels[i] { 0.15 * j as f64 } else { 0.0 };
        rng.gen_range(0.0..1.0) + signal
    });
    let names = (0..width).map(|j| format!("f{j}")).collect();
    Dataset::new("fixture", names, features, labels).unwrap()
}

fn mask_multipliers(mask: u32, width: usize) -> Vec<f64> {
    (0..width).map(|j| f64::from((mask >> j) & 1)).collect()
}

#[test]
fn greedy_matches_resimulation_over_subset_table() {
    for seed in 0..6 {
        let ds = fixture(4, seed);
        let data = EvalData::with_svm(&ds, seed);
        let table: HashMap<u32, f64> = (1..16u32)
            .map(|m| (m, data.validation_auc(&mask_multipliers(m, 4)).unwrap()))
            .collect();

        let mut mask = 0u32;
        let mut expected = Vec::new();
        for _ in 0..4 {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..4 {
                if mask >> j & 1 == 1 {
                    continue;
                }
                let auc = table[&(mask | 1 << j)];
                if best.map_or(true, |(_, b)| auc > b) {
                    best = Some((j, auc));
                }
            }
            let (j, _) = best.unwrap();
            mask |= 1 << j;
            expected.push(j);
        }
        assert_eq!(greedy_forward_select(&data).unwrap(), expected, "seed {seed}");

        let single_best = (0..4)
            .max_by(|&a, &b| table[&(1 << a)].total_cmp(&table[&(1 << b)]).then(b.cmp(&a)))
            .unwrap();
        assert_eq!(expected[0], single_best);
    }
}

#[test]
fn label_copy_is_selected_first() {
    let mut ds = fixture(4, 9);
    for i in 0..ds.n_rows() {
        ds.features[[i, 2]] = if ds.labels[i] { 1.0 } else { 0.0 };
    }
    let data = EvalData::with_svm(&ds, 3);
    assert_eq!(greedy_forward_select(&data).unwrap()[0], 2);
    assert_eq!(data.validation_auc(&[0.0, 0.0, 1.0, 0.0]).unwrap(), 1.0);
}

fn front(bits: &[&str]) -> ParetoFront {
    let members = bits
        .iter()
        .map(|b| {
            let c: Chromosome = b.parse().unwrap();
            let o = ObjectiveVector::from_parts(&c, 0.8);
            Individual::new(c, o)
        })
        .collect();
    ParetoFront {
        algorithm: Algorithm::Nsga2,
        members,
    }
}

#[test]
fn uniform_votes_make_weight_and_vote_sweeps_coincide() {
    let ds = fixture(4, 2);
    let data = EvalData::with_svm(&ds, 2);
    let fronts = [front(&["1101"]), front(&["1101"])];
    let vote = vote_fuse(&fronts).unwrap();
    let weight = weight_fuse(&fronts).unwrap();
    assert!(weight.entries.iter().all(|e| e.weight == 1.0));
    let a = prefix_sweep(&vote.weighted_order(), &data).unwrap();
    let b = prefix_sweep(&weight.weighted_order(), &data).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.curve.len(), 3);
}

#[test]
fn weighted_prefix_scales_columns() {
    let ds = fixture(4, 4);
    let data = EvalData::with_svm(&ds, 4);
    let fronts = [front(&["1100", "1000"]), front(&["1010"])];
    let weight = weight_fuse(&fronts).unwrap();
    let sweep = prefix_sweep(&weight.weighted_order(), &data).unwrap();
    for &(len, auc) in &sweep.curve {
        let mut m = vec![0.0; 4];
        for e in &weight.entries[..len] {
            m[e.feature] = e.weight;
        }
        assert_eq!(auc, data.validation_auc(&m).unwrap());
    }
    assert_eq!(weight.entries[0].feature, 0);
    assert!((weight.entries[1].weight - 1.0 / 3.0).abs() < 1e-15);
}
