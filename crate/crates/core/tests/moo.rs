use std::sync::Arc;

use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};
use sdp_core::data::{fit_normalizer, normalize, Dataset};
use sdp_core::moo::{run_nsga2, Chromosome, EvalContext, EvalData, Nsga2Params};
use sdp_core::rng::rng_from_seed;

/// Ten metrics: the first three shift with the label, the rest are noise.
fn three_informative(seed: u64) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let n = 150;
    let labels: Vec<bool> = (0..n).map(|i| i % 10 < 3).collect();
    let features = Array2::from_shape_fn((n, 10), |(i, j)| {
        let z: f64 = StandardNormal.sample(&mut rng);
        if j < 3 && labels[i] {
            z + 1.2
        } else {
            z
        }
    });
    let names = (0..10).map(|j| format!("m{j}")).collect();
    let raw = Dataset::new("three-informative", names, features, labels).unwrap();
    normalize(&raw, &fit_normalizer(&raw)).unwrap()
}

fn subset(mask: u32) -> Chromosome {
    Chromosome::new((0..10).map(|j| mask >> (9 - j) & 1 == 1).collect())
}

#[test]
fn nsga2_best_member_is_small_on_three_informative_features() {
    let ds = three_informative(5);
    let data = Arc::new(EvalData::with_svm(&ds, 1));

    // exhaustive oracle over all 1023 non-empty subsets
    let oracle = EvalContext::new(Arc::clone(&data));
    let all: Vec<Chromosome> = (1..1024u32).map(subset).collect();
    let scores = oracle.evaluate_batch(&all);
    let best_small = all
        .iter()
        .zip(&scores)
        .filter(|(c, _)| c.count_ones() <= 6)
        .map(|(_, o)| o.auc)
        .fold(0.0, f64::max);
    let best_large = all
        .iter()
        .zip(&scores)
        .filter(|(c, _)| c.count_ones() > 6)
        .map(|(_, o)| o.auc)
        .fold(0.0, f64::max);
    assert!(best_small > best_large, "{best_small} vs {best_large}");
    let informative_only = scores[(0b1110000000u32 - 1) as usize].auc;
    let noise_only = scores[(0b0001111111u32 - 1) as usize].auc;
    assert!(informative_only > noise_only + 0.2);

    let params = Nsga2Params {
        population: 20,
        iterations: 10,
        ..Default::default()
    };
    for seed in 0..5 {
        let ctx = EvalContext::new(Arc::clone(&data));
        let front = run_nsga2(&params, &ctx, seed).unwrap();
        let best = front.best_auc().unwrap();
        assert!(best.chromosome.count_ones() <= 6, "seed {seed}: {}", best.chromosome);
        // every reported AUC is the oracle value of that subset
        for m in &front.members {
            let mask = m.chromosome.decode().unwrap() as usize;
            assert_eq!(m.objectives.auc, scores[mask - 1].auc);
        }
    }
}
