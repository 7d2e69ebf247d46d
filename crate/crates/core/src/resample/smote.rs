use ndarray::{concatenate, Array2, ArrayView1, Axis};
use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{minority_label, ClassCounts, NeighborQuery, ResampleError, Sampler, SamplingReport};
use crate::data::Dataset;
use crate::rng::{rng_from_seed, Rng};

/// Interpolates `base + delta * (neighbor - base)` componentwise.
pub fn smote_synthesize(
    base: ArrayView1<f64>,
    neighbor: ArrayView1<f64>,
    delta: f64,
) -> Result<Vec<f64>, ResampleError> {
    if base.len() != neighbor.len() {
        return Err(ResampleError::LengthMismatch(base.len(), neighbor.len()));
    }
    Ok(base
        .iter()
        .zip(neighbor.iter())
        .map(|(&b, &n)| b + delta * (n - b))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BorderlineCategory {
    Safe,
    Danger,
    Noise,
}

/// Where one synthetic row came from. Indices refer to rows of the input
/// dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticOrigin {
    pub base: usize,
    pub neighbor: usize,
    pub delta: f64,
    pub values: Vec<f64>,
}

fn check_neighborhood(k: usize, points: usize) -> Result<(), ResampleError> {
    if k == 0 {
        Err(ResampleError::ZeroNeighborhood)
    } else if k >= points {
        Err(ResampleError::NeighborhoodTooLarge { k, points })
    } else {
        Ok(())
    }
}

/// Classifies every minority row by how many of its `m` nearest neighbours
/// (over the whole dataset) belong to the majority class: NOISE if all of
/// them, DANGER if at least half, SAFE otherwise.
pub fn borderline_classify(
    ds: &Dataset,
    m: usize,
) -> Result<Vec<(usize, BorderlineCategory)>, ResampleError> {
    if !ds.has_both_classes() {
        return Err(ResampleError::SingleClass);
    }
    check_neighborhood(m, ds.n_rows())?;
    let minority = minority_label(ds);
    let query = NeighborQuery::new(ds.features.view());
    let rows: Vec<usize> = (0..ds.n_rows()).filter(|&i| ds.labels[i] == minority).collect();
    Ok(rows
        .into_par_iter()
        .map(|row| {
            let neighbors = query.nearest_among(row, 0..ds.n_rows(), m);
            let majority = neighbors.iter().filter(|&&j| ds.labels[j] != minority).count();
            let category = if majority == m {
                BorderlineCategory::Noise
            } else if 2 * majority >= m {
                BorderlineCategory::Danger
            } else {
                BorderlineCategory::Safe
            };
            (row, category)
        })
        .collect())
}

/// Generates `need` synthetic minority rows seeded from `seeds`.
///
/// Seeds are shuffled once, then used round-robin; each synthetic row
/// interpolates its seed toward one of the seed's `k` nearest minority rows
/// with a uniform `delta` in `[0, 1)`.
fn synthesize(
    ds: &Dataset,
    seeds: &[usize],
    minority_rows: &[usize],
    need: usize,
    k: usize,
    rng: &mut Rng,
) -> Vec<SyntheticOrigin> {
    if need == 0 || seeds.is_empty() {
        return Vec::new();
    }
    let query = NeighborQuery::new(ds.features.view());
    let mut order = seeds.to_vec();
    order.sort_unstable();
    order.shuffle(rng);
    let neighbor_lists: Vec<Vec<usize>> = order
        .par_iter()
        .map(|&s| query.nearest_among(s, minority_rows.iter().copied(), k))
        .collect();

    (0..need)
        .map(|i| {
            let slot = i % order.len();
            let base = order[slot];
            let candidates = &neighbor_lists[slot];
            let neighbor = if candidates.is_empty() {
                base
            } else {
                candidates[rng.gen_range(0..candidates.len())]
            };
            let delta: f64 = rng.gen();
            let values = smote_synthesize(ds.features.row(base), ds.features.row(neighbor), delta)
                .expect("rows of one matrix share a width");
            SyntheticOrigin {
                base,
                neighbor,
                delta,
                values,
            }
        })
        .collect()
}

fn append_synthetic(ds: &Dataset, origins: &[SyntheticOrigin], label: bool) -> Dataset {
    if origins.is_empty() {
        return ds.clone();
    }
    let width = ds.n_features();
    let flat: Vec<f64> = origins.iter().flat_map(|o| o.values.iter().copied()).collect();
    let extra = Array2::from_shape_vec((origins.len(), width), flat).expect("synthetic shape");
    let features = concatenate(Axis(0), &[ds.features.view(), extra.view()]).expect("same width");
    let mut labels = ds.labels.clone();
    labels.extend(std::iter::repeat(label).take(origins.len()));
    Dataset {
        name: ds.name.clone(),
        feature_names: ds.feature_names.clone(),
        features,
        labels,
    }
}

/// Plain SMOTE over every minority row, up to exact balance.
pub fn smote(ds: &Dataset, k: usize, seed: u64) -> Result<(Dataset, SamplingReport), ResampleError> {
    if !ds.has_both_classes() {
        return Err(ResampleError::SingleClass);
    }
    if k == 0 {
        return Err(ResampleError::ZeroNeighborhood);
    }
    let before = ClassCounts::of(ds);
    let minority = minority_label(ds);
    let minority_rows: Vec<usize> = (0..ds.n_rows()).filter(|&i| ds.labels[i] == minority).collect();
    let mut rng = rng_from_seed(seed);
    let origins = synthesize(
        ds,
        &minority_rows,
        &minority_rows,
        before.majority - before.minority,
        k,
        &mut rng,
    );
    let out = append_synthetic(ds, &origins, minority);
    let report = SamplingReport {
        method: Sampler::None,
        before,
        after: ClassCounts::of(&out),
        synthetic_created: origins.len(),
        tomek_pairs_removed: 0,
        fallback_to_plain_smote: false,
        origins,
    };
    Ok((out, report))
}

/// Borderline-SMOTE-1: synthesises only from DANGER minority rows, toward
/// their `k` nearest minority neighbours, until the classes are balanced.
///
/// Without any DANGER row the seeds fall back to the SAFE rows, and to all
/// minority rows if every one of them is NOISE.
pub fn borderline_smote(
    ds: &Dataset,
    m: usize,
    k: usize,
    seed: u64,
) -> Result<(Dataset, SamplingReport), ResampleError> {
    if k == 0 {
        return Err(ResampleError::ZeroNeighborhood);
    }
    let categories = borderline_classify(ds, m)?;
    let before = ClassCounts::of(ds);
    let minority = minority_label(ds);
    let minority_rows: Vec<usize> = categories.iter().map(|&(r, _)| r).collect();
    let pick = |c: BorderlineCategory| -> Vec<usize> {
        categories
            .iter()
            .filter(|&&(_, cat)| cat == c)
            .map(|&(r, _)| r)
            .collect()
    };
    let need = before.majority - before.minority;
    let mut seeds = pick(BorderlineCategory::Danger);
    let mut fallback = false;
    if seeds.is_empty() && need > 0 {
        fallback = true;
        seeds = pick(BorderlineCategory::Safe);
        if seeds.is_empty() {
            seeds = minority_rows.clone();
        }
    }
    let mut rng = rng_from_seed(seed);
    let origins = synthesize(ds, &seeds, &minority_rows, need, k, &mut rng);
    let out = append_synthetic(ds, &origins, minority);
    let report = SamplingReport {
        method: Sampler::BorderlineSmote,
        before,
        after: ClassCounts::of(&out),
        synthetic_created: origins.len(),
        tomek_pairs_removed: 0,
        fallback_to_plain_smote: fallback,
        origins,
    };
    Ok((out, report))
}
