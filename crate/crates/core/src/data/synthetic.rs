//! Surrogate defect datasets.
//!
//! The public NASA MDP and PROMISE files are not redistributed with this
//! crate. [`generate`] produces seeded stand-ins with the same module count,
//! metric count and defect count as the fourteen benchmark sets, so that every
//! stage can be exercised end to end. Metric values follow a log-normal
//! size/complexity model: a few metrics carry the defect signal, some are noisy
//! copies of those, and the rest are independent of the label.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use super::Dataset;
use crate::rng::rng_from_seed;

/// Class layout of one benchmark dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Profile {
    pub name: &'static str,
    pub repository: &'static str,
    pub features: usize,
    pub defective: usize,
    pub non_defective: usize,
}

impl Profile {
    pub fn modules(&self) -> usize {
        self.defective + self.non_defective
    }
}

const fn p(
    name: &'static str,
    repository: &'static str,
    features: usize,
    defective: usize,
    non_defective: usize,
) -> Profile {
    Profile {
        name,
        repository,
        features,
        defective,
        non_defective,
    }
}

/// The eight NASA and six PROMISE layouts.
///
/// Synapse-1.1 uses the 60/162 split of the resampling statistics table (the
/// 222-module release); the summary table lists 16/141 for it.
pub const PROFILES: [Profile; 14] = [
    p("CM1", "NASA", 37, 42, 285),
    p("KC3", "NASA", 39, 36, 164),
    p("MC1", "NASA", 38, 46, 1942),
    p("MC2", "NASA", 39, 44, 81),
    p("MW1", "NASA", 37, 27, 237),
    p("PC2", "NASA", 36, 16, 1569),
    p("PC4", "NASA", 37, 177, 1110),
    p("PC5", "NASA", 38, 471, 1240),
    p("Ant-1.7", "PROMISE", 20, 166, 579),
    p("Camel-1.6", "PROMISE", 20, 188, 777),
    p("Jedit-4.3", "PROMISE", 20, 11, 481),
    p("Synapse-1.1", "PROMISE", 20, 60, 162),
    p("Poi-2.0", "PROMISE", 20, 37, 277),
    p("Log4j-1.0", "PROMISE", 20, 34, 101),
];

/// Looks a profile up by case-insensitive name (`cm1`, `jedit-4.3`, ...).
pub fn profile(name: &str) -> Option<Profile> {
    PROFILES
        .iter()
        .copied()
        .find(|p| p.name.eq_ignore_ascii_case(name))
}

enum Role {
    Informative { size: f64, complexity: f64 },
    Redundant { source: usize, factor: f64 },
    Noise,
}

/// Generates the surrogate for `profile`; deterministic in `seed`.
pub fn generate(profile: &Profile, seed: u64) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let n = profile.modules();
    let width = profile.features;

    let n_informative = (width / 5).max(3).min(width);
    let n_redundant = (width / 5).min(width - n_informative);
    let mut roles: Vec<Role> = Vec::with_capacity(width);
    for _ in 0..n_informative {
        roles.push(Role::Informative {
            size: rng.gen_range(0.3..1.0),
            complexity: rng.gen_range(0.0..0.8),
        });
    }
    for _ in 0..n_redundant {
        roles.push(Role::Redundant {
            source: rng.gen_range(0..n_informative),
            factor: rng.gen_range(0.5..3.0),
        });
    }
    while roles.len() < width {
        roles.push(Role::Noise);
    }
    roles.shuffle(&mut rng);
    let scales: Vec<f64> = (0..width).map(|_| 10f64.powf(rng.gen_range(0.0..2.5))).collect();
    let counts: Vec<bool> = (0..width).map(|_| rng.gen_bool(0.5)).collect();

    let mut labels: Vec<bool> = (0..n).map(|i| i < profile.defective).collect();
    labels.shuffle(&mut rng);

    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut values = Array2::<f64>::zeros((n, width));
    // informative columns first so redundant ones can copy them
    let informative_cols: Vec<usize> = roles
        .iter()
        .enumerate()
        .filter(|(_, r)| matches!(r, Role::Informative { .. }))
        .map(|(j, _)| j)
        .collect();
    for (i, &defective) in labels.iter().enumerate() {
        let y = if defective { 1.0 } else { 0.0 };
        let size = normal() + 1.1 * y;
        let complexity = normal() + 0.7 * y;
        for (j, role) in roles.iter().enumerate() {
            let raw = match role {
                Role::Informative {
                    size: a,
                    complexity: b,
                } => (a * size + b * complexity + 0.7 * normal()).exp(),
                Role::Noise => (0.8 * normal()).exp(),
                Role::Redundant { .. } => continue,
            };
            values[[i, j]] = raw * scales[j];
        }
        for (j, role) in roles.iter().enumerate() {
            if let Role::Redundant { source, factor } = role {
                let src = informative_cols[*source];
                values[[i, j]] = values[[i, src]] * factor * (0.25 * normal()).exp();
            }
        }
        for j in 0..width {
            if counts[j] {
                values[[i, j]] = values[[i, j]].round();
            }
        }
    }

    let names = (0..width).map(|j| format!("m{:02}", j + 1)).collect();
    Dataset::new(profile.name, names, values, labels).expect("generated values are finite")
}
