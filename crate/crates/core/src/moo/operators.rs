use rand::Rng as _;

use super::{Chromosome, MooError};
use crate::rng::Rng;

/// Uniform random chromosome (each gene set with probability 1/2), repaired.
pub fn random_chromosome(len: usize, rng: &mut Rng) -> Chromosome {
    let bits = (0..len).map(|_| rng.gen_bool(0.5)).collect();
    repair_chromosome(Chromosome::new(bits), rng)
}

/// Single-point crossover with the cut drawn uniformly from `1..L`.
///
/// # Panics
/// If the parents differ in length or have fewer than two genes.
pub fn single_point_crossover(
    p1: &Chromosome,
    p2: &Chromosome,
    rng: &mut Rng,
) -> (Chromosome, Chromosome) {
    assert!(p1.len() >= 2, "crossover needs at least two genes");
    let cut = rng.gen_range(1..p1.len());
    single_point_crossover_at(p1, p2, cut)
}

/// Swaps the genes from `cut` onwards between the parents.
pub fn single_point_crossover_at(
    p1: &Chromosome,
    p2: &Chromosome,
    cut: usize,
) -> (Chromosome, Chromosome) {
    assert_eq!(p1.len(), p2.len(), "parents differ in length");
    assert!(cut <= p1.len());
    let a = p1.bits();
    let b = p2.bits();
    let mut c1 = a[..cut].to_vec();
    c1.extend_from_slice(&b[cut..]);
    let mut c2 = b[..cut].to_vec();
    c2.extend_from_slice(&a[cut..]);
    (Chromosome::new(c1), Chromosome::new(c2))
}

/// Spread factor for probability `u` and distribution index `n`.
pub fn sbx_beta(u: f64, n: f64) -> Result<f64, MooError> {
    if !(u > 0.0 && u < 1.0) {
        return Err(MooError::InvalidProbability(u));
    }
    if !(n >= 0.0) {
        return Err(MooError::InvalidParameter(format!(
            "distribution index must be non-negative, got {n}"
        )));
    }
    let exponent = 1.0 / (n + 1.0);
    Ok(if u <= 0.5 {
        (2.0 * u).powf(exponent)
    } else {
        (1.0 / (2.0 - 2.0 * u)).powf(exponent)
    })
}

/// Children of real-valued parents for spread factor `beta`.
pub fn sbx_children(p1: f64, p2: f64, beta: f64) -> (f64, f64) {
    let mid = 0.5 * (p1 + p2);
    let half_spread = 0.5 * beta * (p2 - p1);
    (mid - half_spread, mid + half_spread)
}

/// Polynomial-mutation perturbation for `u` in `(0, 1)` and index `eta`,
/// in `[-1, 1]`.
pub fn polynomial_mutation_delta(u: f64, eta: f64) -> Result<f64, MooError> {
    if !(u > 0.0 && u < 1.0) {
        return Err(MooError::InvalidProbability(u));
    }
    let exponent = 1.0 / (eta + 1.0);
    Ok(if u < 0.5 {
        (2.0 * u).powf(exponent) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powf(exponent)
    })
}

/// With probability `pm` flips one uniformly chosen gene.
pub fn bitflip_mutate(c: &Chromosome, pm: f64, rng: &mut Rng) -> Chromosome {
    let mut out = c.clone();
    if !c.is_empty() && rng.gen::<f64>() < pm {
        let j = rng.gen_range(0..c.len());
        out.bits_mut()[j] = !out.bits()[j];
    }
    out
}

/// Sets one uniformly chosen gene when no gene is set.
pub fn repair_chromosome(c: Chromosome, rng: &mut Rng) -> Chromosome {
    if c.count_ones() > 0 || c.is_empty() {
        return c;
    }
    let mut c = c;
    let j = rng.gen_range(0..c.len());
    c.bits_mut()[j] = true;
    c
}

/// Repairs a continuous surrogate so that its binarisation has a set gene,
/// keeping `bits == (position >= 0.5)`.
pub(crate) fn repair_position(position: &mut [f64], rng: &mut Rng) -> Chromosome {
    let c = Chromosome::from_position(position);
    if c.count_ones() == 0 && !position.is_empty() {
        let j = rng.gen_range(0..position.len());
        position[j] = 0.5;
        return Chromosome::from_position(position);
    }
    c
}
