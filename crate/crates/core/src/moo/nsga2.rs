//! Generational NSGA-II over bitstrings.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::operators::{bitflip_mutate, random_chromosome, repair_chromosome, single_point_crossover};
use super::sort::{assign_rank_and_crowding, environmental_selection, evaluate_individuals};
use super::{Algorithm, EvalContext, Individual, MooError, ParetoFront, Snapshot};
use crate::rng::{rng_from_seed, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Nsga2Params {
    pub population: usize,
    pub iterations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    /// SBX distribution index; the binary operators do not use it.
    pub eta_c: f64,
    /// Polynomial-mutation index; the binary operators do not use it.
    pub eta_m: f64,
}

impl Default for Nsga2Params {
    fn default() -> Self {
        Self {
            population: 100,
            iterations: 100,
            crossover_prob: 0.6,
            mutation_prob: 0.1,
            eta_c: 1.0,
            eta_m: 1.0,
        }
    }
}

impl Nsga2Params {
    pub fn validate(&self) -> Result<(), MooError> {
        if self.population < 2 {
            return Err(MooError::InvalidParameter("nsga2 population must be at least 2".into()));
        }
        for (name, p) in [("crossover_prob", self.crossover_prob), ("mutation_prob", self.mutation_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(MooError::InvalidParameter(format!("nsga2 {name} must lie in [0, 1]")));
            }
        }
        if !(self.eta_c >= 0.0 && self.eta_m >= 0.0) {
            return Err(MooError::InvalidParameter("nsga2 distribution indices must be non-negative".into()));
        }
        Ok(())
    }
}

pub fn run_nsga2(params: &Nsga2Params, ctx: &EvalContext, seed: u64) -> Result<ParetoFront, MooError> {
    run_nsga2_observed(params, ctx, seed, &mut |_| {})
}

/// Runs NSGA-II, calling `observer` after initialisation and after every
/// generation.
pub fn run_nsga2_observed(
    params: &Nsga2Params,
    ctx: &EvalContext,
    seed: u64,
    observer: &mut dyn FnMut(&Snapshot<'_>),
) -> Result<ParetoFront, MooError> {
    params.validate()?;
    let len = ctx.n_features();
    if len == 0 {
        return Err(MooError::InvalidParameter("dataset has no features".into()));
    }
    let n = params.population;
    let mut rng = rng_from_seed(seed);

    let initial = (0..n).map(|_| random_chromosome(len, &mut rng)).collect();
    let mut pop = evaluate_individuals(ctx, initial);
    assign_rank_and_crowding(&mut pop);
    observer(&Snapshot {
        algorithm: Algorithm::Nsga2,
        iteration: 0,
        population: &pop,
        offspring: &[],
        archive: None,
    });

    for generation in 1..=params.iterations {
        let mut children = Vec::with_capacity(n + 1);
        while children.len() < n {
            let a = tournament(&pop, &mut rng);
            let b = tournament(&pop, &mut rng);
            let (p1, p2) = (&pop[a].chromosome, &pop[b].chromosome);
            let (c1, c2) = if rng.gen::<f64>() < params.crossover_prob && len >= 2 {
                single_point_crossover(p1, p2, &mut rng)
            } else {
                (p1.clone(), p2.clone())
            };
            for c in [c1, c2] {
                let mutated = bitflip_mutate(&c, params.mutation_prob, &mut rng);
                children.push(repair_chromosome(mutated, &mut rng));
            }
        }
        children.truncate(n);
        let offspring = evaluate_individuals(ctx, children);
        let mut pool = pop;
        pool.extend(offspring.iter().cloned());
        pop = environmental_selection(pool, n);
        observer(&Snapshot {
            algorithm: Algorithm::Nsga2,
            iteration: generation,
            population: &pop,
            offspring: &offspring,
            archive: None,
        });
    }

    let front: Vec<Individual> = pop.into_iter().filter(|i| i.rank == 0).collect();
    Ok(ParetoFront::from_candidates(Algorithm::Nsga2, &front))
}

/// Binary tournament: lower rank wins, then larger crowding distance.
fn tournament(pop: &[Individual], rng: &mut Rng) -> usize {
    let i = rng.gen_range(0..pop.len());
    let j = rng.gen_range(0..pop.len());
    let (a, b) = (&pop[i], &pop[j]);
    if b.rank < a.rank || (b.rank == a.rank && b.crowding > a.crowding) {
        j
    } else {
        i
    }
}
