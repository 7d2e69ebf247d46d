//! Multi-objective differential evolution (DE/rand/1/bin) on continuous
//! surrogates binarised at 0.5.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::operators::repair_position;
use super::sort::{assign_rank_and_crowding, dominates, environmental_selection, evaluate_individuals};
use super::{Algorithm, EvalContext, Individual, MooError, ParetoFront, Snapshot};
use crate::rng::{rng_from_seed, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModeParams {
    pub population: usize,
    pub iterations: usize,
    /// Binomial crossover rate.
    pub crossover_prob: f64,
    /// Scaling factor.
    pub f: f64,
}

impl Default for ModeParams {
    fn default() -> Self {
        Self {
            population: 100,
            iterations: 100,
            crossover_prob: 0.5,
            f: 0.5,
        }
    }
}

impl ModeParams {
    pub fn validate(&self) -> Result<(), MooError> {
        if self.population < 4 {
            return Err(MooError::InvalidParameter("mode population must be at least 4".into()));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return Err(MooError::InvalidParameter("mode crossover_prob must lie in [0, 1]".into()));
        }
        if !self.f.is_finite() {
            return Err(MooError::InvalidParameter("mode scaling factor must be finite".into()));
        }
        Ok(())
    }
}

/// Three distinct indices in `0..n`, all different from `target`.
pub fn pick_distinct(n: usize, target: usize, rng: &mut Rng) -> [usize; 3] {
    assert!(n >= 4, "need at least four individuals");
    let mut out = [usize::MAX; 3];
    let mut k = 0;
    while k < 3 {
        let r = rng.gen_range(0..n);
        if r != target && !out[..k].contains(&r) {
            out[k] = r;
            k += 1;
        }
    }
    out
}

pub fn run_mode(params: &ModeParams, ctx: &EvalContext, seed: u64) -> Result<ParetoFront, MooError> {
    run_mode_observed(params, ctx, seed, &mut |_| {})
}

/// Runs MODE, calling `observer` after initialisation and after every
/// generation with the trial vectors as offspring.
pub fn run_mode_observed(
    params: &ModeParams,
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

    let mut positions = Vec::with_capacity(n);
    let mut chromosomes = Vec::with_capacity(n);
    for _ in 0..n {
        let mut x: Vec<f64> = (0..len).map(|_| rng.gen::<f64>()).collect();
        chromosomes.push(repair_position(&mut x, &mut rng));
        positions.push(x);
    }
    let mut pop = with_positions(evaluate_individuals(ctx, chromosomes), positions);
    assign_rank_and_crowding(&mut pop);
    observer(&Snapshot {
        algorithm: Algorithm::Mode,
        iteration: 0,
        population: &pop,
        offspring: &[],
        archive: None,
    });

    for generation in 1..=params.iterations {
        let size = pop.len();
        let mut trial_positions = Vec::with_capacity(size);
        let mut trial_chromosomes = Vec::with_capacity(size);
        for i in 0..size {
            let [r1, r2, r3] = pick_distinct(size, i, &mut rng);
            let target = pop[i].position.as_ref().expect("position");
            let (a, b, c) = (
                pop[r1].position.as_ref().expect("position"),
                pop[r2].position.as_ref().expect("position"),
                pop[r3].position.as_ref().expect("position"),
            );
            let forced = rng.gen_range(0..len);
            let mut trial = Vec::with_capacity(len);
            for j in 0..len {
                let cross = rng.gen::<f64>() < params.crossover_prob;
                trial.push(if cross || j == forced {
                    (a[j] + params.f * (b[j] - c[j])).clamp(0.0, 1.0)
                } else {
                    target[j]
                });
            }
            trial_chromosomes.push(repair_position(&mut trial, &mut rng));
            trial_positions.push(trial);
        }
        let trials = with_positions(evaluate_individuals(ctx, trial_chromosomes), trial_positions);

        let mut pool = Vec::with_capacity(2 * size);
        for (target, trial) in pop.iter().zip(&trials) {
            if dominates(&trial.objectives, &target.objectives) {
                pool.push(trial.clone());
            } else if dominates(&target.objectives, &trial.objectives) {
                pool.push(target.clone());
            } else {
                pool.push(target.clone());
                pool.push(trial.clone());
            }
        }
        pop = if pool.len() > n {
            environmental_selection(pool, n)
        } else {
            assign_rank_and_crowding(&mut pool);
            pool
        };
        observer(&Snapshot {
            algorithm: Algorithm::Mode,
            iteration: generation,
            population: &pop,
            offspring: &trials,
            archive: None,
        });
    }

    let front: Vec<Individual> = pop.into_iter().filter(|i| i.rank == 0).collect();
    Ok(ParetoFront::from_candidates(Algorithm::Mode, &front))
}

fn with_positions(mut pop: Vec<Individual>, positions: Vec<Vec<f64>>) -> Vec<Individual> {
    for (p, x) in pop.iter_mut().zip(positions) {
        p.position = Some(x);
    }
    pop
}
