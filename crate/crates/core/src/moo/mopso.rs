//! Multi-objective particle swarm with an external grid archive.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::operators::repair_position;
use super::sort::{dominates, evaluate_individuals};
use super::{Algorithm, EvalContext, Individual, MooError, ObjectiveVector, ParetoFront, Snapshot};
use crate::rng::{rng_from_seed, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MopsoParams {
    pub population: usize,
    pub iterations: usize,
    pub archive_size: usize,
    pub c1: f64,
    pub c2: f64,
    /// Inertia weight.
    pub w: f64,
    pub v_max: f64,
    pub v_min: f64,
    /// Grid divisions per objective.
    pub grid: usize,
}

impl Default for MopsoParams {
    fn default() -> Self {
        Self {
            population: 100,
            iterations: 100,
            archive_size: 100,
            c1: 1.49,
            c2: 2.0,
            w: 0.729,
            v_max: 1.0,
            v_min: -1.0,
            grid: 50,
        }
    }
}

impl MopsoParams {
    pub fn validate(&self) -> Result<(), MooError> {
        let fail = |m: &str| Err(MooError::InvalidParameter(format!("mopso {m}")));
        if self.population == 0 {
            return fail("population must be positive");
        }
        if self.archive_size < 2 {
            return fail("archive size must be at least 2");
        }
        if self.grid == 0 {
            return fail("grid must have at least one division");
        }
        if !(self.v_min < self.v_max) {
            return fail("v_min must be below v_max");
        }
        if ![self.c1, self.c2, self.w, self.v_min, self.v_max].iter().all(|x| x.is_finite()) {
            return fail("coefficients must be finite");
        }
        Ok(())
    }
}

pub fn run_mopso(params: &MopsoParams, ctx: &EvalContext, seed: u64) -> Result<ParetoFront, MooError> {
    run_mopso_observed(params, ctx, seed, &mut |_| {})
}

/// Runs MOPSO, calling `observer` after initialisation and after every
/// iteration with the swarm and the archive.
pub fn run_mopso_observed(
    params: &MopsoParams,
    ctx: &EvalContext,
    seed: u64,
    observer: &mut dyn FnMut(&Snapshot<'_>),
) -> Result<ParetoFront, MooError> {
    params.validate()?;
    let len = ctx.n_features();
    if len == 0 {
        return Err(MooError::InvalidParameter("dataset has no features".into()));
    }
    let mut rng = rng_from_seed(seed);

    let mut positions: Vec<Vec<f64>> = Vec::with_capacity(params.population);
    let mut chromosomes = Vec::with_capacity(params.population);
    for _ in 0..params.population {
        let mut x: Vec<f64> = (0..len).map(|_| rng.gen::<f64>()).collect();
        chromosomes.push(repair_position(&mut x, &mut rng));
        positions.push(x);
    }
    let mut swarm = evaluate_individuals(ctx, chromosomes);
    for (p, x) in swarm.iter_mut().zip(positions) {
        p.position = Some(x);
        p.velocity = Some(vec![0.0; len]);
    }
    let mut personal_best: Vec<Individual> = swarm.clone();
    let mut archive: Vec<Individual> = Vec::new();
    update_archive(&mut archive, &swarm, params, &mut rng);
    observer(&Snapshot {
        algorithm: Algorithm::Mopso,
        iteration: 0,
        population: &swarm,
        offspring: &[],
        archive: Some(&archive),
    });

    for iteration in 1..=params.iterations {
        let grid = Grid::new(&archive, params.grid);
        let mut moved = Vec::with_capacity(swarm.len());
        let mut chromosomes = Vec::with_capacity(swarm.len());
        for (particle, best) in swarm.iter().zip(&personal_best) {
            let leader = &archive[grid.select_leader(&mut rng)];
            let x = particle.position.as_ref().expect("particle position");
            let v = particle.velocity.as_ref().expect("particle velocity");
            let pbest = best.position.as_ref().expect("best position");
            let lead = leader.position.as_ref().expect("leader position");
            let mut new_v = Vec::with_capacity(len);
            let mut new_x = Vec::with_capacity(len);
            for j in 0..len {
                let r1: f64 = rng.gen();
                let r2: f64 = rng.gen();
                let vj = (params.w * v[j]
                    + params.c1 * r1 * (pbest[j] - x[j])
                    + params.c2 * r2 * (lead[j] - x[j]))
                    .clamp(params.v_min, params.v_max);
                new_v.push(vj);
                new_x.push((x[j] + vj).clamp(0.0, 1.0));
            }
            chromosomes.push(repair_position(&mut new_x, &mut rng));
            moved.push((new_x, new_v));
        }
        swarm = evaluate_individuals(ctx, chromosomes);
        for (p, (x, v)) in swarm.iter_mut().zip(moved) {
            p.position = Some(x);
            p.velocity = Some(v);
        }
        for (best, current) in personal_best.iter_mut().zip(&swarm) {
            let replace = if dominates(&current.objectives, &best.objectives) {
                true
            } else if dominates(&best.objectives, &current.objectives) {
                false
            } else {
                rng.gen_bool(0.5)
            };
            if replace {
                *best = current.clone();
            }
        }
        update_archive(&mut archive, &swarm, params, &mut rng);
        observer(&Snapshot {
            algorithm: Algorithm::Mopso,
            iteration,
            population: &swarm,
            offspring: &swarm,
            archive: Some(&archive),
        });
    }

    Ok(ParetoFront::from_candidates(Algorithm::Mopso, &archive))
}

/// Adds the non-dominated newcomers, drops dominated members and duplicate
/// bitstrings, then truncates to the archive size from the densest cells.
fn update_archive(archive: &mut Vec<Individual>, candidates: &[Individual], params: &MopsoParams, rng: &mut Rng) {
    for c in candidates {
        if archive
            .iter()
            .any(|a| dominates(&a.objectives, &c.objectives) || a.chromosome == c.chromosome)
        {
            continue;
        }
        archive.retain(|a| !dominates(&c.objectives, &a.objectives));
        archive.push(c.clone());
    }
    while archive.len() > params.archive_size {
        let protected = extreme_members(archive);
        let grid = Grid::new(archive, params.grid);
        let victim = grid.densest_member(&protected, rng);
        archive.remove(victim);
    }
}

/// Index of the best member for each objective (first on ties).
fn extreme_members(archive: &[Individual]) -> [usize; 2] {
    let best_by = |get: fn(&ObjectiveVector) -> f64| {
        let mut best = 0;
        for (i, a) in archive.iter().enumerate() {
            if get(&a.objectives) > get(&archive[best].objectives) {
                best = i;
            }
        }
        best
    };
    [best_by(|o| o.features), best_by(|o| o.auc)]
}

/// Hypercube grid over the archive's objective bounds.
struct Grid {
    cells: BTreeMap<(usize, usize), Vec<usize>>,
}

impl Grid {
    fn new(archive: &[Individual], divisions: usize) -> Self {
        let bounds = |get: fn(&ObjectiveVector) -> f64| {
            archive.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
                (lo.min(get(&a.objectives)), hi.max(get(&a.objectives)))
            })
        };
        let cell = |value: f64, (lo, hi): (f64, f64)| -> usize {
            if hi > lo {
                (((value - lo) / (hi - lo) * divisions as f64) as usize).min(divisions - 1)
            } else {
                0
            }
        };
        let bf = bounds(|o| o.features);
        let ba = bounds(|o| o.auc);
        let mut cells: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, a) in archive.iter().enumerate() {
            let key = (cell(a.objectives.features, bf), cell(a.objectives.auc, ba));
            cells.entry(key).or_default().push(i);
        }
        Self { cells }
    }

    /// Roulette over occupied cells weighted by inverse occupancy, then a
    /// uniform member of the chosen cell.
    fn select_leader(&self, rng: &mut Rng) -> usize {
        let total: f64 = self.cells.values().map(|m| 1.0 / m.len() as f64).sum();
        let mut target = rng.gen::<f64>() * total;
        let mut chosen = self.cells.values().last().expect("archive is never empty");
        for members in self.cells.values() {
            target -= 1.0 / members.len() as f64;
            if target < 0.0 {
                chosen = members;
                break;
            }
        }
        chosen[rng.gen_range(0..chosen.len())]
    }

    /// A random unprotected member of the most crowded cell that has one
    /// (first such cell on ties).
    fn densest_member(&self, protected: &[usize], rng: &mut Rng) -> usize {
        let mut best: Option<(usize, Vec<usize>)> = None;
        for members in self.cells.values() {
            let open: Vec<usize> = members.iter().copied().filter(|i| !protected.contains(i)).collect();
            if open.is_empty() {
                continue;
            }
            if best.as_ref().map_or(true, |(occupancy, _)| members.len() > *occupancy) {
                best = Some((members.len(), open));
            }
        }
        let (_, open) = best.expect("archive larger than its protected members");
        open[rng.gen_range(0..open.len())]
    }
}
