//! Binary-chromosome multi-objective feature selection.
//!
//! A chromosome has one gene per feature (`1` = selected). Two objectives are
//! maximised: `f1 = C_max − selected` and `f2 = AUC`. [`nsga2`], [`mopso`] and
//! [`mode`] each return a [`ParetoFront`] of mutually non-dominated subsets.

mod chromosome;
mod evaluate;
pub mod mode;
pub mod mopso;
pub mod nsga2;
mod operators;
mod sort;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chromosome::{Chromosome, ParseChromosomeError};
pub use evaluate::{auc_objective, feature_objective, EvalContext, EvalData, ObjectiveVector};
pub use mode::{pick_distinct, run_mode, run_mode_observed, ModeParams};
pub use mopso::{run_mopso, run_mopso_observed, MopsoParams};
pub use nsga2::{run_nsga2, run_nsga2_observed, Nsga2Params};
pub use operators::{
    bitflip_mutate, polynomial_mutation_delta, random_chromosome, repair_chromosome, sbx_beta,
    sbx_children, single_point_crossover, single_point_crossover_at,
};
pub use sort::{crowding_distance, dominates, fast_nondominated_sort, non_dominated_indices};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MooError {
    #[error("invalid optimizer parameter: {0}")]
    InvalidParameter(String),
    #[error("u must lie in (0, 1), got {0}")]
    InvalidProbability(f64),
    #[error("unknown algorithm `{0}` (expected nsga2, mopso or mode)")]
    UnknownAlgorithm(String),
    #[error("invalid front file: {0}")]
    FrontFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Nsga2,
    Mopso,
    Mode,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Nsga2, Algorithm::Mopso, Algorithm::Mode];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Nsga2 => "nsga2",
            Algorithm::Mopso => "mopso",
            Algorithm::Mode => "mode",
        }
    }

    /// Seed stream index of this optimizer, see [`crate::rng::streams`].
    pub fn seed_stream(&self) -> u64 {
        match self {
            Algorithm::Nsga2 => crate::rng::streams::NSGA2,
            Algorithm::Mopso => crate::rng::streams::MOPSO,
            Algorithm::Mode => crate::rng::streams::MODE,
        }
    }

    /// Runs this optimizer with its entry in `params`.
    pub fn run(
        &self,
        params: &OptimizerParams,
        ctx: &EvalContext,
        seed: u64,
    ) -> Result<ParetoFront, MooError> {
        match self {
            Algorithm::Nsga2 => run_nsga2(&params.nsga2, ctx, seed),
            Algorithm::Mopso => run_mopso(&params.mopso, ctx, seed),
            Algorithm::Mode => run_mode(&params.mode, ctx, seed),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = MooError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nsga2" | "nsga-ii" | "nsgaii" => Ok(Algorithm::Nsga2),
            "mopso" => Ok(Algorithm::Mopso),
            "mode" => Ok(Algorithm::Mode),
            other => Err(MooError::UnknownAlgorithm(other.to_string())),
        }
    }
}

/// Parameters of all three optimizers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerParams {
    pub nsga2: Nsga2Params,
    pub mopso: MopsoParams,
    pub mode: ModeParams,
}

impl OptimizerParams {
    /// Overrides population size and iteration count of every optimizer.
    pub fn with_budget(mut self, population: usize, iterations: usize) -> Self {
        self.nsga2.population = population;
        self.nsga2.iterations = iterations;
        self.mopso.population = population;
        self.mopso.iterations = iterations;
        self.mode.population = population;
        self.mode.iterations = iterations;
        self
    }
}

/// One member of a population, swarm or archive.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub chromosome: Chromosome,
    pub objectives: ObjectiveVector,
    pub rank: usize,
    pub crowding: f64,
    /// Continuous surrogate in `[0, 1]^L` (MOPSO and MODE).
    pub position: Option<Vec<f64>>,
    /// Particle velocity (MOPSO).
    pub velocity: Option<Vec<f64>>,
}

impl Individual {
    pub fn new(chromosome: Chromosome, objectives: ObjectiveVector) -> Self {
        Self {
            chromosome,
            objectives,
            rank: 0,
            crowding: 0.0,
            position: None,
            velocity: None,
        }
    }
}

/// State handed to an observer after every iteration.
#[derive(Debug)]
pub struct Snapshot<'a> {
    pub algorithm: Algorithm,
    /// 0 for the initial population.
    pub iteration: usize,
    pub population: &'a [Individual],
    /// Offspring, trial vectors or moved particles of this iteration.
    pub offspring: &'a [Individual],
    /// MOPSO's external archive.
    pub archive: Option<&'a [Individual]>,
}

/// Mutually non-dominated, duplicate-free set of feature subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    pub algorithm: Algorithm,
    pub members: Vec<Individual>,
}

impl ParetoFront {
    /// Keeps the non-dominated, distinct-bitstring candidates, ordered by
    /// subset size, then AUC (descending), then bitstring.
    pub fn from_candidates(algorithm: Algorithm, candidates: &[Individual]) -> Self {
        let mut unique: Vec<Individual> = Vec::new();
        let mut sorted: Vec<&Individual> = candidates.iter().collect();
        sorted.sort_by(|a, b| a.chromosome.cmp(&b.chromosome));
        for c in sorted {
            if unique.last().map_or(true, |u| u.chromosome != c.chromosome) {
                unique.push(c.clone());
            }
        }
        let objectives: Vec<ObjectiveVector> = unique.iter().map(|i| i.objectives).collect();
        let keep = non_dominated_indices(&objectives);
        let mut members: Vec<Individual> = keep.into_iter().map(|i| unique[i].clone()).collect();
        members.sort_by(|a, b| {
            a.chromosome
                .count_ones()
                .cmp(&b.chromosome.count_ones())
                .then(b.objectives.auc.total_cmp(&a.objectives.auc))
                .then(a.chromosome.cmp(&b.chromosome))
        });
        Self { algorithm, members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn n_features(&self) -> Option<usize> {
        self.members.first().map(|m| m.chromosome.len())
    }

    /// Member with the highest AUC (fewest features on ties).
    pub fn best_auc(&self) -> Option<&Individual> {
        self.members.iter().max_by(|a, b| {
            a.objectives
                .auc
                .total_cmp(&b.objectives.auc)
                .then(b.chromosome.count_ones().cmp(&a.chromosome.count_ones()))
        })
    }

    /// Writes `bitstring,n_features,auc` rows.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["bitstring", "n_features", "auc"])?;
        for m in &self.members {
            w.write_record([
                m.chromosome.to_string(),
                m.chromosome.count_ones().to_string(),
                m.objectives.auc.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a front written by [`ParetoFront::write_csv`].
    pub fn read_csv<R: std::io::Read>(algorithm: Algorithm, reader: R) -> Result<Self, MooError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut members = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| MooError::FrontFormat(e.to_string()))?;
            let bits: Chromosome = record
                .get(0)
                .unwrap_or_default()
                .parse()
                .map_err(|e: ParseChromosomeError| MooError::FrontFormat(e.to_string()))?;
            let auc: f64 = record
                .get(2)
                .unwrap_or_default()
                .parse()
                .map_err(|_| MooError::FrontFormat("unparsable auc".into()))?;
            if let Some(first) = members.first() {
                let first: &Individual = first;
                if first.chromosome.len() != bits.len() {
                    return Err(MooError::FrontFormat("bitstrings differ in length".into()));
                }
            }
            let objectives = ObjectiveVector::from_parts(&bits, auc);
            members.push(Individual::new(bits, objectives));
        }
        Ok(Self { algorithm, members })
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn ind(bits: &str, auc: f64) -> Individual {
        let c: Chromosome = bits.parse().unwrap();
        let o = ObjectiveVector::from_parts(&c, auc);
        Individual::new(c, o)
    }

    #[test]
    fn front_dedups_and_filters() {
        let cands = [
            ind("1000", 0.7),
            ind("1100", 0.9),
            ind("1100", 0.9),
            ind("1110", 0.8),
            ind("0100", 0.6),
        ];
        let front = ParetoFront::from_candidates(Algorithm::Nsga2, &cands);
        let bits: Vec<String> = front.members.iter().map(|m| m.chromosome.to_string()).collect();
        assert_eq!(bits, vec!["1000", "1100"]);
        assert_eq!(front.best_auc().unwrap().chromosome.to_string(), "1100");
    }

    #[test]
    fn csv_round_trip() {
        let front = ParetoFront::from_candidates(Algorithm::Mode, &[ind("10", 0.75), ind("11", 0.8)]);
        let mut buf = Vec::new();
        front.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "bitstring,n_features,auc\n10,1,0.75\n11,2,0.8\n"
        );
        let back = ParetoFront::read_csv(Algorithm::Mode, &buf[..]).unwrap();
        assert_eq!(back, front);
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("moba".parse::<Algorithm>().is_err());
    }
}
