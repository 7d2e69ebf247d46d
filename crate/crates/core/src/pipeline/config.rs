use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::classify::SvmParams;
use crate::data::{load_dataset, synthetic, Dataset, Format, LoadOptions};
use crate::fusion::{Baseline, FusionMode};
use crate::moo::{Algorithm, ModeParams, MopsoParams, Nsga2Params, OptimizerParams};
use crate::resample::Sampler;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "SDP_WORKERS";

/// Budget presets. `full` runs 100 individuals for 100 iterations over 10
/// folds; `desk` runs 20 individuals for 10 iterations over 5 folds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Full,
    Desk,
}

impl std::str::FromStr for Profile {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Profile::Full),
            "desk" => Ok(Profile::Desk),
            _ => Err(PipelineError::Config(format!("unknown profile `{s}`"))),
        }
    }
}

/// Experiment settings. Serialised as a flat TOML document, see the README
/// for the key list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub profile: Profile,
    /// A CSV/ARFF path, or `synthetic:<NAME>` for a generated surrogate.
    pub dataset: String,
    pub format: Option<Format>,
    pub label_column: Option<String>,
    pub drop_columns: Vec<String>,
    pub synthetic_seed: u64,
    pub sampler: Sampler,
    pub optimizers: Vec<Algorithm>,
    pub fusion: Vec<FusionMode>,
    pub baselines: Vec<Baseline>,
    pub k_folds: usize,
    pub seed: u64,
    pub output: PathBuf,
    /// Evaluation threads; 0 reads `SDP_WORKERS`, then uses all cores.
    /// Results do not depend on it, so it is left out of reports.
    #[serde(skip_serializing)]
    pub workers: usize,
    /// Fit min-max bounds on the whole dataset instead of per training fold.
    pub normalize_before_split: bool,
    /// Share of the resampled training portion held out to score subsets.
    pub validation_fraction: f64,
    pub svm: SvmParams,
    pub nsga2: Nsga2Params,
    pub mopso: MopsoParams,
    pub mode: ModeParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            profile: Profile::Full,
            dataset: String::new(),
            format: None,
            label_column: None,
            drop_columns: Vec::new(),
            synthetic_seed: 0,
            sampler: Sampler::BorderlineSmote,
            optimizers: Algorithm::ALL.to_vec(),
            fusion: vec![FusionMode::Vote, FusionMode::Weight],
            baselines: Vec::new(),
            k_folds: 10,
            seed: 1,
            output: PathBuf::from("sdp-run"),
            workers: 0,
            normalize_before_split: false,
            validation_fraction: 0.2,
            svm: SvmParams::default(),
            nsga2: Nsga2Params::default(),
            mopso: MopsoParams::default(),
            mode: ModeParams::default(),
        }
    }
}

impl ExperimentConfig {
    /// Defaults with the desk budget applied.
    pub fn desk() -> Self {
        let mut cfg = Self::default();
        cfg.apply_profile(Profile::Desk);
        cfg
    }

    /// Sets the profile's budget on every optimizer and the fold count.
    pub fn apply_profile(&mut self, profile: Profile) {
        self.profile = profile;
        let (pop, iters, folds) = match profile {
            Profile::Full => (100, 100, 10),
            Profile::Desk => (20, 10, 5),
        };
        self.set_budget(pop, iters);
        self.k_folds = folds;
    }

    pub fn set_budget(&mut self, population: usize, iterations: usize) {
        self.nsga2.population = population;
        self.nsga2.iterations = iterations;
        self.mopso.population = population;
        self.mopso.iterations = iterations;
        self.mode.population = population;
        self.mode.iterations = iterations;
    }

    pub fn optimizer_params(&self) -> OptimizerParams {
        OptimizerParams {
            nsga2: self.nsga2.clone(),
            mopso: self.mopso.clone(),
            mode: self.mode.clone(),
        }
    }

    /// Parses a TOML document. Keys missing from the document take the
    /// defaults of the selected `profile`.
    pub fn from_toml_str(text: &str) -> Result<Self, PipelineError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| PipelineError::Config(e.to_string()))?;
        let mut cfg: ExperimentConfig = table
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| PipelineError::Config(e.to_string()))?;
        if cfg.profile == Profile::Desk {
            let has = |section: Option<&str>, key: &str| match section {
                None => table.contains_key(key),
                Some(s) => table
                    .get(s)
                    .and_then(|v| v.as_table())
                    .is_some_and(|t| t.contains_key(key)),
            };
            if !has(None, "k_folds") {
                cfg.k_folds = 5;
            }
            let sections = [
                ("nsga2", &mut cfg.nsga2.population, &mut cfg.nsga2.iterations),
                ("mopso", &mut cfg.mopso.population, &mut cfg.mopso.iterations),
                ("mode", &mut cfg.mode.population, &mut cfg.mode.iterations),
            ];
            for (name, pop, iters) in sections {
                if !has(Some(name), "population") {
                    *pop = 20;
                }
                if !has(Some(name), "iterations") {
                    *iters = 10;
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String, PipelineError> {
        toml::to_string(self).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let fail = |m: String| Err(PipelineError::Config(m));
        if self.dataset.trim().is_empty() {
            return fail("`dataset` is required".into());
        }
        if self.k_folds < 2 {
            return fail(format!("k_folds must be at least 2, got {}", self.k_folds));
        }
        if !self.fusion.is_empty() && self.optimizers.is_empty() {
            return fail("fusion needs at least one optimizer".into());
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return fail("validation_fraction must lie in (0, 1)".into());
        }
        if !(self.svm.c > 0.0 && self.svm.tol > 0.0) || self.svm.gamma.is_some_and(|g| !(g > 0.0)) {
            return fail("svm c, gamma and tol must be positive".into());
        }
        let params = self.optimizer_params();
        for algo in &self.optimizers {
            let checked = match algo {
                Algorithm::Nsga2 => params.nsga2.validate(),
                Algorithm::Mopso => params.mopso.validate(),
                Algorithm::Mode => params.mode.validate(),
            };
            checked.map_err(|e| PipelineError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn load_dataset(&self) -> crate::Result<Dataset> {
        if let Some(name) = self.dataset.strip_prefix("synthetic:") {
            let profile = synthetic::profile(name)
                .ok_or_else(|| PipelineError::Config(format!("unknown synthetic dataset `{name}`")))?;
            return Ok(synthetic::generate(&profile, self.synthetic_seed));
        }
        let options = LoadOptions {
            format: self.format,
            label_column: self.label_column.clone(),
            drop_columns: self.drop_columns.clone(),
            ..Default::default()
        };
        Ok(load_dataset(Path::new(&self.dataset), &options)?)
    }

    /// The worker count to use: the configured value, else `SDP_WORKERS`,
    /// else the number of available cores.
    pub fn resolved_workers(&self) -> usize {
        if self.workers > 0 {
            return self.workers;
        }
        std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&w| w > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_values() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.k_folds, 10);
        assert_eq!(cfg.nsga2, Nsga2Params::default());
        assert_eq!(cfg.mopso.archive_size, 100);
        assert_eq!(cfg.mode.f, 0.5);
    }

    #[test]
    fn parse_flat_document() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
dataset = "synthetic:CM1"
sampler = "st"
optimizers = ["nsga2", "mode"]
fusion = ["weight"]
baselines = ["fisher"]
seed = 7
nsga2.crossover_prob = 0.8
"#,
        )
        .unwrap();
        assert_eq!(cfg.sampler, Sampler::SmoteTomek);
        assert_eq!(cfg.optimizers, vec![Algorithm::Nsga2, Algorithm::Mode]);
        assert_eq!(cfg.nsga2.crossover_prob, 0.8);
        assert_eq!(cfg.nsga2.population, 100);
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn desk_profile_fills_unset_budget() {
        let cfg = ExperimentConfig::from_toml_str(
            "profile = \"desk\"\ndataset = \"x.csv\"\nmopso.population = 30\n",
        )
        .unwrap();
        assert_eq!(cfg.k_folds, 5);
        assert_eq!((cfg.nsga2.population, cfg.nsga2.iterations), (20, 10));
        assert_eq!((cfg.mopso.population, cfg.mopso.iterations), (30, 10));
        assert_eq!(ExperimentConfig::desk().mode.population, 20);
    }

    #[test]
    fn rejects_invalid() {
        assert!(ExperimentConfig::from_toml_str("dataset = \"a.csv\"\nk_folds = 1\n").is_err());
        assert!(ExperimentConfig::from_toml_str("dataset = \"a.csv\"\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::from_toml_str("k_folds = 3\n").is_err());
        assert!(ExperimentConfig::from_toml_str(
            "dataset = \"a.csv\"\noptimizers = []\nfusion = [\"vote\"]\n"
        )
        .is_err());
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = ExperimentConfig::desk();
        cfg.dataset = "synthetic:KC3".into();
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn synthetic_dataset_source() {
        let cfg = ExperimentConfig {
            dataset: "synthetic:cm1".into(),
            ..Default::default()
        };
        let ds = cfg.load_dataset().unwrap();
        assert_eq!(ds.class_counts(), (42, 285));
        let bad = ExperimentConfig {
            dataset: "synthetic:nope".into(),
            ..Default::default()
        };
        assert!(bad.load_dataset().is_err());
    }

    #[test]
    fn shipped_configs_parse() {
        let desk = ExperimentConfig::from_toml_str(include_str!("../../../../configs/desk_cm1.toml")).unwrap();
        assert_eq!((desk.k_folds, desk.nsga2.population, desk.mode.iterations), (5, 20, 10));
        let full = ExperimentConfig::from_toml_str(include_str!("../../../../configs/full_cm1.toml")).unwrap();
        assert_eq!(full.profile, Profile::Full);
        assert_eq!((full.k_folds, full.mopso.population, full.sampler), (10, 100, Sampler::SmoteTomek));
    }
}
