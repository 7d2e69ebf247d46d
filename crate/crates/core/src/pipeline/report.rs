use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, PipelineError};
use crate::classify::Metrics;
use crate::fusion::{FusedRanking, FusionMode, PrefixSweep};
use crate::moo::{Algorithm, Chromosome, ParetoFront};
use crate::resample::SamplingReport;
use crate::stats::{FriedmanResult, PairComparison, TestResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    pub rows: usize,
    pub features: usize,
    pub defective: usize,
    pub clean: usize,
    pub feature_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSeeds {
    pub sampler: u64,
    pub internal_split: u64,
    pub optimizers: BTreeMap<Algorithm, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontMember {
    pub bitstring: String,
    pub n_features: usize,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOutcome {
    pub algorithm: Algorithm,
    pub front: Vec<FrontMember>,
    /// Distinct subsets evaluated.
    pub evaluations: usize,
    /// Evaluations whose classifier failed.
    pub failures: usize,
    pub error: Option<String>,
}

impl OptimizerOutcome {
    pub fn pareto_front(&self) -> Result<ParetoFront, PipelineError> {
        let mut text = String::from("bitstring,n_features,auc\n");
        for m in &self.front {
            text.push_str(&format!("{},{},{}\n", m.bitstring, m.n_features, m.auc));
        }
        ParetoFront::read_csv(self.algorithm, text.as_bytes())
            .map_err(|e| PipelineError::Report(e.to_string()))
    }

    pub fn best_chromosome(&self) -> Option<Chromosome> {
        let front = self.pareto_front().ok()?;
        front.best_auc().map(|m| m.chromosome.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatchSummary {
    pub launched: usize,
    pub succeeded: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionOutcome {
    pub mode: FusionMode,
    pub ranking: FusedRanking,
    pub sweep: PrefixSweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineOutcome {
    pub baseline: String,
    pub order: Vec<usize>,
    pub sweep: PrefixSweep,
}

/// One feature subset scored on the held-out fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub selected: Vec<usize>,
    /// AUC on the internal validation split, when the method used it.
    pub validation_auc: Option<f64>,
    pub metrics: Option<Metrics>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    pub seeds: FoldSeeds,
    pub sampling: Option<SamplingReport>,
    pub optimizers: Vec<OptimizerOutcome>,
    pub latch: Option<LatchSummary>,
    pub fusion: Vec<FusionOutcome>,
    pub baselines: Vec<BaselineOutcome>,
    /// Keyed by method name: optimizer names, fusion modes, baselines, `all`.
    pub methods: BTreeMap<String, MethodResult>,
    pub notes: Vec<String>,
    pub error: Option<String>,
}

/// Means over the folds where the method produced metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodAggregate {
    pub folds: usize,
    pub acc: f64,
    pub f_score: f64,
    pub auc: Option<f64>,
    pub n_selected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanSummary {
    pub methods: Vec<String>,
    pub result: FriedmanResult,
    pub critical_difference: Option<f64>,
    pub pairs: Vec<PairComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonSummary {
    pub a: String,
    pub b: String,
    pub result: TestResult,
}

/// Tests on per-fold test AUC.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatisticsReport {
    pub friedman: Option<FriedmanSummary>,
    pub wilcoxon: Vec<WilcoxonSummary>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub dataset: DatasetSummary,
    pub fold_seed: u64,
    pub folds: Vec<FoldReport>,
    pub aggregate: BTreeMap<String, MethodAggregate>,
    pub statistics: StatisticsReport,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    /// Per-fold test AUC of `method`, `None` where it is missing.
    pub fn fold_aucs(&self, method: &str) -> Vec<Option<f64>> {
        self.folds
            .iter()
            .map(|f| {
                f.methods
                    .get(method)
                    .and_then(|m| m.metrics.as_ref())
                    .and_then(|m| m.auc)
            })
            .collect()
    }

    /// Writes every artefact under `dir` and returns the written paths,
    /// relative to `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
        let mut writer = ArtifactWriter::new(dir)?;
        writer.json("report.json", self)?;
        writer.text(
            "config.toml",
            &self.config.to_toml_string()?,
        )?;
        writer.csv("metrics_per_fold.csv", |w| {
            w.write_record([
                "fold", "method", "n_selected", "acc", "f_score", "auc", "validation_auc", "tp", "fp",
                "fn", "tn",
            ])?;
            for fold in &self.folds {
                for (name, m) in &fold.methods {
                    let Some(metrics) = &m.metrics else { continue };
                    w.write_record([
                        fold.fold.to_string(),
                        name.clone(),
                        m.selected.len().to_string(),
                        metrics.acc.to_string(),
                        metrics.f_score.to_string(),
                        opt(metrics.auc),
                        opt(m.validation_auc),
                        metrics.tp.to_string(),
                        metrics.fp.to_string(),
                        metrics.fn_.to_string(),
                        metrics.tn.to_string(),
                    ])?;
                }
            }
            Ok(())
        })?;
        writer.csv("aggregate.csv", |w| {
            w.write_record(["method", "folds", "acc", "f_score", "auc", "n_selected"])?;
            for (name, a) in &self.aggregate {
                w.write_record([
                    name.clone(),
                    a.folds.to_string(),
                    a.acc.to_string(),
                    a.f_score.to_string(),
                    opt(a.auc),
                    a.n_selected.to_string(),
                ])?;
            }
            Ok(())
        })?;
        writer.csv("sampling.csv", |w| {
            w.write_record([
                "fold", "method", "majority_before", "minority_before", "majority_after",
                "minority_after", "synthetic", "tomek_removed", "fallback",
            ])?;
            for fold in &self.folds {
                let Some(s) = &fold.sampling else { continue };
                w.write_record([
                    fold.fold.to_string(),
                    s.method.to_string(),
                    s.before.majority.to_string(),
                    s.before.minority.to_string(),
                    s.after.majority.to_string(),
                    s.after.minority.to_string(),
                    s.synthetic_created.to_string(),
                    s.tomek_pairs_removed.to_string(),
                    s.fallback_to_plain_smote.to_string(),
                ])?;
            }
            Ok(())
        })?;
        if let Some(f) = &self.statistics.friedman {
            writer.csv("mean_ranks.csv", |w| {
                w.write_record(["method", "mean_rank"])?;
                for (name, r) in f.methods.iter().zip(&f.result.mean_ranks) {
                    w.write_record([name.clone(), r.to_string()])?;
                }
                Ok(())
            })?;
        }
        for fold in &self.folds {
            let f = fold.fold;
            for o in &fold.optimizers {
                if o.error.is_some() {
                    continue;
                }
                let front = o.pareto_front()?;
                writer.csv_raw(&format!("fronts/fold{f}_{}.csv", o.algorithm), |buf| {
                    front.write_csv(buf)
                })?;
            }
            for o in &fold.fusion {
                writer.csv_raw(&format!("fusion/fold{f}_{}_ranking.csv", o.mode), |buf| {
                    o.ranking.write_csv(buf)
                })?;
                writer.csv_raw(&format!("fusion/fold{f}_{}_prefix.csv", o.mode), |buf| {
                    o.sweep.write_csv(buf)
                })?;
            }
            for o in &fold.baselines {
                writer.csv_raw(&format!("baselines/fold{f}_{}_prefix.csv", o.baseline), |buf| {
                    o.sweep.write_csv(buf)
                })?;
            }
        }
        let manifest = Manifest {
            version: self.version.clone(),
            dataset: self.dataset.name.clone(),
            wall_clock_seconds: self.wall_clock_seconds,
            files: writer.written.iter().map(|p| p.display().to_string()).collect(),
        };
        writer.json("manifest.json", &manifest)?;
        Ok(writer.written)
    }
}

#[derive(Serialize)]
struct Manifest {
    version: String,
    dataset: String,
    wall_clock_seconds: f64,
    files: Vec<String>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

struct ArtifactWriter {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl ArtifactWriter {
    fn new(root: &Path) -> Result<Self, PipelineError> {
        fs::create_dir_all(root).map_err(|e| io_error(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn put(&mut self, rel: &str, bytes: &[u8]) -> Result<(), PipelineError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
        }
        fs::write(&path, bytes).map_err(|e| io_error(&path, e))?;
        self.written.push(PathBuf::from(rel));
        Ok(())
    }

    fn text(&mut self, rel: &str, text: &str) -> Result<(), PipelineError> {
        self.put(rel, text.as_bytes())
    }

    fn json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<(), PipelineError> {
        let text =
            serde_json::to_string_pretty(value).map_err(|e| PipelineError::Report(e.to_string()))?;
        self.put(rel, text.as_bytes())
    }

    fn csv(
        &mut self,
        rel: &str,
        fill: impl FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> csv::Result<()>,
    ) -> Result<(), PipelineError> {
        let mut buf = Vec::new();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            fill(&mut w).map_err(|e| PipelineError::Report(e.to_string()))?;
            w.flush().map_err(|e| io_error(&self.root.join(rel), e))?;
        }
        self.put(rel, &buf)
    }

    fn csv_raw(
        &mut self,
        rel: &str,
        fill: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>,
    ) -> Result<(), PipelineError> {
        let mut buf = Vec::new();
        fill(&mut buf).map_err(|e| PipelineError::Report(e.to_string()))?;
        self.put(rel, &buf)
    }
}

fn io_error(path: &Path, source: std::io::Error) -> PipelineError {
    PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}
