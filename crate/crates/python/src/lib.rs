//! Python bindings: datasets, resampling, the three optimizers, fusion,
//! statistics and the experiment runner.

use std::path::PathBuf;
use std::sync::Arc;

use ndarray::Array2;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use sdp_core::classify::auc_from_scores;
use sdp_core::data::{self, fit_normalizer, normalize, synthetic, LoadOptions};
use sdp_core::fusion::{fuse, FusionMode};
use sdp_core::moo::{Algorithm, Chromosome, EvalContext, EvalData, Individual, ObjectiveVector, OptimizerParams, ParetoFront};
use sdp_core::pipeline::{run_experiment, ExperimentConfig};
use sdp_core::resample::Sampler;
use sdp_core::rng::{derive_seed, streams};
use sdp_core::stats;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Accepts the config spellings: "bs", "st", "none", "borderline_smote", ...
fn parse_sampler(name: &str) -> PyResult<Sampler> {
    serde_json::from_value(serde_json::Value::String(name.to_ascii_lowercase()))
        .map_err(|_| value_err(format!("unknown sampler {name}")))
}

/// A labelled defect dataset; labels are `True` for defective modules.
#[pyclass(name = "Dataset", module = "sdp", skip_from_py_object)]
#[derive(Clone)]
struct PyDataset {
    inner: data::Dataset,
}

#[pymethods]
impl PyDataset {
    #[new]
    #[pyo3(signature = (features, labels, feature_names=None, name="dataset"))]
    fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<bool>,
        feature_names: Option<Vec<String>>,
        name: &str,
    ) -> PyResult<Self> {
        let width = features.first().map_or(0, Vec::len);
        if features.iter().any(|r| r.len() != width) {
            return Err(value_err("rows differ in length"));
        }
        let names = feature_names.unwrap_or_else(|| (0..width).map(|j| format!("f{j}")).collect());
        let flat: Vec<f64> = features.concat();
        let matrix = Array2::from_shape_vec((features.len(), width), flat).map_err(value_err)?;
        let inner = data::Dataset::new(name, names, matrix, labels).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner.feature_names.clone()
    }

    #[getter]
    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }

    #[getter]
    fn n_features(&self) -> usize {
        self.inner.n_features()
    }

    #[getter]
    fn labels(&self) -> Vec<bool> {
        self.inner.labels.clone()
    }

    /// Rows as lists of floats.
    #[getter]
    fn features(&self) -> Vec<Vec<f64>> {
        self.inner.features.rows().into_iter().map(|r| r.to_vec()).collect()
    }

    /// `(defective, non_defective)`.
    fn class_counts(&self) -> (usize, usize) {
        self.inner.class_counts()
    }

    /// Min-max normalised copy.
    fn normalized(&self) -> PyResult<Self> {
        let bounds = fit_normalizer(&self.inner);
        Ok(Self {
            inner: normalize(&self.inner, &bounds).map_err(value_err)?,
        })
    }

    /// Resampled copy and `(majority, minority)` counts after sampling.
    #[pyo3(signature = (sampler="bs", seed=1))]
    fn resample(&self, sampler: &str, seed: u64) -> PyResult<(Self, (usize, usize))> {
        let sampler = parse_sampler(sampler)?;
        let (out, report) = sampler.apply(&self.inner, seed).map_err(value_err)?;
        Ok((Self { inner: out }, (report.after.majority, report.after.minority)))
    }

    fn save_csv(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save_csv(&path).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        let (d, c) = self.inner.class_counts();
        format!(
            "Dataset(name={:?}, rows={}, features={}, defective={d}, clean={c})",
            self.inner.name,
            self.inner.n_rows(),
            self.inner.n_features()
        )
    }
}

/// Loads a CSV or ARFF file.
#[pyfunction]
#[pyo3(signature = (path, label_column=None, drop_columns=None))]
fn load_dataset(path: PathBuf, label_column: Option<String>, drop_columns: Option<Vec<String>>) -> PyResult<PyDataset> {
    let options = LoadOptions {
        label_column,
        drop_columns: drop_columns.unwrap_or_default(),
        ..Default::default()
    };
    let inner = data::load_dataset(&path, &options).map_err(value_err)?;
    Ok(PyDataset { inner })
}

/// Seeded surrogate with the layout of a benchmark dataset (e.g. "CM1").
#[pyfunction]
#[pyo3(signature = (name, seed=0))]
fn synthetic_dataset(name: &str, seed: u64) -> PyResult<PyDataset> {
    let profile = synthetic::profile(name).ok_or_else(|| value_err(format!("unknown profile {name}")))?;
    Ok(PyDataset {
        inner: synthetic::generate(&profile, seed),
    })
}

/// Runs one optimizer on the normalised, resampled dataset and returns its
/// Pareto front as `(bitstring, n_features, validation_auc)` tuples.
#[pyfunction]
#[pyo3(signature = (dataset, algo="nsga2", pop=100, iters=100, seed=1, sampler="bs"))]
fn optimize(
    py: Python<'_>,
    dataset: &PyDataset,
    algo: &str,
    pop: usize,
    iters: usize,
    seed: u64,
    sampler: &str,
) -> PyResult<Vec<(String, usize, f64)>> {
    let algo: Algorithm = algo.parse().map_err(value_err)?;
    let sampler = parse_sampler(sampler)?;
    let ds = dataset.inner.clone();
    py.detach(move || {
        let normalized = normalize(&ds, &fit_normalizer(&ds)).map_err(value_err)?;
        let (train, _) = sampler
            .apply(&normalized, derive_seed(seed, streams::SAMPLER, 0))
            .map_err(value_err)?;
        let data = EvalData::with_svm(&train, derive_seed(seed, streams::INTERNAL_SPLIT, 0));
        let ctx = EvalContext::new(Arc::new(data));
        let params = OptimizerParams::default().with_budget(pop, iters);
        let front = algo
            .run(&params, &ctx, derive_seed(seed, algo.seed_stream(), 0))
            .map_err(value_err)?;
        Ok(front
            .members
            .iter()
            .map(|m| (m.chromosome.to_string(), m.chromosome.count_ones(), m.objectives.auc))
            .collect())
    })
}

/// Fuses fronts given as lists of bitstrings. Returns `(feature, votes,
/// weight)` in ranking order.
#[pyfunction]
#[pyo3(signature = (fronts, mode="vote"))]
fn fuse_fronts(fronts: Vec<Vec<String>>, mode: &str) -> PyResult<Vec<(usize, usize, f64)>> {
    let mode: FusionMode = mode.parse().map_err(value_err)?;
    let fronts: Vec<ParetoFront> = fronts
        .iter()
        .map(|bits| {
            let members = bits
                .iter()
                .map(|b| {
                    let c: Chromosome = b.parse().map_err(value_err)?;
                    let o = ObjectiveVector::from_parts(&c, 0.0);
                    Ok(Individual::new(c, o))
                })
                .collect::<PyResult<Vec<_>>>()?;
            Ok(ParetoFront {
                algorithm: Algorithm::Nsga2,
                members,
            })
        })
        .collect::<PyResult<_>>()?;
    let ranking = fuse(&fronts, mode).map_err(value_err)?;
    Ok(ranking.entries.iter().map(|e| (e.feature, e.votes, e.weight)).collect())
}

/// Rank-based AUC.
#[pyfunction]
fn auc(labels: Vec<bool>, scores: Vec<f64>) -> PyResult<f64> {
    auc_from_scores(&labels, &scores).map_err(value_err)
}

/// Wilcoxon signed-rank test on paired samples; returns
/// `(statistic, p_value, significant)`.
#[pyfunction]
fn wilcoxon(a: Vec<f64>, b: Vec<f64>) -> PyResult<(f64, f64, bool)> {
    if a.len() != b.len() {
        return Err(value_err("samples differ in length"));
    }
    let pairs: Vec<(f64, f64)> = a.into_iter().zip(b).collect();
    let r = stats::wilcoxon_signed_rank(&pairs).map_err(value_err)?;
    Ok((r.statistic, r.p_value, r.significant))
}

/// Friedman test on a datasets x methods matrix; returns
/// `(statistic, p_value, mean_ranks)`.
#[pyfunction]
fn friedman(matrix: Vec<Vec<f64>>) -> PyResult<(f64, f64, Vec<f64>)> {
    let r = stats::friedman(&matrix).map_err(value_err)?;
    Ok((r.statistic, r.p_value, r.mean_ranks))
}

/// Nemenyi critical difference for `k` methods over `n` datasets.
#[pyfunction]
#[pyo3(signature = (k, n, alpha=0.05))]
fn nemenyi_cd(k: usize, n: usize, alpha: f64) -> PyResult<f64> {
    stats::nemenyi_cd(k, n, alpha).map_err(value_err)
}

/// Runs an experiment from TOML config text and returns the report as JSON.
/// The artefacts are also written when `write` is true.
#[pyfunction]
#[pyo3(signature = (config, write=false))]
fn run(py: Python<'_>, config: &str, write: bool) -> PyResult<String> {
    let cfg = ExperimentConfig::from_toml_str(config).map_err(value_err)?;
    py.detach(move || {
        let report = run_experiment(&cfg).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        if write {
            report.write(&cfg.output).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        }
        serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    })
}

#[pymodule]
fn sdp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyDataset>()?;
    m.add_function(wrap_pyfunction!(load_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(fuse_fronts, m)?)?;
    m.add_function(wrap_pyfunction!(auc, m)?)?;
    m.add_function(wrap_pyfunction!(wilcoxon, m)?)?;
    m.add_function(wrap_pyfunction!(friedman, m)?)?;
    m.add_function(wrap_pyfunction!(nemenyi_cd, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
