use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use ndarray::{Array2, Axis};
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use super::Chromosome;
use crate::classify::{auc_from_scores, Classifier, ClassifyError, SvmParams};
use crate::data::{stratified_split, Dataset};

/// The two maximised objectives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    /// `C_max − selected features`.
    pub features: f64,
    /// `AUC − C_min`, `C_min = 0`.
    pub auc: f64,
}

impl ObjectiveVector {
    pub fn new(features: f64, auc: f64) -> Self {
        Self { features, auc }
    }

    /// Objectives of `chromosome` given its AUC.
    pub fn from_parts(chromosome: &Chromosome, auc: f64) -> Self {
        Self {
            features: feature_objective(chromosome.count_ones(), chromosome.len()),
            auc: auc_objective(auc, 0.0),
        }
    }
}

/// Turns the minimised feature count into a maximised objective.
pub fn feature_objective(selected: usize, c_max: usize) -> f64 {
    if selected < c_max {
        (c_max - selected) as f64
    } else {
        0.0
    }
}

pub fn auc_objective(auc: f64, c_min: f64) -> f64 {
    if auc > c_min {
        auc - c_min
    } else {
        0.0
    }
}

/// Immutable inputs shared by every evaluation of one outer fold.
pub struct EvalData {
    n_features: usize,
    train_x: Array2<f64>,
    train_y: Vec<bool>,
    valid_x: Array2<f64>,
    valid_y: Vec<bool>,
    classifier: Arc<dyn Classifier>,
}

impl std::fmt::Debug for EvalData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EvalData")
            .field("n_features", &self.n_features)
            .field("train_rows", &self.train_y.len())
            .field("valid_rows", &self.valid_y.len())
            .finish()
    }
}

impl EvalData {
    /// Splits `train` into a stratified internal train / validation pair.
    pub fn new(
        train: &Dataset,
        classifier: Arc<dyn Classifier>,
        validation_fraction: f64,
        seed: u64,
    ) -> Self {
        let (inner, valid) = stratified_split(&train.labels, validation_fraction, seed);
        Self::from_indices(train, &inner, &valid, classifier)
    }

    /// Uses the default SVM and a 20% validation share.
    pub fn with_svm(train: &Dataset, seed: u64) -> Self {
        Self::new(train, Arc::new(SvmParams::default()), 0.2, seed)
    }

    pub fn from_indices(
        data: &Dataset,
        train_rows: &[usize],
        valid_rows: &[usize],
        classifier: Arc<dyn Classifier>,
    ) -> Self {
        Self {
            n_features: data.n_features(),
            train_x: data.features.select(Axis(0), train_rows),
            train_y: train_rows.iter().map(|&i| data.labels[i]).collect(),
            valid_x: data.features.select(Axis(0), valid_rows),
            valid_y: valid_rows.iter().map(|&i| data.labels[i]).collect(),
            classifier,
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn train_rows(&self) -> usize {
        self.train_y.len()
    }

    pub fn validation_rows(&self) -> usize {
        self.valid_y.len()
    }

    /// Validation AUC of a model trained with the given column multipliers.
    pub fn validation_auc(&self, multipliers: &[f64]) -> Result<f64, ClassifyError> {
        let model = self
            .classifier
            .fit(self.train_x.view(), &self.train_y, multipliers)?;
        let scores = model.decision_scores(self.valid_x.view())?;
        auc_from_scores(&self.valid_y, &scores)
    }
}

/// Fitness function of one optimizer run: shared data plus a private cache.
#[derive(Debug)]
pub struct EvalContext {
    data: Arc<EvalData>,
    cache: Mutex<BTreeMap<Chromosome, ObjectiveVector>>,
    failures: AtomicUsize,
    pool: Option<Arc<ThreadPool>>,
}

impl EvalContext {
    pub fn new(data: Arc<EvalData>) -> Self {
        Self {
            data,
            cache: Mutex::new(BTreeMap::new()),
            failures: AtomicUsize::new(0),
            pool: None,
        }
    }

    /// Evaluates batches on `pool` instead of the global rayon pool.
    pub fn with_pool(mut self, pool: Arc<ThreadPool>) -> Self {
        self.pool = Some(pool);
        self
    }

    /// A context over the same data with an empty cache.
    pub fn fork(&self) -> Self {
        Self {
            data: Arc::clone(&self.data),
            cache: Mutex::new(BTreeMap::new()),
            failures: AtomicUsize::new(0),
            pool: self.pool.clone(),
        }
    }

    pub fn data(&self) -> &Arc<EvalData> {
        &self.data
    }

    pub fn n_features(&self) -> usize {
        self.data.n_features
    }

    /// Number of evaluations whose classifier failed and were scored `f2 = 0`.
    pub fn failures(&self) -> usize {
        self.failures.load(Ordering::Relaxed)
    }

    /// Every distinct chromosome evaluated so far, in bitstring order.
    pub fn evaluated(&self) -> Vec<(Chromosome, ObjectiveVector)> {
        let cache = self.cache.lock().expect("fitness cache poisoned");
        cache.iter().map(|(c, o)| (c.clone(), *o)).collect()
    }

    pub fn evaluate(&self, chromosome: &Chromosome) -> ObjectiveVector {
        self.evaluate_batch(std::slice::from_ref(chromosome))[0]
    }

    /// Evaluates a batch, computing each uncached bitstring once. Results are
    /// returned in input order.
    pub fn evaluate_batch(&self, chromosomes: &[Chromosome]) -> Vec<ObjectiveVector> {
        for c in chromosomes {
            assert_eq!(c.len(), self.data.n_features, "chromosome length mismatch");
            assert!(c.count_ones() > 0, "cannot evaluate an empty feature subset");
        }
        let mut missing: Vec<&Chromosome> = {
            let cache = self.cache.lock().expect("fitness cache poisoned");
            chromosomes.iter().filter(|c| !cache.contains_key(*c)).collect()
        };
        missing.sort();
        missing.dedup();

        if !missing.is_empty() {
            let compute = || -> Vec<ObjectiveVector> {
                missing.par_iter().map(|c| self.compute(c)).collect()
            };
            let fresh = match &self.pool {
                Some(pool) => pool.install(compute),
                None => compute(),
            };
            let mut cache = self.cache.lock().expect("fitness cache poisoned");
            for (c, o) in missing.into_iter().zip(fresh) {
                cache.insert(c.clone(), o);
            }
        }

        let cache = self.cache.lock().expect("fitness cache poisoned");
        chromosomes.iter().map(|c| cache[c]).collect()
    }

    fn compute(&self, chromosome: &Chromosome) -> ObjectiveVector {
        let auc = match self.data.validation_auc(&chromosome.to_multipliers()) {
            Ok(auc) => auc,
            Err(e) => {
                log::debug!("evaluation of {chromosome} failed: {e}");
                self.failures.fetch_add(1, Ordering::Relaxed);
                0.0
            }
        };
        ObjectiveVector::from_parts(chromosome, auc)
    }
}
