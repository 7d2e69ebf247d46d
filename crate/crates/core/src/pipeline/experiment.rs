use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use rayon::ThreadPool;

use super::report::{
    BaselineOutcome, DatasetSummary, FoldReport, FoldSeeds, FriedmanSummary, FrontMember,
    FusionOutcome, LatchSummary, MethodAggregate, MethodResult, OptimizerOutcome, StatisticsReport,
    WilcoxonSummary,
};
use super::{CompletionLatch, ExperimentConfig, ExperimentReport, PipelineError};
use crate::classify::{compute_metrics, train_svm_rbf, ClassifyError, Metrics, SvmParams};
use crate::data::{fit_normalizer, normalize, stratified_kfold, Dataset, Fold};
use crate::fusion::{fuse, prefix_sweep, FusionMode};
use crate::moo::{EvalContext, EvalData, ParetoFront};
use crate::rng::{derive_seed, streams};
use crate::stats::{friedman, nemenyi_cd, nemenyi_pairs, wilcoxon_signed_rank, ALPHA};

/// Name of the method that keeps every feature.
pub const ALL_FEATURES: &str = "all";

pub fn build_pool(workers: usize) -> Result<Arc<ThreadPool>, PipelineError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .thread_name(|i| format!("sdp-eval-{i}"))
        .build()
        .map(Arc::new)
        .map_err(|e| PipelineError::Config(e.to_string()))
}

/// Loads the configured dataset and runs the experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> crate::Result<ExperimentReport> {
    cfg.validate()?;
    let dataset = cfg.load_dataset()?;
    run_experiment_on(cfg, &dataset)
}

/// Runs the cross-validated experiment on an already loaded dataset.
///
/// Results depend only on the configuration and the data; the worker count
/// changes wall-clock time alone.
pub fn run_experiment_on(cfg: &ExperimentConfig, dataset: &Dataset) -> crate::Result<ExperimentReport> {
    cfg.validate()?;
    let started = Instant::now();
    let pool = build_pool(cfg.resolved_workers())?;
    let data = if cfg.normalize_before_split {
        normalize(dataset, &fit_normalizer(dataset))?
    } else {
        dataset.clone()
    };
    let fold_seed = derive_seed(cfg.seed, streams::FOLDS, 0);
    let plan = stratified_kfold(&data.labels, cfg.k_folds, fold_seed)?;

    let mut folds = Vec::with_capacity(plan.folds.len());
    for (f, fold) in plan.folds.iter().enumerate() {
        log::info!("{}: fold {}/{}", data.name, f + 1, plan.folds.len());
        folds.push(run_fold(&data, f, fold, cfg, &pool));
    }
    if let Some(err) = folds.iter().map(|f| f.error.as_deref()).collect::<Option<Vec<_>>>() {
        return Err(PipelineError::AllFoldsFailed(err.first().copied().unwrap_or("").to_string()).into());
    }

    let aggregate = aggregate(&folds);
    let statistics = statistics(cfg, &folds);
    let (defective, clean) = dataset.class_counts();
    Ok(ExperimentReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        dataset: DatasetSummary {
            name: dataset.name.clone(),
            rows: dataset.n_rows(),
            features: dataset.n_features(),
            defective,
            clean,
            feature_names: dataset.feature_names.clone(),
        },
        fold_seed,
        folds,
        aggregate,
        statistics,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Runs one outer fold. Failures are recorded in the report instead of
/// being returned.
///
/// Only the training rows are read until the final subsets are fixed: the
/// normaliser, sampler, optimizers, fusion and baselines all see the
/// training portion alone, and the test rows are used once per method to
/// score the finished model.
pub fn run_fold(
    dataset: &Dataset,
    index: usize,
    fold: &Fold,
    cfg: &ExperimentConfig,
    pool: &Arc<ThreadPool>,
) -> FoldReport {
    let f = index as u64;
    let seeds = FoldSeeds {
        sampler: derive_seed(cfg.seed, streams::SAMPLER, f),
        internal_split: derive_seed(cfg.seed, streams::INTERNAL_SPLIT, f),
        optimizers: cfg
            .optimizers
            .iter()
            .map(|&a| (a, derive_seed(cfg.seed, a.seed_stream(), f)))
            .collect(),
    };
    let mut report = FoldReport {
        fold: index,
        train_rows: fold.train.len(),
        test_rows: fold.test.len(),
        seeds,
        sampling: None,
        optimizers: Vec::new(),
        latch: None,
        fusion: Vec::new(),
        baselines: Vec::new(),
        methods: BTreeMap::new(),
        notes: Vec::new(),
        error: None,
    };
    if let Err(e) = fold_body(dataset, fold, cfg, pool, &mut report) {
        log::warn!("fold {index} failed: {e}");
        report.error = Some(e.to_string());
    }
    report
}

struct Candidate {
    name: String,
    multipliers: Vec<f64>,
    validation_auc: Option<f64>,
}

fn fold_body(
    dataset: &Dataset,
    fold: &Fold,
    cfg: &ExperimentConfig,
    pool: &Arc<ThreadPool>,
    report: &mut FoldReport,
) -> crate::Result<()> {
    let mut train = dataset.select_rows(&fold.train);
    let mut test = dataset.select_rows(&fold.test);
    if !cfg.normalize_before_split {
        let bounds = fit_normalizer(&train);
        train = normalize(&train, &bounds)?;
        test = normalize(&test, &bounds)?;
    }
    let (train, sampling) = cfg.sampler.apply(&train, report.seeds.sampler)?;
    report.sampling = Some(sampling);

    let classifier = Arc::new(cfg.svm.clone());
    let data = Arc::new(EvalData::new(
        &train,
        classifier,
        cfg.validation_fraction,
        report.seeds.internal_split,
    ));

    let (outcomes, fronts, latch) = run_optimizers(cfg, &data, pool, &report.seeds);
    report.optimizers = outcomes;
    report.latch = Some(latch);

    let mut candidates = vec![Candidate {
        name: ALL_FEATURES.to_string(),
        multipliers: vec![1.0; train.n_features()],
        validation_auc: None,
    }];
    for front in &fronts {
        if let Some(best) = front.best_auc() {
            candidates.push(Candidate {
                name: front.algorithm.to_string(),
                multipliers: best.chromosome.to_multipliers(),
                validation_auc: Some(best.objectives.auc),
            });
        }
    }

    if !cfg.fusion.is_empty() {
        if fronts.is_empty() {
            report.notes.push("fusion skipped: no optimizer produced a front".into());
        }
        for &mode in cfg.fusion.iter().filter(|_| !fronts.is_empty()) {
            match fuse_and_sweep(&fronts, mode, &data, pool) {
                Ok(outcome) => {
                    candidates.push(Candidate {
                        name: mode.to_string(),
                        multipliers: outcome.sweep.multipliers.clone(),
                        validation_auc: Some(outcome.sweep.best_auc),
                    });
                    report.fusion.push(outcome);
                }
                Err(e) => report.notes.push(format!("{mode} fusion failed: {e}")),
            }
        }
    }

    for &baseline in &cfg.baselines {
        let ranked = pool.install(|| {
            let order = baseline.rank(&train, &data)?;
            let weighted: Vec<(usize, f64)> = order.iter().map(|&j| (j, 1.0)).collect();
            let sweep = prefix_sweep(&weighted, &data)?;
            Ok::<_, crate::fusion::FusionError>((order, sweep))
        });
        match ranked {
            Ok((order, sweep)) => {
                candidates.push(Candidate {
                    name: baseline.to_string(),
                    multipliers: sweep.multipliers.clone(),
                    validation_auc: Some(sweep.best_auc),
                });
                report.baselines.push(BaselineOutcome {
                    baseline: baseline.to_string(),
                    order,
                    sweep,
                });
            }
            Err(e) => report.notes.push(format!("{baseline} baseline failed: {e}")),
        }
    }

    let scored: Vec<(String, MethodResult)> = pool.install(|| {
        candidates
            .par_iter()
            .map(|c| {
                let outcome = test_metrics(&train, &test, &c.multipliers, &cfg.svm);
                let selected = (0..c.multipliers.len()).filter(|&j| c.multipliers[j] != 0.0).collect();
                let (metrics, error) = match outcome {
                    Ok(m) => (Some(m), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                (
                    c.name.clone(),
                    MethodResult {
                        selected,
                        validation_auc: c.validation_auc,
                        metrics,
                        error,
                    },
                )
            })
            .collect()
    });
    report.methods = scored.into_iter().collect();
    Ok(())
}

/// Trains on the full resampled training portion and scores the test rows.
pub fn test_metrics(
    train: &Dataset,
    test: &Dataset,
    multipliers: &[f64],
    svm: &SvmParams,
) -> Result<Metrics, ClassifyError> {
    let model = train_svm_rbf(train.features.view(), &train.labels, multipliers, svm)?;
    let scores = model.decision_scores(test.features.view())?;
    let predictions: Vec<bool> = scores.iter().map(|&s| s > 0.0).collect();
    compute_metrics(&test.labels, &predictions, &scores)
}

fn fuse_and_sweep(
    fronts: &[ParetoFront],
    mode: FusionMode,
    data: &EvalData,
    pool: &ThreadPool,
) -> Result<FusionOutcome, crate::fusion::FusionError> {
    let ranking = fuse(fronts, mode)?;
    let sweep = pool.install(|| prefix_sweep(&ranking.weighted_order(), data))?;
    Ok(FusionOutcome { mode, ranking, sweep })
}

/// Launches every configured optimizer on its own thread, sharing the
/// evaluation pool, and waits on a latch until all have finished.
fn run_optimizers(
    cfg: &ExperimentConfig,
    data: &Arc<EvalData>,
    pool: &Arc<ThreadPool>,
    seeds: &FoldSeeds,
) -> (Vec<OptimizerOutcome>, Vec<ParetoFront>, LatchSummary) {
    let params = cfg.optimizer_params();
    let latch = CompletionLatch::new(cfg.optimizers.len());
    let slots: Vec<Mutex<Option<(OptimizerOutcome, Option<ParetoFront>)>>> =
        cfg.optimizers.iter().map(|_| Mutex::new(None)).collect();

    let completions = std::thread::scope(|scope| {
        for (task, &algo) in cfg.optimizers.iter().enumerate() {
            let (latch, slots, params) = (&latch, &slots, &params);
            let ctx = EvalContext::new(Arc::clone(data)).with_pool(Arc::clone(pool));
            let seed = seeds.optimizers[&algo];
            std::thread::Builder::new()
                .name(format!("sdp-{algo}"))
                .spawn_scoped(scope, move || {
                    let result = catch_unwind(AssertUnwindSafe(|| algo.run(params, &ctx, seed)));
                    let (front, error) = match result {
                        Ok(Ok(front)) => (Some(front), None),
                        Ok(Err(e)) => (None, Some(e.to_string())),
                        Err(panic) => (None, Some(format!("optimizer panicked: {}", panic_message(&panic)))),
                    };
                    let outcome = OptimizerOutcome {
                        algorithm: algo,
                        front: front.as_ref().map(front_members).unwrap_or_default(),
                        evaluations: ctx.evaluated().len(),
                        failures: ctx.failures(),
                        error,
                    };
                    let ok = outcome.error.is_none();
                    *slots[task].lock().expect("result slot poisoned") = Some((outcome, front));
                    latch.count_down(task, ok);
                })
                .expect("failed to spawn optimizer thread");
        }
        latch.wait()
    });

    let mut outcomes = Vec::with_capacity(slots.len());
    let mut fronts = Vec::new();
    for slot in slots {
        let (outcome, front) = slot
            .into_inner()
            .expect("result slot poisoned")
            .expect("latch released before every optimizer reported");
        outcomes.push(outcome);
        fronts.extend(front);
    }
    let succeeded = completions.iter().filter(|c| c.ok).count();
    let summary = LatchSummary {
        launched: latch.initial(),
        succeeded,
        failed: completions.len() - succeeded,
    };
    (outcomes, fronts, summary)
}

fn panic_message(panic: &Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = panic.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = panic.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic".to_string()
    }
}

fn front_members(front: &ParetoFront) -> Vec<FrontMember> {
    front
        .members
        .iter()
        .map(|m| FrontMember {
            bitstring: m.chromosome.to_string(),
            n_features: m.chromosome.count_ones(),
            auc: m.objectives.auc,
        })
        .collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn aggregate(folds: &[FoldReport]) -> BTreeMap<String, MethodAggregate> {
    let mut per_method: BTreeMap<&str, Vec<(&MethodResult, &Metrics)>> = BTreeMap::new();
    for fold in folds {
        for (name, result) in &fold.methods {
            if let Some(m) = &result.metrics {
                per_method.entry(name).or_default().push((result, m));
            }
        }
    }
    per_method
        .into_iter()
        .map(|(name, rows)| {
            let aucs: Vec<f64> = rows.iter().filter_map(|(_, m)| m.auc).collect();
            let acc: Vec<f64> = rows.iter().map(|(_, m)| m.acc).collect();
            let f_score: Vec<f64> = rows.iter().map(|(_, m)| m.f_score).collect();
            let sizes: Vec<f64> = rows.iter().map(|(r, _)| r.selected.len() as f64).collect();
            (
                name.to_string(),
                MethodAggregate {
                    folds: rows.len(),
                    acc: mean(&acc),
                    f_score: mean(&f_score),
                    auc: (!aucs.is_empty()).then(|| mean(&aucs)),
                    n_selected: mean(&sizes),
                },
            )
        })
        .collect()
}

/// Friedman/Nemenyi over every method with a test AUC in every fold, and
/// Wilcoxon tests of each fusion mode against each optimizer.
fn statistics(cfg: &ExperimentConfig, folds: &[FoldReport]) -> StatisticsReport {
    let mut out = StatisticsReport::default();
    let auc_of = |fold: &FoldReport, name: &str| {
        fold.methods
            .get(name)
            .and_then(|m| m.metrics.as_ref())
            .and_then(|m| m.auc)
    };
    let mut names: Vec<String> = vec![ALL_FEATURES.to_string()];
    names.extend(cfg.optimizers.iter().map(|a| a.to_string()));
    names.extend(cfg.fusion.iter().map(|m| m.to_string()));
    names.extend(cfg.baselines.iter().map(|b| b.to_string()));
    let complete: Vec<String> = names
        .into_iter()
        .filter(|n| folds.iter().all(|f| auc_of(f, n).is_some()))
        .collect();

    if complete.len() >= 2 {
        let rows: Vec<Vec<f64>> = folds
            .iter()
            .map(|f| complete.iter().map(|n| auc_of(f, n).unwrap_or(f64::NAN)).collect())
            .collect();
        match friedman(&rows) {
            Ok(result) => {
                let cd = nemenyi_cd(complete.len(), folds.len(), ALPHA);
                if let Err(e) = &cd {
                    out.notes.push(format!("nemenyi: {e}"));
                }
                let cd = cd.ok();
                let pairs = cd.map(|cd| nemenyi_pairs(&result.mean_ranks, cd)).unwrap_or_default();
                out.friedman = Some(FriedmanSummary {
                    methods: complete.clone(),
                    result,
                    critical_difference: cd,
                    pairs,
                });
            }
            Err(e) => out.notes.push(format!("friedman: {e}")),
        }
    } else {
        out.notes.push("friedman: fewer than two methods with a test AUC in every fold".into());
    }

    for mode in &cfg.fusion {
        for algo in &cfg.optimizers {
            let (a, b) = (mode.to_string(), algo.to_string());
            if !(complete.contains(&a) && complete.contains(&b)) {
                continue;
            }
            let pairs: Vec<(f64, f64)> = folds
                .iter()
                .map(|f| (auc_of(f, &a).unwrap_or(f64::NAN), auc_of(f, &b).unwrap_or(f64::NAN)))
                .collect();
            match wilcoxon_signed_rank(&pairs) {
                Ok(result) => out.wilcoxon.push(WilcoxonSummary { a, b, result }),
                Err(e) => out.notes.push(format!("wilcoxon {a} vs {b}: {e}")),
            }
        }
    }
    out
}
