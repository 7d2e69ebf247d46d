use std::sync::Arc;

use rand::Rng as _;
use sdp_core::data::synthetic::{generate, Profile};
use sdp_core::data::{stratified_kfold, Dataset};
use sdp_core::fusion::{Baseline, FusionMode};
use sdp_core::moo::Algorithm;
use sdp_core::pipeline::{
    build_pool, run_experiment_on, run_fold, ExperimentConfig, ExperimentReport, ALL_FEATURES,
};
use sdp_core::resample::Sampler;
use sdp_core::rng::{derive_seed, rng_from_seed, streams};

fn tiny_dataset() -> Dataset {
    let profile = Profile {
        name: "tiny",
        repository: "test",
        features: 8,
        defective: 24,
        non_defective: 66,
    };
    generate(&profile, 3)
}

fn tiny_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        dataset: "in-memory".into(),
        k_folds: 3,
        seed: 42,
        sampler: Sampler::BorderlineSmote,
        optimizers: Algorithm::ALL.to_vec(),
        fusion: vec![FusionMode::Vote, FusionMode::Weight],
        baselines: vec![Baseline::Pearson, Baseline::Fisher, Baseline::Greedy],
        workers: 2,
        ..Default::default()
    };
    cfg.set_budget(8, 3);
    cfg
}

fn without_clock(mut r: ExperimentReport) -> ExperimentReport {
    r.wall_clock_seconds = 0.0;
    r.config.workers = 0;
    r
}

#[test]
fn report_does_not_depend_on_worker_count() {
    let ds = tiny_dataset();
    let mut cfg = tiny_config();
    cfg.workers = 1;
    let serial = without_clock(run_experiment_on(&cfg, &ds).unwrap());
    cfg.workers = 4;
    let parallel = without_clock(run_experiment_on(&cfg, &ds).unwrap());
    let again = without_clock(run_experiment_on(&cfg, &ds).unwrap());
    assert_eq!(serial, parallel);
    assert_eq!(parallel, again);
}

#[test]
fn report_covers_every_method_and_aggregates_are_means() {
    let ds = tiny_dataset();
    let report = run_experiment_on(&tiny_config(), &ds).unwrap();
    assert_eq!(report.folds.len(), 3);
    let expected = [
        "all", "fisher", "greedy", "mode", "mopso", "nsga2", "pearson", "vote", "weight",
    ];
    for fold in &report.folds {
        assert!(fold.error.is_none(), "{:?}", fold.error);
        let names: Vec<&str> = fold.methods.keys().map(String::as_str).collect();
        assert_eq!(names, expected);
        let latch = fold.latch.as_ref().unwrap();
        assert_eq!((latch.launched, latch.succeeded, latch.failed), (3, 3, 0));
        for o in &fold.optimizers {
            assert!(!o.front.is_empty());
            assert!(o.evaluations >= o.front.len());
        }
        assert_eq!(fold.methods[ALL_FEATURES].selected.len(), ds.n_features());
    }
    for (name, agg) in &report.aggregate {
        let rows: Vec<_> = report
            .folds
            .iter()
            .filter_map(|f| f.methods[name].metrics.clone().map(|m| (f, m)))
            .collect();
        let n = rows.len() as f64;
        let acc = rows.iter().map(|(_, m)| m.acc).sum::<f64>() / n;
        let fs = rows.iter().map(|(_, m)| m.f_score).sum::<f64>() / n;
        let auc = rows.iter().map(|(_, m)| m.auc.unwrap()).sum::<f64>() / n;
        let size = rows.iter().map(|(f, _)| f.methods[name].selected.len() as f64).sum::<f64>() / n;
        assert!((agg.acc - acc).abs() <= 1e-12);
        assert!((agg.f_score - fs).abs() <= 1e-12);
        assert!((agg.auc.unwrap() - auc).abs() <= 1e-12);
        assert!((agg.n_selected - size).abs() <= 1e-12);
    }
    let friedman = report.statistics.friedman.as_ref().unwrap();
    assert_eq!(friedman.methods.len(), 9);
    let wilcoxon_notes = report.statistics.notes.iter().filter(|n| n.starts_with("wilcoxon")).count();
    assert_eq!(report.statistics.wilcoxon.len() + wilcoxon_notes, 6);
}

#[test]
fn test_rows_never_influence_selection() {
    let ds = tiny_dataset();
    let cfg = tiny_config();
    let plan = stratified_kfold(&ds.labels, cfg.k_folds, derive_seed(cfg.seed, streams::FOLDS, 0)).unwrap();
    let fold = &plan.folds[1];
    let pool = build_pool(2).unwrap();

    let mut perturbed = ds.clone();
    let mut rng = rng_from_seed(99);
    for &row in &fold.test {
        for v in perturbed.features.row_mut(row) {
            *v = rng.gen_range(-50.0..500.0);
        }
    }
    let a = run_fold(&ds, 1, fold, &cfg, &pool);
    let b = run_fold(&perturbed, 1, fold, &cfg, &pool);
    assert!(a.error.is_none() && b.error.is_none());
    assert_eq!(a.sampling, b.sampling);
    assert_eq!(a.optimizers, b.optimizers);
    assert_eq!(a.fusion, b.fusion);
    assert_eq!(a.baselines, b.baselines);
    for (name, m) in &a.methods {
        assert_eq!(m.selected, b.methods[name].selected, "{name}");
        assert_eq!(m.validation_auc, b.methods[name].validation_auc, "{name}");
    }
    assert_ne!(
        a.methods.values().map(|m| m.metrics.clone()).collect::<Vec<_>>(),
        b.methods.values().map(|m| m.metrics.clone()).collect::<Vec<_>>()
    );
}

#[test]
fn failed_optimizer_is_recorded_and_others_continue() {
    let ds = tiny_dataset();
    let mut cfg = tiny_config();
    // below the MODE minimum; bypasses config validation by calling run_fold
    cfg.mode.population = 3;
    let plan = stratified_kfold(&ds.labels, 3, 5).unwrap();
    let pool = Arc::new(rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap());
    let fold = run_fold(&ds, 0, &plan.folds[0], &cfg, &pool);
    assert!(fold.error.is_none());
    let latch = fold.latch.unwrap();
    assert_eq!((latch.launched, latch.succeeded, latch.failed), (3, 2, 1));
    let mode = fold.optimizers.iter().find(|o| o.algorithm == Algorithm::Mode).unwrap();
    assert!(mode.error.is_some() && mode.front.is_empty());
    assert!(!fold.methods.contains_key("mode"));
    assert!(fold.methods.contains_key("vote") && fold.methods.contains_key("nsga2"));
}

#[test]
fn classifier_errors_are_reported() {
    let ds = tiny_dataset();
    let mut cfg = tiny_config();
    cfg.svm.c = -1.0;
    assert!(run_experiment_on(&cfg, &ds).is_err());

    let plan = stratified_kfold(&ds.labels, 3, 5).unwrap();
    let fold = run_fold(&ds, 0, &plan.folds[0], &cfg, &build_pool(2).unwrap());
    assert!(fold.methods.values().all(|m| m.metrics.is_none() && m.error.is_some()));
    assert!(fold.optimizers.iter().all(|o| o.failures == o.evaluations));
}

#[test]
fn undersized_data_fails_every_fold() {
    let mut ds = tiny_dataset();
    let mut cfg = tiny_config();
    cfg.k_folds = 2;
    // six rows: every training fold is smaller than the SMOTE neighbourhood
    let keep: Vec<usize> = (0..ds.n_rows())
        .filter(|&i| !ds.labels[i])
        .take(4)
        .chain((0..ds.n_rows()).filter(|&i| ds.labels[i]).take(2))
        .collect();
    ds = ds.select_rows(&keep);
    let err = run_experiment_on(&cfg, &ds).unwrap_err();
    assert!(err.to_string().contains("every fold failed"), "{err}");
}

#[test]
fn artefacts_are_written() {
    let ds = tiny_dataset();
    let mut cfg = tiny_config();
    cfg.baselines = vec![Baseline::Fisher];
    let report = run_experiment_on(&cfg, &ds).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = report.write(dir.path()).unwrap();
    for rel in [
        "report.json",
        "config.toml",
        "metrics_per_fold.csv",
        "aggregate.csv",
        "sampling.csv",
        "mean_ranks.csv",
        "fronts/fold0_nsga2.csv",
        "fronts/fold2_mode.csv",
        "fusion/fold1_vote_ranking.csv",
        "fusion/fold1_weight_prefix.csv",
        "baselines/fold0_fisher_prefix.csv",
    ] {
        assert!(files.iter().any(|p| p.to_str() == Some(rel)), "{rel} missing");
        assert!(dir.path().join(rel).is_file());
    }
    assert!(dir.path().join("manifest.json").is_file());

    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let parsed: ExperimentReport = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed.folds.len(), 3);
    assert_eq!(parsed.aggregate.keys().collect::<Vec<_>>(), report.aggregate.keys().collect::<Vec<_>>());

    let per_fold = std::fs::read_to_string(dir.path().join("metrics_per_fold.csv")).unwrap();
    assert_eq!(per_fold.lines().count(), 1 + 3 * 7);
    let config = std::fs::read_to_string(dir.path().join("config.toml")).unwrap();
    let reread = ExperimentConfig::from_toml_str(&config).unwrap();
    assert_eq!(reread.optimizers, cfg.optimizers);
    assert_eq!(reread.nsga2, cfg.nsga2);
}
