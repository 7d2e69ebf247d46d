use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sdp_core::data::{fit_normalizer, normalize, synthetic, Dataset, Format};
use sdp_core::fusion::{fuse, prefix_sweep, FusionMode};
use sdp_core::moo::{Algorithm, EvalContext, EvalData, OptimizerParams, ParetoFront};
use sdp_core::pipeline::{build_pool, run_experiment, ExperimentConfig, Profile};
use sdp_core::resample::{borderline_smote, smote_tomek, Sampler};
use sdp_core::rng::{derive_seed, streams};
use sdp_core::stats::{
    friedman, nemenyi_cd, nemenyi_pairs, wilcoxon_signed_rank, ScoreMatrix, ALPHA,
};

/// Software defect prediction with hybrid resampling and multi-objective
/// feature selection.
#[derive(Debug, Parser)]
#[command(name = "sdp", version, about)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rebalance a dataset and write it as CSV.
    Resample(ResampleArgs),
    /// Run one optimizer on a dataset and write its Pareto front.
    Optimize(OptimizeArgs),
    /// Fuse Pareto fronts into a feature ranking.
    Fuse(FuseArgs),
    /// Wilcoxon, Friedman or Nemenyi test on a score matrix.
    Stats(StatsArgs),
    /// Run a cross-validated experiment from a config file.
    Run(RunArgs),
    /// Write a synthetic surrogate dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Arff,
}

#[derive(Debug, Args)]
struct DatasetArgs {
    /// CSV/ARFF file, or `synthetic:<NAME>` (e.g. synthetic:CM1).
    #[arg(long)]
    dataset: String,
    /// File format; inferred from the extension by default.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Label column; the last column by default.
    #[arg(long)]
    label_column: Option<String>,
    /// Columns to ignore, comma separated.
    #[arg(long, value_delimiter = ',')]
    drop_columns: Vec<String>,
    /// Seed of the synthetic generator.
    #[arg(long, default_value_t = 0)]
    synthetic_seed: u64,
}

impl DatasetArgs {
    fn load(&self) -> Result<Dataset> {
        let cfg = ExperimentConfig {
            dataset: self.dataset.clone(),
            format: self.format.map(|f| match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Arff => Format::Arff,
            }),
            label_column: self.label_column.clone(),
            drop_columns: self.drop_columns.clone(),
            synthetic_seed: self.synthetic_seed,
            ..Default::default()
        };
        cfg.load_dataset()
            .with_context(|| format!("cannot load {}", self.dataset))
    }
}

#[derive(Debug, Args)]
struct ResampleArgs {
    #[command(flatten)]
    data: DatasetArgs,
    /// bs (Borderline-SMOTE), st (SMOTE-Tomek) or none.
    #[arg(long, default_value = "bs")]
    sampler: Sampler,
    /// Neighbourhood size used to classify borderline rows.
    #[arg(long, default_value_t = 5)]
    m: usize,
    /// Minority neighbours used for interpolation.
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[arg(long, default_value = "bs")]
    sampler: Sampler,
    /// nsga2, mopso or mode.
    #[arg(long, default_value = "nsga2")]
    algo: Algorithm,
    /// Population size.
    #[arg(long, default_value_t = 100)]
    pop: usize,
    /// Iterations.
    #[arg(long, default_value_t = 100)]
    iters: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// TOML file with `[nsga2]`, `[mopso]` and `[mode]` parameter tables;
    /// `--pop` and `--iters` override the budget.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Evaluation threads (default: SDP_WORKERS, then all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output directory; receives pareto_<algo>.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct FuseArgs {
    /// Directory holding pareto_<algo>.csv files.
    #[arg(long)]
    fronts: PathBuf,
    /// vote or weight.
    #[arg(long, default_value = "vote")]
    mode: FusionMode,
    /// Dataset for the prefix sweep; without it only the ranking is written.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long, default_value = "bs")]
    sampler: Sampler,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    synthetic_seed: u64,
    /// Output directory; receives ranking_<mode>.csv and prefix_curve.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TestArg {
    Wilcoxon,
    Friedman,
    Nemenyi,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// CSV with one row per dataset and one column per method.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    test: TestArg,
    /// The two columns compared by the Wilcoxon test (default: first two).
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    /// Significance level for Nemenyi (0.05 or 0.10).
    #[arg(long, default_value_t = ALPHA)]
    alpha: f64,
    /// Also write the result as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Budget preset applied before the file's own settings: full or desk.
    #[arg(long)]
    profile: Option<Profile>,
    /// Overrides the config's output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Overrides the config's worker count.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Profile name (CM1, KC3, ..., Log4j-1.0); `--list` shows all.
    #[arg(long, required_unless_present = "list")]
    name: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, required_unless_present = "list")]
    out: Option<PathBuf>,
    #[arg(long)]
    list: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    let result = match cli.command {
        Command::Resample(a) => resample(a),
        Command::Optimize(a) => optimize(a),
        Command::Fuse(a) => fuse_fronts(a),
        Command::Stats(a) => stats(a),
        Command::Run(a) => run(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    Ok(())
}

fn resample(a: ResampleArgs) -> Result<()> {
    let ds = a.data.load()?;
    let (out, report) = match a.sampler {
        Sampler::BorderlineSmote => borderline_smote(&ds, a.m, a.k, a.seed)?,
        Sampler::SmoteTomek => smote_tomek(&ds, a.k, a.seed)?,
        Sampler::None => Sampler::None.apply(&ds, a.seed)?,
    };
    create_parent(&a.out)?;
    out.save_csv(&a.out)?;
    println!(
        "{}: {}/{} -> {}/{} (synthetic {}, tomek pairs removed {}{})",
        a.sampler,
        report.before.majority,
        report.before.minority,
        report.after.majority,
        report.after.minority,
        report.synthetic_created,
        report.tomek_pairs_removed,
        if report.fallback_to_plain_smote { ", no DANGER rows: fallback seeds" } else { "" }
    );
    Ok(())
}

/// Normalises, resamples and splits a whole dataset for a standalone run.
fn prepare(ds: &Dataset, sampler: Sampler, seed: u64) -> Result<(Dataset, EvalData)> {
    let normalized = normalize(ds, &fit_normalizer(ds))?;
    let (train, _) = sampler.apply(&normalized, derive_seed(seed, streams::SAMPLER, 0))?;
    let data = EvalData::with_svm(&train, derive_seed(seed, streams::INTERNAL_SPLIT, 0));
    Ok((train, data))
}

fn optimize(a: OptimizeArgs) -> Result<()> {
    let ds = a.data.load()?;
    let mut params = match &a.params {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            toml::from_str::<OptimizerParams>(&text).with_context(|| format!("invalid {}", path.display()))?
        }
        None => OptimizerParams::default(),
    };
    params = params.with_budget(a.pop, a.iters);
    let (_, data) = prepare(&ds, a.sampler, a.seed)?;
    let workers = ExperimentConfig {
        workers: a.workers,
        ..Default::default()
    }
    .resolved_workers();
    let ctx = EvalContext::new(Arc::new(data)).with_pool(build_pool(workers)?);
    let seed = derive_seed(a.seed, a.algo.seed_stream(), 0);
    let front = a.algo.run(&params, &ctx, seed)?;
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let path = a.out.join(format!("pareto_{}.csv", a.algo));
    let file = fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    front.write_csv(file)?;
    let best = front.best_auc().map(|m| m.objectives.auc).unwrap_or(f64::NAN);
    println!(
        "{}: {} front members, best AUC {best:.4}, {} subsets evaluated -> {}",
        a.algo,
        front.len(),
        ctx.evaluated().len(),
        path.display()
    );
    Ok(())
}

fn read_fronts(dir: &Path) -> Result<Vec<ParetoFront>> {
    let mut fronts = Vec::new();
    for algo in Algorithm::ALL {
        let path = dir.join(format!("pareto_{algo}.csv"));
        if !path.is_file() {
            continue;
        }
        let file = fs::File::open(&path).with_context(|| format!("cannot read {}", path.display()))?;
        fronts.push(ParetoFront::read_csv(algo, file).with_context(|| format!("invalid {}", path.display()))?);
    }
    if fronts.is_empty() {
        bail!("no pareto_<algo>.csv files in {}", dir.display());
    }
    Ok(fronts)
}

fn fuse_fronts(a: FuseArgs) -> Result<()> {
    let fronts = read_fronts(&a.fronts)?;
    let ranking = fuse(&fronts, a.mode)?;
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let path = a.out.join(format!("ranking_{}.csv", a.mode));
    ranking.write_csv(fs::File::create(&path)?)?;
    println!("{} ranking of {} features -> {}", a.mode, ranking.entries.len(), path.display());
    if let Some(dataset) = &a.dataset {
        let ds = DatasetArgs {
            dataset: dataset.clone(),
            format: None,
            label_column: None,
            drop_columns: Vec::new(),
            synthetic_seed: a.synthetic_seed,
        }
        .load()?;
        if ds.n_features() != ranking.n_features {
            bail!("fronts cover {} features but the dataset has {}", ranking.n_features, ds.n_features());
        }
        let (_, data) = prepare(&ds, a.sampler, a.seed)?;
        let sweep = prefix_sweep(&ranking.weighted_order(), &data)?;
        let curve = a.out.join("prefix_curve.csv");
        sweep.write_csv(fs::File::create(&curve)?)?;
        println!(
            "best prefix: {} features, validation AUC {:.4} -> {}",
            sweep.best_length,
            sweep.best_auc,
            curve.display()
        );
    }
    Ok(())
}

fn stats(a: StatsArgs) -> Result<()> {
    let file = fs::File::open(&a.input).with_context(|| format!("cannot read {}", a.input.display()))?;
    let matrix = ScoreMatrix::read_csv(file)?;
    let json = match a.test {
        TestArg::Wilcoxon => {
            let (i, j) = match a.columns.as_slice() {
                [] => (0, 1),
                [x, y] => (column_index(&matrix, x)?, column_index(&matrix, y)?),
                _ => bail!("--columns takes exactly two names"),
            };
            if matrix.column_names.len() < 2 {
                bail!("need at least two columns");
            }
            let r = wilcoxon_signed_rank(&matrix.pairs(i, j))?;
            println!(
                "wilcoxon {} vs {}: statistic {:.3}, p {:.3} ({:?}), significant at 0.05: {}",
                matrix.column_names[i], matrix.column_names[j], r.statistic, r.p_value, r.method, r.significant
            );
            serde_json::json!({
                "test": "wilcoxon",
                "a": matrix.column_names[i],
                "b": matrix.column_names[j],
                "result": r,
            })
        }
        TestArg::Friedman | TestArg::Nemenyi => {
            let r = friedman(&matrix.values)?;
            println!("friedman: statistic {:.3}, p {:.3}, significant at 0.05: {}", r.statistic, r.p_value, r.significant);
            for (name, rank) in matrix.column_names.iter().zip(&r.mean_ranks) {
                println!("  mean rank {name}: {rank:.4}");
            }
            let cd = nemenyi_cd(r.k_algorithms, r.n_datasets, a.alpha)?;
            println!("critical difference (alpha {}): {cd:.4}", a.alpha);
            let pairs = nemenyi_pairs(&r.mean_ranks, cd);
            if matches!(a.test, TestArg::Nemenyi) {
                for p in &pairs {
                    println!(
                        "  {} vs {}: |diff| {:.4} {}",
                        matrix.column_names[p.a],
                        matrix.column_names[p.b],
                        p.difference,
                        if p.significant { "significant" } else { "not significant" }
                    );
                }
            }
            serde_json::json!({
                "test": if matches!(a.test, TestArg::Friedman) { "friedman" } else { "nemenyi" },
                "methods": matrix.column_names,
                "datasets": matrix.row_names,
                "result": r,
                "alpha": a.alpha,
                "critical_difference": cd,
                "pairs": pairs,
            })
        }
    };
    if let Some(out) = &a.out {
        create_parent(out)?;
        fs::write(out, serde_json::to_string_pretty(&json)?).with_context(|| format!("cannot write {}", out.display()))?;
    }
    Ok(())
}

fn column_index(m: &ScoreMatrix, name: &str) -> Result<usize> {
    m.column_names
        .iter()
        .position(|c| c.eq_ignore_ascii_case(name))
        .with_context(|| format!("no column `{name}` (have {})", m.column_names.join(", ")))
}

fn run(a: RunArgs) -> Result<()> {
    let text = fs::read_to_string(&a.config).with_context(|| format!("cannot read {}", a.config.display()))?;
    let text = match a.profile {
        Some(p) => format!("profile = \"{}\"\n{}", match p {
            Profile::Full => "full",
            Profile::Desk => "desk",
        }, strip_profile(&text)),
        None => text,
    };
    let mut cfg = ExperimentConfig::from_toml_str(&text).with_context(|| format!("invalid {}", a.config.display()))?;
    if let Some(out) = a.output {
        cfg.output = out;
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    let report = run_experiment(&cfg)?;
    let files = report.write(&cfg.output)?;
    println!(
        "{}: {} folds in {:.1}s, {} files -> {}",
        report.dataset.name,
        report.folds.len(),
        report.wall_clock_seconds,
        files.len() + 1,
        cfg.output.display()
    );
    for (name, agg) in &report.aggregate {
        println!(
            "  {name:<8} AUC {} F {:.4} ACC {:.4} features {:.1}",
            agg.auc.map_or("-".to_string(), |v| format!("{v:.4}")),
            agg.f_score,
            agg.acc,
            agg.n_selected
        );
    }
    for f in report.folds.iter().filter(|f| f.error.is_some()) {
        eprintln!("warning: fold {} failed: {}", f.fold, f.error.as_deref().unwrap_or(""));
    }
    Ok(())
}

/// Drops a top-level `profile = ...` line so the command-line choice wins.
fn strip_profile(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with("profile"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn synth(a: SynthArgs) -> Result<()> {
    if a.list {
        for p in synthetic::PROFILES {
            println!("{:<12} {:<8} {:>3} metrics {:>5} defective {:>5} clean", p.name, p.repository, p.features, p.defective, p.non_defective);
        }
        return Ok(());
    }
    let name = a.name.expect("required by clap");
    let out = a.out.expect("required by clap");
    let profile = synthetic::profile(&name).with_context(|| format!("unknown profile `{name}` (see --list)"))?;
    let ds = synthetic::generate(&profile, a.seed);
    create_parent(&out)?;
    ds.save_csv(&out)?;
    let (d, c) = ds.class_counts();
    println!("{}: {} rows ({d} defective, {c} clean), {} metrics -> {}", profile.name, ds.n_rows(), ds.n_features(), out.display());
    Ok(())
}
