//! Command-line front end. `run` returns the process exit code:
//! 0 on success, 1 when the work itself failed, 2 for invalid input.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bench::{compare_models, load_named, run_benchmark, BenchOptions, BenchReport, Method};
use crate::data::{self, Dataset};
use crate::error::Error;
use crate::exec::with_jobs;
use crate::learners::LearnerKind;
use crate::plot;
use crate::tuner::{tune, EvaluationStrategy, Optimizer, TuneSpec};

pub const SEED_ENV: &str = "AUTOTUNE_SEED";

#[derive(Debug, Parser)]
#[command(name = "autotune", version, about = "Hyperparameter tuning for SVM, GBM, adaboost and elastic net")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tune one learner on one dataset and print the result as JSON.
    Tune(TuneArgs),
    /// Repeated split/tune/test trials over datasets and methods.
    Benchmark(BenchArgs),
    /// Every learner under both optimizers and both strategies on one dataset.
    Compare(CompareArgs),
    /// Error-vs-time SVG from a benchmark report.
    Plot(PlotArgs),
}

#[derive(Debug, Args, Default)]
struct Common {
    /// key=value file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Defaults to $AUTOTUNE_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Fast holdout: fit on this fraction, score on the rest.
    #[arg(long)]
    fast: Option<f64>,
    /// k-fold cross-validation.
    #[arg(long)]
    cross: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    /// Hooke-Jeeves evaluation budget.
    #[arg(long)]
    budget: Option<usize>,
    /// Hooke-Jeeves step tolerance (scaled units).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct TuneArgs {
    /// CSV path or bundled dataset name.
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long, visible_alias = "method")]
    learner: Option<String>,
    /// hj, ga, grid (1-SE) or gridmin.
    #[arg(long)]
    optimizer: Option<String>,
    /// Override a search bound, natural units: name=lower:upper.
    #[arg(long = "bound")]
    bounds: Vec<String>,
    /// Include every evaluated configuration in the output.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated bundled dataset names.
    #[arg(long)]
    datasets: Option<String>,
    /// Comma-separated learners, crossed with --optimizer and the strategy.
    #[arg(long)]
    learner: Option<String>,
    /// Comma-separated full method labels such as svm-hj-fast.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    optimizer: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory for report.json and report.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// report.json, or a directory containing it.
    #[arg(long)]
    report: PathBuf,
    /// Defaults to figure.svg next to the report.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn failed(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    /// Tuning and I/O during the run are failures; everything else is
    /// rejected input.
    fn from(e: Error) -> Self {
        match e {
            Error::TuningFailed | Error::FitFailed(_) | Error::Json(_) => failed(e.to_string()),
            Error::Io { ref path, .. } if path.extension().is_some_and(|x| x == "json") => failed(e.to_string()),
            other => usage(other.to_string()),
        }
    }
}

/// Flat key=value settings from `--config`.
#[derive(Debug, Default)]
struct ConfigFile(HashMap<String, String>);

const CONFIG_KEYS: &[&str] = &[
    "data", "target", "learner", "method", "optimizer", "fast", "cross", "seed", "jobs", "trials", "out",
    "datasets", "population", "generations", "budget", "tol", "bound",
];

impl ConfigFile {
    fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let mut map = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
            let k = k.trim().replace('_', "-");
            if !CONFIG_KEYS.contains(&k.as_str()) {
                return Err(usage(format!("{}:{}: unknown key '{k}'", path.display(), i + 1)));
            }
            map.insert(k, v.trim().to_string());
        }
        Ok(ConfigFile(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: std::fmt::Display,
    {
        self.0
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| usage(format!("config {key}={v}: {e}"))))
            .transpose()
    }

    /// `flag`, else the file's value.
    fn or<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

struct Resolved {
    seed: u64,
    jobs: Option<usize>,
    strategy: EvaluationStrategy,
    opts: BenchOptions,
}

fn resolve_common(c: &Common, cfg: &ConfigFile, default_strategy: EvaluationStrategy) -> Result<Resolved, Failure> {
    let seed = match cfg.or(c.seed, "seed")? {
        Some(s) => s,
        None => match std::env::var(SEED_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| usage(format!("{SEED_ENV}={v} is not an integer")))?,
            Err(_) => 0,
        },
    };
    let fast: Option<f64> = cfg.or(c.fast, "fast")?;
    let cross: Option<usize> = cfg.or(c.cross, "cross")?;
    let strategy = match (fast, cross) {
        (Some(_), Some(_)) => return Err(usage("--fast and --cross are mutually exclusive")),
        (Some(fraction), None) => EvaluationStrategy::FastHoldout { fraction },
        (None, Some(k)) => EvaluationStrategy::CrossValidation { k },
        (None, None) => default_strategy,
    };
    strategy.validate()?;
    let mut opts = BenchOptions::default();
    if let Some(p) = cfg.or(c.population, "population")? {
        opts.ga.population = p;
    }
    if let Some(g) = cfg.or(c.generations, "generations")? {
        opts.ga.generations = g;
    }
    if let Some(b) = cfg.or(c.budget, "budget")? {
        opts.hj.budget = b;
    }
    if let Some(t) = cfg.or(c.tol, "tol")? {
        opts.hj.tol = t;
    }
    opts.ga.validate()?;
    if opts.hj.budget < 1 || !(opts.hj.tol > 0.0) {
        return Err(usage("--budget must be >= 1 and --tol > 0"));
    }
    let jobs = cfg.or(c.jobs, "jobs")?;
    if jobs == Some(0) {
        return Err(usage("--jobs must be >= 1"));
    }
    Ok(Resolved {
        seed,
        jobs,
        strategy,
        opts,
    })
}

/// A CSV path, or a bundled dataset name.
fn load_dataset(data: &str, target: Option<&str>) -> Result<(String, Dataset), Failure> {
    let path = Path::new(data);
    if path.is_file() {
        let target = target.ok_or_else(|| usage("--target is required for CSV input"))?;
        let name = path.file_stem().map_or(data.to_string(), |s| s.to_string_lossy().into_owned());
        return Ok((name, data::load_csv(path, target)?));
    }
    let d = data::bundled(data)?;
    if let (Some(t), Some(default)) = (target, data::default_target(data)) {
        if t != default {
            return Err(usage(format!("bundled dataset '{data}' has target '{default}', not '{t}'")));
        }
    }
    Ok((data.to_string(), d))
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

#[derive(Serialize)]
struct TuneOutput<'a> {
    dataset: &'a str,
    learner: LearnerKind,
    optimizer: String,
    strategy: EvaluationStrategy,
    seed: u64,
    config: std::collections::BTreeMap<String, f64>,
    loss: f64,
    n_evals: usize,
    elapsed_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<&'a [crate::tuner::TraceEntry]>,
}

fn cmd_tune(a: TuneArgs) -> Result<(), Failure> {
    let cfg = ConfigFile::load(a.common.config.as_deref())?;
    let r = resolve_common(&a.common, &cfg, EvaluationStrategy::FastHoldout { fraction: 0.5 })?;
    let data: String = cfg.or(a.data, "data")?.ok_or_else(|| usage("--data is required"))?;
    let target: Option<String> = cfg.or(a.target, "target")?;
    let learner: LearnerKind = cfg
        .or(a.learner, "learner")?
        .or(cfg.get("method")?)
        .ok_or_else(|| usage("--learner is required"))?
        .parse::<LearnerKind>()?;
    let optimizer: Optimizer = cfg.or(a.optimizer, "optimizer")?.unwrap_or_else(|| "hj".into()).parse()?;
    let (name, d) = load_dataset(&data, target.as_deref())?;
    learner.check_response(d.kind())?;

    let mut spec = TuneSpec::new(learner, optimizer, r.strategy);
    spec.hj = r.opts.hj;
    spec.ga = r.opts.ga;
    let mut bounds = a.bounds;
    if bounds.is_empty() {
        if let Some(b) = cfg.get::<String>("bound")? {
            bounds = split_list(&b);
        }
    }
    if !bounds.is_empty() {
        let mut space = spec.search_space(&d)?;
        for b in &bounds {
            let bad = || usage(format!("--bound {b}: expected name=lower:upper"));
            let (name, range) = b.split_once('=').ok_or_else(bad)?;
            let (lo, hi) = range.split_once(':').ok_or_else(bad)?;
            let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
            space.set_bounds(name.trim(), lo, hi)?;
        }
        spec.space = Some(space);
    }
    spec.validate(&d)?;

    let d = Arc::new(d);
    let result = with_jobs(r.jobs, || tune(d, &spec, r.seed))?;
    let out = TuneOutput {
        dataset: &name,
        learner,
        optimizer: optimizer.to_string(),
        strategy: r.strategy,
        seed: r.seed,
        config: result.best_named(),
        loss: result.best_loss,
        n_evals: result.n_evals,
        elapsed_seconds: result.elapsed_seconds,
        trace: a.trace.then_some(result.trace.as_slice()),
    };
    println!("{}", serde_json::to_string_pretty(&out).map_err(|e| failed(e.to_string()))?);
    Ok(())
}

fn finish_report(report: &BenchReport, out: &Path) -> Result<(), Failure> {
    let (json, csv) = report.write_files(out).map_err(|e| failed(e.to_string()))?;
    eprintln!("wrote {} and {}", json.display(), csv.display());
    if report.aggregates.is_empty() {
        return Err(failed("every trial failed; the report has no aggregate rows"));
    }
    print!("{}", report.to_csv().map_err(|e| failed(e.to_string()))?);
    Ok(())
}

fn cmd_benchmark(a: BenchArgs) -> Result<(), Failure> {
    let cfg = ConfigFile::load(a.common.config.as_deref())?;
    let r = resolve_common(&a.common, &cfg, EvaluationStrategy::FastHoldout { fraction: 0.5 })?;
    let names = split_list(
        &cfg.or(a.datasets, "datasets")?
            .ok_or_else(|| usage("--datasets is required"))?,
    );
    if names.is_empty() {
        return Err(usage("--datasets is empty"));
    }
    let methods: Vec<Method> = match cfg.or(a.method, "method")? {
        Some(list) => split_list(&list).iter().map(|m| m.parse()).collect::<Result<_, _>>()?,
        None => {
            let learners: String = cfg.or(a.learner, "learner")?.ok_or_else(|| usage("--learner or --method is required"))?;
            let optimizer: Optimizer = cfg.or(a.optimizer, "optimizer")?.unwrap_or_else(|| "hj".into()).parse()?;
            split_list(&learners)
                .iter()
                .map(|l| Ok(Method::new(l.parse()?, optimizer, r.strategy)))
                .collect::<Result<_, Error>>()?
        }
    };
    if methods.is_empty() {
        return Err(usage("no methods given"));
    }
    let trials: usize = cfg.or(a.trials, "trials")?.unwrap_or(10);
    let out: PathBuf = cfg.or(a.out, "out")?.unwrap_or_else(|| PathBuf::from("results"));
    let datasets = load_named(&names)?;
    let report = with_jobs(r.jobs, || run_benchmark(&datasets, &methods, trials, r.seed, &r.opts))?;
    finish_report(&report, &out)
}

fn cmd_compare(a: CompareArgs) -> Result<(), Failure> {
    let cfg = ConfigFile::load(a.common.config.as_deref())?;
    let r = resolve_common(&a.common, &cfg, EvaluationStrategy::FastHoldout { fraction: 0.5 })?;
    if a.common.fast.is_some() || a.common.cross.is_some() {
        return Err(usage("compare always runs both 10-fold CV and the fast holdout"));
    }
    let data: String = cfg.or(a.data, "data")?.ok_or_else(|| usage("--data is required"))?;
    let target: Option<String> = cfg.or(a.target, "target")?;
    let (name, d) = load_dataset(&data, target.as_deref())?;
    let trials: usize = cfg.or(a.trials, "trials")?.unwrap_or(10);
    let out: PathBuf = cfg.or(a.out, "out")?.unwrap_or_else(|| PathBuf::from("results"));
    let report = with_jobs(r.jobs, || compare_models(&name, Arc::new(d), trials, r.seed, &r.opts))?;
    finish_report(&report, &out)
}

fn cmd_plot(a: PlotArgs) -> Result<(), Failure> {
    let path = if a.report.is_dir() { a.report.join("report.json") } else { a.report.clone() };
    let report = BenchReport::read_json(&path).map_err(|e| failed(e.to_string()))?;
    if report.aggregates.is_empty() {
        return Err(failed(format!("{} has no aggregate rows to plot", path.display())));
    }
    let out = a
        .out
        .unwrap_or_else(|| path.parent().unwrap_or(Path::new(".")).join("figure.svg"));
    plot::write_svg(&report, &out).map_err(|e| failed(e.to_string()))?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Tune(a) => cmd_tune(a),
        Command::Benchmark(a) => cmd_benchmark(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
