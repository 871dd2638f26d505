//! Repeated split, tune, refit, test trials and their aggregation.

mod report;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use report::{Aggregate, BenchReport};

use crate::data::{self, initial_split, Dataset, ResponseKind, TrainTestSplit};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::learners::{LearnerKind, Predictions};
use crate::metrics::{self, MetricKind};
use crate::tuner::{tune_detailed, EvaluationStrategy, GaOptions, HjOptions, LambdaRule, Optimizer, TuneSpec};

/// Share of each dataset used for tuning and refitting.
pub const TRAIN_PROPORTION: f64 = 0.75;

/// A learner, optimizer and evaluation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Method {
    pub learner: LearnerKind,
    pub optimizer: Optimizer,
    pub strategy: EvaluationStrategy,
}

impl Method {
    pub fn new(learner: LearnerKind, optimizer: Optimizer, strategy: EvaluationStrategy) -> Self {
        Method {
            learner,
            optimizer,
            strategy,
        }
    }

    /// `learner-optimizer-strategy`, e.g. `svm-hj-fast` or `gbm-ga-cv10`.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}-{}", self.learner, self.optimizer, self.strategy)
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("method '{s}' is not learner-optimizer-strategy"));
        let mut parts = s.splitn(3, '-');
        let (Some(l), Some(o), Some(st)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad());
        };
        let strategy = if let Some(k) = st.strip_prefix("cv") {
            EvaluationStrategy::CrossValidation { k: k.parse().map_err(|_| bad())? }
        } else if st == "fast" {
            EvaluationStrategy::FastHoldout { fraction: 0.5 }
        } else if let Some(f) = st.strip_prefix("fast") {
            EvaluationStrategy::FastHoldout { fraction: f.parse().map_err(|_| bad())? }
        } else {
            return Err(bad());
        };
        strategy.validate()?;
        Ok(Method::new(l.parse()?, o.parse()?, strategy))
    }
}

/// Settings shared by every trial of a benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchOptions {
    pub train_proportion: f64,
    pub hj: HjOptions,
    pub ga: GaOptions,
    /// How trials are scheduled. Candidate and fold evaluation inside a
    /// trial always follows the same mode.
    pub execution: Execution,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            train_proportion: TRAIN_PROPORTION,
            hj: HjOptions::default(),
            ga: GaOptions::default(),
            execution: Execution::default(),
        }
    }
}

impl BenchOptions {
    pub fn tune_spec(&self, method: &Method) -> TuneSpec {
        TuneSpec {
            hj: self.hj,
            ga: self.ga,
            execution: self.execution,
            ..TuneSpec::new(method.learner, method.optimizer, method.strategy)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub dataset: String,
    pub method: String,
    pub spec: Method,
    pub trial: usize,
    pub seed: u64,
    /// Accuracy and AUC, or RMSE and MAE. Empty for failed trials.
    pub test_metrics: BTreeMap<MetricKind, f64>,
    pub tune_seconds: f64,
    pub best_config: BTreeMap<String, f64>,
    pub best_loss: f64,
    pub n_evals: usize,
    /// FNV-1a digest of the test row indices; equal digests mean equal splits.
    pub split_digest: String,
    pub failed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Row sets of one trial in dataset coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialAudit {
    pub split: TrainTestSplit,
    /// `(fit rows, assessment rows)` of every fold or holdout used in tuning.
    pub tuning: Vec<(Vec<usize>, Vec<usize>)>,
}

fn digest(rows: &[usize]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for r in rows {
        for b in (*r as u64).to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

/// Seed for tuning-side randomness, decorrelated from the split seed.
fn tuning_seed(seed: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(17) ^ 0x5851_f42d_4c95_7f2d
}

/// Primary metric: accuracy for binary responses, RMSE otherwise.
pub fn primary_metric(response: ResponseKind) -> MetricKind {
    match response {
        ResponseKind::Binary => MetricKind::Accuracy,
        ResponseKind::Continuous => MetricKind::Rmse,
    }
}

fn test_metrics(truth: &[f64], p: &Predictions) -> Result<BTreeMap<MetricKind, f64>> {
    let mut out = BTreeMap::new();
    match p {
        Predictions::Binary { labels, scores } => {
            out.insert(MetricKind::Accuracy, metrics::accuracy(truth, labels)?);
            out.insert(MetricKind::Auc, metrics::auc(truth, scores)?);
        }
        Predictions::Continuous(v) => {
            out.insert(MetricKind::Rmse, metrics::rmse(truth, v)?);
            out.insert(MetricKind::Mae, metrics::mae(truth, v)?);
        }
    }
    Ok(out)
}

/// Split, tune on the training part, refit the best configuration on the
/// whole training part and score it on the test part.
pub fn run_trial(d: &Dataset, dataset: &str, method: &Method, trial: usize, seed: u64, opts: &BenchOptions) -> Result<TrialRecord> {
    Ok(run_trial_audited(d, dataset, method, trial, seed, opts)?.0)
}

pub fn run_trial_audited(
    d: &Dataset,
    dataset: &str,
    method: &Method,
    trial: usize,
    seed: u64,
    opts: &BenchOptions,
) -> Result<(TrialRecord, TrialAudit)> {
    let spec = opts.tune_spec(method);
    spec.validate(d)?;
    let split = initial_split(d, opts.train_proportion, d.kind() == ResponseKind::Binary, seed)?;
    let train = Arc::new(d.subset(&split.train));
    let test = d.subset(&split.test);
    let mut record = TrialRecord {
        dataset: dataset.to_string(),
        method: method.label(),
        spec: *method,
        trial,
        seed,
        test_metrics: BTreeMap::new(),
        tune_seconds: 0.0,
        best_config: BTreeMap::new(),
        best_loss: f64::INFINITY,
        n_evals: 0,
        split_digest: digest(&split.test),
        failed: false,
        error: None,
    };

    let start = Instant::now();
    let tuned = tune_detailed(train.clone(), &spec, tuning_seed(seed));
    record.tune_seconds = start.elapsed().as_secs_f64();

    let mut tuning = Vec::new();
    let outcome = tuned.and_then(|(result, resampling)| {
        let to_dataset = |rows: Vec<usize>| rows.into_iter().map(|r| split.train[r]).collect::<Vec<_>>();
        tuning = resampling
            .pairs()
            .into_iter()
            .map(|(fit, assess)| (to_dataset(fit), to_dataset(assess)))
            .collect();
        record.best_config = result.best_named();
        record.best_loss = result.best_loss;
        record.n_evals = result.n_evals;
        let cfg = spec.best_config(&train, &result)?;
        let model = cfg.fit(&train)?;
        let p = model.predict(test.features())?;
        test_metrics(test.y(), &p)
    });
    match outcome {
        Ok(m) => record.test_metrics = m,
        Err(e) => {
            log::warn!("{dataset} {} trial {trial}: {e}", record.method);
            record.failed = true;
            record.error = Some(e.to_string());
        }
    }
    Ok((record, TrialAudit { split, tuning }))
}

/// Bundled datasets by name.
pub fn load_named(names: &[String]) -> Result<Vec<(String, Arc<Dataset>)>> {
    names
        .iter()
        .map(|n| Ok((n.clone(), Arc::new(data::bundled(n)?))))
        .collect()
}

/// Full factorial of datasets x methods x trials; trial `t` uses seed
/// `base_seed + t` for every method, so methods share splits.
pub fn run_benchmark(
    datasets: &[(String, Arc<Dataset>)],
    methods: &[Method],
    trials: usize,
    base_seed: u64,
    opts: &BenchOptions,
) -> Result<BenchReport> {
    if trials < 1 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    for (name, d) in datasets {
        for m in methods {
            opts.tune_spec(m)
                .validate(d)
                .map_err(|e| Error::InvalidArgument(format!("{m} on {name}: {e}")))?;
        }
    }
    let mut tasks = Vec::new();
    for (di, _) in datasets.iter().enumerate() {
        for (mi, _) in methods.iter().enumerate() {
            for t in 0..trials {
                tasks.push((di, mi, t));
            }
        }
    }
    let records = map_indexed(opts.execution, &tasks, |_, &(di, mi, t)| {
        let (name, d) = &datasets[di];
        run_trial(d, name, &methods[mi], t, base_seed.wrapping_add(t as u64), opts)
    });
    let records = records.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(BenchReport::new(records, trials, base_seed))
}

/// Every learner valid for `d` under both optimizers and both strategies
/// (10-fold CV and the half-split fast holdout).
pub fn comparison_methods(response: ResponseKind) -> Vec<Method> {
    let strategies = [
        EvaluationStrategy::CrossValidation { k: 10 },
        EvaluationStrategy::FastHoldout { fraction: 0.5 },
    ];
    let mut out = Vec::new();
    for learner in [LearnerKind::Svm, LearnerKind::Gbm, LearnerKind::ElasticNet, LearnerKind::Adaboost] {
        if !learner.supports(response) {
            continue;
        }
        for optimizer in [Optimizer::Hj, Optimizer::Ga] {
            for strategy in strategies {
                out.push(Method::new(learner, optimizer, strategy));
            }
        }
    }
    out
}

pub fn compare_models(name: &str, d: Arc<Dataset>, trials: usize, base_seed: u64, opts: &BenchOptions) -> Result<BenchReport> {
    let methods = comparison_methods(d.kind());
    run_benchmark(&[(name.to_string(), d)], &methods, trials, base_seed, opts)
}

/// The alpha-grid baseline as a method.
pub fn alpha_grid_method(rule: LambdaRule, k: usize) -> Method {
    Method::new(
        LearnerKind::ElasticNet,
        Optimizer::AlphaGrid(rule),
        EvaluationStrategy::CrossValidation { k },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synthetic, Response};

    fn quick() -> BenchOptions {
        BenchOptions {
            hj: HjOptions { budget: 20, ..HjOptions::default() },
            ga: GaOptions { population: 4, generations: 1, ..GaOptions::default() },
            ..BenchOptions::default()
        }
    }

    #[test]
    fn method_labels_round_trip() {
        for s in ["svm-hj-fast", "gbm-ga-cv10", "en-grid1se-cv5", "ada-hj-fast0.3", "en-gridmin-cv10"] {
            assert_eq!(s.parse::<Method>().unwrap().label(), s);
        }
        for s in ["svm-hj", "svm-hj-cv1", "svm-xx-fast", "foo-hj-fast", "svm-hj-fast1.5"] {
            assert!(s.parse::<Method>().is_err(), "{s}");
        }
    }

    #[test]
    fn separable_fixture_scores_perfectly() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![if i % 2 == 0 { -5.0 } else { 5.0 } + (i as f64) * 0.01]).collect();
        let y = (0..40).map(|i| (i % 2) as f64).collect();
        let d = Dataset::from_rows(&rows, Response::binary(y).unwrap()).unwrap();
        let m: Method = "svm-hj-fast".parse().unwrap();
        let r = run_trial(&d, "toy", &m, 0, 3, &quick()).unwrap();
        assert!(!r.failed);
        assert_eq!(r.test_metrics[&MetricKind::Accuracy], 1.0);
        assert_eq!(r.test_metrics[&MetricKind::Auc], 1.0);
    }

    #[test]
    fn trial_is_deterministic_and_isolated() {
        let d = synthetic::linear_regression(80, 3, 1.0, 2).unwrap();
        for label in ["en-hj-fast", "gbm-ga-cv3", "en-grid1se-cv4"] {
            let m: Method = label.parse().unwrap();
            let (a, audit) = run_trial_audited(&d, "lin", &m, 0, 5, &quick()).unwrap();
            let b = run_trial(&d, "lin", &m, 0, 5, &quick()).unwrap();
            assert_eq!(a, TrialRecord { tune_seconds: a.tune_seconds, ..b });
            assert_eq!(a.test_metrics.len(), 2);
            assert!(!audit.tuning.is_empty());
            for (fit, assess) in &audit.tuning {
                assert!(fit.iter().chain(assess).all(|r| audit.split.train.binary_search(r).is_ok()));
                assert!(fit.iter().chain(assess).all(|r| audit.split.test.binary_search(r).is_err()));
            }
        }
    }

    #[test]
    fn cardinalities_and_shared_splits() {
        let a = Arc::new(synthetic::linear_regression(40, 2, 1.0, 1).unwrap());
        let b = Arc::new(synthetic::linear_regression(50, 2, 1.0, 2).unwrap());
        let methods: Vec<Method> = ["en-hj-fast", "en-ga-fast"].iter().map(|s| s.parse().unwrap()).collect();
        let ds = vec![("a".to_string(), a.clone()), ("b".to_string(), b)];
        let r = run_benchmark(&ds, &methods, 3, 10, &quick()).unwrap();
        assert_eq!(r.records.len(), 12);
        assert_eq!(r.aggregates.len(), 4);
        for t in 0..3 {
            let digests: Vec<&str> = r
                .records
                .iter()
                .filter(|x| x.dataset == "a" && x.trial == t)
                .map(|x| x.split_digest.as_str())
                .collect();
            assert_eq!(digests.len(), 2);
            assert_eq!(digests[0], digests[1]);
        }
        let one = run_benchmark(&ds[..1], &methods[..1], 1, 10, &quick()).unwrap();
        assert_eq!(one.records.len(), 1);
        assert!(run_benchmark(&ds, &methods, 0, 1, &quick()).is_err());
    }

    #[test]
    fn comparison_grid_depends_on_response() {
        assert_eq!(comparison_methods(ResponseKind::Binary).len(), 16);
        let reg = comparison_methods(ResponseKind::Continuous);
        assert_eq!(reg.len(), 12);
        assert!(reg.iter().all(|m| m.learner != LearnerKind::Adaboost));
    }

    #[test]
    fn invalid_method_for_dataset() {
        let d = Arc::new(synthetic::linear_regression(40, 2, 1.0, 1).unwrap());
        let m: Method = "ada-hj-fast".parse().unwrap();
        assert!(run_benchmark(&[("x".into(), d)], &[m], 1, 0, &quick()).is_err());
    }

    #[test]
    fn unknown_dataset_name() {
        assert!(matches!(load_named(&["nope".into()]), Err(Error::UnknownDataset(_))));
    }
}
