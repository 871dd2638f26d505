use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::TrialRecord;
use crate::error::{Error, Result};
use crate::metrics::MetricKind;

/// Means over the successful trials of one (dataset, method) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub dataset: String,
    pub method: String,
    /// Accuracy for binary responses, RMSE otherwise.
    pub metric: MetricKind,
    pub mean_value: f64,
    /// `1 - accuracy` or RMSE.
    pub mean_error: f64,
    pub mean_seconds: f64,
    pub n_trials: usize,
    pub n_failed: usize,
    pub means: BTreeMap<MetricKind, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub trials: usize,
    pub base_seed: u64,
    /// Sorted by (dataset, method, trial).
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<Aggregate>,
    pub n_failed: usize,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values {
        sum += v;
        n += 1;
    }
    sum / n as f64
}

impl BenchReport {
    pub fn new(mut records: Vec<TrialRecord>, trials: usize, base_seed: u64) -> Self {
        records.sort_by(|a, b| (&a.dataset, &a.method, a.trial).cmp(&(&b.dataset, &b.method, b.trial)));
        let aggregates = Self::aggregate(&records);
        let n_failed = records.iter().filter(|r| r.failed).count();
        BenchReport {
            trials,
            base_seed,
            records,
            aggregates,
            n_failed,
        }
    }

    /// One entry per (dataset, method) cell in record order. Failed trials
    /// are counted but excluded from the means; cells where every trial
    /// failed are dropped.
    pub fn aggregate(records: &[TrialRecord]) -> Vec<Aggregate> {
        let mut cells: Vec<((&str, &str), Vec<&TrialRecord>)> = Vec::new();
        for r in records {
            let key = (r.dataset.as_str(), r.method.as_str());
            match cells.iter_mut().find(|(k, _)| *k == key) {
                Some((_, v)) => v.push(r),
                None => cells.push((key, vec![r])),
            }
        }
        let mut out = Vec::new();
        for ((dataset, method), rs) in cells {
            let ok: Vec<&TrialRecord> = rs.iter().copied().filter(|r| !r.failed).collect();
            let n_failed = rs.len() - ok.len();
            if ok.is_empty() {
                log::warn!("{dataset} {method}: all {n_failed} trials failed; cell dropped");
                continue;
            }
            if n_failed > 0 {
                log::warn!("{dataset} {method}: {n_failed} failed trials excluded from the means");
            }
            let mut means = BTreeMap::new();
            for kind in ok[0].test_metrics.keys() {
                means.insert(*kind, mean(ok.iter().map(|r| r.test_metrics[kind])));
            }
            let metric = if means.contains_key(&MetricKind::Accuracy) {
                MetricKind::Accuracy
            } else {
                MetricKind::Rmse
            };
            let mean_value = means[&metric];
            out.push(Aggregate {
                dataset: dataset.to_string(),
                method: method.to_string(),
                metric,
                mean_value,
                mean_error: if metric == MetricKind::Accuracy { 1.0 - mean_value } else { mean_value },
                mean_seconds: mean(ok.iter().map(|r| r.tune_seconds)),
                n_trials: ok.len(),
                n_failed,
                means,
            });
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Aggregate table: dataset, method, metric, mean_value, mean_seconds, n_trials.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["dataset", "method", "metric", "mean_value", "mean_seconds", "n_trials"])?;
        for a in &self.aggregates {
            w.write_record([
                a.dataset.clone(),
                a.method.clone(),
                a.metric.to_string(),
                a.mean_value.to_string(),
                a.mean_seconds.to_string(),
                a.n_trials.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Writes `report.json` and `report.csv` into `dir`, creating it.
    pub fn write_files(&self, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let json = dir.join("report.json");
        let csv = dir.join("report.csv");
        fs::write(&json, self.to_json()?).map_err(|e| Error::io(&json, e))?;
        fs::write(&csv, self.to_csv()?).map_err(|e| Error::io(&csv, e))?;
        Ok((json, csv))
    }
}
