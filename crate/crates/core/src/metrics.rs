//! Loss and performance metrics for binary classification and regression.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LOG_LOSS_CLIP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Accuracy,
    Auc,
    Rmse,
    Mae,
    Mse,
    LogLoss,
}

impl MetricKind {
    pub fn higher_is_better(self) -> bool {
        matches!(self, MetricKind::Accuracy | MetricKind::Auc)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Accuracy => "accuracy",
            MetricKind::Auc => "auc",
            MetricKind::Rmse => "rmse",
            MetricKind::Mae => "mae",
            MetricKind::Mse => "mse",
            MetricKind::LogLoss => "logloss",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "accuracy" => MetricKind::Accuracy,
            "auc" => MetricKind::Auc,
            "rmse" => MetricKind::Rmse,
            "mae" => MetricKind::Mae,
            "mse" => MetricKind::Mse,
            "logloss" | "log_loss" => MetricKind::LogLoss,
            other => return Err(Error::InvalidArgument(format!("unknown metric `{other}`"))),
        })
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    if a == 0 {
        return Err(Error::InvalidArgument("metric on empty input".into()));
    }
    Ok(())
}

pub fn accuracy(truth: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(truth.len(), predicted.len())?;
    let hits = truth.iter().zip(predicted).filter(|(t, p)| t == p).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Area under the ROC curve via the Mann-Whitney rank sum; tied scores get
/// mid-ranks, which counts tied positive/negative pairs as one half.
pub fn auc(truth: &[f64], scores: &[f64]) -> Result<f64> {
    check_lengths(truth.len(), scores.len())?;
    let n_pos = truth.iter().filter(|&&t| t == 1.0).count();
    let n_neg = truth.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their mean
        let mid = (i + j + 2) as f64 / 2.0;
        let pos_in_run = order[i..=j].iter().filter(|&&k| truth[k] == 1.0).count();
        rank_sum_pos += mid * pos_in_run as f64;
        i = j + 1;
    }
    let (np, nn) = (n_pos as f64, n_neg as f64);
    let u = rank_sum_pos - np * (np + 1.0) / 2.0;
    Ok(u / (np * nn))
}

pub fn mse(truth: &[f64], estimate: &[f64]) -> Result<f64> {
    check_lengths(truth.len(), estimate.len())?;
    let s: f64 = truth.iter().zip(estimate).map(|(t, e)| (t - e).powi(2)).sum();
    Ok(s / truth.len() as f64)
}

pub fn rmse(truth: &[f64], estimate: &[f64]) -> Result<f64> {
    mse(truth, estimate).map(f64::sqrt)
}

pub fn mae(truth: &[f64], estimate: &[f64]) -> Result<f64> {
    check_lengths(truth.len(), estimate.len())?;
    let s: f64 = truth.iter().zip(estimate).map(|(t, e)| (t - e).abs()).sum();
    Ok(s / truth.len() as f64)
}

/// Binomial log-loss with probabilities clipped to `[1e-12, 1 - 1e-12]`.
pub fn log_loss(truth: &[f64], probs: &[f64]) -> Result<f64> {
    check_lengths(truth.len(), probs.len())?;
    let s: f64 = truth
        .iter()
        .zip(probs)
        .map(|(&y, &p)| {
            let p = p.clamp(LOG_LOSS_CLIP, 1.0 - LOG_LOSS_CLIP);
            y * p.ln() + (1.0 - y) * (1.0 - p).ln()
        })
        .sum();
    Ok(-s / truth.len() as f64)
}
