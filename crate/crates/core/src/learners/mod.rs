//! Tunable model families behind one fit/predict contract.

mod adaboost;
mod enet;
mod gbm;
mod svm;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Matrix, ResponseKind};
use crate::error::{Error, Result};

pub use adaboost::{adaboost_fit, AdaConfig, AdaModel, AdaStop};
pub use enet::{
    enet_fit, enet_fit_traced, enet_objective, enet_path, lambda_max, soft_threshold, EnetConfig,
    EnetFamily, EnetModel,
};
pub use gbm::{gbm_fit, BoostConfig, GbmModel};
pub use svm::{rbf_kernel, svm_fit, svr_fit, SvmConfig, SvmModel, SvmTask};
pub use tree::RegressionTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnerKind {
    Svm,
    Gbm,
    Adaboost,
    #[serde(rename = "en")]
    ElasticNet,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 4] = [
        LearnerKind::Svm,
        LearnerKind::Gbm,
        LearnerKind::Adaboost,
        LearnerKind::ElasticNet,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LearnerKind::Svm => "svm",
            LearnerKind::Gbm => "gbm",
            LearnerKind::Adaboost => "ada",
            LearnerKind::ElasticNet => "en",
        }
    }

    pub fn supports(self, response: ResponseKind) -> bool {
        !(self == LearnerKind::Adaboost && response == ResponseKind::Continuous)
    }

    pub fn check_response(self, response: ResponseKind) -> Result<()> {
        if self.supports(response) {
            Ok(())
        } else {
            Err(Error::UnsupportedResponse {
                learner: self.as_str(),
                response: response.as_str(),
            })
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "svm" | "svr" => LearnerKind::Svm,
            "gbm" => LearnerKind::Gbm,
            "ada" | "adaboost" => LearnerKind::Adaboost,
            "en" | "enet" | "elastic-net" | "elasticnet" => LearnerKind::ElasticNet,
            other => return Err(Error::InvalidArgument(format!("unknown learner `{other}`"))),
        })
    }
}

/// Hyperparameters for one learner family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "learner", rename_all = "lowercase")]
pub enum LearnerConfig {
    Svm(SvmConfig),
    Gbm(BoostConfig),
    Adaboost(AdaConfig),
    #[serde(rename = "en")]
    ElasticNet(EnetConfig),
}

impl LearnerConfig {
    pub fn kind(&self) -> LearnerKind {
        match self {
            LearnerConfig::Svm(_) => LearnerKind::Svm,
            LearnerConfig::Gbm(_) => LearnerKind::Gbm,
            LearnerConfig::Adaboost(_) => LearnerKind::Adaboost,
            LearnerConfig::ElasticNet(_) => LearnerKind::ElasticNet,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LearnerConfig::Svm(c) => c.validate(),
            LearnerConfig::Gbm(c) => c.validate(),
            LearnerConfig::Adaboost(c) => c.validate(),
            LearnerConfig::ElasticNet(c) => c.validate(),
        }
    }

    pub fn fit(&self, train: &Dataset) -> Result<FittedModel> {
        self.kind().check_response(train.kind())?;
        let model = match self {
            LearnerConfig::Svm(c) => Model::Svm(match train.kind() {
                ResponseKind::Binary => svm_fit(train, c)?,
                ResponseKind::Continuous => svr_fit(train, c)?,
            }),
            LearnerConfig::Gbm(c) => Model::Gbm(gbm_fit(train, c)?),
            LearnerConfig::Adaboost(c) => Model::Adaboost(adaboost_fit(train, c)?),
            LearnerConfig::ElasticNet(c) => Model::ElasticNet(enet_fit(train, c)?),
        };
        Ok(FittedModel {
            response: train.kind(),
            p: train.p(),
            model,
        })
    }
}

#[derive(Debug, Clone)]
pub enum Model {
    Svm(SvmModel),
    Gbm(GbmModel),
    Adaboost(AdaModel),
    ElasticNet(EnetModel),
}

/// A trained model; immutable and shareable.
#[derive(Debug, Clone)]
pub struct FittedModel {
    response: ResponseKind,
    p: usize,
    model: Model,
}

/// Binary: hard label in {0,1} plus a score for class 1. Continuous: estimates.
#[derive(Debug, Clone, PartialEq)]
pub enum Predictions {
    Binary { labels: Vec<f64>, scores: Vec<f64> },
    Continuous(Vec<f64>),
}

impl Predictions {
    pub fn labels(&self) -> Option<&[f64]> {
        match self {
            Predictions::Binary { labels, .. } => Some(labels),
            Predictions::Continuous(_) => None,
        }
    }

    pub fn scores(&self) -> Option<&[f64]> {
        match self {
            Predictions::Binary { scores, .. } => Some(scores),
            Predictions::Continuous(_) => None,
        }
    }

    pub fn values(&self) -> Option<&[f64]> {
        match self {
            Predictions::Binary { .. } => None,
            Predictions::Continuous(v) => Some(v),
        }
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl FittedModel {
    pub fn from_parts(response: ResponseKind, p: usize, model: Model) -> Self {
        FittedModel { response, p, model }
    }

    pub fn kind(&self) -> LearnerKind {
        match self.model {
            Model::Svm(_) => LearnerKind::Svm,
            Model::Gbm(_) => LearnerKind::Gbm,
            Model::Adaboost(_) => LearnerKind::Adaboost,
            Model::ElasticNet(_) => LearnerKind::ElasticNet,
        }
    }

    pub fn response(&self) -> ResponseKind {
        self.response
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// Raw model output for one row: decision value, log-odds, additive
    /// score or regression estimate depending on the family.
    pub fn decision(&self, row: &[f64]) -> f64 {
        match &self.model {
            Model::Svm(m) => m.decision(row),
            Model::Gbm(m) => m.decision(row),
            Model::Adaboost(m) => m.decision(row),
            Model::ElasticNet(m) => m.linear_predictor(row),
        }
    }

    pub fn predict(&self, rows: &Matrix) -> Result<Predictions> {
        if rows.ncols() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                found: rows.ncols(),
            });
        }
        let raw: Vec<f64> = (0..rows.nrows()).map(|i| self.decision(rows.row(i))).collect();
        Ok(match self.response {
            ResponseKind::Continuous => Predictions::Continuous(raw),
            ResponseKind::Binary => {
                let (labels, scores) = raw
                    .iter()
                    .map(|&f| match &self.model {
                        Model::Adaboost(m) => (m.label_from(f), sigmoid(2.0 * f)),
                        _ => (if f > 0.0 { 1.0 } else { 0.0 }, sigmoid(f)),
                    })
                    .unzip();
                Predictions::Binary { labels, scores }
            }
        })
    }
}

/// Per-feature centring and scaling to unit population variance. Constant
/// features keep scale 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Matrix) -> Self {
        let (n, p) = (x.nrows() as f64, x.ncols());
        let mut means = vec![0.0; p];
        let mut scales = vec![0.0; p];
        for j in 0..p {
            let col = x.column(j);
            let m = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
            means[j] = m;
            scales[j] = if var > 1e-24 * (1.0 + m * m) { var.sqrt() } else { 1.0 };
        }
        Standardizer { means, scales }
    }

    pub fn apply(&self, row: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            row.iter()
                .zip(self.means.iter().zip(&self.scales))
                .map(|(v, (m, s))| (v - m) / s),
        );
    }

    pub fn transform(&self, x: &Matrix) -> Vec<Vec<f64>> {
        let mut buf = Vec::new();
        (0..x.nrows())
            .map(|i| {
                self.apply(x.row(i), &mut buf);
                buf.clone()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Response;

    #[test]
    fn kind_parsing_and_support() {
        assert_eq!("en".parse::<LearnerKind>().unwrap(), LearnerKind::ElasticNet);
        assert_eq!("Adaboost".parse::<LearnerKind>().unwrap(), LearnerKind::Adaboost);
        assert!("rf".parse::<LearnerKind>().is_err());
        assert!(!LearnerKind::Adaboost.supports(ResponseKind::Continuous));
        assert!(LearnerKind::Gbm.supports(ResponseKind::Continuous));
    }

    #[test]
    fn adaboost_rejects_regression() {
        let d = Dataset::from_rows(
            &[vec![0.0], vec![1.0], vec![2.0]],
            Response::continuous(vec![0.0, 1.0, 3.0]).unwrap(),
        )
        .unwrap();
        let cfg = LearnerConfig::Adaboost(AdaConfig { n_iters: 5, depth: 1, shrinkage: 1.0 });
        assert!(matches!(cfg.fit(&d), Err(Error::UnsupportedResponse { .. })));
    }

    #[test]
    fn predict_checks_width() {
        let d = Dataset::from_rows(
            &[vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
            Response::continuous(vec![0.0, 1.0, 2.0, 3.0]).unwrap(),
        )
        .unwrap();
        let m = LearnerConfig::ElasticNet(EnetConfig { alpha: 0.5, lambda: 0.1 }).fit(&d).unwrap();
        let wide = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert!(matches!(m.predict(&wide), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn standardizer_unit_variance() {
        let x = Matrix::from_rows(&[vec![1.0, 5.0], vec![3.0, 5.0], vec![5.0, 5.0]]).unwrap();
        let s = Standardizer::fit(&x);
        assert_eq!(s.means, vec![3.0, 5.0]);
        assert!((s.scales[0] - (8.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(s.scales[1], 1.0);
        let z = s.transform(&x);
        assert_eq!(z[1], vec![0.0, 0.0]);
    }
}
