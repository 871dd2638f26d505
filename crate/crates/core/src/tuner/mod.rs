//! Hyperparameter search.

pub mod genetic;
pub mod grid;
pub mod hooke_jeeves;
pub mod objective;
pub mod space;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use genetic::{genetic_search, GaOptions};
pub use grid::{alpha_grid_cv, grid_alpha_lambda, grid_on_folds, lambda_sequence, LambdaRule, PathCv, ALPHA_GRID};
pub use hooke_jeeves::{hooke_jeeves, HjOptions};
pub use objective::{loss_metric, prediction_loss, EvaluationStrategy, Evaluate, Objective, Resampling};
pub use space::{default_space, CandidateConfig, Dim, Scale, SearchSpace};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::learners::{EnetConfig, LearnerConfig, LearnerKind};

/// One evaluated configuration, natural units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub values: Vec<f64>,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub names: Vec<String>,
    /// Best configuration, natural units, ordered as `names`.
    pub best: Vec<f64>,
    pub best_loss: f64,
    pub n_evals: usize,
    pub elapsed_seconds: f64,
    pub trace: Vec<TraceEntry>,
}

impl TuneResult {
    /// Best-ever entry of `trace` (earliest on ties).
    pub fn from_trace(names: Vec<String>, trace: Vec<TraceEntry>, elapsed_seconds: f64) -> Self {
        let mut best = 0;
        for (i, e) in trace.iter().enumerate() {
            if e.loss < trace[best].loss {
                best = i;
            }
        }
        let (values, loss) = trace
            .get(best)
            .map_or((Vec::new(), f64::INFINITY), |e| (e.values.clone(), e.loss));
        TuneResult {
            names,
            best: values,
            best_loss: loss,
            n_evals: trace.len(),
            elapsed_seconds,
            trace,
        }
    }

    pub fn best_named(&self) -> BTreeMap<String, f64> {
        self.names.iter().cloned().zip(self.best.iter().copied()).collect()
    }

    /// Running minimum of the trace losses.
    pub fn running_min(&self) -> Vec<f64> {
        self.trace
            .iter()
            .scan(f64::INFINITY, |m, e| {
                *m = m.min(e.loss);
                Some(*m)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    Hj,
    Ga,
    AlphaGrid(LambdaRule),
}

impl fmt::Display for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Optimizer::Hj => f.write_str("hj"),
            Optimizer::Ga => f.write_str("ga"),
            Optimizer::AlphaGrid(rule) => write!(f, "grid{rule}"),
        }
    }
}

impl FromStr for Optimizer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hj" | "hooke-jeeves" => Ok(Optimizer::Hj),
            "ga" | "genetic" => Ok(Optimizer::Ga),
            "grid" | "grid1se" => Ok(Optimizer::AlphaGrid(LambdaRule::OneSe)),
            "gridmin" => Ok(Optimizer::AlphaGrid(LambdaRule::MinLambda)),
            other => Err(Error::InvalidArgument(format!(
                "unknown optimizer '{other}' (expected hj, ga, grid or gridmin)"
            ))),
        }
    }
}

/// Everything needed to tune one learner apart from the data and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneSpec {
    pub learner: LearnerKind,
    pub optimizer: Optimizer,
    pub strategy: EvaluationStrategy,
    #[serde(default)]
    pub hj: HjOptions,
    /// `seed` is overwritten by the tuning seed.
    #[serde(default)]
    pub ga: GaOptions,
    /// Replaces the default search space when set.
    #[serde(default)]
    pub space: Option<SearchSpace>,
    #[serde(default)]
    pub execution: Execution,
}

impl TuneSpec {
    pub fn new(learner: LearnerKind, optimizer: Optimizer, strategy: EvaluationStrategy) -> Self {
        TuneSpec {
            learner,
            optimizer,
            strategy,
            hj: HjOptions::default(),
            ga: GaOptions::default(),
            space: None,
            execution: Execution::default(),
        }
    }

    pub fn validate(&self, train: &Dataset) -> Result<()> {
        self.learner.check_response(train.kind())?;
        self.strategy.validate()?;
        if let Optimizer::AlphaGrid(_) = self.optimizer {
            if self.learner != LearnerKind::ElasticNet {
                return Err(Error::InvalidArgument(
                    "the alpha grid only tunes the elastic net".into(),
                ));
            }
            if !matches!(self.strategy, EvaluationStrategy::CrossValidation { .. }) {
                return Err(Error::InvalidArgument(
                    "the alpha grid requires cross-validation".into(),
                ));
            }
        }
        if self.optimizer == Optimizer::Ga {
            self.ga.validate()?;
        }
        Ok(())
    }

    pub fn search_space(&self, train: &Dataset) -> Result<SearchSpace> {
        match &self.space {
            Some(s) => Ok(s.clone()),
            None => default_space(self.learner, train.kind()),
        }
    }

    /// Learner configuration for the best point of `result`.
    pub fn best_config(&self, train: &Dataset, result: &TuneResult) -> Result<LearnerConfig> {
        match self.optimizer {
            Optimizer::AlphaGrid(_) => Ok(LearnerConfig::ElasticNet(EnetConfig {
                alpha: result.best[0],
                lambda: result.best[1],
            })),
            _ => self.search_space(train)?.learner_config(self.learner, &result.best),
        }
    }
}

/// Tunes on `train`. Fails when every evaluated configuration scored `+inf`.
pub fn tune(train: Arc<Dataset>, spec: &TuneSpec, seed: u64) -> Result<TuneResult> {
    Ok(tune_detailed(train, spec, seed)?.0)
}

/// [`tune`] plus the resampling every candidate was scored on, in `train`
/// row coordinates.
pub fn tune_detailed(train: Arc<Dataset>, spec: &TuneSpec, seed: u64) -> Result<(TuneResult, Resampling)> {
    spec.validate(&train)?;
    let (result, resampling) = match spec.optimizer {
        Optimizer::AlphaGrid(rule) => {
            let resampling = Resampling::new(&train, spec.strategy, seed)?;
            let Resampling::Folds(folds) = &resampling else {
                unreachable!("validated as cross-validation")
            };
            (grid_on_folds(&train, folds, rule, spec.execution), resampling)
        }
        Optimizer::Hj | Optimizer::Ga => {
            let space = spec.search_space(&train)?;
            let objective = Objective::new(train, spec.learner, spec.strategy, seed)?
                .with_space(space.clone())
                .with_execution(spec.execution);
            let result = if spec.optimizer == Optimizer::Hj {
                hooke_jeeves(&objective, &space, &space.center(), &spec.hj)?
            } else {
                let ga = GaOptions {
                    seed: seed.wrapping_add(0x9e37_79b9_7f4a_7c15),
                    execution: spec.execution,
                    ..spec.ga
                };
                genetic_search(&objective, &space, &ga)?
            };
            (result, objective.resampling().clone())
        }
    };
    if !result.best_loss.is_finite() {
        return Err(Error::TuningFailed);
    }
    Ok((result, resampling))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic;

    #[test]
    fn tune_svm_on_blobs() {
        let d = Arc::new(synthetic::two_blobs(80, 2, 3.0, 1).unwrap());
        let spec = TuneSpec::new(LearnerKind::Svm, Optimizer::Hj, EvaluationStrategy::FastHoldout { fraction: 0.5 });
        let r = tune(d.clone(), &spec, 4).unwrap();
        assert!(r.best_loss < 0.15);
        assert_eq!(r.best_named().len(), 2);
        let cfg = spec.best_config(&d, &r).unwrap();
        assert_eq!(cfg.kind(), LearnerKind::Svm);
        assert_eq!(r, TuneResult { elapsed_seconds: r.elapsed_seconds, ..tune(d, &spec, 4).unwrap() });
    }

    #[test]
    fn ga_spec_overrides_seed() {
        let d = Arc::new(synthetic::linear_regression(60, 2, 1.0, 1).unwrap());
        let mut spec = TuneSpec::new(LearnerKind::ElasticNet, Optimizer::Ga, EvaluationStrategy::CrossValidation { k: 3 });
        spec.ga.population = 6;
        spec.ga.generations = 2;
        let a = tune(d.clone(), &spec, 1).unwrap();
        let b = tune(d.clone(), &spec, 2).unwrap();
        assert_eq!(a.n_evals, 6 + 2 * 5);
        assert_ne!(a.trace, b.trace);
    }

    #[test]
    fn spec_validation() {
        let d = Arc::new(synthetic::linear_regression(40, 2, 1.0, 1).unwrap());
        let cv = EvaluationStrategy::CrossValidation { k: 5 };
        assert!(tune(d.clone(), &TuneSpec::new(LearnerKind::Adaboost, Optimizer::Hj, cv), 1).is_err());
        let grid = Optimizer::AlphaGrid(LambdaRule::OneSe);
        assert!(tune(d.clone(), &TuneSpec::new(LearnerKind::Svm, grid, cv), 1).is_err());
        let fast = EvaluationStrategy::FastHoldout { fraction: 0.5 };
        assert!(tune(d, &TuneSpec::new(LearnerKind::ElasticNet, grid, fast), 1).is_err());
    }

    #[test]
    fn optimizer_names() {
        for s in ["hj", "ga", "grid", "gridmin"] {
            let o: Optimizer = s.parse().unwrap();
            assert_eq!(o.to_string().replace("grid1se", "grid"), s);
        }
        assert!("bayes".parse::<Optimizer>().is_err());
    }
}
