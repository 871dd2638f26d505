use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::space::{default_space, CandidateConfig, SearchSpace};
use crate::data::{fast_holdout, vfold, Dataset, FoldAssignment, ResponseKind, TrainTestSplit};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::learners::{LearnerConfig, LearnerKind, Predictions};
use crate::metrics::{self, MetricKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvaluationStrategy {
    CrossValidation { k: usize },
    /// Fit on `fraction` of the rows, score on the rest.
    FastHoldout { fraction: f64 },
}

impl EvaluationStrategy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            EvaluationStrategy::CrossValidation { k } if k < 2 => Err(Error::InvalidArgument(format!(
                "cross-validation needs k >= 2, got {k}"
            ))),
            EvaluationStrategy::FastHoldout { fraction } if !(fraction > 0.0 && fraction < 1.0) => Err(
                Error::InvalidArgument(format!("fast fraction must lie in (0, 1), got {fraction}")),
            ),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for EvaluationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EvaluationStrategy::CrossValidation { k } => write!(f, "cv{k}"),
            EvaluationStrategy::FastHoldout { fraction } if fraction == 0.5 => f.write_str("fast"),
            EvaluationStrategy::FastHoldout { fraction } => write!(f, "fast{fraction}"),
        }
    }
}

/// The row sets a tuning run evaluates on, fixed once per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resampling {
    Folds(FoldAssignment),
    Holdout(TrainTestSplit),
}

impl Resampling {
    pub fn new(train: &Dataset, strategy: EvaluationStrategy, seed: u64) -> Result<Self> {
        strategy.validate()?;
        let stratify = train.kind() == ResponseKind::Binary;
        Ok(match strategy {
            EvaluationStrategy::CrossValidation { k } => Resampling::Folds(vfold(train, k, stratify, seed)?),
            EvaluationStrategy::FastHoldout { fraction } => {
                Resampling::Holdout(fast_holdout(train, fraction, stratify, seed)?)
            }
        })
    }

    /// `(fit rows, assessment rows)` for each fold.
    pub fn pairs(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        match self {
            Resampling::Folds(f) => (1..=f.k).map(|k| (f.fit_rows(k), f.held_out(k))).collect(),
            Resampling::Holdout(s) => vec![(s.train.clone(), s.test.clone())],
        }
    }
}

/// Minimized loss: misclassification rate for binary responses, RMSE otherwise.
pub fn loss_metric(response: ResponseKind) -> MetricKind {
    match response {
        ResponseKind::Binary => MetricKind::Accuracy,
        ResponseKind::Continuous => MetricKind::Rmse,
    }
}

/// Loss of `predictions` against `truth`, oriented for minimization.
pub fn prediction_loss(truth: &[f64], predictions: &Predictions) -> Result<f64> {
    match predictions {
        Predictions::Binary { labels, .. } => Ok(1.0 - metrics::accuracy(truth, labels)?),
        Predictions::Continuous(values) => metrics::rmse(truth, values),
    }
}

/// Something an optimizer can minimize over natural hyperparameter values.
pub trait Evaluate: Sync {
    fn loss(&self, natural: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64 + Sync> Evaluate for F {
    fn loss(&self, natural: &[f64]) -> f64 {
        self(natural)
    }
}

pub struct Objective {
    train: Arc<Dataset>,
    learner: LearnerKind,
    strategy: EvaluationStrategy,
    seed: u64,
    space: SearchSpace,
    resampling: Resampling,
    /// Materialized (fit, assess) subsets of `train`.
    folds: Vec<(Dataset, Dataset)>,
    execution: Execution,
}

impl Objective {
    pub fn new(train: Arc<Dataset>, learner: LearnerKind, strategy: EvaluationStrategy, seed: u64) -> Result<Self> {
        learner.check_response(train.kind())?;
        let space = default_space(learner, train.kind())?;
        let resampling = Resampling::new(&train, strategy, seed)?;
        let folds = resampling
            .pairs()
            .iter()
            .map(|(fit, assess)| (train.subset(fit), train.subset(assess)))
            .collect();
        Ok(Objective {
            train,
            learner,
            strategy,
            seed,
            space,
            resampling,
            folds,
            execution: Execution::default(),
        })
    }

    pub fn with_space(mut self, space: SearchSpace) -> Self {
        self.space = space;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn train(&self) -> &Arc<Dataset> {
        &self.train
    }

    pub fn learner(&self) -> LearnerKind {
        self.learner
    }

    pub fn strategy(&self) -> EvaluationStrategy {
        self.strategy
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn resampling(&self) -> &Resampling {
        &self.resampling
    }

    pub fn loss_metric(&self) -> MetricKind {
        loss_metric(self.train.kind())
    }

    /// Loss of a scaled candidate.
    pub fn evaluate(&self, c: &CandidateConfig) -> f64 {
        self.loss(&self.space.natural(c))
    }

    /// Mean held-out loss over the folds that fit successfully; `+inf` when
    /// none did.
    pub fn evaluate_config(&self, cfg: &LearnerConfig) -> f64 {
        let per_fold = map_indexed(self.execution, &self.folds, |_, (fit, assess)| {
            let loss = cfg
                .fit(fit)
                .and_then(|m| m.predict(assess.features()))
                .and_then(|p| prediction_loss(assess.y(), &p));
            match loss {
                Ok(l) if l.is_finite() => Some(l),
                Ok(l) => {
                    log::debug!("{cfg:?}: non-finite fold loss {l}");
                    None
                }
                Err(e) => {
                    log::debug!("{cfg:?}: fold fit failed: {e}");
                    None
                }
            }
        });
        let ok: Vec<f64> = per_fold.into_iter().flatten().collect();
        if ok.is_empty() {
            log::debug!("{cfg:?}: every fold failed, scoring +inf");
            return f64::INFINITY;
        }
        ok.iter().sum::<f64>() / ok.len() as f64
    }
}

impl Evaluate for Objective {
    fn loss(&self, natural: &[f64]) -> f64 {
        match self.space.learner_config(self.learner, natural) {
            Ok(cfg) => self.evaluate_config(&cfg),
            Err(e) => {
                log::debug!("invalid candidate {natural:?}: {e}");
                f64::INFINITY
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synthetic, Response};
    use crate::learners::{BoostConfig, EnetConfig};

    fn six_rows() -> Arc<Dataset> {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let y = vec![1.0, 4.0, 2.0, 8.0, 5.0, 7.0];
        Arc::new(Dataset::from_rows(&rows, Response::continuous(y).unwrap()).unwrap())
    }

    /// Elastic net at a huge penalty predicts the fitting-rows mean.
    fn mean_model() -> LearnerConfig {
        LearnerConfig::ElasticNet(EnetConfig { alpha: 1.0, lambda: 1e6 })
    }

    #[test]
    fn leave_one_out_of_a_mean_model() {
        let d = six_rows();
        let obj = Objective::new(d.clone(), LearnerKind::ElasticNet, EvaluationStrategy::CrossValidation { k: 6 }, 1)
            .unwrap();
        let y = d.y();
        let total: f64 = y.iter().sum();
        let expected = y
            .iter()
            .map(|&v| (v - (total - v) / 5.0).abs())
            .sum::<f64>()
            / 6.0;
        // each fold holds out one row, so its RMSE is the absolute error
        assert!((obj.evaluate_config(&mean_model()) - expected).abs() < 1e-12);
        // a single-leaf boosted model is the same mean predictor
        let stump = LearnerConfig::Gbm(BoostConfig { n_trees: 3, depth: 1, shrinkage: 0.5, min_node: 3 });
        assert!((obj.evaluate_config(&stump) - expected).abs() < 1e-12);
    }

    #[test]
    fn fast_holdout_on_four_rows() {
        let rows: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64]).collect();
        let d = Arc::new(Dataset::from_rows(&rows, Response::continuous(vec![2.0, 6.0, 3.0, 9.0]).unwrap()).unwrap());
        let obj = Objective::new(d.clone(), LearnerKind::ElasticNet, EvaluationStrategy::FastHoldout { fraction: 0.5 }, 9)
            .unwrap();
        let Resampling::Holdout(split) = obj.resampling() else { panic!() };
        assert_eq!(split.train.len(), 2);
        let m = (d.y()[split.train[0]] + d.y()[split.train[1]]) / 2.0;
        let expected = (split.test.iter().map(|&i| (d.y()[i] - m).powi(2)).sum::<f64>() / 2.0).sqrt();
        assert!((obj.evaluate_config(&mean_model()) - expected).abs() < 1e-12);
    }

    #[test]
    fn deterministic_and_matches_hand_rolled_folds() {
        let d = Arc::new(synthetic::two_blobs(60, 2, 1.0, 4).unwrap());
        let obj = Objective::new(d.clone(), LearnerKind::Svm, EvaluationStrategy::CrossValidation { k: 5 }, 3).unwrap();
        let c = obj.space().center();
        let a = obj.evaluate(&c);
        assert_eq!(a.to_bits(), obj.evaluate(&c).to_bits());
        let cfg = obj.space().learner_config(LearnerKind::Svm, &obj.space().natural(&c)).unwrap();
        let mut total = 0.0;
        for (fit, assess) in obj.resampling().pairs() {
            let m = cfg.fit(&d.subset(&fit)).unwrap();
            let p = m.predict(d.subset(&assess).features()).unwrap();
            let truth: Vec<f64> = assess.iter().map(|&i| d.y()[i]).collect();
            total += 1.0 - metrics::accuracy(&truth, p.labels().unwrap()).unwrap();
        }
        assert!((a - total / 5.0).abs() < 1e-12);
        let seq = Objective::new(d, LearnerKind::Svm, EvaluationStrategy::CrossValidation { k: 5 }, 3)
            .unwrap()
            .with_execution(Execution::Sequential);
        assert_eq!(a.to_bits(), seq.evaluate(&c).to_bits());
    }

    #[test]
    fn failing_folds_score_infinity() {
        let d = six_rows();
        let obj = Objective::new(d, LearnerKind::ElasticNet, EvaluationStrategy::CrossValidation { k: 3 }, 1).unwrap();
        let bad = LearnerConfig::ElasticNet(EnetConfig { alpha: 2.0, lambda: 1.0 });
        assert_eq!(obj.evaluate_config(&bad), f64::INFINITY);
    }

    #[test]
    fn rejects_bad_setups() {
        let d = six_rows();
        assert!(Objective::new(d.clone(), LearnerKind::Adaboost, EvaluationStrategy::FastHoldout { fraction: 0.5 }, 1).is_err());
        assert!(Objective::new(d.clone(), LearnerKind::Gbm, EvaluationStrategy::CrossValidation { k: 1 }, 1).is_err());
        assert!(Objective::new(d, LearnerKind::Gbm, EvaluationStrategy::FastHoldout { fraction: 1.0 }, 1).is_err());
    }

    #[test]
    fn binary_resampling_is_stratified() {
        let d = Arc::new(synthetic::two_blobs(40, 2, 1.0, 2).unwrap());
        let obj = Objective::new(d.clone(), LearnerKind::Gbm, EvaluationStrategy::CrossValidation { k: 4 }, 5).unwrap();
        for (_, assess) in obj.resampling().pairs() {
            let pos = assess.iter().filter(|&&i| d.y()[i] == 1.0).count();
            assert_eq!(pos, 5);
        }
    }

    #[test]
    fn strategy_labels() {
        assert_eq!(EvaluationStrategy::CrossValidation { k: 10 }.to_string(), "cv10");
        assert_eq!(EvaluationStrategy::FastHoldout { fraction: 0.5 }.to_string(), "fast");
        assert_eq!(EvaluationStrategy::FastHoldout { fraction: 0.3 }.to_string(), "fast0.3");
    }
}
