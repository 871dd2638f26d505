use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::objective::{prediction_loss, EvaluationStrategy, Resampling};
use super::{TraceEntry, TuneResult};
use crate::data::{Dataset, FoldAssignment};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::learners::{enet_fit, enet_path, lambda_max, EnetConfig, EnetModel, FittedModel, Model};

pub const ALPHA_GRID: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
pub const PATH_LENGTH: usize = 100;
/// The path spans this many decades below lambda_max.
pub const PATH_DECADES: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaRule {
    MinLambda,
    OneSe,
}

impl fmt::Display for LambdaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LambdaRule::MinLambda => "min",
            LambdaRule::OneSe => "1se",
        })
    }
}

/// Decreasing geometric sequence from `top` down `PATH_DECADES` decades.
pub fn lambda_sequence(top: f64) -> Vec<f64> {
    (0..PATH_LENGTH)
        .map(|i| top * 10f64.powf(-PATH_DECADES * i as f64 / (PATH_LENGTH - 1) as f64))
        .collect()
}

/// Cross-validated loss along one alpha's path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathCv {
    pub alpha: f64,
    pub lambdas: Vec<f64>,
    pub mean: Vec<f64>,
    /// Standard error of the fold losses, `sd / sqrt(k)`.
    pub se: Vec<f64>,
}

impl PathCv {
    /// Index along the path chosen by `rule`.
    pub fn select(&self, rule: LambdaRule) -> usize {
        let mut best = 0;
        for (i, &m) in self.mean.iter().enumerate() {
            if m < self.mean[best] {
                best = i;
            }
        }
        match rule {
            LambdaRule::MinLambda => best,
            LambdaRule::OneSe => {
                let cutoff = self.mean[best] + self.se[best];
                // path is ordered by decreasing lambda
                self.mean.iter().position(|&m| m <= cutoff).unwrap_or(best)
            }
        }
    }
}

fn path_losses(fit: &Dataset, assess: &Dataset, alpha: f64, lambdas: &[f64]) -> Vec<f64> {
    match enet_path(fit, alpha, lambdas) {
        Ok(models) => models
            .into_iter()
            .map(|m: EnetModel| {
                let fitted = FittedModel::from_parts(fit.kind(), fit.p(), Model::ElasticNet(m));
                fitted
                    .predict(assess.features())
                    .and_then(|p| prediction_loss(assess.y(), &p))
                    .ok()
                    .filter(|l| l.is_finite())
                    .unwrap_or(f64::INFINITY)
            })
            .collect(),
        Err(e) => {
            log::debug!("alpha {alpha}: path failed: {e}");
            vec![f64::INFINITY; lambdas.len()]
        }
    }
}

/// CV curves for every alpha in [`ALPHA_GRID`] over the shared `folds`.
pub fn alpha_grid_cv(train: &Dataset, folds: &FoldAssignment, execution: Execution) -> Vec<PathCv> {
    let k = folds.k;
    let subsets: Vec<(Dataset, Dataset)> = (1..=k)
        .map(|f| (train.subset(&folds.fit_rows(f)), train.subset(&folds.held_out(f))))
        .collect();
    map_indexed(execution, &ALPHA_GRID, |_, &alpha| {
        let lambdas = lambda_sequence(lambda_max(train, alpha));
        let per_fold: Vec<Vec<f64>> = subsets
            .iter()
            .map(|(fit, assess)| path_losses(fit, assess, alpha, &lambdas))
            .collect();
        let kf = k as f64;
        let mut mean = Vec::with_capacity(lambdas.len());
        let mut se = Vec::with_capacity(lambdas.len());
        for j in 0..lambdas.len() {
            let col: Vec<f64> = per_fold.iter().map(|f| f[j]).collect();
            let m = col.iter().sum::<f64>() / kf;
            let var = col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (kf - 1.0);
            mean.push(m);
            se.push(if m.is_finite() { (var / kf).sqrt() } else { f64::INFINITY });
        }
        PathCv { alpha, lambdas, mean, se }
    })
}

/// Enumerated alpha grid with a cross-validated lambda path per alpha.
/// The trace holds the (alpha, lambda) chosen for each alpha.
///
/// With [`LambdaRule::MinLambda`] the result is the trace entry with the
/// lowest CV loss. With [`LambdaRule::OneSe`] the one-standard-error idea is
/// applied across alphas too: among entries within one SE of the best, the
/// one whose full-data fit has the fewest non-zero coefficients wins. Ridge
/// never zeroes a coefficient, so without this the pure-ridge entry (whose
/// path top is only nearly null) edges out the exact null model on noise.
/// Remaining ties go to the larger alpha.
pub fn grid_alpha_lambda(
    train: &Dataset,
    strategy: EvaluationStrategy,
    rule: LambdaRule,
    seed: u64,
    execution: Execution,
) -> Result<TuneResult> {
    if !matches!(strategy, EvaluationStrategy::CrossValidation { .. }) {
        return Err(Error::InvalidArgument(
            "the alpha grid requires cross-validation".into(),
        ));
    }
    let Resampling::Folds(folds) = Resampling::new(train, strategy, seed)? else {
        unreachable!("cross-validation resampling yields folds")
    };
    Ok(grid_on_folds(train, &folds, rule, execution))
}

/// [`grid_alpha_lambda`] over given folds.
pub fn grid_on_folds(train: &Dataset, folds: &FoldAssignment, rule: LambdaRule, execution: Execution) -> TuneResult {
    let start = Instant::now();
    let curves = alpha_grid_cv(train, folds, execution);
    let chosen: Vec<usize> = curves.iter().map(|c| c.select(rule)).collect();
    let trace: Vec<TraceEntry> = curves
        .iter()
        .zip(&chosen)
        .map(|(c, &i)| TraceEntry {
            values: vec![c.alpha, c.lambdas[i]],
            loss: c.mean[i],
        })
        .collect();
    let mut result = TuneResult::from_trace(vec!["alpha".into(), "lambda".into()], trace, 0.0);
    if !result.best_loss.is_finite() {
        result.elapsed_seconds = start.elapsed().as_secs_f64();
        return result;
    }
    let pick = match rule {
        LambdaRule::MinLambda => result
            .trace
            .iter()
            .rposition(|e| e.loss == result.best_loss)
            .expect("best loss comes from the trace"),
        LambdaRule::OneSe => {
            let best = result.trace.iter().rposition(|e| e.loss == result.best_loss).expect("non-empty");
            let cutoff = result.best_loss + curves[best].se[chosen[best]];
            let mut pick = best;
            let mut pick_nz = usize::MAX;
            for (i, e) in result.trace.iter().enumerate() {
                if e.loss > cutoff {
                    continue;
                }
                let nz = enet_fit(train, &EnetConfig { alpha: e.values[0], lambda: e.values[1] })
                    .map_or(usize::MAX, |m| m.nonzero());
                // later (larger alpha) wins ties
                if nz <= pick_nz {
                    pick = i;
                    pick_nz = nz;
                }
            }
            pick
        }
    };
    result.best = result.trace[pick].values.clone();
    result.best_loss = result.trace[pick].loss;
    result.elapsed_seconds = start.elapsed().as_secs_f64();
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic;

    #[test]
    fn sequence_spans_four_decades() {
        let s = lambda_sequence(2.0);
        assert_eq!(s.len(), 100);
        assert_eq!(s[0], 2.0);
        assert!((s[99] - 2e-4).abs() < 1e-15);
        assert!(s.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn one_se_picks_largest_lambda_within_band() {
        let c = PathCv {
            alpha: 1.0,
            lambdas: vec![4.0, 3.0, 2.0, 1.0],
            mean: vec![2.0, 1.4, 1.2, 1.0],
            se: vec![0.1, 0.1, 0.1, 0.25],
        };
        assert_eq!(c.select(LambdaRule::MinLambda), 3);
        assert_eq!(c.select(LambdaRule::OneSe), 2);
    }

    #[test]
    fn eleven_alphas_and_signal_recovery() {
        let d = synthetic::linear_regression(120, 4, 1.0, 5).unwrap();
        for rule in [LambdaRule::MinLambda, LambdaRule::OneSe] {
            let r = grid_alpha_lambda(&d, EvaluationStrategy::CrossValidation { k: 5 }, rule, 2, Execution::Parallel).unwrap();
            assert_eq!(r.trace.len(), 11);
            let alphas: Vec<f64> = r.trace.iter().map(|e| e.values[0]).collect();
            assert_eq!(alphas, ALPHA_GRID);
            let m = enet_fit(&d, &EnetConfig { alpha: r.best[0], lambda: r.best[1] }).unwrap();
            assert!(m.coefficients[0] > 0.5, "{:?}", m.coefficients);
        }
    }

    #[test]
    fn requires_cross_validation() {
        let d = synthetic::linear_regression(30, 2, 1.0, 1).unwrap();
        let s = EvaluationStrategy::FastHoldout { fraction: 0.5 };
        assert!(grid_alpha_lambda(&d, s, LambdaRule::OneSe, 1, Execution::Sequential).is_err());
    }
}
