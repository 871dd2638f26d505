//! Discrete AdaBoost over weighted classification trees.

use serde::{Deserialize, Serialize};

use super::tree::{grow, Columns, RegressionTree, TreeParams};
use crate::data::{Dataset, ResponseKind};
use crate::error::{Error, Result};

/// Weighted error substituted for an exact zero when weighting a perfect
/// weak learner.
const ZERO_ERROR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaConfig {
    pub n_iters: usize,
    pub depth: usize,
    pub shrinkage: f64,
}

impl AdaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_iters < 1 || self.depth < 1 {
            return Err(Error::InvalidArgument("n_iters and depth must be >= 1".into()));
        }
        if !(self.shrinkage > 0.0 && self.shrinkage <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "shrinkage must lie in (0, 1], got {}",
                self.shrinkage
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdaStop {
    Completed,
    /// A weak learner classified the weighted sample perfectly.
    PerfectLearner,
    /// A weak learner did no better than chance; it was discarded.
    NoBetterThanChance,
}

#[derive(Debug, Clone)]
pub struct AdaModel {
    /// (learner weight, tree voting +1 / -1)
    pub learners: Vec<(f64, RegressionTree)>,
    /// Weighted-majority class used when the vote is exactly tied.
    pub fallback: f64,
    pub stop: AdaStop,
    /// Weighted training error of each accepted weak learner.
    pub learner_errors: Vec<f64>,
    /// Training misclassification rate after each accepted round.
    pub train_error: Vec<f64>,
    /// Mean exponential loss `mean exp(-y F)` after each accepted round.
    pub exp_loss: Vec<f64>,
}

impl AdaModel {
    /// Weighted vote `F(x) = sum_t a_t h_t(x)`.
    pub fn decision(&self, row: &[f64]) -> f64 {
        self.learners.iter().map(|(a, t)| a * t.predict(row)).sum()
    }

    pub fn label_from(&self, f: f64) -> f64 {
        if f > 0.0 {
            1.0
        } else if f < 0.0 {
            0.0
        } else {
            self.fallback
        }
    }
}

/// Each round fits a depth-bounded tree to the weighted sample, weights it
/// by `(shrinkage / 2) ln((1 - err) / err)`, and reweights rows by
/// `exp(-a y h(x))`, renormalizing to sum one.
pub fn adaboost_fit(train: &Dataset, cfg: &AdaConfig) -> Result<AdaModel> {
    cfg.validate()?;
    if train.kind() != ResponseKind::Binary {
        return Err(Error::UnsupportedResponse {
            learner: "ada",
            response: train.kind().as_str(),
        });
    }
    if !train.response().has_both_classes() {
        return Err(Error::SingleClass);
    }
    let n = train.n();
    let y: Vec<f64> = train.y().iter().map(|&v| if v == 1.0 { 1.0 } else { -1.0 }).collect();
    let cols = Columns::new(train.features());
    let params = TreeParams {
        max_depth: cfg.depth,
        min_node: 1,
    };
    let mut w = vec![1.0 / n as f64; n];
    let mut f = vec![0.0; n];
    let fallback = if y.iter().sum::<f64>() > 0.0 { 1.0 } else { 0.0 };

    let mut model = AdaModel {
        learners: Vec::new(),
        fallback,
        stop: AdaStop::Completed,
        learner_errors: Vec::new(),
        train_error: Vec::new(),
        exp_loss: Vec::new(),
    };

    for _ in 0..cfg.n_iters {
        let (tree, h) = grow(&cols, &y, &w, params, |rows| {
            let s: f64 = rows.iter().map(|&r| w[r as usize] * y[r as usize]).sum();
            if s >= 0.0 {
                1.0
            } else {
                -1.0
            }
        });
        let w_sum: f64 = w.iter().sum();
        let err = (0..n).filter(|&i| h[i] != y[i]).map(|i| w[i]).sum::<f64>() / w_sum;
        if err >= 0.5 {
            model.stop = AdaStop::NoBetterThanChance;
            break;
        }
        let perfect = err <= 0.0;
        let e = err.max(ZERO_ERROR);
        let a = 0.5 * cfg.shrinkage * ((1.0 - e) / e).ln();

        for i in 0..n {
            f[i] += a * h[i];
            w[i] *= (-a * y[i] * h[i]).exp();
        }
        let total: f64 = w.iter().sum();
        for wi in &mut w {
            *wi /= total;
        }

        model.learners.push((a, tree));
        model.learner_errors.push(err);
        let wrong = (0..n).filter(|&i| model.label_from(f[i]) * 2.0 - 1.0 != y[i]).count();
        model.train_error.push(wrong as f64 / n as f64);
        model
            .exp_loss
            .push(f.iter().zip(&y).map(|(fi, yi)| (-yi * fi).exp()).sum::<f64>() / n as f64);

        if perfect {
            model.stop = AdaStop::PerfectLearner;
            break;
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synthetic, Response};
    use proptest::prelude::*;

    // duplicated corner so the root split has positive gain
    fn xor() -> Dataset {
        Dataset::from_rows(
            &[vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 0.0]],
            Response::binary(vec![0.0, 0.0, 1.0, 1.0, 0.0]).unwrap(),
        )
        .unwrap()
    }

    fn train_accuracy(m: &AdaModel, d: &Dataset) -> f64 {
        let hits = (0..d.n())
            .filter(|&i| m.label_from(m.decision(d.features().row(i))) == d.y()[i])
            .count();
        hits as f64 / d.n() as f64
    }

    #[test]
    fn separable_stops_after_first_round() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let y = (0..20).map(|i| if i < 8 { 0.0 } else { 1.0 }).collect();
        let d = Dataset::from_rows(&rows, Response::binary(y).unwrap()).unwrap();
        let m = adaboost_fit(&d, &AdaConfig { n_iters: 50, depth: 1, shrinkage: 1.0 }).unwrap();
        assert_eq!(m.learners.len(), 1);
        assert_eq!(m.stop, AdaStop::PerfectLearner);
        assert_eq!(train_accuracy(&m, &d), 1.0);
    }

    #[test]
    fn xor_with_depth_two() {
        let d = xor();
        let m = adaboost_fit(&d, &AdaConfig { n_iters: 10, depth: 2, shrinkage: 1.0 }).unwrap();
        assert_eq!(train_accuracy(&m, &d), 1.0);
    }

    #[test]
    fn rejects_single_class() {
        let d = xor().subset(&[0, 1]);
        let cfg = AdaConfig { n_iters: 3, depth: 1, shrinkage: 1.0 };
        assert!(matches!(adaboost_fit(&d, &cfg), Err(Error::SingleClass)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn exponential_loss_non_increasing(
            seed in any::<u64>(),
            depth in 1usize..3,
            shrinkage in 0.1f64..=1.0,
        ) {
            let d = synthetic::two_blobs(60, 2, 1.0, seed).unwrap();
            let m = adaboost_fit(&d, &AdaConfig { n_iters: 25, depth, shrinkage }).unwrap();
            prop_assert!(m.learner_errors.iter().all(|&e| e < 0.5));
            let mut prev = 1.0;
            let mut bound = 1.0;
            for (t, &l) in m.exp_loss.iter().enumerate() {
                prop_assert!(l <= prev * (1.0 + 1e-12));
                let e = m.learner_errors[t];
                if shrinkage == 1.0 {
                    bound *= 2.0 * (e * (1.0 - e)).sqrt();
                    prop_assert!(m.train_error[t] <= bound + 1e-12);
                }
                prop_assert!(m.train_error[t] <= l + 1e-12);
                prev = l;
            }
        }
    }
}
