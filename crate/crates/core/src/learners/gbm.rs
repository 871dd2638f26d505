//! Gradient boosting with squared-error (regression) or binomial log-loss
//! (classification).

use serde::{Deserialize, Serialize};

use super::sigmoid;
use super::tree::{grow, Columns, RegressionTree, TreeParams};
use crate::data::{Dataset, ResponseKind};
use crate::error::{Error, Result};

const NEWTON_FLOOR: f64 = 1e-12;
const RATE_CLIP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    pub n_trees: usize,
    pub depth: usize,
    pub shrinkage: f64,
    /// Minimum observations per terminal node.
    pub min_node: usize,
}

impl BoostConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees < 1 || self.depth < 1 || self.min_node < 1 {
            return Err(Error::InvalidArgument(
                "n_trees, depth and min_node must be >= 1".into(),
            ));
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

#[derive(Debug, Clone)]
pub struct GbmModel {
    pub response: ResponseKind,
    /// Mean response, or log-odds of the base rate.
    pub init: f64,
    pub shrinkage: f64,
    pub trees: Vec<RegressionTree>,
    /// Training loss (MSE or log-loss) after 0, 1, ..., n_trees trees.
    pub train_loss: Vec<f64>,
}

impl GbmModel {
    pub fn decision(&self, row: &[f64]) -> f64 {
        self.init + self.shrinkage * self.trees.iter().map(|t| t.predict(row)).sum::<f64>()
    }

    /// The same ensemble cut after its first `m` trees.
    pub fn truncated(&self, m: usize) -> GbmModel {
        GbmModel {
            trees: self.trees[..m.min(self.trees.len())].to_vec(),
            train_loss: self.train_loss[..=m.min(self.trees.len())].to_vec(),
            ..self.clone()
        }
    }
}

fn loss(kind: ResponseKind, y: &[f64], f: &[f64]) -> f64 {
    let n = y.len() as f64;
    match kind {
        ResponseKind::Continuous => y.iter().zip(f).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / n,
        ResponseKind::Binary => {
            -y.iter()
                .zip(f)
                .map(|(&yi, &fi)| {
                    let p = sigmoid(fi).clamp(RATE_CLIP, 1.0 - RATE_CLIP);
                    yi * p.ln() + (1.0 - yi) * (1.0 - p).ln()
                })
                .sum::<f64>()
                / n
        }
    }
}

/// Fits `F_M = F_0 + shrinkage * sum_m tree_m`, each tree a least-squares fit
/// to the current negative gradient. Leaves hold the mean residual
/// (regression) or a single Newton step `sum r / sum p(1-p)` (classification).
pub fn gbm_fit(train: &Dataset, cfg: &BoostConfig) -> Result<GbmModel> {
    cfg.validate()?;
    let n = train.n();
    if cfg.min_node > n {
        return Err(Error::InvalidArgument(format!(
            "min_node {} exceeds training rows {n}",
            cfg.min_node
        )));
    }
    let kind = train.kind();
    let y = train.y();
    let init = match kind {
        ResponseKind::Continuous => y.iter().sum::<f64>() / n as f64,
        ResponseKind::Binary => {
            let q = (y.iter().sum::<f64>() / n as f64).clamp(RATE_CLIP, 1.0 - RATE_CLIP);
            (q / (1.0 - q)).ln()
        }
    };

    let cols = Columns::new(train.features());
    let params = TreeParams {
        max_depth: cfg.depth,
        min_node: cfg.min_node,
    };
    let ones = vec![1.0; n];
    let mut f = vec![init; n];
    let mut residual = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let mut trees = Vec::with_capacity(cfg.n_trees);
    let mut train_loss = Vec::with_capacity(cfg.n_trees + 1);
    train_loss.push(loss(kind, y, &f));

    for _ in 0..cfg.n_trees {
        match kind {
            ResponseKind::Continuous => {
                for i in 0..n {
                    residual[i] = y[i] - f[i];
                }
            }
            ResponseKind::Binary => {
                for i in 0..n {
                    let p = sigmoid(f[i]);
                    residual[i] = y[i] - p;
                    hess[i] = p * (1.0 - p);
                }
            }
        }
        let (tree, fitted) = match kind {
            ResponseKind::Continuous => grow(&cols, &residual, &ones, params, |rows| {
                rows.iter().map(|&r| residual[r as usize]).sum::<f64>() / rows.len() as f64
            }),
            ResponseKind::Binary => grow(&cols, &residual, &ones, params, |rows| {
                let num: f64 = rows.iter().map(|&r| residual[r as usize]).sum();
                let den: f64 = rows.iter().map(|&r| hess[r as usize]).sum();
                num / den.max(NEWTON_FLOOR)
            }),
        };
        for i in 0..n {
            f[i] += cfg.shrinkage * fitted[i];
        }
        trees.push(tree);
        train_loss.push(loss(kind, y, &f));
    }
    debug_assert_eq!(cols.n(), n);

    Ok(GbmModel {
        response: kind,
        init,
        shrinkage: cfg.shrinkage,
        trees,
        train_loss,
    })
}
