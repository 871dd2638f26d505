//! RBF-kernel support vector classification and regression.
//!
//! Both problems reduce to the same box-constrained dual
//!
//! ```text
//! min ½ aᵀQa + pᵀa   s.t.  yᵀa = 0,  0 <= a_i <= C
//! ```
//!
//! solved by sequential minimal optimization: each step picks the maximal
//! violating index `i`, pairs it with the violating `j` of largest
//! second-order gain, and solves the two-variable subproblem analytically.

use serde::{Deserialize, Serialize};

use super::Standardizer;
use crate::data::{Dataset, ResponseKind};
use crate::error::{Error, Result};

pub const KKT_TOLERANCE: f64 = 1e-3;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub cost: f64,
    pub gamma: f64,
    /// Tube half-width; ignored for classification.
    #[serde(default)]
    pub epsilon: f64,
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cost > 0.0 && self.cost.is_finite()) {
            return Err(Error::InvalidArgument(format!("cost must be > 0, got {}", self.cost)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SvmTask {
    Classifier,
    Regressor,
}

#[inline]
fn rbf(x: &[f64], x2: &[f64], gamma: f64) -> f64 {
    let d2: f64 = x.iter().zip(x2).map(|(a, b)| (a - b) * (a - b)).sum();
    (-gamma * d2).exp()
}

/// `exp(-gamma * |x - x2|^2)`.
pub fn rbf_kernel(x: &[f64], x2: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != x2.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: x2.len(),
        });
    }
    Ok(rbf(x, x2, gamma))
}

/// Fitted kernel expansion `f(x) = bias + sum_i coef_i K(x, sv_i)`, evaluated
/// on standardized inputs.
#[derive(Debug, Clone)]
pub struct SvmModel {
    pub task: SvmTask,
    /// Support vectors in standardized coordinates.
    pub support_vectors: Vec<Vec<f64>>,
    /// Signed dual coefficients, `|coef| <= C`.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub standardizer: Standardizer,
    pub iterations: usize,
    pub converged: bool,
    /// Maximal KKT violation at exit.
    pub kkt_gap: f64,
}

impl SvmModel {
    pub fn decision(&self, row: &[f64]) -> f64 {
        let mut z = Vec::with_capacity(row.len());
        self.standardizer.apply(row, &mut z);
        self.support_vectors
            .iter()
            .zip(&self.dual_coefs)
            .map(|(sv, c)| c * rbf(&z, sv, self.gamma))
            .sum::<f64>()
            + self.bias
    }
}

struct DualSolution {
    alpha: Vec<f64>,
    rho: f64,
    iterations: usize,
    converged: bool,
    gap: f64,
}

/// Kernel matrix `K` (n x n) is shared by the `l = n` (classification) or
/// `l = 2n` (regression) dual variables through index `t % n`.
fn solve_dual(k: &[f64], n: usize, y: &[f64], p: &[f64], c: f64) -> DualSolution {
    let l = y.len();
    let kk = |i: usize, j: usize| k[(i % n) * n + (j % n)];
    let max_iter = (100 * l).max(1_000_000);
    let mut alpha = vec![0.0; l];
    let mut g = p.to_vec();
    let mut iterations = 0;
    let mut converged = false;
    let mut gap = f64::INFINITY;

    while iterations < max_iter {
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..l {
            if y[t] > 0.0 {
                if alpha[t] < c && -g[t] >= gmax {
                    gmax = -g[t];
                    i_sel = Some(t);
                }
            } else if alpha[t] > 0.0 && g[t] >= gmax {
                gmax = g[t];
                i_sel = Some(t);
            }
        }
        let Some(i) = i_sel else {
            gap = 0.0;
            converged = true;
            break;
        };

        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut best_obj = f64::INFINITY;
        let kii = kk(i, i);
        for j in 0..l {
            let (in_low, yg) = if y[j] > 0.0 {
                (alpha[j] > 0.0, g[j])
            } else {
                (alpha[j] < c, -g[j])
            };
            if !in_low {
                continue;
            }
            if yg >= gmax2 {
                gmax2 = yg;
            }
            let grad_diff = gmax + yg;
            if grad_diff > 0.0 {
                let quad = kii + kk(j, j) - 2.0 * kk(i, j);
                let quad = if quad > 0.0 { quad } else { TAU };
                let obj = -(grad_diff * grad_diff) / quad;
                if obj <= best_obj {
                    best_obj = obj;
                    j_sel = Some(j);
                }
            }
        }
        gap = gmax + gmax2;
        let j = match j_sel {
            Some(j) if gap >= KKT_TOLERANCE => j,
            _ => {
                converged = true;
                break;
            }
        };
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let kij = kk(i, j);
        let quad = kii + kk(j, j) - 2.0 * kij;
        let quad = if quad > 0.0 { quad } else { TAU };
        let (mut ai, mut aj) = (old_i, old_j);
        if y[i] != y[j] {
            let delta = (-g[i] - g[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let delta = (g[i] - g[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;

        let (dai, daj) = (ai - old_i, aj - old_j);
        let (yi, yj) = (y[i], y[j]);
        for t in 0..l {
            g[t] += y[t] * (yi * kk(t, i) * dai + yj * kk(t, j) * daj);
        }
    }

    // bias from free variables, else midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut n_free, mut sum_free) = (0usize, 0.0);
    for t in 0..l {
        let yg = y[t] * g[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };

    DualSolution {
        alpha,
        rho,
        iterations,
        converged,
        gap,
    }
}

fn kernel_matrix(z: &[Vec<f64>], gamma: f64) -> Result<Vec<f64>> {
    let n = z.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        k[i * n + i] = 1.0;
        for j in 0..i {
            let v = rbf(&z[i], &z[j], gamma);
            if !v.is_finite() {
                return Err(Error::FitFailed("non-finite kernel value".into()));
            }
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    Ok(k)
}

fn assemble(
    task: SvmTask,
    z: Vec<Vec<f64>>,
    coefs: Vec<f64>,
    sol: &DualSolution,
    cfg: &SvmConfig,
    standardizer: Standardizer,
) -> SvmModel {
    let (support_vectors, dual_coefs) = z
        .into_iter()
        .zip(coefs)
        .filter(|(_, c)| *c != 0.0)
        .unzip();
    if !sol.converged {
        log::debug!("SMO hit its iteration cap with KKT gap {:.3e}", sol.gap);
    }
    SvmModel {
        task,
        support_vectors,
        dual_coefs,
        bias: -sol.rho,
        gamma: cfg.gamma,
        standardizer,
        iterations: sol.iterations,
        converged: sol.converged,
        kkt_gap: sol.gap,
    }
}

/// Soft-margin C-SVM with an RBF kernel on standardized features.
pub fn svm_fit(train: &Dataset, cfg: &SvmConfig) -> Result<SvmModel> {
    cfg.validate()?;
    if train.kind() != ResponseKind::Binary {
        return Err(Error::UnsupportedResponse {
            learner: "svm classifier",
            response: train.kind().as_str(),
        });
    }
    if !train.response().has_both_classes() {
        return Err(Error::SingleClass);
    }
    let standardizer = Standardizer::fit(train.features());
    let z = standardizer.transform(train.features());
    let n = z.len();
    let k = kernel_matrix(&z, cfg.gamma)?;
    let y: Vec<f64> = train.y().iter().map(|&v| if v == 1.0 { 1.0 } else { -1.0 }).collect();
    let p = vec![-1.0; n];
    let sol = solve_dual(&k, n, &y, &p, cfg.cost);
    let coefs = sol.alpha.iter().zip(&y).map(|(a, yi)| a * yi).collect();
    Ok(assemble(SvmTask::Classifier, z, coefs, &sol, cfg, standardizer))
}

/// Epsilon-insensitive support vector regression with an RBF kernel.
pub fn svr_fit(train: &Dataset, cfg: &SvmConfig) -> Result<SvmModel> {
    cfg.validate()?;
    let standardizer = Standardizer::fit(train.features());
    let z = standardizer.transform(train.features());
    let n = z.len();
    let k = kernel_matrix(&z, cfg.gamma)?;
    let mut y = vec![1.0; 2 * n];
    let mut p = vec![0.0; 2 * n];
    for (i, &target) in train.y().iter().enumerate() {
        p[i] = cfg.epsilon - target;
        p[i + n] = cfg.epsilon + target;
        y[i + n] = -1.0;
    }
    let sol = solve_dual(&k, n, &y, &p, cfg.cost);
    let coefs = (0..n).map(|i| sol.alpha[i] - sol.alpha[i + n]).collect();
    Ok(assemble(SvmTask::Regressor, z, coefs, &sol, cfg, standardizer))
}
