//! Elastic net by cyclic coordinate descent.
//!
//! Minimizes, on standardized features,
//!
//! ```text
//! L(b0, b) + lambda * (alpha * |b|_1 + (1 - alpha) / 2 * |b|_2^2)
//! ```
//!
//! where `L` is half the mean squared error (continuous response) or the mean
//! negative binomial log-likelihood (binary response, handled by iteratively
//! reweighted least squares around the same coordinate loop). In terms of a
//! separate l1 weight `l1` and l2 weight `l2` this is `l1 = lambda * alpha`
//! and `l2 = lambda * (1 - alpha) / 2`. The intercept is never penalized.

use serde::{Deserialize, Serialize};

use super::{sigmoid, Standardizer};
use crate::data::{Dataset, ResponseKind};
use crate::error::{Error, Result};

const GAUSSIAN_TOL: f64 = 1e-11;
const GAUSSIAN_MAX_SWEEPS: usize = 100_000;
const IRLS_MAX_OUTER: usize = 100;
const IRLS_TOL: f64 = 1e-6;
/// Reweighting also stops once the penalized objective moves by less than
/// this relative amount.
const IRLS_OBJ_TOL: f64 = 1e-10;
const IRLS_INNER_TOL: f64 = 1e-6;
const IRLS_MAX_INNER: usize = 2_000;
const WEIGHT_FLOOR: f64 = 1e-5;
/// Ridge problems have no finite lambda_max; the path starts from the
/// lambda_max of this mixing value instead.
const ALPHA_FLOOR_FOR_PATH: f64 = 1e-3;
/// Binomial paths stop refitting once this fraction of the null deviance is
/// explained, or once a step gains less than `SATURATION_GAIN` of it.
const SATURATION_RATIO: f64 = 0.999;
const SATURATION_GAIN: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnetConfig {
    pub alpha: f64,
    pub lambda: f64,
}

impl EnetConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnetFamily {
    Gaussian,
    Binomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnetModel {
    pub family: EnetFamily,
    pub alpha: f64,
    pub lambda: f64,
    /// Coefficients on the original feature scale.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub standardization: Standardizer,
    /// Coefficients on the standardized scale, as optimized.
    pub std_coefficients: Vec<f64>,
    pub std_intercept: f64,
    pub converged: bool,
}

impl EnetModel {
    /// `intercept + x . coefficients`; log-odds for the binomial family.
    pub fn linear_predictor(&self, row: &[f64]) -> f64 {
        self.intercept
            + row
                .iter()
                .zip(&self.coefficients)
                .map(|(x, b)| x * b)
                .sum::<f64>()
    }

    pub fn nonzero(&self) -> usize {
        self.std_coefficients.iter().filter(|b| **b != 0.0).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `sign(z) * max(|z| - g, 0)`.
pub fn soft_threshold(z: f64, g: f64) -> f64 {
    if z > g {
        z - g
    } else if z < -g {
        z + g
    } else {
        0.0
    }
}

/// Standardized, column-major design.
struct Design {
    cols: Vec<Vec<f64>>,
    /// `|z_j|^2 / n`; zero for constant features.
    sq: Vec<f64>,
    std: Standardizer,
    n: usize,
}

impl Design {
    fn new(train: &Dataset) -> Self {
        let std = Standardizer::fit(train.features());
        let x = train.features();
        let n = x.nrows();
        let cols: Vec<Vec<f64>> = (0..x.ncols())
            .map(|j| {
                x.column(j)
                    .into_iter()
                    .map(|v| (v - std.means[j]) / std.scales[j])
                    .collect()
            })
            .collect();
        let sq = cols
            .iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>() / n as f64)
            .map(|s| if s < 1e-20 { 0.0 } else { s })
            .collect();
        Design { cols, sq, std, n }
    }

    fn p(&self) -> usize {
        self.cols.len()
    }

    fn dot(&self, j: usize, v: &[f64]) -> f64 {
        self.cols[j].iter().zip(v).map(|(a, b)| a * b).sum()
    }
}

fn family_of(train: &Dataset) -> EnetFamily {
    match train.kind() {
        ResponseKind::Binary => EnetFamily::Binomial,
        ResponseKind::Continuous => EnetFamily::Gaussian,
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn penalty(beta: &[f64], alpha: f64, lambda: f64) -> f64 {
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    let l2: f64 = beta.iter().map(|b| b * b).sum();
    lambda * (alpha * l1 + 0.5 * (1.0 - alpha) * l2)
}

fn std_objective(d: &Design, y: &[f64], family: EnetFamily, b0: f64, beta: &[f64], alpha: f64, lambda: f64) -> f64 {
    let n = d.n as f64;
    let mut eta = vec![b0; d.n];
    for (j, b) in beta.iter().enumerate() {
        if *b != 0.0 {
            for (e, z) in eta.iter_mut().zip(&d.cols[j]) {
                *e += b * z;
            }
        }
    }
    let data_term = match family {
        EnetFamily::Gaussian => eta.iter().zip(y).map(|(e, t)| (t - e).powi(2)).sum::<f64>() / (2.0 * n),
        EnetFamily::Binomial => {
            // -loglik = log(1 + e^eta) - y eta
            eta.iter()
                .zip(y)
                .map(|(&e, &t)| {
                    let softplus = if e > 0.0 { e + (-e).exp().ln_1p() } else { e.exp().ln_1p() };
                    softplus - t * e
                })
                .sum::<f64>()
                / n
        }
    };
    data_term + penalty(beta, alpha, lambda)
}

/// Penalized objective of a fitted model on its training data.
pub fn enet_objective(train: &Dataset, model: &EnetModel) -> f64 {
    let d = Design::new(train);
    std_objective(
        &d,
        train.y(),
        model.family,
        model.std_intercept,
        &model.std_coefficients,
        model.alpha,
        model.lambda,
    )
}

#[derive(Clone)]
struct Fit {
    b0: f64,
    beta: Vec<f64>,
    converged: bool,
}

/// Gaussian coordinate descent; `resid` must equal `y - b0 - Z beta` on entry.
fn cd_gaussian(
    d: &Design,
    resid: &mut [f64],
    beta: &mut [f64],
    alpha: f64,
    lambda: f64,
    mut on_sweep: impl FnMut(&[f64]),
) -> bool {
    let n = d.n as f64;
    let l1 = lambda * alpha;
    let l2 = lambda * (1.0 - alpha);
    let all: Vec<usize> = (0..d.p()).filter(|&j| d.sq[j] != 0.0).collect();
    let mut active = Vec::new();
    let mut full = true;
    for _ in 0..GAUSSIAN_MAX_SWEEPS {
        let set = if full { &all } else { &active };
        let mut max_delta: f64 = 0.0;
        for &j in set {
            let old = beta[j];
            let grad = d.dot(j, resid) / n + d.sq[j] * old;
            let new = soft_threshold(grad, l1) / (d.sq[j] + l2);
            if new != old {
                let delta = new - old;
                for (r, z) in resid.iter_mut().zip(&d.cols[j]) {
                    *r -= delta * z;
                }
                beta[j] = new;
                max_delta = max_delta.max(delta.abs() * d.sq[j].sqrt());
            }
        }
        on_sweep(beta);
        if max_delta < GAUSSIAN_TOL {
            if full {
                return true;
            }
            full = true;
        } else if full {
            // converge on the current support before the next full pass
            active = all.iter().copied().filter(|&j| beta[j] != 0.0).collect();
            full = false;
        }
    }
    false
}

fn fit_gaussian(d: &Design, y: &[f64], cfg: &EnetConfig, warm: Option<&[f64]>, on_sweep: impl FnMut(&[f64])) -> Fit {
    let b0 = mean(y);
    let mut beta = warm.map_or_else(|| vec![0.0; d.p()], <[f64]>::to_vec);
    let mut resid: Vec<f64> = y.iter().map(|t| t - b0).collect();
    for j in 0..d.p() {
        if beta[j] != 0.0 {
            for (r, z) in resid.iter_mut().zip(&d.cols[j]) {
                *r -= beta[j] * z;
            }
        }
    }
    let converged = cd_gaussian(d, &mut resid, &mut beta, cfg.alpha, cfg.lambda, on_sweep);
    Fit { b0, beta, converged }
}

fn fit_binomial(d: &Design, y: &[f64], cfg: &EnetConfig, warm: Option<(f64, &[f64])>, mut on_outer: impl FnMut(f64, &[f64])) -> Fit {
    let n = d.n as f64;
    let l1 = cfg.lambda * cfg.alpha;
    let l2 = cfg.lambda * (1.0 - cfg.alpha);
    let (mut b0, mut beta) = match warm {
        Some((b0, b)) => (b0, b.to_vec()),
        None => {
            let q = mean(y).clamp(1e-12, 1.0 - 1e-12);
            ((q / (1.0 - q)).ln(), vec![0.0; d.p()])
        }
    };
    let mut eta = vec![0.0; d.n];
    let mut w = vec![0.0; d.n];
    let mut resid = vec![0.0; d.n];
    let mut converged = false;
    let mut last_obj = f64::INFINITY;

    for _ in 0..IRLS_MAX_OUTER {
        eta.fill(b0);
        for j in 0..d.p() {
            if beta[j] != 0.0 {
                for (e, z) in eta.iter_mut().zip(&d.cols[j]) {
                    *e += beta[j] * z;
                }
            }
        }
        for i in 0..d.n {
            let p = sigmoid(eta[i]);
            w[i] = (p * (1.0 - p)).max(WEIGHT_FLOOR);
            resid[i] = (y[i] - p) / w[i];
        }
        let w_sum: f64 = w.iter().sum();
        let xwx: Vec<f64> = (0..d.p())
            .map(|j| {
                if d.sq[j] == 0.0 {
                    0.0
                } else {
                    d.cols[j].iter().zip(&w).map(|(z, wi)| wi * z * z).sum::<f64>() / n
                }
            })
            .collect();
        let (old_b0, old_beta) = (b0, beta.clone());

        let all: Vec<usize> = (0..d.p()).filter(|&j| xwx[j] != 0.0).collect();
        let mut active = Vec::new();
        let mut full = true;
        for _ in 0..IRLS_MAX_INNER {
            let set = if full { &all } else { &active };
            let mut max_delta: f64 = 0.0;
            for &j in set {
                let old = beta[j];
                let grad: f64 = d.cols[j]
                    .iter()
                    .zip(w.iter().zip(&resid))
                    .map(|(z, (wi, r))| wi * z * r)
                    .sum::<f64>()
                    / n
                    + xwx[j] * old;
                let new = soft_threshold(grad, l1) / (xwx[j] + l2);
                if new != old {
                    let delta = new - old;
                    for (r, z) in resid.iter_mut().zip(&d.cols[j]) {
                        *r -= delta * z;
                    }
                    beta[j] = new;
                    max_delta = max_delta.max(delta.abs() * xwx[j].sqrt());
                }
            }
            let shift = w.iter().zip(&resid).map(|(wi, r)| wi * r).sum::<f64>() / w_sum;
            if shift != 0.0 {
                b0 += shift;
                for r in resid.iter_mut() {
                    *r -= shift;
                }
                max_delta = max_delta.max(shift.abs());
            }
            if max_delta < IRLS_INNER_TOL {
                if full {
                    break;
                }
                full = true;
            } else if full {
                active = all.iter().copied().filter(|&j| beta[j] != 0.0).collect();
                full = false;
            }
        }

        let change = beta
            .iter()
            .zip(&old_beta)
            .map(|(a, b)| (a - b).abs())
            .fold((b0 - old_b0).abs(), f64::max);
        on_outer(b0, &beta);
        if !change.is_finite() {
            break;
        }
        let obj = std_objective(d, y, EnetFamily::Binomial, b0, &beta, cfg.alpha, cfg.lambda);
        if change < IRLS_TOL || (last_obj - obj).abs() <= IRLS_OBJ_TOL * obj.abs().max(1e-300) {
            converged = true;
            break;
        }
        last_obj = obj;
    }
    Fit { b0, beta, converged }
}

fn finish(d: &Design, family: EnetFamily, cfg: &EnetConfig, fit: Fit) -> EnetModel {
    let coefficients: Vec<f64> = fit
        .beta
        .iter()
        .zip(&d.std.scales)
        .map(|(b, s)| b / s)
        .collect();
    let intercept = fit.b0
        - coefficients
            .iter()
            .zip(&d.std.means)
            .map(|(b, m)| b * m)
            .sum::<f64>();
    if !fit.converged {
        log::debug!(
            "elastic net (alpha {}, lambda {}) stopped before converging",
            cfg.alpha,
            cfg.lambda
        );
    }
    EnetModel {
        family,
        alpha: cfg.alpha,
        lambda: cfg.lambda,
        coefficients,
        intercept,
        standardization: d.std.clone(),
        std_coefficients: fit.beta,
        std_intercept: fit.b0,
        converged: fit.converged,
    }
}

pub fn enet_fit(train: &Dataset, cfg: &EnetConfig) -> Result<EnetModel> {
    Ok(enet_fit_traced(train, cfg)?.0)
}

/// Fit plus the penalized objective after every coordinate sweep
/// (continuous response) or every reweighting step (binary response).
pub fn enet_fit_traced(train: &Dataset, cfg: &EnetConfig) -> Result<(EnetModel, Vec<f64>)> {
    cfg.validate()?;
    let d = Design::new(train);
    let y = train.y();
    let family = family_of(train);
    let mut trace = Vec::new();
    let fit = match family {
        EnetFamily::Gaussian => {
            let b0 = mean(y);
            fit_gaussian(&d, y, cfg, None, |beta| {
                trace.push(std_objective(&d, y, family, b0, beta, cfg.alpha, cfg.lambda))
            })
        }
        EnetFamily::Binomial => fit_binomial(&d, y, cfg, None, |b0, beta| {
            trace.push(std_objective(&d, y, family, b0, beta, cfg.alpha, cfg.lambda))
        }),
    };
    Ok((finish(&d, family, cfg, fit), trace))
}

/// Smallest lambda at which every coefficient is zero. For `alpha` below
/// 1e-3 the value for `alpha = 1e-3` is returned.
pub fn lambda_max(train: &Dataset, alpha: f64) -> f64 {
    let d = Design::new(train);
    let y = train.y();
    let ybar = mean(y);
    let centered: Vec<f64> = y.iter().map(|t| t - ybar).collect();
    let top = (0..d.p())
        .map(|j| d.dot(j, &centered).abs() / d.n as f64)
        .fold(0.0, f64::max);
    top / alpha.max(ALPHA_FLOOR_FOR_PATH)
}

fn binomial_deviance(d: &Design, y: &[f64], b0: f64, beta: &[f64]) -> f64 {
    2.0 * d.n as f64 * std_objective(d, y, EnetFamily::Binomial, b0, beta, 0.0, 0.0)
}

/// Warm-started fits along `lambdas`, in the given order. A binomial path
/// that saturates (see `SATURATION_RATIO`) repeats its last fit for the
/// remaining lambdas.
pub fn enet_path(train: &Dataset, alpha: f64, lambdas: &[f64]) -> Result<Vec<EnetModel>> {
    let d = Design::new(train);
    let y = train.y();
    let family = family_of(train);
    let null_dev = match family {
        EnetFamily::Binomial => {
            let q = mean(y).clamp(1e-15, 1.0 - 1e-15);
            binomial_deviance(&d, y, (q / (1.0 - q)).ln(), &vec![0.0; d.p()])
        }
        EnetFamily::Gaussian => 0.0,
    };
    let mut models = Vec::with_capacity(lambdas.len());
    let mut warm: Option<Fit> = None;
    let mut last_ratio: Option<f64> = None;
    let mut saturated = false;
    for &lambda in lambdas {
        let cfg = EnetConfig { alpha, lambda };
        cfg.validate()?;
        let fit = match (&warm, family) {
            (Some(w), _) if saturated => w.clone(),
            (w, EnetFamily::Gaussian) => fit_gaussian(&d, y, &cfg, w.as_ref().map(|w| w.beta.as_slice()), |_| {}),
            (w, EnetFamily::Binomial) => {
                let fit = fit_binomial(&d, y, &cfg, w.as_ref().map(|w| (w.b0, w.beta.as_slice())), |_, _| {});
                if null_dev > 0.0 {
                    let ratio = 1.0 - binomial_deviance(&d, y, fit.b0, &fit.beta) / null_dev;
                    let stalled = last_ratio.is_some_and(|r| ratio - r < SATURATION_GAIN * ratio);
                    saturated = ratio >= SATURATION_RATIO || (stalled && fit.beta.iter().any(|b| *b != 0.0));
                    last_ratio = Some(ratio);
                }
                fit
            }
        };
        warm = Some(fit.clone());
        models.push(finish(&d, family, &cfg, fit));
    }
    Ok(models)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synthetic, Matrix, Response};
    use proptest::prelude::*;

    /// Ordinary least squares with intercept by solving the normal equations.
    fn ols(rows: &[Vec<f64>], y: &[f64]) -> (f64, Vec<f64>) {
        let p = rows[0].len() + 1;
        let mut a = vec![vec![0.0; p + 1]; p];
        for (r, &t) in rows.iter().zip(y) {
            let x: Vec<f64> = std::iter::once(1.0).chain(r.iter().copied()).collect();
            for i in 0..p {
                for j in 0..p {
                    a[i][j] += x[i] * x[j];
                }
                a[i][p] += x[i] * t;
            }
        }
        for c in 0..p {
            let piv = (c..p).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
            a.swap(c, piv);
            for r in 0..p {
                if r != c {
                    let f = a[r][c] / a[c][c];
                    for k in c..=p {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
        }
        let sol: Vec<f64> = (0..p).map(|i| a[i][p] / a[i][i]).collect();
        (sol[0], sol[1..].to_vec())
    }

    #[test]
    fn soft_threshold_values() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-2.5, 1.0), -1.5);
        assert_eq!(soft_threshold(0.7, 0.0), 0.7);
    }

    #[test]
    fn zero_penalty_matches_ols() {
        let d = synthetic::linear_regression(40, 4, 0.5, 3).unwrap();
        let rows: Vec<Vec<f64>> = (0..d.n()).map(|i| d.features().row(i).to_vec()).collect();
        let (b0, b) = ols(&rows, d.y());
        let m = enet_fit(&d, &EnetConfig { alpha: 0.5, lambda: 0.0 }).unwrap();
        assert!(m.converged);
        assert!((m.intercept - b0).abs() < 1e-6);
        for (x, y) in m.coefficients.iter().zip(&b) {
            assert!((x - y).abs() < 1e-6, "{x} vs {y}");
        }
    }

    #[test]
    fn total_shrinkage_above_lambda_max() {
        let d = synthetic::linear_regression(50, 3, 1.0, 8).unwrap();
        for alpha in [0.2, 0.5, 1.0] {
            let lmax = lambda_max(&d, alpha);
            let m = enet_fit(&d, &EnetConfig { alpha, lambda: lmax }).unwrap();
            assert!(m.coefficients.iter().all(|b| *b == 0.0));
            assert!((m.intercept - mean(d.y())).abs() < 1e-12);
            let inside = enet_fit(&d, &EnetConfig { alpha, lambda: 0.95 * lmax }).unwrap();
            assert!(inside.nonzero() > 0);
            let probe = [0.3, -1.0, 2.0];
            assert_eq!(m.linear_predictor(&probe), m.intercept);
        }
    }

    fn orthonormal_design(y: Vec<f64>) -> Dataset {
        // Hadamard columns without the constant one: mean 0, variance 1, orthogonal
        let h = [
            [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            [-1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0],
            [-1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0],
            [1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0, -1.0, 1.0, -1.0, 1.0],
            [1.0, -1.0, -1.0, -1.0, -1.0, 1.0, 1.0],
            [-1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0],
        ];
        let rows: Vec<Vec<f64>> = h.iter().map(|r| r[..4].to_vec()).collect();
        Dataset::new(
            Matrix::from_rows(&rows).unwrap(),
            (1..=4).map(|j| format!("h{j}")).collect(),
            Response::continuous(y).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn lasso_on_orthonormal_design_soft_thresholds() {
        let y = vec![2.0, -1.0, 0.5, 3.0, -2.0, 0.25, 1.0, -0.75];
        let d = orthonormal_design(y.clone());
        let ybar = mean(&y);
        for lambda in [0.0, 0.1, 0.3, 0.6, 1.0] {
            let m = enet_fit(&d, &EnetConfig { alpha: 1.0, lambda }).unwrap();
            for j in 0..4 {
                let ols_j = (0..8).map(|i| d.features().get(i, j) * (y[i] - ybar)).sum::<f64>() / 8.0;
                assert!((m.coefficients[j] - soft_threshold(ols_j, lambda)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn subgradient_optimality() {
        let d = synthetic::linear_regression(60, 6, 1.0, 21).unwrap();
        let cfg = EnetConfig { alpha: 0.7, lambda: 0.2 };
        let m = enet_fit(&d, &cfg).unwrap();
        let des = Design::new(&d);
        let mut resid: Vec<f64> = d.y().to_vec();
        for i in 0..d.n() {
            resid[i] -= m.std_intercept
                + (0..6).map(|j| des.cols[j][i] * m.std_coefficients[j]).sum::<f64>();
        }
        for j in 0..6 {
            let g = des.dot(j, &resid) / d.n() as f64;
            let b = m.std_coefficients[j];
            if b != 0.0 {
                let r = g - cfg.lambda * (1.0 - cfg.alpha) * b - cfg.lambda * cfg.alpha * b.signum();
                assert!(r.abs() < 1e-6);
            } else {
                assert!(g.abs() <= cfg.lambda * cfg.alpha + 1e-6);
            }
        }
    }

    #[test]
    fn ridge_shrinks_monotonically() {
        let d = synthetic::linear_regression(50, 5, 1.0, 4).unwrap();
        let mut prev = f64::INFINITY;
        for lambda in [0.001, 0.01, 0.1, 1.0, 10.0, 100.0] {
            let m = enet_fit(&d, &EnetConfig { alpha: 0.0, lambda }).unwrap();
            let norm = m.std_coefficients.iter().map(|b| b * b).sum::<f64>().sqrt();
            assert!(norm < prev);
            assert!(m.nonzero() == 5);
            prev = norm;
        }
    }

    #[test]
    fn lasso_support_shrinks_along_path() {
        let y = vec![2.0, -1.0, 0.5, 3.0, -2.0, 0.25, 1.0, -0.75];
        let d = orthonormal_design(y);
        let lmax = lambda_max(&d, 1.0);
        let lambdas: Vec<f64> = (0..30).map(|k| lmax * 10f64.powf(-3.0 * k as f64 / 29.0)).collect();
        let path = enet_path(&d, 1.0, &lambdas).unwrap();
        assert_eq!(path[0].nonzero(), 0);
        for w in path.windows(2) {
            assert!(w[1].nonzero() >= w[0].nonzero());
        }
        // warm-started path agrees with cold fits
        for (m, &l) in path.iter().zip(&lambdas).step_by(7) {
            let cold = enet_fit(&d, &EnetConfig { alpha: 1.0, lambda: l }).unwrap();
            for (a, b) in m.coefficients.iter().zip(&cold.coefficients) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn binomial_fit_separates_blobs() {
        let d = synthetic::two_blobs(100, 3, 2.0, 6).unwrap();
        let m = enet_fit(&d, &EnetConfig { alpha: 0.5, lambda: 0.01 }).unwrap();
        assert!(m.converged);
        assert_eq!(m.family, EnetFamily::Binomial);
        let hits = (0..d.n())
            .filter(|&i| (m.linear_predictor(d.features().row(i)) > 0.0) == (d.y()[i] == 1.0))
            .count();
        assert!(hits as f64 / d.n() as f64 > 0.85);
        let lmax = lambda_max(&d, 0.5);
        let null = enet_fit(&d, &EnetConfig { alpha: 0.5, lambda: lmax * 1.0001 }).unwrap();
        assert_eq!(null.nonzero(), 0);
        assert!((sigmoid(null.intercept) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip() {
        let d = synthetic::linear_regression(30, 3, 1.0, 2).unwrap();
        let m = enet_fit(&d, &EnetConfig { alpha: 0.3, lambda: 0.05 }).unwrap();
        let back: EnetModel = serde_json::from_str(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn invalid_config() {
        let d = synthetic::linear_regression(10, 2, 1.0, 1).unwrap();
        assert!(enet_fit(&d, &EnetConfig { alpha: 1.5, lambda: 0.1 }).is_err());
        assert!(enet_fit(&d, &EnetConfig { alpha: 0.5, lambda: -1.0 }).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn objective_non_increasing_per_sweep(
            seed in any::<u64>(),
            alpha in 0.0f64..=1.0,
            log_lambda in -3.0f64..0.5,
        ) {
            let d = synthetic::linear_regression(40, 5, 1.0, seed).unwrap();
            let cfg = EnetConfig { alpha, lambda: 10f64.powf(log_lambda) };
            let (_, trace) = enet_fit_traced(&d, &cfg).unwrap();
            let start = std_objective(&Design::new(&d), d.y(), EnetFamily::Gaussian, mean(d.y()), &[0.0; 5], alpha, cfg.lambda);
            let mut prev = start;
            for &v in &trace {
                prop_assert!(v <= prev + 1e-12 * (1.0 + prev.abs()));
                prev = v;
            }
        }
    }
}
