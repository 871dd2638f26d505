//! Synthetic fixtures with known structure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::{Dataset, Matrix, Response};
use crate::error::Result;

fn gaussian_features(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Result<Matrix> {
    let data = (0..n * p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Matrix::from_vec(n, p, data)
}

fn names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("x{j}")).collect()
}

/// `y = 3 x1 - 2 x2 + N(0, noise_sd^2)` with `p >= 2` standard normal features.
pub fn linear_regression(n: usize, p: usize, noise_sd: f64, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = gaussian_features(&mut rng, n, p.max(2))?;
    let noise = Normal::new(0.0, noise_sd).expect("noise sd must be finite and >= 0");
    let y = (0..n)
        .map(|i| 3.0 * x.get(i, 0) - 2.0 * x.get(i, 1) + noise.sample(&mut rng))
        .collect();
    let p = x.ncols();
    Dataset::new(x, names(p), Response::continuous(y)?)
}

/// Gaussian response independent of `p` Gaussian features.
pub fn pure_noise_regression(n: usize, p: usize, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = gaussian_features(&mut rng, n, p)?;
    let y = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Dataset::new(x, names(p), Response::continuous(y)?)
}

/// Two Gaussian blobs in `p` dimensions whose means differ by `separation`
/// along every axis.
pub fn two_blobs(n: usize, p: usize, separation: f64, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = (i % 2) as f64;
        let shift = if label == 1.0 { separation / 2.0 } else { -separation / 2.0 };
        rows.push(
            (0..p)
                .map(|_| rng.sample::<f64, _>(StandardNormal) + shift)
                .collect::<Vec<_>>(),
        );
        labels.push(label);
    }
    Dataset::from_rows(&rows, Response::binary(labels)?)
}

/// Uniform draw helper used by fixtures that need raw numbers.
pub fn uniform_rows(n: usize, p: usize, low: f64, high: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..p).map(|_| rng.random_range(low..high)).collect())
        .collect()
}
