use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, ResponseKind};
use crate::error::{Error, Result};

/// Disjoint train/test row indices (each sorted ascending).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainTestSplit {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Fold id (1..=k) per row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub fold_of: Vec<usize>,
}

impl FoldAssignment {
    /// Held-out rows of fold `fold` (1-based).
    pub fn held_out(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] == fold)
            .collect()
    }

    /// Rows used for fitting when fold `fold` is held out.
    pub fn fit_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of {
            sizes[f - 1] += 1;
        }
        sizes
    }
}

/// Row indices grouped by stratum, each group in ascending order.
fn strata(d: &Dataset, stratify: bool) -> Result<Vec<Vec<usize>>> {
    if !stratify {
        return Ok(vec![(0..d.n()).collect()]);
    }
    if d.kind() != ResponseKind::Binary {
        return Err(Error::InvalidArgument(
            "stratification requires a binary response".into(),
        ));
    }
    let (mut neg, mut pos) = (Vec::new(), Vec::new());
    for (i, &y) in d.y().iter().enumerate() {
        if y == 1.0 {
            pos.push(i)
        } else {
            neg.push(i)
        }
    }
    Ok(vec![neg, pos].into_iter().filter(|g| !g.is_empty()).collect())
}

/// Largest-remainder allocation of `total` across groups in proportion
/// `fraction`, so every group receives floor or ceil of its exact share.
fn allocate(sizes: &[usize], fraction: f64, total: usize) -> Vec<usize> {
    let exact: Vec<f64> = sizes.iter().map(|&s| s as f64 * fraction).collect();
    let mut take: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut remaining = total.saturating_sub(take.iter().sum());
    for &g in order.iter().cycle().take(order.len() * 2) {
        if remaining == 0 {
            break;
        }
        if take[g] < sizes[g] {
            take[g] += 1;
            remaining -= 1;
        }
    }
    take
}

fn partition(d: &Dataset, fraction: f64, stratify: bool, seed: u64, what: &str) -> Result<TrainTestSplit> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "{what} must lie in (0, 1), got {fraction}"
        )));
    }
    let groups = strata(d, stratify)?;
    let total = (fraction * d.n() as f64).round() as usize;
    if total == 0 || total >= d.n() {
        return Err(Error::InvalidArgument(format!(
            "{what} {fraction} leaves an empty part for n = {}",
            d.n()
        )));
    }
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let take = allocate(&sizes, fraction, total);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::with_capacity(total);
    let mut test = Vec::with_capacity(d.n() - total);
    for (mut g, t) in groups.into_iter().zip(take) {
        g.shuffle(&mut rng);
        train.extend_from_slice(&g[..t]);
        test.extend_from_slice(&g[t..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(TrainTestSplit { train, test })
}

/// Random train/test partition with `round(proportion * n)` training rows.
/// Stratified splits keep each class within one row of its proportional share.
pub fn initial_split(d: &Dataset, proportion: f64, stratify: bool, seed: u64) -> Result<TrainTestSplit> {
    partition(d, proportion, stratify, seed, "proportion")
}

/// Single random split for fast evaluation: `train` holds the
/// `round(fraction * n)` fitting rows, `test` the verification rows.
pub fn fast_holdout(d: &Dataset, fraction: f64, stratify: bool, seed: u64) -> Result<TrainTestSplit> {
    partition(d, fraction, stratify, seed, "fraction")
}

/// Assigns rows to `k` folds. Within each stratum rows are shuffled and dealt
/// round-robin, continuing the rotation across strata, so fold sizes differ by
/// at most one both overall and per class.
pub fn vfold(d: &Dataset, k: usize, stratify: bool, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("fold count must be >= 2, got {k}")));
    }
    if k > d.n() {
        return Err(Error::InvalidArgument(format!(
            "fold count {k} exceeds row count {}",
            d.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; d.n()];
    let mut next = 0usize;
    for mut g in strata(d, stratify)? {
        g.shuffle(&mut rng);
        for i in g {
            fold_of[i] = next % k + 1;
            next += 1;
        }
    }
    Ok(FoldAssignment { k, fold_of })
}
