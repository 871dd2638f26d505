use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::objective::Evaluate;
use super::space::{CandidateConfig, SearchSpace};
use super::{TraceEntry, TuneResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HjOptions {
    /// Initial step as a fraction of each dim's scaled width.
    pub step_fraction: f64,
    /// Stop once every step is below this (scaled units).
    pub tol: f64,
    /// Maximum number of distinct evaluations.
    pub budget: usize,
}

impl Default for HjOptions {
    fn default() -> Self {
        HjOptions {
            step_fraction: 0.25,
            tol: 1e-3,
            budget: 500,
        }
    }
}

/// Memoizing, budget-limited view of the loss. Repeated points (common once
/// integral dims round together) are served from the cache and not counted.
struct Counter<'a, E: Evaluate> {
    eval: &'a E,
    space: &'a SearchSpace,
    budget: usize,
    cache: HashMap<Vec<u64>, f64>,
    trace: Vec<TraceEntry>,
}

impl<E: Evaluate> Counter<'_, E> {
    /// `None` once the budget is spent.
    fn loss(&mut self, x: &[f64]) -> Option<f64> {
        let natural = self.space.natural(&CandidateConfig { values: x.to_vec() });
        let key: Vec<u64> = natural.iter().map(|v| v.to_bits()).collect();
        if let Some(&l) = self.cache.get(&key) {
            return Some(l);
        }
        if self.trace.len() >= self.budget {
            return None;
        }
        let l = self.eval.loss(&natural);
        let l = if l.is_nan() { f64::INFINITY } else { l };
        self.cache.insert(key, l);
        self.trace.push(TraceEntry { values: natural, loss: l });
        Some(l)
    }
}

/// Coordinate-wise probe around `x`; keeps the first improving direction per
/// dim. Returns `None` when the budget ran out.
fn explore<E: Evaluate>(
    c: &mut Counter<'_, E>,
    space: &SearchSpace,
    steps: &[f64],
    mut x: Vec<f64>,
    mut fx: f64,
) -> Option<(Vec<f64>, f64)> {
    for i in 0..x.len() {
        for dir in [1.0, -1.0] {
            let mut y = x.clone();
            y[i] += dir * steps[i];
            space.clamp(&mut y);
            if y[i] == x[i] {
                continue;
            }
            let fy = c.loss(&y)?;
            if fy < fx {
                x = y;
                fx = fy;
                break;
            }
        }
    }
    Some((x, fx))
}

/// Hooke-Jeeves pattern search in scaled coordinates starting from `init`.
pub fn hooke_jeeves<E: Evaluate>(
    eval: &E,
    space: &SearchSpace,
    init: &CandidateConfig,
    opts: &HjOptions,
) -> Result<TuneResult> {
    if space.is_empty() {
        return Err(Error::InvalidArgument("search space has no dimensions".into()));
    }
    if opts.budget < 1 {
        return Err(Error::InvalidArgument("evaluation budget must be >= 1".into()));
    }
    if !(opts.tol > 0.0 && opts.step_fraction > 0.0) {
        return Err(Error::InvalidArgument("tol and step fraction must be > 0".into()));
    }
    if !space.contains(init) {
        return Err(Error::InvalidArgument("initial point lies outside the search space".into()));
    }
    let start = Instant::now();
    let mut c = Counter {
        eval,
        space,
        budget: opts.budget,
        cache: HashMap::new(),
        trace: Vec::new(),
    };
    let mut steps: Vec<f64> = space.dims.iter().map(|d| opts.step_fraction * d.width()).collect();
    let mut base = init.values.clone();
    let mut f_base = c.loss(&base).expect("budget >= 1");

    'search: while steps.iter().any(|&s| s >= opts.tol) {
        let Some((x, fx)) = explore(&mut c, space, &steps, base.clone(), f_base) else {
            break;
        };
        if fx < f_base {
            // pattern moves: keep stepping along the successful direction
            let (mut prev, mut cur, mut f_cur) = (base, x, fx);
            loop {
                let mut p: Vec<f64> = cur.iter().zip(&prev).map(|(a, b)| 2.0 * a - b).collect();
                space.clamp(&mut p);
                let Some(fp) = c.loss(&p) else { break 'search };
                let Some((y, fy)) = explore(&mut c, space, &steps, p, fp) else { break 'search };
                // rounding can land the probe a few ulps from `cur`; that is
                // the same lattice point, not progress
                let moved = y.iter().zip(&cur).zip(&steps).any(|((a, b), s)| (a - b).abs() > 0.5 * s);
                if fy < f_cur && moved {
                    prev = cur;
                    cur = y;
                    f_cur = fy;
                } else {
                    break;
                }
            }
            base = cur;
            f_base = f_cur;
        } else {
            for s in &mut steps {
                *s *= 0.5;
            }
        }
    }
    Ok(TuneResult::from_trace(space.names(), c.trace, start.elapsed().as_secs_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuner::space::{Dim, Scale};
    use proptest::prelude::*;

    fn boxed(bounds: &[(f64, f64)]) -> SearchSpace {
        SearchSpace::new(
            bounds
                .iter()
                .enumerate()
                .map(|(i, &(lo, hi))| Dim::new(&format!("x{i}"), lo, hi, Scale::Linear, false).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn one_dimensional_quadratic() {
        let space = boxed(&[(0.0, 10.0)]);
        let f = |x: &[f64]| (x[0] - 3.0).powi(2);
        let r = hooke_jeeves(&f, &space, &CandidateConfig { values: vec![0.0] }, &HjOptions::default()).unwrap();
        assert!((r.best[0] - 3.0).abs() < 1e-2);
        assert!(r.n_evals <= 500);
    }

    #[test]
    fn two_dimensional_quadratic() {
        let space = boxed(&[(-5.0, 5.0), (-5.0, 5.0)]);
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2);
        let r = hooke_jeeves(&f, &space, &space.center(), &HjOptions::default()).unwrap();
        assert!((r.best[0] - 1.0).abs() < 1e-2 && (r.best[1] + 2.0).abs() < 1e-2);
    }

    #[test]
    fn stationary_start() {
        let space = boxed(&[(-5.0, 5.0), (-5.0, 5.0)]);
        let f = |x: &[f64]| x[0] * x[0] + 2.0 * x[1] * x[1];
        let r = hooke_jeeves(&f, &space, &space.center(), &HjOptions::default()).unwrap();
        assert_eq!(r.best, vec![0.0, 0.0]);
        assert_eq!(r.best_loss, 0.0);
        assert_eq!(r.trace[0].loss, 0.0);
    }

    #[test]
    fn minimizer_on_the_boundary() {
        let space = boxed(&[(0.0, 1.0)]);
        let f = |x: &[f64]| (x[0] + 4.0).powi(2);
        let r = hooke_jeeves(&f, &space, &space.center(), &HjOptions::default()).unwrap();
        assert_eq!(r.best, vec![0.0]);
    }

    #[test]
    fn budget_is_respected() {
        let space = boxed(&[(-5.0, 5.0); 3]);
        let f = |x: &[f64]| x.iter().map(|v| (v - 0.3).powi(2)).sum::<f64>();
        let opts = HjOptions { budget: 7, ..HjOptions::default() };
        let r = hooke_jeeves(&f, &space, &space.center(), &opts).unwrap();
        assert_eq!(r.n_evals, 7);
    }

    #[test]
    fn integral_dims_stop_costing_once_steps_are_small() {
        let space = SearchSpace::new(vec![Dim::new("k", 1.0, 100.0, Scale::Linear, true).unwrap()]).unwrap();
        let f = |x: &[f64]| (x[0] - 37.0).abs();
        let opts = HjOptions { tol: 1e-9, ..HjOptions::default() };
        let r = hooke_jeeves(&f, &space, &space.center(), &opts).unwrap();
        assert_eq!(r.best, vec![37.0]);
        assert!(r.n_evals < 60, "{}", r.n_evals);
    }

    #[test]
    fn invalid_inputs() {
        let f = |_: &[f64]| 0.0;
        let empty = SearchSpace::new(vec![]).unwrap();
        let c = CandidateConfig { values: vec![] };
        assert!(hooke_jeeves(&f, &empty, &c, &HjOptions::default()).is_err());
        let space = boxed(&[(0.0, 1.0)]);
        let opts = HjOptions { budget: 0, ..HjOptions::default() };
        assert!(hooke_jeeves(&f, &space, &space.center(), &opts).is_err());
        assert!(hooke_jeeves(&f, &space, &CandidateConfig { values: vec![2.0] }, &HjOptions::default()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn convex_separable_quadratics(
            params in prop::collection::vec((0.1f64..10.0, -4.0f64..4.0), 1..5),
            start in prop::collection::vec(-5.0f64..5.0, 5),
        ) {
            let space = boxed(&vec![(-5.0, 5.0); params.len()]);
            let f = |x: &[f64]| params.iter().zip(x).map(|((a, m), v)| a * (v - m).powi(2)).sum::<f64>();
            let init = CandidateConfig { values: start[..params.len()].to_vec() };
            let opts = HjOptions { tol: 1e-4, budget: 500, ..HjOptions::default() };
            let r = hooke_jeeves(&f, &space, &init, &opts).unwrap();
            prop_assert!(r.best_loss <= 1e-4);
            prop_assert!(r.n_evals <= 500);
            let mut running = f64::INFINITY;
            for e in &r.trace {
                prop_assert!(e.values.iter().all(|v| (-5.0..=5.0).contains(v)));
                running = running.min(e.loss);
            }
            prop_assert_eq!(running, r.best_loss);
        }
    }
}
