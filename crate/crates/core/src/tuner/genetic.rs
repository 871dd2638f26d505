use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::objective::Evaluate;
use super::space::{CandidateConfig, SearchSpace};
use super::{TraceEntry, TuneResult};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaOptions {
    pub population: usize,
    pub generations: usize,
    pub seed: u64,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of the dim's scaled width.
    pub mutation_scale: f64,
    /// BLX extension on each side of the parents' interval.
    pub blend: f64,
    #[serde(default)]
    pub execution: Execution,
}

impl Default for GaOptions {
    fn default() -> Self {
        GaOptions {
            population: 20,
            generations: 25,
            seed: 0,
            mutation_rate: 0.1,
            mutation_scale: 0.1,
            blend: 0.5,
            execution: Execution::default(),
        }
    }
}

impl GaOptions {
    pub fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::InvalidArgument(format!(
                "population must be >= 4, got {}",
                self.population
            )));
        }
        if self.generations < 1 {
            return Err(Error::InvalidArgument("generations must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) || !(self.mutation_scale >= 0.0) || !(self.blend >= 0.0) {
            return Err(Error::InvalidArgument("invalid mutation or blend setting".into()));
        }
        Ok(())
    }
}

/// Index of the lowest loss, first one on ties.
fn argmin(losses: &[f64]) -> usize {
    let mut best = 0;
    for (i, &l) in losses.iter().enumerate() {
        if l < losses[best] {
            best = i;
        }
    }
    best
}

fn tournament(rng: &mut ChaCha8Rng, losses: &[f64]) -> usize {
    let a = rng.random_range(0..losses.len());
    let b = rng.random_range(0..losses.len());
    if losses[b] < losses[a] {
        b
    } else {
        a
    }
}

/// Real-coded genetic algorithm. Random draws happen on one thread in a
/// fixed order; only loss evaluation runs in parallel, so the trace does not
/// depend on the execution mode.
pub fn genetic_search<E: Evaluate>(eval: &E, space: &SearchSpace, opts: &GaOptions) -> Result<TuneResult> {
    opts.validate()?;
    if space.is_empty() {
        return Err(Error::InvalidArgument("search space has no dimensions".into()));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let bounds: Vec<(f64, f64)> = space.dims.iter().map(|d| d.scaled_bounds()).collect();
    let mut trace = Vec::new();

    let evaluate = |points: &[Vec<f64>], trace: &mut Vec<TraceEntry>| -> Vec<f64> {
        let natural: Vec<Vec<f64>> = points
            .iter()
            .map(|p| space.natural(&CandidateConfig { values: p.clone() }))
            .collect();
        let losses = map_indexed(opts.execution, &natural, |_, x| {
            let l = eval.loss(x);
            if l.is_nan() {
                f64::INFINITY
            } else {
                l
            }
        });
        trace.extend(
            natural
                .into_iter()
                .zip(&losses)
                .map(|(values, &loss)| TraceEntry { values, loss }),
        );
        losses
    };

    let mut pop: Vec<Vec<f64>> = (0..opts.population)
        .map(|_| bounds.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect())
        .collect();
    let mut losses = evaluate(&pop, &mut trace);

    for _ in 0..opts.generations {
        let elite = argmin(&losses);
        let mut children = Vec::with_capacity(opts.population - 1);
        while children.len() < opts.population - 1 {
            let p1 = &pop[tournament(&mut rng, &losses)];
            let p2 = &pop[tournament(&mut rng, &losses)];
            let mut child: Vec<f64> = (0..bounds.len())
                .map(|i| {
                    let (a, b) = (p1[i].min(p2[i]), p1[i].max(p2[i]));
                    let ext = opts.blend * (b - a);
                    let lo = (a - ext).max(bounds[i].0);
                    let hi = (b + ext).min(bounds[i].1);
                    if hi > lo {
                        rng.random_range(lo..=hi)
                    } else {
                        lo
                    }
                })
                .collect();
            for (i, gene) in child.iter_mut().enumerate() {
                if rng.random::<f64>() < opts.mutation_rate {
                    let sd = opts.mutation_scale * (bounds[i].1 - bounds[i].0);
                    if sd > 0.0 {
                        *gene += Normal::new(0.0, sd).expect("finite sd").sample(&mut rng);
                    }
                }
            }
            space.clamp(&mut child);
            children.push(child);
        }
        let child_losses = evaluate(&children, &mut trace);
        let elite_point = pop[elite].clone();
        let elite_loss = losses[elite];
        pop = std::iter::once(elite_point).chain(children).collect();
        losses = std::iter::once(elite_loss).chain(child_losses).collect();
    }
    Ok(TuneResult::from_trace(space.names(), trace, start.elapsed().as_secs_f64()))
}
