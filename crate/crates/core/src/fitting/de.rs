//! rand/1/bin differential evolution, maximizing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeSettings {
    pub population: usize,
    pub max_generations: usize,
    pub mutation: f64,
    pub crossover: f64,
    /// Stop once `max - min` of the population objective is within
    /// `stop_tol · max(|best|, 1)`.
    pub stop_tol: f64,
    /// Draws allowed per member when looking for a feasible starting point.
    pub init_attempts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeOutcome {
    pub best: Vec<f64>,
    pub value: f64,
    pub generations: usize,
    pub evaluations: usize,
    /// The population spread met `stop_tol` before `max_generations`.
    pub settled: bool,
}

/// Folds `v` back into `[lo, hi]` by mirroring at the violated bound,
/// falling back to a uniform draw when one reflection is not enough.
fn reflect(v: f64, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> f64 {
    let r = if v < lo {
        2.0 * lo - v
    } else if v > hi {
        2.0 * hi - v
    } else {
        return v;
    };
    if (lo..=hi).contains(&r) {
        r
    } else {
        rng.random_range(lo..=hi)
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Maximizes `f` over the box `[lower, upper]`. `-∞` (or NaN) marks an
/// infeasible point; such trials never replace a feasible member.
///
/// Objective evaluations within a generation run in parallel; everything
/// that touches the RNG or the population is sequential, so the result
/// depends only on the seed.
pub fn maximize<F>(f: F, lower: &[f64], upper: &[f64], settings: &DeSettings, seed: u64) -> DeOutcome
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = lower.len();
    let np = settings.population;
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluations = 0;

    let mut pop: Vec<Vec<f64>> = Vec::with_capacity(np);
    let mut fit: Vec<f64> = Vec::with_capacity(np);
    for _ in 0..np {
        let mut x = vec![0.0; dim];
        let mut v = f64::NEG_INFINITY;
        for _ in 0..settings.init_attempts.max(1) {
            for j in 0..dim {
                x[j] = rng.random_range(lower[j]..=upper[j]);
            }
            v = eval(&x);
            evaluations += 1;
            if v > f64::NEG_INFINITY {
                break;
            }
        }
        pop.push(x);
        fit.push(v);
    }

    let mut generations = 0;
    let mut settled = false;
    let mut trials: Vec<Vec<f64>> = vec![vec![0.0; dim]; np];
    while generations < settings.max_generations {
        if converged(&fit, settings.stop_tol) {
            settled = true;
            break;
        }
        for (i, trial) in trials.iter_mut().enumerate() {
            let (r1, r2, r3) = distinct_three(np, i, &mut rng);
            let jrand = rng.random_range(0..dim);
            for j in 0..dim {
                trial[j] = if j == jrand || rng.random::<f64>() < settings.crossover {
                    let v = pop[r1][j] + settings.mutation * (pop[r2][j] - pop[r3][j]);
                    reflect(v, lower[j], upper[j], &mut rng)
                } else {
                    pop[i][j]
                };
            }
        }
        let values: Vec<f64> = trials.par_iter().map(|t| eval(t)).collect();
        evaluations += np;
        for i in 0..np {
            if values[i] >= fit[i] {
                fit[i] = values[i];
                pop[i].copy_from_slice(&trials[i]);
            }
        }
        generations += 1;
    }
    if !settled && converged(&fit, settings.stop_tol) {
        settled = true;
    }
    let b = argmax(&fit);
    DeOutcome {
        best: pop[b].clone(),
        value: fit[b],
        generations,
        evaluations,
        settled,
    }
}

fn converged(fit: &[f64], tol: f64) -> bool {
    let hi = fit.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = fit.iter().copied().fold(f64::INFINITY, f64::min);
    lo.is_finite() && hi - lo <= tol * hi.abs().max(1.0)
}

fn distinct_three(np: usize, i: usize, rng: &mut ChaCha8Rng) -> (usize, usize, usize) {
    let pick = |rng: &mut ChaCha8Rng, taken: &[usize]| loop {
        let r = rng.random_range(0..np);
        if !taken.contains(&r) {
            return r;
        }
    };
    let r1 = pick(rng, &[i]);
    let r2 = pick(rng, &[i, r1]);
    let r3 = pick(rng, &[i, r1, r2]);
    (r1, r2, r3)
}
