//! Maximum-likelihood fitting by differential evolution, multi-seed
//! consensus and information-criterion ranking.

pub mod de;
mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{DistributionModel, Family, Lp3Space, ModelError};
use crate::hydrodata::PeakDataset;
use crate::likelihood::{LikelihoodConfig, LikelihoodError, PreparedLikelihood};

pub use search::{default_bounds, from_params, to_params};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("invalid fit configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Likelihood(#[from] LikelihoodError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{family}: every seed ended infeasible ({diagnostics})")]
    Infeasible { family: Family, diagnostics: String },
}

/// A search coordinate held at a fixed value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedParam {
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// Search box per coordinate; `None` derives one from the data.
    pub bounds: Option<Vec<(f64, f64)>>,
    /// `None` uses 10 × the number of free coordinates.
    pub population_size: Option<usize>,
    pub max_generations: usize,
    pub mutation_factor: f64,
    pub crossover_rate: f64,
    pub seeds: Vec<u64>,
    /// Largest relative spread of per-seed log-likelihoods still reported as converged.
    pub convergence_tol: f64,
    /// Relative spread of the DE population objective that ends a run early.
    pub stop_tol: f64,
    pub fixed: Vec<FixedParam>,
    pub lp3_space: Lp3Space,
    /// Smallest spread of a mixture component relative to its location;
    /// narrower components are infeasible. 0 disables the check.
    pub min_component_spread: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            bounds: None,
            population_size: None,
            max_generations: 2000,
            mutation_factor: 0.8,
            crossover_rate: 0.9,
            seeds: vec![1, 2, 3, 4],
            convergence_tol: 0.01,
            stop_tol: 1e-10,
            fixed: Vec::new(),
            lp3_space: Lp3Space::Log10,
            min_component_spread: 0.1,
        }
    }
}

impl FitConfig {
    pub fn validate(&self, family: Family) -> Result<(), FitError> {
        let bad = |m: String| Err(FitError::Config(m));
        if let Some(b) = &self.bounds {
            if b.len() != family.param_count() {
                return bad(format!(
                    "{family} needs {} bounds, got {}",
                    family.param_count(),
                    b.len()
                ));
            }
            if let Some((lo, hi)) = b.iter().find(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi)) {
                return bad(format!("bounds must be finite with lower < upper, got ({lo}, {hi})"));
            }
        }
        if let Some(n) = self.population_size {
            if n < 4 {
                return bad(format!("population_size must be >= 4, got {n}"));
            }
        }
        if !(self.crossover_rate > 0.0 && self.crossover_rate <= 1.0) {
            return bad(format!(
                "crossover_rate must lie in (0, 1], got {}",
                self.crossover_rate
            ));
        }
        if !(self.mutation_factor > 0.0 && self.mutation_factor < 2.0) {
            return bad(format!(
                "mutation_factor must lie in (0, 2), got {}",
                self.mutation_factor
            ));
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if !(self.convergence_tol >= 0.0 && self.stop_tol >= 0.0 && self.min_component_spread >= 0.0) {
            return bad("tolerances must be non-negative".into());
        }
        for f in &self.fixed {
            if f.index >= family.param_count() || !f.value.is_finite() {
                return bad(format!(
                    "fixed coordinate {} = {} is invalid for {family}",
                    f.index, f.value
                ));
            }
        }
        Ok(())
    }
}

/// One differential-evolution run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub loglik: f64,
    pub params: Vec<f64>,
    pub generations: usize,
    pub evaluations: usize,
    /// Population collapsed before the generation limit.
    pub settled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub model: DistributionModel,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub k: usize,
    pub n: usize,
    pub per_seed_logliks: Vec<f64>,
    pub converged: bool,
    pub runs: Vec<SeedRun>,
}

impl FittedModel {
    pub fn family(&self) -> Family {
        self.model.family()
    }

    /// Relative spread of the per-seed log-likelihoods over feasible runs.
    pub fn seed_spread(&self) -> f64 {
        seed_spread(&self.per_seed_logliks)
    }
}

fn seed_spread(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    if lo.is_finite() {
        (hi - lo) / hi.abs().max(f64::MIN_POSITIVE)
    } else {
        f64::INFINITY
    }
}

/// `(aic, bic)` for log-likelihood `loglik`, `k` parameters and `n` records.
pub fn information_criteria(loglik: f64, k: usize, n: usize) -> (f64, f64) {
    let k = k as f64;
    (2.0 * k - 2.0 * loglik, k * (n as f64).ln() - 2.0 * loglik)
}

/// Fits `family` to `dataset` by maximum likelihood.
pub fn fit_mle(
    family: Family,
    dataset: &PeakDataset,
    likelihood: &LikelihoodConfig,
    config: &FitConfig,
) -> Result<FittedModel, FitError> {
    let prepared = PreparedLikelihood::new(dataset, likelihood)?;
    fit_prepared(family, dataset, &prepared, config)
}

/// [`fit_mle`] with an already discretized likelihood.
pub fn fit_prepared(
    family: Family,
    dataset: &PeakDataset,
    prepared: &PreparedLikelihood,
    config: &FitConfig,
) -> Result<FittedModel, FitError> {
    config.validate(family)?;
    let space = config.lp3_space;
    let bounds = config
        .bounds
        .clone()
        .unwrap_or_else(|| default_bounds(family, dataset, space));
    let mut full: Vec<Option<f64>> = vec![None; family.param_count()];
    for f in &config.fixed {
        full[f.index] = Some(f.value);
    }
    let free: Vec<usize> = (0..full.len()).filter(|&i| full[i].is_none()).collect();
    if free.is_empty() {
        return Err(FitError::Config("every coordinate is fixed".into()));
    }
    let lower: Vec<f64> = free.iter().map(|&i| bounds[i].0).collect();
    let upper: Vec<f64> = free.iter().map(|&i| bounds[i].1).collect();
    let expand = |x: &[f64]| {
        let mut v: Vec<f64> = full.iter().map(|f| f.unwrap_or(0.0)).collect();
        for (&i, &xi) in free.iter().zip(x) {
            v[i] = xi;
        }
        to_params(family, &v)
    };
    let objective = |x: &[f64]| match DistributionModel::with_space(family, expand(x), space) {
        Ok(m) if resolvable(&m, config.min_component_spread) => prepared.loglik(&m),
        _ => f64::NEG_INFINITY,
    };
    let settings = de::DeSettings {
        population: config.population_size.unwrap_or(10 * free.len()).max(4),
        max_generations: config.max_generations,
        mutation: config.mutation_factor,
        crossover: config.crossover_rate,
        stop_tol: config.stop_tol,
        init_attempts: 1000,
    };

    let runs: Vec<SeedRun> = config
        .seeds
        .iter()
        .map(|&seed| {
            let out = de::maximize(objective, &lower, &upper, &settings, seed);
            SeedRun {
                seed,
                loglik: out.value,
                params: expand(&out.best),
                generations: out.generations,
                evaluations: out.evaluations,
                settled: out.settled,
            }
        })
        .collect();

    let best = runs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.loglik > f64::NEG_INFINITY)
        .fold(None::<usize>, |b, (i, r)| match b {
            Some(j) if runs[j].loglik >= r.loglik => Some(j),
            _ => Some(i),
        })
        .ok_or_else(|| FitError::Infeasible {
            family,
            diagnostics: format!(
                "seeds {:?}, {} evaluations each",
                config.seeds,
                runs.first().map_or(0, |r| r.evaluations)
            ),
        })?;
    let best = &runs[best];
    let mut params = best.params.clone();
    if family == Family::Tcev {
        params = search::canonical_tcev(params);
    }
    let model = DistributionModel::with_space(family, params, space)?;
    let per_seed_logliks: Vec<f64> = runs.iter().map(|r| r.loglik).collect();
    let k = family.param_count();
    let n = dataset.record_count();
    let (aic, bic) = information_criteria(best.loglik, k, n);
    Ok(FittedModel {
        model,
        loglik: best.loglik,
        aic,
        bic,
        k,
        n,
        converged: seed_spread(&per_seed_logliks) <= config.convergence_tol,
        per_seed_logliks,
        runs,
    })
}

/// Whether every mixture component is at least as wide as a relative
/// measurement error of `r` at its own location. A narrower component can
/// sit on a single error node and drive the likelihood without bound.
fn resolvable(m: &DistributionModel, r: f64) -> bool {
    if r == 0.0 || !m.family().is_mixture() {
        return true;
    }
    let p = m.params();
    let weight = p[6];
    [(&p[0..3], weight > 0.0), (&p[3..6], weight < 1.0)]
        .into_iter()
        .filter(|(_, active)| *active)
        .all(|(c, _)| match (m.family(), m.lp3_space()) {
            (Family::MixedGev, _) | (_, Lp3Space::Raw) => {
                let spread = if m.family() == Family::MixedGev {
                    c[1]
                } else {
                    c[1].sqrt() * c[2].abs()
                };
                let center = if m.family() == Family::MixedGev {
                    c[0]
                } else {
                    c[0] + c[1] * c[2]
                };
                spread >= r * center.abs()
            }
            _ => c[1].sqrt() * c[2].abs() >= r / std::f64::consts::LN_10,
        })
}

/// Criterion values for one candidate model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub family: Family,
    pub k: usize,
    pub aic: f64,
    pub bic: f64,
}

impl From<&FittedModel> for ModelScore {
    fn from(f: &FittedModel) -> Self {
        ModelScore {
            family: f.family(),
            k: f.k,
            aic: f.aic,
            bic: f.bic,
        }
    }
}

/// Families ordered best-first under each criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranking {
    pub by_aic: Vec<Family>,
    pub by_bic: Vec<Family>,
}

impl Ranking {
    /// 1-based rank of `family` under AIC and BIC.
    pub fn position(&self, family: Family) -> Option<(usize, usize)> {
        let a = self.by_aic.iter().position(|&f| f == family)?;
        let b = self.by_bic.iter().position(|&f| f == family)?;
        Some((a + 1, b + 1))
    }
}

/// Ascending AIC and BIC orderings; ties go to fewer parameters, then to
/// the family declaration order.
pub fn rank_models(scores: &[ModelScore]) -> Ranking {
    let order = |key: fn(&ModelScore) -> f64| {
        let mut v: Vec<&ModelScore> = scores.iter().collect();
        v.sort_by(|a, b| {
            key(a)
                .total_cmp(&key(b))
                .then(a.k.cmp(&b.k))
                .then(a.family.cmp(&b.family))
        });
        v.into_iter().map(|s| s.family).collect()
    };
    Ranking {
        by_aic: order(|s| s.aic),
        by_bic: order(|s| s.bic),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria_arithmetic() {
        let (aic, bic) = information_criteria(0.0, 2, 1);
        assert_eq!((aic, bic), (4.0, 0.0));
        let (aic, bic) = information_criteria(-506.4815, 7, 85);
        assert!((aic - 1026.963).abs() < 1e-9);
        assert!((bic - 1044.062).abs() < 1e-3);
    }

    #[test]
    fn ranking_tie_breaks() {
        let s = |family, k, aic| ModelScore {
            family,
            k,
            aic,
            bic: aic,
        };
        let r = rank_models(&[s(Family::Gev, 3, 10.0), s(Family::Ln2, 2, 5.0)]);
        assert_eq!(r.by_aic, vec![Family::Ln2, Family::Gev]);
        let r = rank_models(&[s(Family::MixedGev, 7, 5.0), s(Family::Gev, 3, 5.0)]);
        assert_eq!(r.by_aic, vec![Family::Gev, Family::MixedGev]);
        let r = rank_models(&[s(Family::Gev, 3, 5.0), s(Family::Lp3, 3, 5.0)]);
        assert_eq!(r.by_bic, vec![Family::Lp3, Family::Gev]);
        assert_eq!(r.position(Family::Gev), Some((2, 2)));
    }

    #[test]
    fn config_validation() {
        let ok = FitConfig::default();
        assert!(ok.validate(Family::Gev).is_ok());
        for bad in [
            FitConfig {
                population_size: Some(3),
                ..ok.clone()
            },
            FitConfig {
                crossover_rate: 0.0,
                ..ok.clone()
            },
            FitConfig {
                mutation_factor: 2.0,
                ..ok.clone()
            },
            FitConfig {
                bounds: Some(vec![(0.0, 1.0), (1.0, 1.0), (0.0, 1.0)]),
                ..ok.clone()
            },
            FitConfig {
                seeds: vec![],
                ..ok.clone()
            },
        ] {
            assert!(bad.validate(Family::Gev).is_err());
        }
    }
}
