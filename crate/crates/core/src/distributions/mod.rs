//! The six candidate flood-frequency families.
//!
//! Every family is evaluated through [`DistributionModel`], a family tag plus
//! an ordered parameter vector. Parameter order per family:
//!
//! | family     | parameters                                   |
//! |------------|----------------------------------------------|
//! | `LN2`      | `(mu, sigma)` of ln-discharge                |
//! | `LP3`      | `(tau, alpha, beta)`                         |
//! | `GEV`      | `(loc, scale, shape)`                        |
//! | `TCEV`     | `(lambda1, theta1, lambda2, theta2)`         |
//! | `MixedLP3` | `(tau1, alpha1, beta1, tau2, alpha2, beta2, weight)` |
//! | `MixedGEV` | `(loc1, scale1, shape1, loc2, scale2, shape2, weight)` |
//!
//! Mixture weights refer to the first component. Mixtures are stored with
//! their components ordered by location so that equivalent labelings
//! compare equal.

mod gev;
mod lognormal;
mod mixture;
mod pearson;
mod tcev;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gev::{Gev, GUMBEL_SHAPE_EPS};
pub use lognormal::LogNormal;
pub use mixture::Mixture;
pub use pearson::{Lp3Space, PearsonIII};
pub use tcev::Tcev;

/// Common interface of the univariate discharge distributions.
pub trait Univariate {
    /// Log density; `-inf` outside the support.
    fn ln_pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    /// Survival function `1 - F(x)`, evaluated without cancellation.
    fn sf(&self, x: f64) -> f64;
    /// Inverse cdf for `p` in `(0, 1)`.
    fn quantile(&self, p: f64) -> f64;
    /// Inverse survival function for `q` in `(0, 1)`.
    fn isf(&self, q: f64) -> f64;
    /// Closed support interval (possibly infinite ends).
    fn support(&self) -> (f64, f64);

    fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{family} takes {expected} parameters, got {got}")]
    ParamCount {
        family: Family,
        expected: usize,
        got: usize,
    },
    #[error("invalid {family} parameter {name} = {value}: {reason}")]
    InvalidParameter {
        family: Family,
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("probability {0} outside (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("sample count must be at least 1")]
    EmptySample,
    #[error("unknown distribution family {0:?}")]
    UnknownFamily(String),
}

/// Family tag. Declaration order is the tie-break order used when ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "LN2")]
    Ln2,
    #[serde(rename = "LP3")]
    Lp3,
    #[serde(rename = "GEV")]
    Gev,
    #[serde(rename = "TCEV")]
    Tcev,
    #[serde(rename = "MixedLP3")]
    MixedLp3,
    #[serde(rename = "MixedGEV")]
    MixedGev,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Ln2,
        Family::Lp3,
        Family::Gev,
        Family::Tcev,
        Family::MixedLp3,
        Family::MixedGev,
    ];

    pub fn param_count(self) -> usize {
        match self {
            Family::Ln2 => 2,
            Family::Lp3 | Family::Gev => 3,
            Family::Tcev => 4,
            Family::MixedLp3 | Family::MixedGev => 7,
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Ln2 => &["mu", "sigma"],
            Family::Lp3 => &["tau", "alpha", "beta"],
            Family::Gev => &["loc", "scale", "shape"],
            Family::Tcev => &["lambda1", "theta1", "lambda2", "theta2"],
            Family::MixedLp3 => &["tau1", "alpha1", "beta1", "tau2", "alpha2", "beta2", "weight"],
            Family::MixedGev => &["loc1", "scale1", "shape1", "loc2", "scale2", "shape2", "weight"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Ln2 => "LN2",
            Family::Lp3 => "LP3",
            Family::Gev => "GEV",
            Family::Tcev => "TCEV",
            Family::MixedLp3 => "MixedLP3",
            Family::MixedGev => "MixedGEV",
        }
    }

    pub fn is_mixture(self) -> bool {
        matches!(self, Family::MixedLp3 | Family::MixedGev)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ModelError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Ln2(LogNormal),
    Lp3(PearsonIII),
    Gev(Gev),
    Tcev(Tcev),
    MixedLp3(Mixture<PearsonIII>),
    MixedGev(Mixture<Gev>),
}

/// Wire form: `{"family": "GEV", "params": [..]}`, plus `lp3_space` for the
/// Pearson families when not the default log10.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelSpec {
    family: Family,
    params: Vec<f64>,
    #[serde(default, skip_serializing_if = "is_default_space")]
    lp3_space: Lp3Space,
}

fn is_default_space(s: &Lp3Space) -> bool {
    *s == Lp3Space::default()
}

/// A validated distribution: family tag plus parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub struct DistributionModel {
    family: Family,
    params: Vec<f64>,
    space: Lp3Space,
    kind: Kind,
}

impl TryFrom<ModelSpec> for DistributionModel {
    type Error = ModelError;

    fn try_from(spec: ModelSpec) -> Result<Self, Self::Error> {
        DistributionModel::with_space(spec.family, spec.params, spec.lp3_space)
    }
}

impl From<DistributionModel> for ModelSpec {
    fn from(m: DistributionModel) -> Self {
        ModelSpec {
            family: m.family,
            params: m.params,
            lp3_space: m.space,
        }
    }
}

struct Check {
    family: Family,
}

impl Check {
    fn err(&self, name: &'static str, value: f64, reason: &'static str) -> ModelError {
        ModelError::InvalidParameter {
            family: self.family,
            name,
            value,
            reason,
        }
    }

    fn finite(&self, name: &'static str, v: f64) -> Result<f64, ModelError> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.err(name, v, "must be finite"))
        }
    }

    fn positive(&self, name: &'static str, v: f64) -> Result<f64, ModelError> {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(self.err(name, v, "must be positive and finite"))
        }
    }

    fn non_negative(&self, name: &'static str, v: f64) -> Result<f64, ModelError> {
        if v.is_finite() && v >= 0.0 {
            Ok(v)
        } else {
            Err(self.err(name, v, "must be non-negative and finite"))
        }
    }

    fn nonzero(&self, name: &'static str, v: f64) -> Result<f64, ModelError> {
        if v.is_finite() && v != 0.0 {
            Ok(v)
        } else {
            Err(self.err(name, v, "must be non-zero and finite"))
        }
    }

    fn weight(&self, v: f64) -> Result<f64, ModelError> {
        if (0.0..=1.0).contains(&v) {
            Ok(v)
        } else {
            Err(self.err("weight", v, "must lie in [0, 1]"))
        }
    }

    fn gev(&self, names: [&'static str; 3], p: &[f64]) -> Result<Gev, ModelError> {
        Ok(Gev::new(
            self.finite(names[0], p[0])?,
            self.positive(names[1], p[1])?,
            self.finite(names[2], p[2])?,
        ))
    }

    fn pearson(&self, names: [&'static str; 3], p: &[f64], space: Lp3Space) -> Result<PearsonIII, ModelError> {
        Ok(PearsonIII::new(
            self.finite(names[0], p[0])?,
            self.positive(names[1], p[1])?,
            self.nonzero(names[2], p[2])?,
            space,
        ))
    }
}

impl DistributionModel {
    /// Validates `params` for `family` (LP3 families in log10 space).
    pub fn new(family: Family, params: Vec<f64>) -> Result<Self, ModelError> {
        Self::with_space(family, params, Lp3Space::default())
    }

    pub fn with_space(family: Family, mut params: Vec<f64>, space: Lp3Space) -> Result<Self, ModelError> {
        let expected = family.param_count();
        if params.len() != expected {
            return Err(ModelError::ParamCount {
                family,
                expected,
                got: params.len(),
            });
        }
        let c = Check { family };
        let kind = match family {
            Family::Ln2 => Kind::Ln2(LogNormal::new(
                c.finite("mu", params[0])?,
                c.positive("sigma", params[1])?,
            )),
            Family::Lp3 => Kind::Lp3(c.pearson(["tau", "alpha", "beta"], &params, space)?),
            Family::Gev => Kind::Gev(c.gev(["loc", "scale", "shape"], &params)?),
            Family::Tcev => {
                let l1 = c.non_negative("lambda1", params[0])?;
                let t1 = c.positive("theta1", params[1])?;
                let l2 = c.non_negative("lambda2", params[2])?;
                let t2 = c.positive("theta2", params[3])?;
                if l1 == 0.0 && l2 == 0.0 {
                    return Err(c.err("lambda1", l1, "at least one component rate must be positive"));
                }
                Kind::Tcev(Tcev::new(l1, t1, l2, t2))
            }
            Family::MixedLp3 | Family::MixedGev => {
                let w = c.weight(params[6])?;
                if params[0] > params[3] {
                    params.swap(0, 3);
                    params.swap(1, 4);
                    params.swap(2, 5);
                    params[6] = 1.0 - w;
                }
                let w = params[6];
                if family == Family::MixedGev {
                    let a = c.gev(["loc1", "scale1", "shape1"], &params[0..3])?;
                    let b = c.gev(["loc2", "scale2", "shape2"], &params[3..6])?;
                    Kind::MixedGev(Mixture::new(a, b, w))
                } else {
                    let a = c.pearson(["tau1", "alpha1", "beta1"], &params[0..3], space)?;
                    let b = c.pearson(["tau2", "alpha2", "beta2"], &params[3..6], space)?;
                    Kind::MixedLp3(Mixture::new(a, b, w))
                }
            }
        };
        Ok(DistributionModel {
            family,
            params,
            space,
            kind,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Parameters in canonical order (mixture components sorted by location).
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn lp3_space(&self) -> Lp3Space {
        self.space
    }

    pub fn param_count(&self) -> usize {
        self.family.param_count()
    }

    fn dist(&self) -> &dyn Univariate {
        match &self.kind {
            Kind::Ln2(d) => d,
            Kind::Lp3(d) => d,
            Kind::Gev(d) => d,
            Kind::Tcev(d) => d,
            Kind::MixedLp3(d) => d,
            Kind::MixedGev(d) => d,
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.dist().pdf(x)
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        self.dist().ln_pdf(x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.dist().cdf(x)
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.dist().sf(x)
    }

    pub fn support(&self) -> (f64, f64) {
        self.dist().support()
    }

    pub fn quantile(&self, p: f64) -> Result<f64, ModelError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(ModelError::ProbabilityOutOfRange(p));
        }
        Ok(self.dist().quantile(p))
    }

    /// Discharge exceeded with annual probability `q`.
    pub fn isf(&self, q: f64) -> Result<f64, ModelError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(ModelError::ProbabilityOutOfRange(q));
        }
        Ok(self.dist().isf(q))
    }

    /// Discharge with return period `years` (annual exceedance `1 / years`).
    pub fn return_level(&self, years: f64) -> Result<f64, ModelError> {
        self.isf(1.0 / years)
    }

    /// `count` deterministic draws for `seed`. Mixtures pick a component by
    /// weight, then invert that component's cdf.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<f64>, ModelError> {
        if count == 0 {
            return Err(ModelError::EmptySample);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draws = Vec::with_capacity(count);
        for _ in 0..count {
            let x = match &self.kind {
                Kind::MixedGev(m) => sample_mixture(m, &mut rng),
                Kind::MixedLp3(m) => sample_mixture(m, &mut rng),
                _ => self.dist().quantile(open_unit(&mut rng)),
            };
            draws.push(x);
        }
        Ok(draws)
    }
}

fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn sample_mixture<C: Univariate, R: Rng>(m: &Mixture<C>, rng: &mut R) -> f64 {
    let pick: f64 = rng.random();
    let u = open_unit(rng);
    if pick < m.weight {
        m.first.quantile(u)
    } else {
        m.second.quantile(u)
    }
}
