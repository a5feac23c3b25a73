//! Log-likelihood of a flood record under a candidate distribution.
//!
//! Measurement errors are integrated out by discretizing each observation
//! into weighted nodes. Every term returns `f64::NEG_INFINITY` when the
//! parameters cannot produce the data; the optimizer treats that value as
//! infeasible.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::DistributionModel;
use crate::hydrodata::{
    AgeDistribution, AnnualPeak, CensoringSpec, ErrorModel, HistoricalFlood, PaleoBound, PeakDataset,
};
use crate::numeric::ln_binomial;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LikelihoodError {
    #[error("node count must be an odd integer >= 1, got {0}")]
    NodeCount(usize),
    #[error("cannot discretize error around non-positive value {0}")]
    NonPositiveCenter(f64),
    #[error("invalid error model: {0}")]
    ErrorModel(String),
}

/// Quadrature node counts for each record type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LikelihoodConfig {
    pub gage_nodes: usize,
    pub historical_nodes: usize,
    pub paleo_discharge_nodes: usize,
    pub paleo_age_nodes: usize,
    pub node_weights: NodeWeights,
}

/// Weighting of the evenly spaced normal-error nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeWeights {
    /// Proportional to the normal density at each node.
    #[default]
    Density,
    /// Density times closed-rule end corrections (3/8, 7/6, 23/24 at each
    /// end when there are at least 7 nodes, trapezoid halves otherwise).
    /// Converges faster in the node count.
    EndCorrected,
}

impl Default for LikelihoodConfig {
    fn default() -> Self {
        LikelihoodConfig::uniform(11)
    }
}

impl LikelihoodConfig {
    pub fn uniform(n: usize) -> Self {
        LikelihoodConfig {
            gage_nodes: n,
            historical_nodes: n,
            paleo_discharge_nodes: n,
            paleo_age_nodes: n,
            node_weights: NodeWeights::Density,
        }
    }

    pub fn validate(&self) -> Result<(), LikelihoodError> {
        for n in [
            self.gage_nodes,
            self.historical_nodes,
            self.paleo_discharge_nodes,
            self.paleo_age_nodes,
        ] {
            check_count(n)?;
        }
        Ok(())
    }
}

fn check_count(n: usize) -> Result<(), LikelihoodError> {
    if n % 2 == 1 {
        Ok(())
    } else {
        Err(LikelihoodError::NodeCount(n))
    }
}

/// Discrete approximation of an observation's error distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedError {
    pub nodes: Vec<f64>,
    /// Sums to one.
    pub weights: Vec<f64>,
}

impl DiscretizedError {
    fn point(x: f64) -> Self {
        DiscretizedError {
            nodes: vec![x],
            weights: vec![1.0],
        }
    }

    fn normalized(nodes: Vec<f64>, raw: Vec<f64>) -> Self {
        let total: f64 = raw.iter().sum();
        DiscretizedError {
            nodes,
            weights: raw.into_iter().map(|w| w / total).collect(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| x * w).sum()
    }
}

/// Midpoints of `n` equal cells on `[lo, hi]`.
fn midpoints(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect()
}

fn triangle_density(x: f64, lower: f64, mode: f64, upper: f64) -> f64 {
    if x < mode {
        if mode > lower {
            (x - lower) / (mode - lower)
        } else {
            1.0
        }
    } else if upper > mode {
        (upper - x) / (upper - mode)
    } else {
        1.0
    }
}

/// Quadrature factor for node `i` of `n` on a closed grid: fourth-order
/// end corrections when the grid is long enough, trapezoid otherwise.
fn end_correction(i: usize, n: usize) -> f64 {
    let from_end = i.min(n - 1 - i);
    if n >= 7 {
        [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0]
            .get(from_end)
            .copied()
            .unwrap_or(1.0)
    } else if from_end == 0 {
        0.5
    } else {
        1.0
    }
}

/// Discretizes the error of an observation centred at `center`.
///
/// Normal errors use `node_count` evenly spaced nodes across ±3σ with
/// density weights; nodes at or below zero discharge are dropped before the
/// weights are renormalized. Triangular errors use cell midpoints of the
/// bounds. `None` gives the single node `center`.
pub fn discretize_error(
    center: f64,
    model: &ErrorModel,
    node_count: usize,
) -> Result<DiscretizedError, LikelihoodError> {
    discretize_error_with(center, model, node_count, NodeWeights::Density)
}

/// [`discretize_error`] with a choice of normal-node weighting.
pub fn discretize_error_with(
    center: f64,
    model: &ErrorModel,
    node_count: usize,
    weighting: NodeWeights,
) -> Result<DiscretizedError, LikelihoodError> {
    check_count(node_count)?;
    if !(center > 0.0 && center.is_finite()) {
        return Err(LikelihoodError::NonPositiveCenter(center));
    }
    model
        .validate()
        .map_err(|e| LikelihoodError::ErrorModel(e.to_string()))?;
    match *model {
        ErrorModel::None => Ok(DiscretizedError::point(center)),
        ErrorModel::NormalCv { cv } => {
            let sigma = cv * center;
            if sigma == 0.0 || node_count == 1 {
                return Ok(DiscretizedError::point(center));
            }
            let half = (node_count / 2) as f64;
            let (nodes, raw): (Vec<f64>, Vec<f64>) = (0..node_count)
                .map(|i| {
                    let z = 3.0 * (i as f64 - half) / half;
                    let factor = match weighting {
                        NodeWeights::Density => 1.0,
                        NodeWeights::EndCorrected => end_correction(i, node_count),
                    };
                    (center + sigma * z, factor * (-0.5 * z * z).exp())
                })
                .filter(|(x, _)| *x > 0.0)
                .unzip();
            Ok(DiscretizedError::normalized(nodes, raw))
        }
        ErrorModel::Triangular { lower, mode, upper } => {
            let nodes = midpoints(lower, upper, node_count);
            let raw = nodes.iter().map(|&x| triangle_density(x, lower, mode, upper)).collect();
            Ok(DiscretizedError::normalized(nodes, raw))
        }
    }
}

/// Discretized age of a paleo bound.
pub fn discretize_age(bound: &PaleoBound, node_count: usize) -> Result<DiscretizedError, LikelihoodError> {
    check_count(node_count)?;
    let nodes = midpoints(bound.age_lower, bound.age_upper, node_count);
    let raw = match bound.age_distribution {
        AgeDistribution::Uniform => vec![1.0; node_count],
        AgeDistribution::Triangular => {
            let mid = bound.mean_age();
            nodes
                .iter()
                .map(|&a| triangle_density(a, bound.age_lower, mid, bound.age_upper))
                .collect()
        }
    };
    Ok(DiscretizedError::normalized(nodes, raw))
}

/// Flattened node groups, one group per observation.
#[derive(Debug, Clone, Default)]
struct NodeGroups {
    nodes: Vec<f64>,
    ln_weights: Vec<f64>,
    ends: Vec<usize>,
}

impl NodeGroups {
    fn push(&mut self, d: DiscretizedError) {
        self.nodes.extend(d.nodes);
        self.ln_weights.extend(d.weights.iter().map(|w| w.ln()));
        self.ends.push(self.nodes.len());
    }

    /// `ln Σ_j w_j f(x_j)` for each group, summed; stops at the first `-∞`.
    fn sum_ln_mixed_density(&self, model: &DistributionModel, per_group_offset: f64) -> f64 {
        let mut total = 0.0;
        let mut start = 0;
        let mut buf = [0.0f64; 64];
        for &end in &self.ends {
            let mut hi = f64::NEG_INFINITY;
            let len = end - start;
            let term = if len <= buf.len() {
                for (k, j) in (start..end).enumerate() {
                    let v = self.ln_weights[j] + model.ln_pdf(self.nodes[j]);
                    buf[k] = v;
                    hi = hi.max(v);
                }
                if hi == f64::NEG_INFINITY || hi.is_nan() {
                    return f64::NEG_INFINITY;
                }
                hi + buf[..len].iter().map(|v| (v - hi).exp()).sum::<f64>().ln()
            } else {
                let vals: Vec<f64> = (start..end)
                    .map(|j| self.ln_weights[j] + model.ln_pdf(self.nodes[j]))
                    .collect();
                crate::numeric::log_sum_exp(vals.iter().copied())
            };
            if !(term > f64::NEG_INFINITY) {
                return f64::NEG_INFINITY;
            }
            total += term - per_group_offset;
            start = end;
        }
        total
    }
}

#[derive(Debug, Clone)]
struct CensoredTerm {
    ln_choose: f64,
    record_length: u32,
    exceedances: u32,
    threshold: f64,
    groups: NodeGroups,
}

#[derive(Debug, Clone)]
struct PaleoTerm {
    expected_age: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    min_observable: Option<f64>,
}

/// Contributions of each record type to the log-likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoglikBreakdown {
    pub gage: f64,
    pub censored: f64,
    pub paleo: f64,
    pub total: f64,
}

/// Dataset with every error model discretized once, ready for repeated
/// evaluation against many parameter vectors.
#[derive(Debug, Clone)]
pub struct PreparedLikelihood {
    gage: NodeGroups,
    censored: Option<CensoredTerm>,
    paleo: Vec<PaleoTerm>,
}

impl PreparedLikelihood {
    pub fn new(dataset: &PeakDataset, config: &LikelihoodConfig) -> Result<Self, LikelihoodError> {
        config.validate()?;
        let gage = gage_groups(dataset.peaks(), config.gage_nodes, config.node_weights)?;
        let censored = match dataset.censoring() {
            Some(c) => Some(censored_term(
                dataset.historical(),
                c,
                config.historical_nodes,
                config.node_weights,
            )?),
            None => None,
        };
        let paleo = dataset
            .paleo()
            .iter()
            .map(|b| paleo_term(b, config.paleo_discharge_nodes, config.paleo_age_nodes))
            .collect::<Result<_, _>>()?;
        Ok(PreparedLikelihood { gage, censored, paleo })
    }

    pub fn loglik(&self, model: &DistributionModel) -> f64 {
        self.breakdown(model).total
    }

    pub fn breakdown(&self, model: &DistributionModel) -> LoglikBreakdown {
        let gage = self.gage.sum_ln_mixed_density(model, 0.0);
        let censored = if gage == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.censored.as_ref().map_or(0.0, |c| eval_censored(c, model))
        };
        let paleo = if censored == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.paleo.iter().map(|p| eval_paleo(p, model)).sum()
        };
        let total = gage + censored + paleo;
        LoglikBreakdown {
            gage,
            censored,
            paleo,
            total: if total.is_nan() { f64::NEG_INFINITY } else { total },
        }
    }
}

fn gage_groups(peaks: &[AnnualPeak], n: usize, w: NodeWeights) -> Result<NodeGroups, LikelihoodError> {
    let mut g = NodeGroups::default();
    for p in peaks {
        g.push(discretize_error_with(p.discharge, &p.error, n, w)?);
    }
    Ok(g)
}

fn censored_term(
    historical: &[HistoricalFlood],
    c: &CensoringSpec,
    n: usize,
    w: NodeWeights,
) -> Result<CensoredTerm, LikelihoodError> {
    let mut groups = NodeGroups::default();
    for h in historical {
        groups.push(discretize_error_with(h.discharge, &h.error, n, w)?);
    }
    Ok(CensoredTerm {
        ln_choose: ln_binomial(c.record_length as u64, c.exceedances as u64),
        record_length: c.record_length,
        exceedances: c.exceedances,
        threshold: c.threshold,
        groups,
    })
}

fn paleo_term(b: &PaleoBound, discharge_nodes: usize, age_nodes: usize) -> Result<PaleoTerm, LikelihoodError> {
    let d = discretize_error(b.discharge_upper, &b.discharge_error, discharge_nodes)?;
    let age = discretize_age(b, age_nodes)?;
    Ok(PaleoTerm {
        expected_age: age.mean(),
        nodes: d.nodes,
        weights: d.weights,
        min_observable: b.min_observable,
    })
}

fn eval_censored(c: &CensoredTerm, model: &DistributionModel) -> f64 {
    let below = c.record_length - c.exceedances;
    let mut total = c.ln_choose;
    if below > 0 {
        let f = model.cdf(c.threshold);
        if !(f > 0.0) {
            return f64::NEG_INFINITY;
        }
        total += below as f64 * f.ln();
    }
    if c.exceedances > 0 {
        let s = model.sf(c.threshold);
        if !(s > 0.0) {
            return f64::NEG_INFINITY;
        }
        // k ln(1 - F) plus each record's density conditioned on exceedance
        let ln_s = s.ln();
        total += c.exceedances as f64 * ln_s + c.groups.sum_ln_mixed_density(model, ln_s);
    }
    total
}

fn eval_paleo(p: &PaleoTerm, model: &DistributionModel) -> f64 {
    let base = p.min_observable.map_or(0.0, |y| model.cdf(y));
    let inner: f64 = p
        .nodes
        .iter()
        .zip(&p.weights)
        .map(|(&t, w)| w * (model.cdf(t) - base).max(0.0))
        .sum();
    if inner > 0.0 {
        p.expected_age * inner.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Gaged-record term for exact or error-bearing annual peaks.
pub fn loglik_gage(model: &DistributionModel, peaks: &[AnnualPeak], node_count: usize) -> Result<f64, LikelihoodError> {
    Ok(gage_groups(peaks, node_count, NodeWeights::Density)?.sum_ln_mixed_density(model, 0.0))
}

/// Binomial censored term for `k` known floods above `X0` in `h` years.
pub fn loglik_censored(
    model: &DistributionModel,
    historical: &[HistoricalFlood],
    censoring: &CensoringSpec,
    node_count: usize,
) -> Result<f64, LikelihoodError> {
    Ok(eval_censored(
        &censored_term(historical, censoring, node_count, NodeWeights::Density)?,
        model,
    ))
}

/// Paleoflood non-exceedance term, summed over bounds.
pub fn loglik_paleo(
    model: &DistributionModel,
    bounds: &[PaleoBound],
    discharge_nodes: usize,
    age_nodes: usize,
) -> Result<f64, LikelihoodError> {
    let mut total = 0.0;
    for b in bounds {
        total += eval_paleo(&paleo_term(b, discharge_nodes, age_nodes)?, model);
    }
    Ok(total)
}

/// Sum of the gaged, censored and paleo terms.
pub fn total_loglik(
    model: &DistributionModel,
    dataset: &PeakDataset,
    config: &LikelihoodConfig,
) -> Result<f64, LikelihoodError> {
    Ok(PreparedLikelihood::new(dataset, config)?.loglik(model))
}
