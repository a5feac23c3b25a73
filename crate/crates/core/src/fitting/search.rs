//! Search coordinates and default boxes for each family.
//!
//! Search coordinates equal the model parameters except for TCEV, which is
//! searched over `(u₁, θ₁, u₂, θ₂)` with `uᵢ = θᵢ ln Λᵢ`, the location of
//! each Gumbel component.

use crate::distributions::{Family, Lp3Space};
use crate::hydrodata::PeakDataset;

/// Summary statistics that scale the default search box.
#[derive(Debug, Clone, Copy)]
struct Summary {
    max: f64,
    min: f64,
    sd: f64,
    ln_sd: f64,
    y_min: f64,
    y_max: f64,
    y_sd: f64,
}

fn sample_sd(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    if v.len() < 2 {
        return v.first().map_or(1.0, |x| x.abs().max(1e-12));
    }
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    var.sqrt().max(1e-12 * mean.abs()).max(f64::MIN_POSITIVE)
}

fn summarize(dataset: &PeakDataset, space: Lp3Space) -> Summary {
    let gaged: Vec<f64> = dataset.peaks().iter().map(|p| p.discharge).collect();
    let all: Vec<f64> = dataset.all_discharges().collect();
    let max = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = all.iter().copied().fold(f64::INFINITY, f64::min);
    let logs: Vec<f64> = gaged.iter().map(|q| q.ln()).collect();
    let transform = |q: f64| match space {
        Lp3Space::Log10 => q.log10(),
        Lp3Space::Raw => q,
    };
    let ys: Vec<f64> = gaged.iter().map(|&q| transform(q)).collect();
    Summary {
        max,
        min,
        sd: sample_sd(&gaged),
        ln_sd: sample_sd(&logs),
        y_min: transform(min),
        y_max: transform(max),
        y_sd: sample_sd(&ys),
    }
}

fn gev_box(s: &Summary) -> [(f64, f64); 3] {
    [(0.0, 3.0 * s.max), (1e-3 * s.sd, 20.0 * s.sd), (-0.5, 0.7)]
}

fn pearson_box(s: &Summary) -> [(f64, f64); 3] {
    [
        (s.y_min - 20.0 * s.y_sd, s.y_max + 20.0 * s.y_sd),
        (1.0, 200.0),
        (-20.0 * s.y_sd, 20.0 * s.y_sd),
    ]
}

/// Default search box for `family` scaled to the data.
pub fn default_bounds(family: Family, dataset: &PeakDataset, space: Lp3Space) -> Vec<(f64, f64)> {
    let s = summarize(dataset, space);
    match family {
        Family::Ln2 => vec![
            (s.min.ln().min(0.0), (3.0 * s.max).ln()),
            (1e-3 * s.ln_sd, 20.0 * s.ln_sd),
        ],
        Family::Lp3 => pearson_box(&s).to_vec(),
        Family::Gev => gev_box(&s).to_vec(),
        Family::Tcev => {
            let loc = (-3.0 * s.max, 3.0 * s.max);
            let scale = (1e-3 * s.sd, 20.0 * s.sd);
            vec![loc, scale, loc, scale]
        }
        Family::MixedGev => {
            let b = gev_box(&s);
            [b, b].concat().into_iter().chain([(0.0, 1.0)]).collect()
        }
        Family::MixedLp3 => {
            let b = pearson_box(&s);
            [b, b].concat().into_iter().chain([(0.0, 1.0)]).collect()
        }
    }
}

/// Maps search coordinates to model parameters.
pub fn to_params(family: Family, x: &[f64]) -> Vec<f64> {
    match family {
        Family::Tcev => vec![(x[0] / x[1]).exp(), x[1], (x[2] / x[3]).exp(), x[3]],
        _ => x.to_vec(),
    }
}

/// Inverse of [`to_params`].
pub fn from_params(family: Family, p: &[f64]) -> Vec<f64> {
    match family {
        Family::Tcev => vec![p[1] * p[0].ln(), p[1], p[3] * p[2].ln(), p[3]],
        _ => p.to_vec(),
    }
}

/// Orders TCEV components so the basic component (smaller θ) comes first.
pub fn canonical_tcev(p: Vec<f64>) -> Vec<f64> {
    if p[1] > p[3] {
        vec![p[2], p[3], p[0], p[1]]
    } else {
        p
    }
}
