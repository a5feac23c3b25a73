use super::PeakDataset;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSource {
    Gage,
    Historical,
    Paleo,
}

/// One empirical point of a flood-frequency plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlottingPosition {
    pub source: PointSource,
    pub discharge: f64,
    pub return_period: f64,
    /// Discharge range for paleo bounds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discharge_range: Option<(f64, f64)>,
}

/// Weibull plotting positions `T = (m + 1) / rank`.
///
/// Gaged peaks use the gaged record length `m`, historical floods the
/// censoring record length, and each paleo bound its mean age (rank 1,
/// plotted at the mid-range discharge).
pub fn empirical_return_periods(dataset: &PeakDataset) -> Vec<PlottingPosition> {
    let mut out = Vec::new();
    let mut gage: Vec<f64> = dataset.peaks().iter().map(|p| p.discharge).collect();
    gage.sort_by(|a, b| b.total_cmp(a));
    let n = gage.len() as f64;
    for (i, q) in gage.into_iter().enumerate() {
        out.push(PlottingPosition {
            source: PointSource::Gage,
            discharge: q,
            return_period: (n + 1.0) / (i + 1) as f64,
            discharge_range: None,
        });
    }
    if let Some(c) = dataset.censoring() {
        let mut hist: Vec<f64> = dataset.historical().iter().map(|h| h.discharge).collect();
        hist.sort_by(|a, b| b.total_cmp(a));
        let h = c.record_length as f64;
        for (i, q) in hist.into_iter().enumerate() {
            out.push(PlottingPosition {
                source: PointSource::Historical,
                discharge: q,
                return_period: (h + 1.0) / (i + 1) as f64,
                discharge_range: None,
            });
        }
    }
    for b in dataset.paleo() {
        out.push(PlottingPosition {
            source: PointSource::Paleo,
            discharge: 0.5 * (b.discharge_lower + b.discharge_upper),
            return_period: b.mean_age() + 1.0,
            discharge_range: Some((b.discharge_lower, b.discharge_upper)),
        });
    }
    out
}
