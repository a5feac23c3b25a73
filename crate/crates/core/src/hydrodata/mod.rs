//! Flood observations: gaged annual peaks, censored historical floods and
//! paleoflood non-exceedance bounds, each with a measurement-error model.

mod plotting;
mod rdb;
mod records;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use plotting::{empirical_return_periods, PlottingPosition, PointSource};
pub use rdb::{parse_usgs_rdb, write_usgs_rdb, DischargeUnit, RdbParse, CFS_TO_CMS};
pub use records::{parse_event_csv, EventRecords};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("RDB parse error: {0}")]
    Rdb(String),
    #[error("RDB header is missing required column `{0}`")]
    MissingColumn(&'static str),
    #[error("event CSV line {line}: {message}")]
    EventCsv { line: usize, message: String },
    #[error("duplicate water year {0} in annual peaks")]
    DuplicateYear(i32),
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("invalid censoring: {0}")]
    InvalidCensoring(String),
    #[error("invalid error configuration: {0}")]
    InvalidErrorConfig(String),
    #[error("dataset has no annual peaks")]
    Empty,
}

/// Measurement-error model attached to a single observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorModel {
    /// Exact observation.
    #[default]
    None,
    /// Normal error with standard deviation `cv · discharge`.
    NormalCv { cv: f64 },
    /// Triangular distribution over `[lower, upper]` peaking at `mode`.
    Triangular { lower: f64, mode: f64, upper: f64 },
}

impl ErrorModel {
    pub fn validate(&self) -> Result<(), DataError> {
        match *self {
            ErrorModel::None => Ok(()),
            ErrorModel::NormalCv { cv } => {
                if cv.is_finite() && cv >= 0.0 {
                    Ok(())
                } else {
                    Err(DataError::InvalidErrorConfig(format!("cv must be >= 0, got {cv}")))
                }
            }
            ErrorModel::Triangular { lower, mode, upper } => {
                if lower > 0.0 && lower < upper && (lower..=upper).contains(&mode) {
                    Ok(())
                } else {
                    Err(DataError::InvalidErrorConfig(format!(
                        "triangular bounds need 0 < lower <= mode <= upper, lower < upper; got ({lower}, {mode}, {upper})"
                    )))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualPeak {
    pub water_year: i32,
    /// m³/s
    pub discharge: f64,
    #[serde(default)]
    pub error: ErrorModel,
}

impl AnnualPeak {
    pub fn new(water_year: i32, discharge: f64) -> Self {
        AnnualPeak {
            water_year,
            discharge,
            error: ErrorModel::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoricalFlood {
    pub year: i32,
    /// m³/s
    pub discharge: f64,
    #[serde(default)]
    pub error: ErrorModel,
}

impl HistoricalFlood {
    pub fn new(year: i32, discharge: f64) -> Self {
        HistoricalFlood {
            year,
            discharge,
            error: ErrorModel::None,
        }
    }
}

/// Distribution of a paleoflood bound's age.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AgeDistribution {
    #[default]
    Uniform,
    /// Symmetric triangle over the age interval.
    Triangular,
}

/// Evidence that no flood exceeded a discharge somewhere in
/// `[discharge_lower, discharge_upper]` over `[age_lower, age_upper]` years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaleoBound {
    pub discharge_lower: f64,
    pub discharge_upper: f64,
    /// Years before present.
    pub age_lower: f64,
    pub age_upper: f64,
    /// Distribution of the bound discharge; `None` places it at `discharge_upper`.
    #[serde(default)]
    pub discharge_error: ErrorModel,
    #[serde(default)]
    pub age_distribution: AgeDistribution,
    /// Minimum observable discharge; `None` integrates from the lower end
    /// of the model support.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_observable: Option<f64>,
}

impl PaleoBound {
    /// Bound with a symmetric triangular discharge distribution and uniform age.
    pub fn new(discharge_lower: f64, discharge_upper: f64, age_lower: f64, age_upper: f64) -> Self {
        PaleoBound {
            discharge_lower,
            discharge_upper,
            age_lower,
            age_upper,
            discharge_error: ErrorModel::Triangular {
                lower: discharge_lower,
                mode: 0.5 * (discharge_lower + discharge_upper),
                upper: discharge_upper,
            },
            age_distribution: AgeDistribution::Uniform,
            min_observable: None,
        }
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if !(self.discharge_lower > 0.0 && self.discharge_lower < self.discharge_upper) {
            return Err(DataError::InvalidRecord(format!(
                "paleo discharge bounds need 0 < lower < upper, got ({}, {})",
                self.discharge_lower, self.discharge_upper
            )));
        }
        if !(self.age_lower > 0.0 && self.age_lower < self.age_upper) {
            return Err(DataError::InvalidRecord(format!(
                "paleo age bounds need 0 < lower < upper, got ({}, {})",
                self.age_lower, self.age_upper
            )));
        }
        self.discharge_error.validate()
    }

    pub fn mean_age(&self) -> f64 {
        0.5 * (self.age_lower + self.age_upper)
    }
}

/// Binomial censoring of the historical period: `exceedances` of `threshold`
/// in `record_length` years.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensoringSpec {
    pub threshold: f64,
    pub record_length: u32,
    pub exceedances: u32,
}

impl CensoringSpec {
    /// Threshold at the smallest historical flood; record length from the
    /// earliest historical year up to the first gaged year.
    pub fn from_historical(historical: &[HistoricalFlood], gage_start: i32) -> Result<Self, DataError> {
        let threshold = historical.iter().map(|h| h.discharge).fold(f64::INFINITY, f64::min);
        let earliest = historical
            .iter()
            .map(|h| h.year)
            .min()
            .ok_or_else(|| DataError::InvalidCensoring("no historical floods".into()))?;
        if earliest >= gage_start {
            return Err(DataError::InvalidCensoring(format!(
                "historical year {earliest} is not before gage start {gage_start}"
            )));
        }
        Ok(CensoringSpec {
            threshold,
            record_length: (gage_start - earliest) as u32,
            exceedances: historical.len() as u32,
        })
    }
}

/// Gaged, historical and paleoflood observations for one site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakDataset {
    peaks: Vec<AnnualPeak>,
    historical: Vec<HistoricalFlood>,
    censoring: Option<CensoringSpec>,
    paleo: Vec<PaleoBound>,
}

impl PeakDataset {
    pub fn new(
        peaks: Vec<AnnualPeak>,
        historical: Vec<HistoricalFlood>,
        censoring: Option<CensoringSpec>,
        paleo: Vec<PaleoBound>,
    ) -> Result<Self, DataError> {
        if peaks.is_empty() {
            return Err(DataError::Empty);
        }
        let mut years: Vec<i32> = peaks.iter().map(|p| p.water_year).collect();
        years.sort_unstable();
        if let Some(w) = years.windows(2).find(|w| w[0] == w[1]) {
            return Err(DataError::DuplicateYear(w[0]));
        }
        for p in &peaks {
            if !(p.discharge > 0.0 && p.discharge.is_finite()) {
                return Err(DataError::InvalidRecord(format!(
                    "annual peak {} has non-positive discharge {}",
                    p.water_year, p.discharge
                )));
            }
            p.error.validate()?;
        }
        for h in &historical {
            if !(h.discharge > 0.0 && h.discharge.is_finite()) {
                return Err(DataError::InvalidRecord(format!(
                    "historical flood {} has non-positive discharge {}",
                    h.year, h.discharge
                )));
            }
            h.error.validate()?;
        }
        match censoring {
            Some(c) => {
                if c.exceedances > c.record_length {
                    return Err(DataError::InvalidCensoring(format!(
                        "{} exceedances in a {}-year record",
                        c.exceedances, c.record_length
                    )));
                }
                if c.exceedances as usize != historical.len() {
                    return Err(DataError::InvalidCensoring(format!(
                        "exceedance count {} differs from {} historical floods",
                        c.exceedances,
                        historical.len()
                    )));
                }
                if let Some(h) = historical.iter().find(|h| h.discharge < c.threshold) {
                    return Err(DataError::InvalidCensoring(format!(
                        "historical flood {} ({}) is below the threshold {}",
                        h.year, h.discharge, c.threshold
                    )));
                }
            }
            None if !historical.is_empty() => {
                return Err(DataError::InvalidCensoring(
                    "historical floods require a censoring specification".into(),
                ));
            }
            None => {}
        }
        for b in &paleo {
            b.validate()?;
        }
        Ok(PeakDataset {
            peaks,
            historical,
            censoring,
            paleo,
        })
    }

    /// Dataset of exact annual peaks only, one per consecutive year from 1.
    pub fn from_discharges(values: &[f64]) -> Result<Self, DataError> {
        let peaks = values
            .iter()
            .enumerate()
            .map(|(i, &q)| AnnualPeak::new(i as i32 + 1, q))
            .collect();
        PeakDataset::new(peaks, Vec::new(), None, Vec::new())
    }

    pub fn peaks(&self) -> &[AnnualPeak] {
        &self.peaks
    }

    pub fn historical(&self) -> &[HistoricalFlood] {
        &self.historical
    }

    pub fn censoring(&self) -> Option<&CensoringSpec> {
        self.censoring.as_ref()
    }

    pub fn paleo(&self) -> &[PaleoBound] {
        &self.paleo
    }

    /// Number of records used as `n` in the BIC.
    pub fn record_count(&self) -> usize {
        self.peaks.len() + self.historical.len() + self.paleo.len()
    }

    /// Every observed discharge value, including paleo bound limits.
    pub fn all_discharges(&self) -> impl Iterator<Item = f64> + '_ {
        self.peaks
            .iter()
            .map(|p| p.discharge)
            .chain(self.historical.iter().map(|h| h.discharge))
            .chain(self.paleo.iter().flat_map(|b| [b.discharge_lower, b.discharge_upper]))
    }

    pub fn gage_start(&self) -> i32 {
        self.peaks.iter().map(|p| p.water_year).min().unwrap_or(0)
    }

    /// Replaces every record's error model with `kind = none`.
    pub fn without_errors(&self) -> PeakDataset {
        let mut d = self.clone();
        d.peaks.iter_mut().for_each(|p| p.error = ErrorModel::None);
        d.historical.iter_mut().for_each(|h| h.error = ErrorModel::None);
        d.paleo.iter_mut().for_each(|b| b.discharge_error = ErrorModel::None);
        d
    }
}

/// Coefficients of variation applied by [`attach_error_models`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErrorConfig {
    pub cv_gage: f64,
    pub cv_historical: f64,
    /// Mode of the paleo discharge triangle as a fraction of
    /// `[lower, upper]`; 0.5 is the symmetric default.
    pub paleo_mode_fraction: f64,
}

impl Default for ErrorConfig {
    fn default() -> Self {
        ErrorConfig {
            cv_gage: 0.10,
            cv_historical: 0.25,
            paleo_mode_fraction: 0.5,
        }
    }
}

fn normal_or_none(cv: f64) -> ErrorModel {
    if cv == 0.0 {
        ErrorModel::None
    } else {
        ErrorModel::NormalCv { cv }
    }
}

/// Attaches normal errors to gaged and historical records and triangular
/// discharge distributions to paleo bounds.
pub fn attach_error_models(dataset: &PeakDataset, config: &ErrorConfig) -> Result<PeakDataset, DataError> {
    for (name, cv) in [("cv_gage", config.cv_gage), ("cv_historical", config.cv_historical)] {
        if !(cv.is_finite() && cv >= 0.0) {
            return Err(DataError::InvalidErrorConfig(format!("{name} must be >= 0, got {cv}")));
        }
    }
    if !(0.0..=1.0).contains(&config.paleo_mode_fraction) {
        return Err(DataError::InvalidErrorConfig(format!(
            "paleo_mode_fraction must lie in [0, 1], got {}",
            config.paleo_mode_fraction
        )));
    }
    let mut d = dataset.clone();
    d.peaks
        .iter_mut()
        .for_each(|p| p.error = normal_or_none(config.cv_gage));
    d.historical
        .iter_mut()
        .for_each(|h| h.error = normal_or_none(config.cv_historical));
    for b in &mut d.paleo {
        b.discharge_error = ErrorModel::Triangular {
            lower: b.discharge_lower,
            mode: b.discharge_lower + config.paleo_mode_fraction * (b.discharge_upper - b.discharge_lower),
            upper: b.discharge_upper,
        };
    }
    Ok(d)
}
