//! Overtopping return periods, hazard bands and regulatory classification.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{DistributionModel, Family, ModelError};
use crate::hydraulics::{
    find_overtopping_peak, route_level_pool, HydraulicsError, Hydrograph, OvertopSearch, Overtopping, ReservoirSpec,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SafetyError {
    #[error("invalid thresholds: need 0 < lower < upper, got {lower} / {upper}")]
    Thresholds { lower: f64, upper: f64 },
    #[error("return period must be positive, got {0}")]
    Domain(f64),
    #[error("no return periods to classify")]
    Empty,
    #[error("no hydrograph shapes given")]
    NoShapes,
    #[error("return period must exceed 1 year, got {0}")]
    ShortReturnPeriod(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("routing `{shape}` at T = {return_period} years: {source}")]
    Routing {
        shape: String,
        return_period: f64,
        source: HydraulicsError,
    },
    #[error("overtopping search for `{shape}`: {source}")]
    Overtopping { shape: String, source: HydraulicsError },
}

/// Return-period band (years) separating the regulatory classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafetyThresholds {
    pub lower: f64,
    pub upper: f64,
}

impl Default for SafetyThresholds {
    fn default() -> Self {
        SafetyThresholds {
            lower: 131_000.0,
            upper: 376_000.0,
        }
    }
}

impl SafetyThresholds {
    pub fn new(lower: f64, upper: f64) -> Result<Self, SafetyError> {
        let t = SafetyThresholds { lower, upper };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), SafetyError> {
        if 0.0 < self.lower && self.lower < self.upper {
            Ok(())
        } else {
            Err(SafetyError::Thresholds {
                lower: self.lower,
                upper: self.upper,
            })
        }
    }

    /// Class of a single return period; both ends of the band are uncertain.
    pub fn class_of(&self, years: f64) -> Result<SafetyClass, SafetyError> {
        if !(years > 0.0) {
            return Err(SafetyError::Domain(years));
        }
        Ok(if years < self.lower {
            SafetyClass::DoesNotMeet
        } else if years <= self.upper {
            SafetyClass::Uncertain
        } else {
            SafetyClass::Meets
        })
    }
}

/// Ordered from worst to best.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SafetyClass {
    DoesNotMeet,
    Uncertain,
    Meets,
}

impl SafetyClass {
    pub fn name(self) -> &'static str {
        match self {
            SafetyClass::DoesNotMeet => "does_not_meet",
            SafetyClass::Uncertain => "uncertain",
            SafetyClass::Meets => "meets",
        }
    }
}

impl std::fmt::Display for SafetyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafetyVerdict {
    pub model: Family,
    /// Worst class over all shapes.
    pub class: SafetyClass,
    /// Years, one per hydrograph shape. `null` in JSON stands for +∞.
    pub return_periods: Vec<f64>,
    pub classes: Vec<SafetyClass>,
}

/// `1 / (1 − F(peak))` in years; `+∞` once the peak is beyond the model's
/// upper support.
pub fn overtopping_return_period(model: &DistributionModel, peak: f64) -> f64 {
    let sf = model.sf(peak);
    if sf > 0.0 {
        1.0 / sf
    } else {
        f64::INFINITY
    }
}

pub fn classify(
    model: Family,
    return_periods: &[f64],
    thresholds: &SafetyThresholds,
) -> Result<SafetyVerdict, SafetyError> {
    thresholds.validate()?;
    if return_periods.is_empty() {
        return Err(SafetyError::Empty);
    }
    let classes = return_periods
        .iter()
        .map(|&t| thresholds.class_of(t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SafetyVerdict {
        model,
        class: *classes.iter().min().unwrap(),
        return_periods: return_periods.to_vec(),
        classes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardPoint {
    pub return_period: f64,
    /// Model quantile every shape is scaled to, m³/s.
    pub peak_flow: f64,
    pub stage_min: f64,
    pub stage_max: f64,
    /// At least one shape overtops.
    pub overtopped: bool,
}

/// Peak reservoir stage against return period for one fitted model, with
/// the spread across hydrograph shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardCurve {
    pub model: Family,
    pub points: Vec<HazardPoint>,
}

#[derive(Serialize)]
struct HazardRow {
    return_period_years: f64,
    stage_min_m: f64,
    stage_max_m: f64,
    overtopped_flag: bool,
}

impl HazardCurve {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for p in &self.points {
            w.serialize(HazardRow {
                return_period_years: p.return_period,
                stage_min_m: p.stage_min,
                stage_max_m: p.stage_max,
                overtopped_flag: p.overtopped,
            })
            .expect("in-memory CSV write");
        }
        String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
    }
}

/// Routes every shape scaled to the model's `T`-year flood and records the
/// stage band. `return_periods` is sorted and deduplicated.
pub fn hazard_band(
    model: &DistributionModel,
    shapes: &[Hydrograph],
    reservoir: &ReservoirSpec,
    return_periods: &[f64],
) -> Result<HazardCurve, SafetyError> {
    if shapes.is_empty() {
        return Err(SafetyError::NoShapes);
    }
    let mut ts = return_periods.to_vec();
    if let Some(&bad) = ts.iter().find(|t| !(**t > 1.0)) {
        return Err(SafetyError::ShortReturnPeriod(bad));
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut points = Vec::with_capacity(ts.len());
    for t in ts {
        let peak_flow = model.return_level(t)?;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut overtopped = false;
        for shape in shapes {
            let routed = shape
                .scale_to_peak(peak_flow)
                .and_then(|h| route_level_pool(&h, reservoir))
                .map_err(|source| SafetyError::Routing {
                    shape: shape.label.clone(),
                    return_period: t,
                    source,
                })?;
            lo = lo.min(routed.peak_stage);
            hi = hi.max(routed.peak_stage);
            overtopped |= routed.overtopped;
        }
        points.push(HazardPoint {
            return_period: t,
            peak_flow,
            stage_min: lo,
            stage_max: hi,
            overtopped,
        });
    }
    Ok(HazardCurve {
        model: model.family(),
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileRow {
    pub return_period: f64,
    pub quantile_a: f64,
    pub quantile_b: f64,
    /// Return period of `quantile_a` under model b.
    pub return_period_a_under_b: f64,
}

pub fn quantile_comparison(
    a: &DistributionModel,
    b: &DistributionModel,
    return_periods: &[f64],
) -> Result<Vec<QuantileRow>, SafetyError> {
    return_periods
        .iter()
        .map(|&t| {
            let qa = a.return_level(t)?;
            Ok(QuantileRow {
                return_period: t,
                quantile_a: qa,
                quantile_b: b.return_level(t)?,
                return_period_a_under_b: overtopping_return_period(b, qa),
            })
        })
        .collect()
}

/// Smallest overtopping peak for one shape; `None` when the dam holds up to
/// the search ceiling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeOvertopping {
    pub shape: String,
    pub peak: Option<f64>,
}

/// Overtopping peaks per shape, then a verdict per model. A shape that never
/// overtops within the search contributes an infinite return period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafetyAssessment {
    pub thresholds: SafetyThresholds,
    pub overtopping: Vec<ShapeOvertopping>,
    pub verdicts: Vec<SafetyVerdict>,
}

pub fn overtopping_peaks(
    shapes: &[Hydrograph],
    reservoir: &ReservoirSpec,
    search: &OvertopSearch,
) -> Result<Vec<ShapeOvertopping>, SafetyError> {
    shapes
        .iter()
        .map(|s| {
            let hit = find_overtopping_peak(s, reservoir, search).map_err(|source| SafetyError::Overtopping {
                shape: s.label.clone(),
                source,
            })?;
            Ok(ShapeOvertopping {
                shape: s.label.clone(),
                peak: match hit {
                    Overtopping::Peak { peak, .. } => Some(peak),
                    Overtopping::NotOvertoppable { .. } => None,
                },
            })
        })
        .collect()
}

pub fn assess(
    models: &[&DistributionModel],
    shapes: &[Hydrograph],
    reservoir: &ReservoirSpec,
    search: &OvertopSearch,
    thresholds: &SafetyThresholds,
) -> Result<SafetyAssessment, SafetyError> {
    if shapes.is_empty() {
        return Err(SafetyError::NoShapes);
    }
    let overtopping = overtopping_peaks(shapes, reservoir, search)?;
    let verdicts = models
        .iter()
        .map(|m| {
            let ts: Vec<f64> = overtopping
                .iter()
                .map(|o| o.peak.map_or(f64::INFINITY, |p| overtopping_return_period(m, p)))
                .collect();
            classify(m.family(), &ts, thresholds)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SafetyAssessment {
        thresholds: *thresholds,
        overtopping,
        verdicts,
    })
}
