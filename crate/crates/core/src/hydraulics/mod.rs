//! Flood hydrographs, reservoir rating curves and level-pool routing.

mod routing;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use routing::{find_overtopping_peak, route_level_pool, OvertopSearch, Overtopping, RoutingTrace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HydraulicsError {
    #[error("invalid hydrograph `{label}`: {reason}")]
    Hydrograph { label: String, reason: String },
    #[error("invalid rating curve: {0}")]
    Rating(String),
    #[error("invalid reservoir: {0}")]
    Reservoir(String),
    #[error("CSV line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("inflow step {inflow} s differs from routing step {routing} s")]
    StepMismatch { inflow: f64, routing: f64 },
    #[error("step {step}: stage fell below the rating-curve domain (bottom {bottom} m)")]
    BelowDomain { step: usize, bottom: f64 },
    #[error("step {step}: no finite stage balances the storage equation")]
    Unbounded { step: usize },
    #[error("peak stage decreased from {lower_stage} m to {upper_stage} m when the peak rose from {lower_peak} to {upper_peak} m³/s")]
    NonMonotone {
        lower_peak: f64,
        lower_stage: f64,
        upper_peak: f64,
        upper_stage: f64,
    },
}

/// Discharge time series at a constant step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hydrograph {
    pub label: String,
    /// Seconds between ordinates.
    pub step: f64,
    /// m³/s
    pub ordinates: Vec<f64>,
}

impl Hydrograph {
    pub fn new(label: impl Into<String>, step: f64, ordinates: Vec<f64>) -> Result<Self, HydraulicsError> {
        let label = label.into();
        let fail = |reason: &str| {
            Err(HydraulicsError::Hydrograph {
                label: label.clone(),
                reason: reason.to_string(),
            })
        };
        if !(step > 0.0 && step.is_finite()) {
            return fail("step must be positive");
        }
        if ordinates.len() < 2 {
            return fail("needs at least two ordinates");
        }
        if ordinates.iter().any(|q| !(q.is_finite() && *q >= 0.0)) {
            return fail("ordinates must be finite and non-negative");
        }
        Ok(Hydrograph { label, step, ordinates })
    }

    pub fn peak(&self) -> f64 {
        self.ordinates.iter().copied().fold(0.0, f64::max)
    }

    pub fn duration(&self) -> f64 {
        self.step * (self.ordinates.len() - 1) as f64
    }

    /// Multiplies every ordinate so the peak equals `target_peak`.
    pub fn scale_to_peak(&self, target_peak: f64) -> Result<Hydrograph, HydraulicsError> {
        let peak = self.peak();
        if peak <= 0.0 {
            return Err(HydraulicsError::Hydrograph {
                label: self.label.clone(),
                reason: "cannot scale an all-zero hydrograph".into(),
            });
        }
        if !(target_peak > 0.0 && target_peak.is_finite()) {
            return Err(HydraulicsError::Hydrograph {
                label: self.label.clone(),
                reason: format!("target peak must be positive, got {target_peak}"),
            });
        }
        let factor = target_peak / peak;
        Ok(Hydrograph {
            label: self.label.clone(),
            step: self.step,
            ordinates: self.ordinates.iter().map(|q| q * factor).collect(),
        })
    }

    /// Running volume `Σ q·step` in m³.
    pub fn cumulative_volume(&self) -> Vec<f64> {
        self.ordinates
            .iter()
            .scan(0.0, |acc, q| {
                *acc += q * self.step;
                Some(*acc)
            })
            .collect()
    }

    pub fn total_volume(&self) -> f64 {
        self.cumulative_volume().last().copied().unwrap_or(0.0)
    }

    /// Linear resampling onto a new step over the same duration.
    pub fn resample(&self, step: f64) -> Result<Hydrograph, HydraulicsError> {
        let times: Vec<f64> = (0..self.ordinates.len()).map(|i| i as f64 * self.step).collect();
        resample_series(&self.label, &times, &self.ordinates, step)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_s,discharge_m3s\n");
        for (i, q) in self.ordinates.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i as f64 * self.step, q));
        }
        out
    }
}

fn resample_series(label: &str, times: &[f64], values: &[f64], step: f64) -> Result<Hydrograph, HydraulicsError> {
    let duration = times[times.len() - 1] - times[0];
    let count = (duration / step + 1e-9).floor() as usize + 1;
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for i in 0..count {
        let t = times[0] + i as f64 * step;
        while seg + 2 < times.len() && times[seg + 1] < t {
            seg += 1;
        }
        let (t0, t1) = (times[seg], times[seg + 1]);
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        out.push(values[seg] + w * (values[seg + 1] - values[seg]));
    }
    Hydrograph::new(label, step, out)
}

fn read_two_columns(text: &str, expected: [&str; 2]) -> Result<Vec<(f64, f64)>, HydraulicsError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| HydraulicsError::Csv {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols.len() < 2 || cols[0] != expected[0] || cols[1] != expected[1] {
        return Err(HydraulicsError::Csv {
            line: 1,
            message: format!(
                "expected columns `{},{}`, found `{}`",
                expected[0],
                expected[1],
                cols.join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| HydraulicsError::Csv {
            line,
            message: e.to_string(),
        })?;
        let num = |j: usize| -> Result<f64, HydraulicsError> {
            rec.get(j)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| HydraulicsError::Csv {
                    line,
                    message: format!("column {} is not a number", expected[j]),
                })
        };
        rows.push((num(0)?, num(1)?));
    }
    Ok(rows)
}

/// Reads a `time_s,discharge_m3s` CSV. Irregular time stamps are accepted
/// only when `resample_step` is given.
pub fn read_hydrograph_csv(text: &str, label: &str, resample_step: Option<f64>) -> Result<Hydrograph, HydraulicsError> {
    let rows = read_two_columns(text, ["time_s", "discharge_m3s"])?;
    if rows.len() < 2 {
        return Err(HydraulicsError::Hydrograph {
            label: label.into(),
            reason: "needs at least two rows".into(),
        });
    }
    let (times, values): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(HydraulicsError::Hydrograph {
            label: label.into(),
            reason: "time stamps must increase".into(),
        });
    }
    if let Some(step) = resample_step {
        return resample_series(label, &times, &values, step);
    }
    let step = times[1] - times[0];
    if times
        .windows(2)
        .any(|w| ((w[1] - w[0]) - step).abs() > 1e-9 * step.max(1.0))
    {
        return Err(HydraulicsError::Hydrograph {
            label: label.into(),
            reason: "time step is not constant; set a resampling step".into(),
        });
    }
    Hydrograph::new(label, step, values)
}

/// Piecewise-linear stage relation (storage in m³ or discharge in m³/s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct RatingCurve {
    points: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for RatingCurve {
    type Error = HydraulicsError;

    fn try_from(points: Vec<(f64, f64)>) -> Result<Self, Self::Error> {
        RatingCurve::new(points)
    }
}

impl From<RatingCurve> for Vec<(f64, f64)> {
    fn from(c: RatingCurve) -> Self {
        c.points
    }
}

impl RatingCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, HydraulicsError> {
        if points.len() < 2 {
            return Err(HydraulicsError::Rating("needs at least two points".into()));
        }
        if points.iter().any(|(s, v)| !(s.is_finite() && v.is_finite())) {
            return Err(HydraulicsError::Rating("points must be finite".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(HydraulicsError::Rating("stages must be strictly increasing".into()));
        }
        if points.windows(2).any(|w| w[1].1 < w[0].1) {
            return Err(HydraulicsError::Rating("values must be non-decreasing".into()));
        }
        Ok(RatingCurve { points })
    }

    /// Reads `stage_m,<value_column>`.
    pub fn from_csv(text: &str, value_column: &str) -> Result<Self, HydraulicsError> {
        RatingCurve::new(read_two_columns(text, ["stage_m", value_column])?)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn min_stage(&self) -> f64 {
        self.points[0].0
    }

    pub fn max_stage(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Linear interpolation; above the top point the last segment is
    /// extended. `None` below the first point.
    pub fn value_at(&self, stage: f64) -> Option<f64> {
        let p = &self.points;
        if stage < p[0].0 {
            return None;
        }
        let i = p.partition_point(|&(s, _)| s <= stage).clamp(1, p.len() - 1);
        let ((s0, v0), (s1, v1)) = (p[i - 1], p[i]);
        Some(v0 + (stage - s0) * (v1 - v0) / (s1 - s0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReservoirSpec {
    pub stage_storage: RatingCurve,
    pub stage_discharge: RatingCurve,
    pub initial_stage: f64,
    /// Top of the flood pool, where the emergency spillway begins.
    pub flood_pool_top: f64,
    /// Top of the dam.
    pub crest: f64,
    /// When set, inflows must use this step (s).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routing_step: Option<f64>,
}

impl ReservoirSpec {
    pub fn new(
        stage_storage: RatingCurve,
        stage_discharge: RatingCurve,
        initial_stage: f64,
        flood_pool_top: f64,
        crest: f64,
    ) -> Result<Self, HydraulicsError> {
        let r = ReservoirSpec {
            stage_storage,
            stage_discharge,
            initial_stage,
            flood_pool_top,
            crest,
            routing_step: None,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), HydraulicsError> {
        if let Some(step) = self.routing_step {
            if !(step > 0.0 && step.is_finite()) {
                return Err(HydraulicsError::Reservoir(format!(
                    "routing step must be positive, got {step}"
                )));
            }
        }
        if !(self.initial_stage <= self.flood_pool_top && self.flood_pool_top < self.crest) {
            return Err(HydraulicsError::Reservoir(format!(
                "need initial_stage <= flood_pool_top < crest, got {} / {} / {}",
                self.initial_stage, self.flood_pool_top, self.crest
            )));
        }
        for (name, c) in [("storage", &self.stage_storage), ("discharge", &self.stage_discharge)] {
            if c.min_stage() > self.initial_stage || c.max_stage() < self.crest {
                return Err(HydraulicsError::Reservoir(format!(
                    "{name} curve covers [{}, {}] m but must cover [{}, {}] m",
                    c.min_stage(),
                    c.max_stage(),
                    self.initial_stage,
                    self.crest
                )));
            }
        }
        Ok(())
    }

    /// Copy with a different crest elevation.
    pub fn with_crest(&self, crest: f64) -> Result<Self, HydraulicsError> {
        let r = ReservoirSpec { crest, ..self.clone() };
        r.validate()?;
        Ok(r)
    }

    pub fn with_routing_step(self, step: f64) -> Result<Self, HydraulicsError> {
        let r = ReservoirSpec {
            routing_step: Some(step),
            ..self
        };
        r.validate()?;
        Ok(r)
    }
}
