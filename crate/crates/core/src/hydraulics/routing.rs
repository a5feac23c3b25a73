use serde::{Deserialize, Serialize};

use super::{HydraulicsError, Hydrograph, ReservoirSpec};
use crate::numeric::bisect_increasing;

/// Stage and outflow at every inflow ordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingTrace {
    pub step: f64,
    /// m
    pub stages: Vec<f64>,
    /// m³/s
    pub outflows: Vec<f64>,
    /// m³
    pub storages: Vec<f64>,
    pub peak_stage: f64,
    pub overtopped: bool,
    /// Some stage lay above the top of a rating curve and was extrapolated.
    pub extrapolated: bool,
}

impl RoutingTrace {
    pub fn peak_outflow(&self) -> f64 {
        self.outflows.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `|V_in − V_out − ΔS| / V_in`, volumes by the trapezoid rule the
    /// scheme integrates exactly.
    pub fn mass_balance_error(&self, inflow: &Hydrograph) -> f64 {
        let trapz = |v: &[f64]| v.windows(2).map(|w| 0.5 * (w[0] + w[1]) * self.step).sum::<f64>();
        let v_in = trapz(&inflow.ordinates);
        let v_out = trapz(&self.outflows);
        let ds = self.storages[self.storages.len() - 1] - self.storages[0];
        (v_in - v_out - ds).abs() / v_in
    }
}

/// Storage-indication (modified Puls) level-pool routing.
///
/// Each step solves `2S(h)/Δt + O(h) = I_t + I_{t+1} + 2S_t/Δt − O_t` for
/// the end-of-step stage `h` by bisection. The reservoir starts at
/// `initial_stage` with the matching outflow.
pub fn route_level_pool(inflow: &Hydrograph, reservoir: &ReservoirSpec) -> Result<RoutingTrace, HydraulicsError> {
    reservoir.validate()?;
    let dt = inflow.step;
    if let Some(routing) = reservoir.routing_step {
        if (routing - dt).abs() > 1e-9 * routing {
            return Err(HydraulicsError::StepMismatch { inflow: dt, routing });
        }
    }
    let storage = &reservoir.stage_storage;
    let discharge = &reservoir.stage_discharge;
    let bottom = storage.min_stage().max(discharge.min_stage());
    let top = storage.max_stage().min(discharge.max_stage());
    // both curves are defined on [bottom, ∞)
    let indication = |h: f64| 2.0 * storage.value_at(h).unwrap() / dt + discharge.value_at(h).unwrap();

    let n = inflow.ordinates.len();
    let mut stages = Vec::with_capacity(n);
    let mut outflows = Vec::with_capacity(n);
    let mut storages = Vec::with_capacity(n);
    let h0 = reservoir.initial_stage;
    stages.push(h0);
    outflows.push(discharge.value_at(h0).unwrap());
    storages.push(storage.value_at(h0).unwrap());

    for t in 0..n - 1 {
        let rhs = inflow.ordinates[t] + inflow.ordinates[t + 1] + 2.0 * storages[t] / dt - outflows[t];
        let g = |h: f64| indication(h) - rhs;
        let h = if g(bottom) >= 0.0 {
            if g(bottom) > 0.0 {
                return Err(HydraulicsError::BelowDomain { step: t + 1, bottom });
            }
            bottom
        } else if g(stages[t]) == 0.0 {
            stages[t]
        } else {
            let span = (top - bottom).max(1.0);
            let mut hi = top;
            let mut grow = 0;
            while g(hi) < 0.0 {
                hi += span * f64::powi(2.0, grow);
                grow += 1;
                if grow > 60 {
                    return Err(HydraulicsError::Unbounded { step: t + 1 });
                }
            }
            bisect_increasing(g, bottom, hi)
        };
        stages.push(h);
        outflows.push(discharge.value_at(h).unwrap());
        storages.push(storage.value_at(h).unwrap());
    }

    let peak_stage = stages.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RoutingTrace {
        step: dt,
        overtopped: peak_stage > reservoir.crest,
        extrapolated: peak_stage > top,
        stages,
        outflows,
        storages,
        peak_stage,
    })
}

/// Bracket and tolerance for [`find_overtopping_peak`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OvertopSearch {
    /// Smallest peak considered, m³/s.
    pub floor: f64,
    /// Largest peak considered, m³/s.
    pub ceiling: f64,
    pub rel_tol: f64,
}

impl OvertopSearch {
    /// Searches up to 1000 × the flood of record.
    pub fn from_flood_of_record(peak: f64) -> Self {
        OvertopSearch {
            floor: 1e-6 * peak,
            ceiling: 1000.0 * peak,
            rel_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Overtopping {
    /// Smallest scaled peak (m³/s) whose routed stage exceeds the crest.
    Peak { peak: f64, routings: usize },
    /// The dam holds even at the search ceiling.
    NotOvertoppable { ceiling: f64 },
}

impl Overtopping {
    pub fn peak(&self) -> Option<f64> {
        match *self {
            Overtopping::Peak { peak, .. } => Some(peak),
            Overtopping::NotOvertoppable { .. } => None,
        }
    }
}

/// Smallest peak to which `shape` must be scaled to overtop the dam,
/// found by bisection on a log scale to relative tolerance `rel_tol`.
///
/// Peak stage must not decrease as the peak grows; a violation is an error.
pub fn find_overtopping_peak(
    shape: &Hydrograph,
    reservoir: &ReservoirSpec,
    search: &OvertopSearch,
) -> Result<Overtopping, HydraulicsError> {
    if !(search.floor > 0.0 && search.floor < search.ceiling && search.rel_tol > 0.0) {
        return Err(HydraulicsError::Reservoir(format!(
            "search needs 0 < floor < ceiling and rel_tol > 0, got {search:?}"
        )));
    }
    let mut routings = 0;
    let mut stage_at = |peak: f64| -> Result<f64, HydraulicsError> {
        routings += 1;
        Ok(route_level_pool(&shape.scale_to_peak(peak)?, reservoir)?.peak_stage)
    };
    let crest = reservoir.crest;
    let (mut lo, mut hi) = (search.floor, search.ceiling);
    let mut hi_stage = stage_at(hi)?;
    if hi_stage <= crest {
        return Ok(Overtopping::NotOvertoppable { ceiling: hi });
    }
    let mut lo_stage = stage_at(lo)?;
    if lo_stage > hi_stage {
        return Err(non_monotone(lo, lo_stage, hi, hi_stage));
    }
    if lo_stage > crest {
        return Ok(Overtopping::Peak { peak: lo, routings: 2 });
    }
    while hi / lo - 1.0 > search.rel_tol {
        let mid = (lo * hi).sqrt();
        let s = stage_at(mid)?;
        if s < lo_stage {
            return Err(non_monotone(lo, lo_stage, mid, s));
        }
        if s > hi_stage {
            return Err(non_monotone(mid, s, hi, hi_stage));
        }
        if s > crest {
            hi = mid;
            hi_stage = s;
        } else {
            lo = mid;
            lo_stage = s;
        }
    }
    Ok(Overtopping::Peak { peak: hi, routings })
}

fn non_monotone(lower_peak: f64, lower_stage: f64, upper_peak: f64, upper_stage: f64) -> HydraulicsError {
    HydraulicsError::NonMonotone {
        lower_peak,
        lower_stage,
        upper_peak,
        upper_stage,
    }
}
