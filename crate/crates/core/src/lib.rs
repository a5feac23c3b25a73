//! Flood frequency fitting with historical and paleoflood information, level
//! pool routing and dam overtopping risk.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN-rejecting guards

pub mod distributions;
pub mod fitting;
pub mod hydraulics;
pub mod hydrodata;
pub mod likelihood;
pub mod numeric;
pub mod safety;
pub mod scenario;

pub use distributions::{DistributionModel, Family, Lp3Space, ModelError};
pub use fitting::{fit_mle, fit_prepared, rank_models, FitConfig, FitError, FittedModel, ModelScore, Ranking};
pub use hydraulics::{
    find_overtopping_peak, route_level_pool, HydraulicsError, Hydrograph, OvertopSearch, Overtopping, RatingCurve,
    ReservoirSpec, RoutingTrace,
};
pub use hydrodata::{CensoringSpec, DataError, ErrorConfig, ErrorModel, PaleoBound, PeakDataset};
pub use likelihood::{LikelihoodConfig, LikelihoodError, PreparedLikelihood};
pub use safety::{
    assess, classify, hazard_band, overtopping_return_period, quantile_comparison, HazardCurve, SafetyAssessment,
    SafetyClass, SafetyError, SafetyThresholds, SafetyVerdict,
};
