//! Synthetic stand-in inputs shipped with the crate.
//!
//! The peak record imitates a snowmelt/rainstorm river below a flood-control
//! dam, 1895–1975, with three historical floods and one paleoflood bound.
//! None of it is observed data. `data/generate.py` rebuilds every file.

use crate::hydraulics::{read_hydrograph_csv, Hydrograph, RatingCurve, ReservoirSpec};
use crate::hydrodata::{
    attach_error_models, parse_event_csv, parse_usgs_rdb, CensoringSpec, DischargeUnit, ErrorConfig, PeakDataset,
};

pub const PEAKS_RDB: &str = include_str!("../data/pueblo_standin_peaks.rdb");
pub const EVENTS_CSV: &str = include_str!("../data/pueblo_standin_events.csv");
pub const STORAGE_CSV: &str = include_str!("../data/pueblo_standin_storage.csv");
pub const DISCHARGE_CSV: &str = include_str!("../data/pueblo_standin_discharge.csv");

/// `(label, csv)` for the three hydrograph shapes, largest volume first.
pub const HYDROGRAPH_CSVS: [(&str, &str); 3] = [
    ("trex_like", include_str!("../data/hydrograph_trex_like.csv")),
    ("pmf_like", include_str!("../data/hydrograph_pmf_like.csv")),
    ("flood1921_like", include_str!("../data/hydrograph_flood1921_like.csv")),
];

/// First year of systematic gaging.
pub const GAGE_START: i32 = 1895;
pub const INITIAL_STAGE: f64 = 45.0;
pub const FLOOD_POOL_TOP: f64 = 50.0;
pub const CREST: f64 = 56.0;

/// Peaks, historical floods and paleo bound without measurement error.
pub fn standin_records() -> PeakDataset {
    let rdb = parse_usgs_rdb(PEAKS_RDB, DischargeUnit::Cfs).expect("shipped peak file parses");
    let events = parse_event_csv(EVENTS_CSV).expect("shipped event file parses");
    let censoring = CensoringSpec::from_historical(&events.historical, GAGE_START).expect("historical floods present");
    PeakDataset::new(rdb.peaks, events.historical, Some(censoring), events.paleo)
        .expect("shipped records are consistent")
}

/// [`standin_records`] with the default error models attached.
pub fn standin_dataset() -> PeakDataset {
    attach_error_models(&standin_records(), &ErrorConfig::default()).expect("default error config is valid")
}

pub fn standin_hydrographs() -> Vec<Hydrograph> {
    HYDROGRAPH_CSVS
        .iter()
        .map(|(label, csv)| read_hydrograph_csv(csv, label, None).expect("shipped hydrograph parses"))
        .collect()
}

pub fn standin_reservoir() -> ReservoirSpec {
    ReservoirSpec::new(
        RatingCurve::from_csv(STORAGE_CSV, "storage_m3").expect("shipped storage curve parses"),
        RatingCurve::from_csv(DISCHARGE_CSV, "discharge_m3s").expect("shipped discharge curve parses"),
        INITIAL_STAGE,
        FLOOD_POOL_TOP,
        CREST,
    )
    .and_then(|r| r.with_routing_step(1800.0))
    .expect("shipped reservoir is valid")
}
