//! Run configuration (TOML, `schema_version = 1`).
//!
//! Relative paths are resolved against the directory holding the config file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use damrisk::hydrodata::DischargeUnit;
use damrisk::{ErrorConfig, FitConfig, LikelihoodConfig, SafetyThresholds};

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_RETURN_PERIODS: [f64; 19] = [
    1.5, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1e3, 2e3, 5e3, 1e4, 2e4, 5e4, 1e5, 2e5, 5e5, 1e6,
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub data: DataConfig,
    #[serde(default)]
    pub errors: ErrorConfig,
    #[serde(default)]
    pub likelihood: LikelihoodConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub hydrographs: Vec<HydrographConfig>,
    pub reservoir: Option<ReservoirConfig>,
    #[serde(default)]
    pub safety: SafetyConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub peaks_rdb: PathBuf,
    #[serde(default)]
    pub discharge_unit: DischargeUnit,
    /// Historical floods and paleo bounds.
    pub events_csv: Option<PathBuf>,
    /// First gaged year; defaults to the earliest peak.
    pub gage_start: Option<i32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HydrographConfig {
    pub label: String,
    pub path: PathBuf,
    /// Linearly resample to this step (s) on load.
    pub resample_step: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirConfig {
    pub storage_csv: PathBuf,
    pub discharge_csv: PathBuf,
    pub initial_stage: f64,
    pub flood_pool_top: f64,
    pub crest: f64,
    pub routing_step: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SafetyConfig {
    pub lower: f64,
    pub upper: f64,
    /// Overtopping search ceiling as a multiple of the flood of record.
    pub ceiling_multiple: f64,
    pub rel_tol: f64,
    /// Return periods for hazard bands and frequency curves.
    pub return_periods: Vec<f64>,
}

impl Default for SafetyConfig {
    fn default() -> Self {
        let t = SafetyThresholds::default();
        SafetyConfig {
            lower: t.lower,
            upper: t.upper,
            ceiling_multiple: 1000.0,
            rel_tol: 1e-4,
            return_periods: DEFAULT_RETURN_PERIODS.to_vec(),
        }
    }
}

impl SafetyConfig {
    pub fn thresholds(&self) -> Result<SafetyThresholds> {
        Ok(SafetyThresholds::new(self.lower, self.upper)?)
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            bail!(
                "{}: schema_version {} is not supported (expected {SCHEMA_VERSION})",
                path.display(),
                cfg.schema_version
            );
        }
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve(base);
        Ok(cfg)
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.output_dir);
        join(&mut self.data.peaks_rdb);
        if let Some(p) = self.data.events_csv.as_mut() {
            join(p);
        }
        for h in &mut self.hydrographs {
            join(&mut h.path);
        }
        if let Some(r) = self.reservoir.as_mut() {
            join(&mut r.storage_csv);
            join(&mut r.discharge_csv);
        }
    }
}

/// Reads a file named by the config, naming the path on failure.
pub fn read_input(path: &Path, what: &str) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {what} {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg: RunConfig = toml::from_str(
            r#"
            schema_version = 1
            [data]
            peaks_rdb = "peaks.rdb"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.fit, FitConfig::default());
        assert_eq!(cfg.likelihood, LikelihoodConfig::default());
        assert_eq!(cfg.safety.thresholds().unwrap(), SafetyThresholds::default());
        assert!(cfg.reservoir.is_none());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r: Result<RunConfig, _> = toml::from_str(
            r#"
            schema_version = 1
            [data]
            peaks_rdb = "p.rdb"
            [fit]
            seedz = [1]
            "#,
        );
        assert!(r.is_err());
    }

    #[test]
    fn paths_resolve_against_config_dir() {
        let mut cfg: RunConfig = toml::from_str(
            r#"
            schema_version = 1
            [data]
            peaks_rdb = "p.rdb"
            events_csv = "/abs/e.csv"
            "#,
        )
        .unwrap();
        cfg.resolve(Path::new("/cfg"));
        assert_eq!(cfg.data.peaks_rdb, PathBuf::from("/cfg/p.rdb"));
        assert_eq!(cfg.data.events_csv, Some(PathBuf::from("/abs/e.csv")));
        assert_eq!(cfg.output_dir, PathBuf::from("/cfg/out"));
    }
}
