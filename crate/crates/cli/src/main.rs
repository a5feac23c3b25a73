mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use damrisk::Family;

use crate::config::RunConfig;

/// Flood frequency fitting and dam overtopping assessment.
#[derive(Parser)]
#[command(name = "damrisk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit distributions by maximum likelihood and write one JSON per family.
    Fit(Common),
    /// Rank fitted families by AIC and BIC.
    Rank(Common),
    /// Route the hydrographs through the reservoir and find overtopping peaks.
    Route {
        #[command(flatten)]
        common: Common,
        /// Peak (m³/s) to scale every shape to; default is the flood of record.
        #[arg(long)]
        peak: Option<f64>,
    },
    /// Overtopping return periods and safety classes for every fitted family.
    Assess(Common),
    /// Write figure data (plotting positions, hydrographs, curves, bands).
    PlotData(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Family name, or `all`.
    #[arg(long, default_value = "all")]
    family: String,
    /// Comma-separated DE seeds, overriding the config.
    #[arg(long, value_delimiter = ',')]
    seed_list: Option<Vec<u64>>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<(RunConfig, Vec<Family>)> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(seeds) = &self.seed_list {
            if seeds.is_empty() {
                bail!("--seed-list is empty");
            }
            cfg.fit.seeds = seeds.clone();
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        let families = if self.family.eq_ignore_ascii_case("all") {
            Family::ALL.to_vec()
        } else {
            vec![self.family.parse()?]
        };
        Ok((cfg, families))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(c) => {
            let (cfg, fams) = c.load()?;
            commands::fit(&cfg, &fams).map(|_| ())
        }
        Command::Rank(c) => {
            let (cfg, fams) = c.load()?;
            commands::rank(&cfg, &fams)
        }
        Command::Route { common, peak } => {
            let (cfg, _) = common.load()?;
            commands::route(&cfg, peak)
        }
        Command::Assess(c) => {
            let (cfg, fams) = c.load()?;
            commands::assess_cmd(&cfg, &fams)
        }
        Command::PlotData(c) => {
            let (cfg, fams) = c.load()?;
            commands::plot_data(&cfg, &fams)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
