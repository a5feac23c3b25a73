use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use damrisk::hydraulics::read_hydrograph_csv;
use damrisk::hydrodata::{
    attach_error_models, empirical_return_periods, parse_event_csv, parse_usgs_rdb, EventRecords,
};
use damrisk::safety::{assess, hazard_band, quantile_comparison, SafetyClass};
use damrisk::{
    fit_mle, rank_models, CensoringSpec, Family, FittedModel, Hydrograph, ModelScore, OvertopSearch, PeakDataset,
    RatingCurve, ReservoirSpec,
};

use crate::config::{read_input, RunConfig};

pub fn load_dataset(cfg: &RunConfig) -> Result<PeakDataset> {
    let text = read_input(&cfg.data.peaks_rdb, "peak file")?;
    let rdb = parse_usgs_rdb(&text, cfg.data.discharge_unit)
        .with_context(|| format!("parsing {}", cfg.data.peaks_rdb.display()))?;
    let events = match &cfg.data.events_csv {
        Some(p) => {
            parse_event_csv(&read_input(p, "event file")?).with_context(|| format!("parsing {}", p.display()))?
        }
        None => EventRecords::default(),
    };
    let first = rdb
        .peaks
        .iter()
        .map(|p| p.water_year)
        .min()
        .ok_or_else(|| anyhow!("peak file has no peaks"))?;
    let gage_start = cfg.data.gage_start.unwrap_or(first);
    let censoring = if events.historical.is_empty() {
        None
    } else {
        Some(CensoringSpec::from_historical(&events.historical, gage_start)?)
    };
    let dataset = PeakDataset::new(rdb.peaks, events.historical, censoring, events.paleo)?;
    Ok(attach_error_models(&dataset, &cfg.errors)?)
}

pub fn load_hydrographs(cfg: &RunConfig) -> Result<Vec<Hydrograph>> {
    if cfg.hydrographs.is_empty() {
        bail!("config lists no [[hydrographs]]");
    }
    cfg.hydrographs
        .iter()
        .map(|h| {
            let text = read_input(&h.path, "hydrograph")?;
            read_hydrograph_csv(&text, &h.label, h.resample_step)
                .with_context(|| format!("parsing {}", h.path.display()))
        })
        .collect()
}

pub fn load_reservoir(cfg: &RunConfig) -> Result<ReservoirSpec> {
    let r = cfg
        .reservoir
        .as_ref()
        .ok_or_else(|| anyhow!("config has no [reservoir] section"))?;
    let storage = RatingCurve::from_csv(&read_input(&r.storage_csv, "storage curve")?, "storage_m3")
        .with_context(|| format!("parsing {}", r.storage_csv.display()))?;
    let discharge = RatingCurve::from_csv(&read_input(&r.discharge_csv, "discharge curve")?, "discharge_m3s")
        .with_context(|| format!("parsing {}", r.discharge_csv.display()))?;
    let mut spec = ReservoirSpec::new(storage, discharge, r.initial_stage, r.flood_pool_top, r.crest)?;
    if let Some(step) = r.routing_step {
        spec = spec.with_routing_step(step)?;
    }
    Ok(spec)
}

fn flood_of_record(d: &PeakDataset) -> f64 {
    d.peaks()
        .iter()
        .map(|p| p.discharge)
        .chain(d.historical().iter().map(|h| h.discharge))
        .fold(0.0, f64::max)
}

fn search(cfg: &RunConfig, d: &PeakDataset) -> OvertopSearch {
    let q = flood_of_record(d);
    OvertopSearch {
        ceiling: cfg.safety.ceiling_multiple * q,
        rel_tol: cfg.safety.rel_tol,
        ..OvertopSearch::from_flood_of_record(q)
    }
}

fn fits_dir(out: &Path) -> PathBuf {
    out.join("fits")
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn summary_table(fits: &[FittedModel]) -> String {
    let mut rows: Vec<&FittedModel> = fits.iter().collect();
    rows.sort_by(|a, b| a.bic.total_cmp(&b.bic).then(a.k.cmp(&b.k)));
    let mut s = format!(
        "{:<10} {:>2} {:>12} {:>10} {:>10}  converged\n",
        "family", "k", "loglik", "AIC", "BIC"
    );
    for f in rows {
        s += &format!(
            "{:<10} {:>2} {:>12.3} {:>10.3} {:>10.3}  {}\n",
            f.family().name(),
            f.k,
            f.loglik,
            f.aic,
            f.bic,
            f.converged
        );
    }
    s
}

/// Fits each family and writes `fits/<FAMILY>.json`. A failing family is
/// reported and the rest still run; the result is an error if any failed.
pub fn fit(cfg: &RunConfig, families: &[Family]) -> Result<Vec<FittedModel>> {
    let data = load_dataset(cfg)?;
    let dir = fits_dir(&cfg.output_dir);
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut fits = Vec::new();
    let mut failed = Vec::new();
    for &family in families {
        match fit_mle(family, &data, &cfg.likelihood, &cfg.fit) {
            Ok(f) => {
                write_json(&dir.join(format!("{}.json", family.name())), &f)?;
                fits.push(f);
            }
            Err(e) => {
                eprintln!("{family}: fit failed: {e}");
                failed.push(family.name());
            }
        }
    }
    if !fits.is_empty() {
        print!("{}", summary_table(&fits));
    }
    if !failed.is_empty() {
        bail!("fits failed for {}", failed.join(", "));
    }
    Ok(fits)
}

/// Reads the fit artifacts for `families` that exist; errors if none do.
pub fn load_fits(cfg: &RunConfig, families: &[Family]) -> Result<Vec<FittedModel>> {
    let dir = fits_dir(&cfg.output_dir);
    let mut fits = Vec::new();
    for family in families {
        let path = dir.join(format!("{}.json", family.name()));
        if !path.exists() {
            continue;
        }
        let text = fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
        fits.push(serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?);
    }
    if fits.is_empty() {
        bail!(
            "no fit artifacts in {}; run `damrisk fit --config <file>` first",
            dir.display()
        );
    }
    Ok(fits)
}

#[derive(Serialize)]
struct RankReport {
    n: usize,
    scores: Vec<ModelScore>,
    by_aic: Vec<Family>,
    by_bic: Vec<Family>,
}

pub fn rank(cfg: &RunConfig, families: &[Family]) -> Result<()> {
    let fits = load_fits(cfg, families)?;
    if fits.len() < 2 {
        bail!("ranking needs at least two fitted families, found {}", fits.len());
    }
    let scores: Vec<ModelScore> = fits.iter().map(ModelScore::from).collect();
    let r = rank_models(&scores);
    print!("{}", summary_table(&fits));
    println!("by AIC: {}", names(&r.by_aic));
    println!("by BIC: {}", names(&r.by_bic));
    write_json(
        &cfg.output_dir.join("ranking.json"),
        &RankReport {
            n: fits[0].n,
            scores,
            by_aic: r.by_aic,
            by_bic: r.by_bic,
        },
    )
}

fn names(f: &[Family]) -> String {
    f.iter().map(|f| f.name()).collect::<Vec<_>>().join(", ")
}

#[derive(Serialize)]
struct RouteRow {
    time_s: f64,
    inflow_m3s: f64,
    outflow_m3s: f64,
    stage_m: f64,
    storage_m3: f64,
}

#[derive(Serialize)]
struct RouteSummary {
    shape: String,
    peak_inflow: f64,
    peak_outflow: f64,
    peak_stage: f64,
    overtopped: bool,
    extrapolated: bool,
    mass_balance_error: f64,
    overtopping_peak: Option<f64>,
}

/// Routes every shape scaled to `peak` (default: flood of record) and finds
/// each shape's overtopping peak.
pub fn route(cfg: &RunConfig, peak: Option<f64>) -> Result<()> {
    let data = load_dataset(cfg)?;
    let shapes = load_hydrographs(cfg)?;
    let reservoir = load_reservoir(cfg)?;
    let peak = peak.unwrap_or_else(|| flood_of_record(&data));
    let over = damrisk::safety::overtopping_peaks(&shapes, &reservoir, &search(cfg, &data))?;
    let dir = cfg.output_dir.join("routes");
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut summary = Vec::new();
    for (shape, o) in shapes.iter().zip(over) {
        let inflow = shape.scale_to_peak(peak)?;
        let t = damrisk::route_level_pool(&inflow, &reservoir).with_context(|| format!("routing {}", shape.label))?;
        write_csv(
            &dir.join(format!("{}.csv", shape.label)),
            (0..inflow.ordinates.len()).map(|i| RouteRow {
                time_s: i as f64 * inflow.step,
                inflow_m3s: inflow.ordinates[i],
                outflow_m3s: t.outflows[i],
                stage_m: t.stages[i],
                storage_m3: t.storages[i],
            }),
        )?;
        println!(
            "{:<16} peak stage {:>8.3} m  overtopping peak {}",
            shape.label,
            t.peak_stage,
            o.peak
                .map_or("none within search".to_string(), |p| format!("{p:.1} m3/s"))
        );
        summary.push(RouteSummary {
            shape: shape.label.clone(),
            peak_inflow: peak,
            peak_outflow: t.peak_outflow(),
            peak_stage: t.peak_stage,
            overtopped: t.overtopped,
            extrapolated: t.extrapolated,
            mass_balance_error: t.mass_balance_error(&inflow),
            overtopping_peak: o.peak,
        });
    }
    write_json(&cfg.output_dir.join("routing.json"), &summary)
}

#[derive(Serialize)]
struct AssessRow {
    model: Family,
    shape: String,
    overtopping_peak: Option<f64>,
    /// `null` stands for +∞.
    return_period: f64,
    class: SafetyClass,
}

#[derive(Serialize)]
struct AssessReport {
    thresholds: damrisk::SafetyThresholds,
    rows: Vec<AssessRow>,
    verdicts: Vec<damrisk::SafetyVerdict>,
}

pub fn assess_cmd(cfg: &RunConfig, families: &[Family]) -> Result<()> {
    let fits = load_fits(cfg, families)?;
    let data = load_dataset(cfg)?;
    let shapes = load_hydrographs(cfg)?;
    let reservoir = load_reservoir(cfg)?;
    let thresholds = cfg.safety.thresholds()?;
    let models: Vec<_> = fits.iter().map(|f| &f.model).collect();
    let a = assess(&models, &shapes, &reservoir, &search(cfg, &data), &thresholds)?;

    let mut rows = Vec::new();
    for v in &a.verdicts {
        for (i, o) in a.overtopping.iter().enumerate() {
            rows.push(AssessRow {
                model: v.model,
                shape: o.shape.clone(),
                overtopping_peak: o.peak,
                return_period: v.return_periods[i],
                class: v.classes[i],
            });
        }
        println!(
            "{:<10} {:<14} T = {}",
            v.model.name(),
            v.class.name(),
            v.return_periods
                .iter()
                .map(|t| format!("{t:.0}"))
                .collect::<Vec<_>>()
                .join(" / ")
        );
    }
    fs::create_dir_all(&cfg.output_dir).with_context(|| format!("cannot create {}", cfg.output_dir.display()))?;
    write_json(
        &cfg.output_dir.join("assessment.json"),
        &AssessReport {
            thresholds,
            rows,
            verdicts: a.verdicts,
        },
    )?;
    write_fit_figures(cfg, &fits, &data, Some((&shapes, &reservoir)))
}

#[derive(Serialize)]
struct FrequencyRow {
    return_period_years: f64,
    family: Family,
    discharge_m3s: f64,
}

/// Frequency curves, hazard bands, quantile comparison and plotting positions.
fn write_fit_figures(
    cfg: &RunConfig,
    fits: &[FittedModel],
    data: &PeakDataset,
    routing: Option<(&[Hydrograph], &ReservoirSpec)>,
) -> Result<()> {
    let out = &cfg.output_dir;
    let ts = &cfg.safety.return_periods;
    write_csv(&out.join("plotting_positions.csv"), plotting_rows(data))?;
    let mut freq = Vec::new();
    for f in fits {
        for &t in ts {
            freq.push(FrequencyRow {
                return_period_years: t,
                family: f.family(),
                discharge_m3s: f.model.return_level(t)?,
            });
        }
    }
    write_csv(&out.join("frequency_curves.csv"), freq)?;
    if let Some((shapes, reservoir)) = routing {
        for f in fits {
            let curve = hazard_band(&f.model, shapes, reservoir, ts)?;
            let path = out.join(format!("hazard_{}.csv", f.family().name()));
            fs::write(&path, curve.to_csv()).with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    let find = |fam| fits.iter().find(|f| f.family() == fam);
    if let (Some(lp3), Some(mg)) = (find(Family::Lp3), find(Family::MixedGev)) {
        let rows = quantile_comparison(&lp3.model, &mg.model, &[100.0, 500.0, 1000.0, 1e4, 1e5])?;
        write_json(&out.join("quantile_comparison_LP3_vs_MixedGEV.json"), &rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PlottingRow {
    source: damrisk::hydrodata::PointSource,
    discharge_m3s: f64,
    return_period_years: f64,
    discharge_lower_m3s: Option<f64>,
    discharge_upper_m3s: Option<f64>,
}

fn plotting_rows(data: &PeakDataset) -> Vec<PlottingRow> {
    empirical_return_periods(data)
        .into_iter()
        .map(|p| PlottingRow {
            source: p.source,
            discharge_m3s: p.discharge,
            return_period_years: p.return_period,
            discharge_lower_m3s: p.discharge_range.map(|r| r.0),
            discharge_upper_m3s: p.discharge_range.map(|r| r.1),
        })
        .collect()
}

/// Figure data: plotting positions, hydrographs and cumulative volumes, plus
/// frequency curves and hazard bands when fits (and a reservoir) exist.
pub fn plot_data(cfg: &RunConfig, families: &[Family]) -> Result<()> {
    let data = load_dataset(cfg)?;
    let out = &cfg.output_dir;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    write_csv(&out.join("plotting_positions.csv"), plotting_rows(&data))?;

    let shapes = if cfg.hydrographs.is_empty() {
        Vec::new()
    } else {
        load_hydrographs(cfg)?
    };
    if !shapes.is_empty() {
        let mut w = csv::Writer::from_path(out.join("hydrographs.csv"))?;
        w.write_record(["shape", "time_s", "discharge_m3s", "cumulative_volume_m3"])?;
        for s in &shapes {
            for (i, (q, v)) in s.ordinates.iter().zip(s.cumulative_volume()).enumerate() {
                w.write_record([
                    s.label.clone(),
                    (i as f64 * s.step).to_string(),
                    q.to_string(),
                    v.to_string(),
                ])?;
            }
        }
        w.flush()?;
    }

    let fits = match load_fits(cfg, families) {
        Ok(f) => f,
        Err(_) => {
            eprintln!("no fit artifacts; skipping frequency curves and hazard bands");
            return Ok(());
        }
    };
    let reservoir = match &cfg.reservoir {
        Some(_) if !shapes.is_empty() => Some(load_reservoir(cfg)?),
        _ => None,
    };
    write_fit_figures(cfg, &fits, &data, reservoir.as_ref().map(|r| (shapes.as_slice(), r)))
}
