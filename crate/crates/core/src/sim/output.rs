use std::path::Path;
use std::process::Command;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::report::{write_sqp_runs, BeamPatternSet, SqpRun};
use super::sweep::{ExperimentResult, Resample, ResultRow};
use crate::design::Strategy;
use crate::error::Result;

pub const MANIFEST_FILE: &str = "run_manifest.json";

/// Which figure pair a sweep feeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    Snr,
    Tradeoff,
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub crate_version: &'static str,
    pub git_describe: Option<String>,
    pub config: ExperimentConfig,
    pub files: Vec<String>,
    pub resamples: Vec<Resample>,
}

/// `git describe --always --dirty` of the working directory, if available.
pub fn git_describe() -> Option<String> {
    let out = Command::new("git").args(["describe", "--always", "--dirty"]).output().ok()?;
    out.status.success().then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
}

fn write_manifest(dir: &Path, command: &str, cfg: &ExperimentConfig, files: Vec<String>, resamples: Vec<Resample>) -> Result<()> {
    let manifest = RunManifest {
        command: command.into(),
        crate_version: env!("CARGO_PKG_VERSION"),
        git_describe: git_describe(),
        config: cfg.clone(),
        files,
        resamples,
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(dir.join(MANIFEST_FILE), text + "\n")?;
    Ok(())
}

#[derive(Serialize)]
struct SerRow {
    strategy: Strategy,
    rho: Option<f64>,
    snr_db: f64,
    ser: f64,
    low_confidence: bool,
}

#[derive(Serialize)]
struct RateRow {
    strategy: Strategy,
    rho: Option<f64>,
    snr_db: f64,
    rate: f64,
    rate_ideal: Option<f64>,
}

fn write_rows<T: Serialize>(path: &Path, rows: impl Iterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn ser_row(r: &ResultRow) -> SerRow {
    SerRow { strategy: r.strategy, rho: r.rho, snr_db: r.snr_db, ser: r.ser, low_confidence: r.low_confidence }
}

fn rate_row(r: &ResultRow) -> RateRow {
    RateRow { strategy: r.strategy, rho: r.rho, snr_db: r.snr_db, rate: r.rate, rate_ideal: r.rate_ideal }
}

/// Full result table, the two figure tables and the manifest.
pub fn write_sweep_outputs(result: &ExperimentResult, kind: SweepKind, cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let (full, ser, rate, command) = match kind {
        SweepKind::Snr => ("ser_sweep.csv", "fig1_ser.csv", "fig2_rate.csv", "ser-sweep"),
        SweepKind::Tradeoff => ("tradeoff_sweep.csv", "fig3_ser_vs_factor.csv", "fig4_rate_vs_factor.csv", "tradeoff-sweep"),
    };
    result.write_csv(&dir.join(full))?;
    write_rows(&dir.join(ser), result.rows.iter().map(ser_row))?;
    write_rows(&dir.join(rate), result.rows.iter().map(rate_row))?;
    let files = [full, ser, rate].map(String::from).to_vec();
    write_manifest(dir, command, cfg, files, result.resamples.clone())
}

/// `beampatterns.csv`, `nmse_crb.csv` and the manifest.
pub fn write_beampattern_outputs(set: &BeamPatternSet, cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    set.write_patterns_csv(&dir.join("beampatterns.csv"))?;
    set.write_metrics_csv(&dir.join("nmse_crb.csv"))?;
    let files = vec!["beampatterns.csv".into(), "nmse_crb.csv".into()];
    write_manifest(dir, "beampattern", cfg, files, Vec::new())
}

/// Per-factor traces, `sqp_summary.csv` and the manifest.
pub fn write_sqp_outputs(runs: &[SqpRun], cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let files = write_sqp_runs(runs, dir)?;
    write_manifest(dir, "sqp-trace", cfg, files, Vec::new())
}
