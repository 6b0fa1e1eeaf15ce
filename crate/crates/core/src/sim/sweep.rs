use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::receiver::LinkFilter;
use super::report::StrictReference;
use crate::design::{DesignOutcome, Designer, Strategy};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::FreqChannel;
use crate::radar::angle_grid;
use crate::rng::{GaussianSource, Purpose};

/// Resamples allowed per trial before the run is aborted.
pub const MAX_RESAMPLES: usize = 3;

/// Point estimates at one `(strategy, factor, SNR)`, averaged over trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub strategy: Strategy,
    pub rho: Option<f64>,
    pub snr_db: f64,
    /// Pooled over all trials and frames.
    pub ser: f64,
    /// Bits per subcarrier use.
    pub rate: f64,
    /// Log-det rate of the ideal AR-max covariance.
    pub rate_ideal: Option<f64>,
    pub nmse: f64,
    pub normalized_crb: f64,
    /// Mean SQP iterations for AR-max designs.
    pub sqp_iterations: Option<f64>,
    /// Worst time/frequency covariance mismatch over trials.
    pub max_cov_residual: f64,
    /// Smallest ideal-minus-actual rate over trials.
    pub min_rate_gap: Option<f64>,
    pub symbol_errors: u64,
    pub decisions: u64,
    /// Fewer than 100 observed errors, so `ser` is only a rough estimate.
    pub low_confidence: bool,
    /// Design plus simulation time summed over trials. Not written to disk.
    #[serde(skip)]
    pub wall_time_ms: f64,
}

/// A trial whose channel was redrawn after a design failure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resample {
    pub trial: u64,
    pub attempt: u64,
    pub strategy: Strategy,
    pub rho: Option<f64>,
    pub snr_db: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub resamples: Vec<Resample>,
}

impl ExperimentResult {
    pub fn rows_for(&self, strategy: Strategy) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(move |r| r.strategy == strategy)
    }

    pub fn find(&self, strategy: Strategy, rho: Option<f64>, snr_db: f64) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.strategy == strategy && r.rho == rho && r.snr_db == snr_db)
    }

    /// Every column except the wall time.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// SER, rates and radar metrics over `snr_db_list` for every configured
/// strategy and factor.
pub fn run_ser_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run(cfg, &cfg.snr_db_list)
}

/// The same metrics at `reference_snr_db` only, one row per factor.
pub fn run_tradeoff_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run(cfg, &[cfg.reference_snr_db])
}

#[derive(Clone, Default)]
struct Tally {
    errors: u64,
    decisions: u64,
    rate: f64,
    rate_ideal: Option<f64>,
    nmse: f64,
    normalized_crb: f64,
    sqp_iterations: Option<f64>,
    cov_residual: f64,
    rate_gap: Option<f64>,
    wall_ms: f64,
}

impl Tally {
    fn add(&mut self, o: &Tally) {
        self.errors += o.errors;
        self.decisions += o.decisions;
        self.rate += o.rate;
        self.rate_ideal = sum_opt(self.rate_ideal, o.rate_ideal);
        self.nmse += o.nmse;
        self.normalized_crb += o.normalized_crb;
        self.sqp_iterations = sum_opt(self.sqp_iterations, o.sqp_iterations);
        self.cov_residual = self.cov_residual.max(o.cov_residual);
        self.rate_gap = match (self.rate_gap, o.rate_gap) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.wall_ms += o.wall_ms;
    }
}

fn sum_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x + y),
    }
}

/// One trial's tallies, indexed `[point][snr]`, plus its resample events.
struct TrialOutcome {
    tallies: Vec<Vec<Tally>>,
    resamples: Vec<Resample>,
}

fn run(cfg: &ExperimentConfig, snrs: &[f64]) -> Result<ExperimentResult> {
    cfg.validate()?;
    if let Some(st) = cfg.strategies.iter().find(|s| !s.has_link()) {
        return Err(Error::Config(format!("{st} has no communication link to simulate")));
    }
    let points = cfg.design_points();
    let outcomes: Vec<Result<TrialOutcome>> =
        (0..cfg.n_trials as u64).into_par_iter().map(|t| run_trial(cfg, t, &points, snrs)).collect();

    let mut totals = vec![vec![Tally::default(); snrs.len()]; points.len()];
    let mut resamples = Vec::new();
    for outcome in outcomes {
        let outcome = outcome?;
        for (acc, trial) in totals.iter_mut().zip(&outcome.tallies) {
            for (a, t) in acc.iter_mut().zip(trial) {
                a.add(t);
            }
        }
        resamples.extend(outcome.resamples);
    }

    let n = cfg.n_trials as f64;
    let mut rows = Vec::with_capacity(points.len() * snrs.len());
    for (&(strategy, rho), acc) in points.iter().zip(&totals) {
        for (&snr_db, t) in snrs.iter().zip(acc) {
            rows.push(ResultRow {
                strategy,
                rho,
                snr_db,
                ser: t.errors as f64 / t.decisions.max(1) as f64,
                rate: t.rate / n,
                rate_ideal: t.rate_ideal.map(|r| r / n),
                nmse: t.nmse / n,
                normalized_crb: t.normalized_crb / n,
                sqp_iterations: t.sqp_iterations.map(|i| i / n),
                max_cov_residual: t.cov_residual,
                min_rate_gap: t.rate_gap,
                symbol_errors: t.errors,
                decisions: t.decisions,
                low_confidence: t.errors < 100,
                wall_time_ms: t.wall_ms,
            });
        }
    }
    Ok(ExperimentResult { rows, resamples })
}

/// Frames shared by every design and SNR of a trial.
struct FrameSet {
    symbols: Vec<Vec<u8>>,
    noise: Vec<Vec<C64>>,
}

impl FrameSet {
    fn draw(cfg: &ExperimentConfig, trial: u64) -> Self {
        let len = cfg.system.n_sc * cfg.system.n_rx;
        let mut sym_rng = GaussianSource::for_trial(cfg.seed, trial, 0, Purpose::Symbols);
        let mut noise_rng = GaussianSource::for_trial(cfg.seed, trial, 0, Purpose::Noise);
        let symbols = (0..cfg.n_symbols)
            .map(|_| (0..len).map(|_| sym_rng.uniform_index(4) as u8).collect())
            .collect();
        let noise = (0..cfg.n_symbols)
            .map(|_| (0..len).map(|_| noise_rng.complex_normal(1.0)).collect())
            .collect();
        Self { symbols, noise }
    }
}

fn run_trial(cfg: &ExperimentConfig, trial: u64, points: &[(Strategy, Option<f64>)], snrs: &[f64]) -> Result<TrialOutcome> {
    let frames = FrameSet::draw(cfg, trial);
    let mut resamples = Vec::new();
    for attempt in 0..=MAX_RESAMPLES as u64 {
        let chan = cfg.trial_channel(trial, attempt)?;
        match simulate_channel(cfg, &chan, points, snrs, &frames) {
            Ok(tallies) => return Ok(TrialOutcome { tallies, resamples }),
            Err(Failure { error, .. }) if error.is_validation() => return Err(error),
            Err(Failure { error, strategy, rho, snr_db }) => {
                log::warn!("trial {trial} attempt {attempt}: {strategy} design failed: {error}");
                resamples.push(Resample { trial, attempt, strategy, rho, snr_db, reason: error.to_string() });
            }
        }
    }
    let reason = resamples.last().map(|r| r.reason.clone()).unwrap_or_default();
    Err(Error::DesignFailed { attempts: MAX_RESAMPLES + 1, reason: format!("trial {trial}: {reason}") })
}

struct Failure {
    error: Error,
    strategy: Strategy,
    rho: Option<f64>,
    snr_db: f64,
}

fn simulate_channel(
    cfg: &ExperimentConfig,
    chan: &FreqChannel,
    points: &[(Strategy, Option<f64>)],
    snrs: &[f64],
    frames: &FrameSet,
) -> std::result::Result<Vec<Vec<Tally>>, Failure> {
    let fail = |strategy, rho, snr_db| move |error| Failure { error, strategy, rho, snr_db };
    let first = points.first().map_or((Strategy::IsiMinStrict, None), |p| *p);
    let base = cfg.system_at(snrs[0]);
    let mut designer =
        Designer::new(chan, &base, &cfg.scene, cfg.sqp.clone()).map_err(fail(first.0, first.1, snrs[0]))?;
    let grid = angle_grid(cfg.grid_points);
    let reference =
        StrictReference::new(&mut designer, &cfg.scene, &grid).map_err(fail(Strategy::IsiMinStrict, None, snrs[0]))?;

    let mut out = Vec::with_capacity(points.len());
    for &(strategy, rho) in points {
        // ISI-min designs ignore the noise level, so one design serves all SNRs.
        let noise_free = matches!(strategy, Strategy::IsiMinStrict | Strategy::IsiMinTradeoff);
        let mut cached: Option<(DesignOutcome, f64, Tally)> = None;
        let mut row = Vec::with_capacity(snrs.len());
        for &snr_db in snrs {
            let err = fail(strategy, rho, snr_db);
            let sys = cfg.system_at(snr_db);
            let start = Instant::now();
            designer.set_noise_var(sys.noise_var);
            if cached.is_none() || !noise_free {
                let design = designer.design(strategy, rho).map_err(err)?;
                design.validate(sys.total_power).map_err(err)?;
                let radar = Tally {
                    nmse: reference.nmse(&design, &cfg.system, &grid).map_err(err)?,
                    normalized_crb: reference.normalized_crb(&design, &cfg.system, &cfg.scene).map_err(err)?,
                    sqp_iterations: design.sqp_iterations().map(|i| i as f64),
                    cov_residual: design.covariances.time_freq_residual(),
                    ..Tally::default()
                };
                let design_ms = start.elapsed().as_secs_f64() * 1e3;
                cached = Some((design, design_ms, radar));
            }
            let (design, design_ms, radar) = cached.as_ref().expect("design is set above");
            let sim_start = Instant::now();
            let (rate, rate_ideal) = design.rates(chan, sys.noise_var).map_err(err)?;
            let link = LinkFilter::new(chan, design, sys.noise_var).map_err(err)?;
            let rate_gap = rate_ideal.map(|ideal| ideal - rate);
            let mut tally = Tally { rate, rate_ideal, rate_gap, ..radar.clone() };
            for (syms, noise) in frames.symbols.iter().zip(&frames.noise) {
                let (e, d) = link.transmit(syms, noise);
                tally.errors += e;
                tally.decisions += d;
            }
            let first_use = row.is_empty() || !noise_free;
            tally.wall_ms = sim_start.elapsed().as_secs_f64() * 1e3 + if first_use { *design_ms } else { 0.0 };
            row.push(tally);
        }
        out.push(row);
    }
    Ok(out)
}
