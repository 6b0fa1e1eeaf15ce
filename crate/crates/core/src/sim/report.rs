use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use crate::design::{DesignOutcome, DesignReport, Designer, Strategy};
use crate::error::{Error, Result};
use crate::model::SystemConfig;
use crate::opt::SqpOutcome;
use crate::radar::{angle_grid, beampattern_nmse, BeamPattern, RadarScene};
use crate::radar_design::RadarOnlyDesign;

/// Beampattern and CRB of the strict ISI-min design, the baseline for NMSE
/// and normalized CRB.
pub(crate) struct StrictReference {
    pattern: BeamPattern,
    crb: f64,
}

impl StrictReference {
    pub(crate) fn new(designer: &mut Designer<'_>, scene: &RadarScene, grid: &[f64]) -> Result<Self> {
        let strict = designer.design(Strategy::IsiMinStrict, None)?;
        let config = designer.config().clone();
        let crb = strict.crb(&config, scene)?;
        if !crb.is_finite() {
            return Err(Error::Numerical("strict design does not illuminate the target".into()));
        }
        Ok(Self { pattern: strict.beampattern(&config, grid), crb })
    }

    pub(crate) fn nmse(&self, design: &DesignOutcome, config: &SystemConfig, grid: &[f64]) -> Result<f64> {
        beampattern_nmse(&self.pattern, &design.beampattern(config, grid))
    }

    pub(crate) fn normalized_crb(&self, design: &DesignOutcome, config: &SystemConfig, scene: &RadarScene) -> Result<f64> {
        Ok(design.crb(config, scene)? / self.crb)
    }

}

/// Single design on the design channel at `reference_snr_db`, with radar
/// metrics relative to the strict design.
pub fn design_report(cfg: &ExperimentConfig, strategy: Strategy, rho: Option<f64>) -> Result<DesignReport> {
    cfg.validate()?;
    let chan = cfg.design_channel()?;
    let sys = cfg.reference_system();
    let mut designer = Designer::new(&chan, &sys, &cfg.scene, cfg.sqp.clone())?;
    let design = designer.design(strategy, rho)?;
    design.validate(sys.total_power)?;
    let strict = designer.design(Strategy::IsiMinStrict, None)?;
    let reference = RadarOnlyDesign {
        covariance: strict.radar_covariance().clone(),
        achieved_crb: strict.crb(&sys, &cfg.scene)?,
    };
    design.report(&chan, &sys, &cfg.scene, &reference)
}

/// Trial-averaged beampattern of one design point.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternEntry {
    pub strategy: Strategy,
    pub rho: Option<f64>,
    pub pattern: BeamPattern,
    /// Mean over trials.
    pub nmse: f64,
    pub normalized_crb: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BeamPatternSet {
    pub entries: Vec<PatternEntry>,
}

#[derive(Serialize)]
struct PatternRow {
    strategy: Strategy,
    rho: Option<f64>,
    angle_deg: f64,
    gain_linear: f64,
    gain_db: f64,
}

#[derive(Serialize)]
struct MetricRow {
    strategy: Strategy,
    rho: Option<f64>,
    nmse: f64,
    normalized_crb: f64,
}

impl BeamPatternSet {
    pub fn entry(&self, strategy: Strategy, rho: Option<f64>) -> Option<&PatternEntry> {
        self.entries.iter().find(|e| e.strategy == strategy && e.rho == rho)
    }

    /// Long format: one row per design point and angle.
    pub fn write_patterns_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for e in &self.entries {
            for (&a, &g) in e.pattern.angles.iter().zip(&e.pattern.gains) {
                w.serialize(PatternRow {
                    strategy: e.strategy,
                    rho: e.rho,
                    angle_deg: a.to_degrees(),
                    gain_linear: g,
                    gain_db: 10.0 * g.max(1e-30).log10(),
                })?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_metrics_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for e in &self.entries {
            w.serialize(MetricRow { strategy: e.strategy, rho: e.rho, nmse: e.nmse, normalized_crb: e.normalized_crb })?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Beampatterns, NMSE and normalized CRB at `reference_snr_db`, averaged
/// over `n_trials` channels. The strict design always comes first; every
/// configured strategy follows with each of its factors.
pub fn run_beampattern_report(cfg: &ExperimentConfig) -> Result<BeamPatternSet> {
    cfg.validate()?;
    let mut points = vec![(Strategy::IsiMinStrict, None)];
    points.extend(cfg.design_points().into_iter().filter(|p| p.0 != Strategy::IsiMinStrict));
    let sys = cfg.reference_system();
    let grid = angle_grid(cfg.grid_points);

    // Per trial and design point: pattern gains, NMSE, normalized CRB.
    type TrialMetrics = Vec<(Vec<f64>, f64, f64)>;
    let per_trial: Vec<Result<TrialMetrics>> = (0..cfg.n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let chan = cfg.trial_channel(t, 0)?;
            let mut designer = Designer::new(&chan, &sys, &cfg.scene, cfg.sqp.clone())?;
            let reference = StrictReference::new(&mut designer, &cfg.scene, &grid)?;
            points
                .iter()
                .map(|&(st, rho)| {
                    let d = designer.design(st, rho)?;
                    d.validate(sys.total_power)?;
                    let pattern = d.beampattern(&sys, &grid);
                    let nmse = beampattern_nmse(&reference.pattern, &pattern)?;
                    let crb = reference.normalized_crb(&d, &sys, &cfg.scene)?;
                    Ok((pattern.gains, nmse, crb))
                })
                .collect()
        })
        .collect();

    let n = cfg.n_trials as f64;
    let mut acc: Vec<(Vec<f64>, f64, f64)> = vec![(vec![0.0; grid.len()], 0.0, 0.0); points.len()];
    for trial in per_trial {
        for (a, (gains, nmse, crb)) in acc.iter_mut().zip(trial?) {
            a.0.iter_mut().zip(&gains).for_each(|(x, g)| *x += g);
            a.1 += nmse;
            a.2 += crb;
        }
    }
    let entries = points
        .iter()
        .zip(acc)
        .map(|(&(strategy, rho), (gains, nmse, crb))| PatternEntry {
            strategy,
            rho,
            pattern: BeamPattern { angles: grid.clone(), gains: gains.into_iter().map(|g| g / n).collect() },
            nmse: nmse / n,
            normalized_crb: crb / n,
        })
        .collect();
    Ok(BeamPatternSet { entries })
}

/// SQP run for one AR-max factor.
#[derive(Clone, Debug)]
pub struct SqpRun {
    pub rho: f64,
    pub outcome: SqpOutcome,
}

#[derive(Serialize)]
struct SqpSummaryRow {
    rho: f64,
    iterations: usize,
    converged: bool,
    final_objective: f64,
}

/// AR-max weight optimization on the design channel at `reference_snr_db`
/// for every configured factor below one (factor one skips the SQP).
pub fn run_sqp_convergence(cfg: &ExperimentConfig) -> Result<Vec<SqpRun>> {
    cfg.validate()?;
    let chan = cfg.design_channel()?;
    let sys = cfg.reference_system();
    let mut designer = Designer::new(&chan, &sys, &cfg.scene, cfg.sqp.clone())?;
    let mut runs = Vec::new();
    for &rho in &cfg.tradeoff_factors {
        Strategy::ArmaxTradeoff.check_factor(rho)?;
        let d = designer.design(Strategy::ArmaxTradeoff, Some(rho))?;
        if let Some(outcome) = d.sqp {
            runs.push(SqpRun { rho, outcome });
        }
    }
    Ok(runs)
}

/// One `sqp_trace_rho_<rho>.csv` per run plus `sqp_summary.csv`. Returns
/// the file names written.
pub(crate) fn write_sqp_runs(runs: &[SqpRun], dir: &Path) -> Result<Vec<String>> {
    let mut files = Vec::new();
    let mut summary = csv::Writer::from_path(dir.join("sqp_summary.csv"))?;
    for run in runs {
        let name = format!("sqp_trace_rho_{}.csv", run.rho);
        run.outcome.write_trace_csv(&dir.join(&name))?;
        files.push(name);
        summary.serialize(SqpSummaryRow {
            rho: run.rho,
            iterations: run.outcome.iterations(),
            converged: run.outcome.converged,
            final_objective: run.outcome.objective,
        })?;
    }
    summary.flush()?;
    files.push("sqp_summary.csv".into());
    Ok(files)
}
