use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::design::Strategy;
use crate::error::{Error, Result};
use crate::model::{FreqChannel, SystemConfig};
use crate::opt::SqpOptions;
use crate::radar::{RadarScene, DEFAULT_GRID_POINTS};
use crate::rng::{GaussianSource, Purpose};

/// How trial channels are drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelModel {
    /// Independent standard complex Gaussian `H(k)` per subcarrier.
    Iid,
    /// Equal-power multipath taps; `H(k)` is their DFT.
    Taps { n_taps: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub scene: RadarScene,
    pub strategies: Vec<Strategy>,
    pub tradeoff_factors: Vec<f64>,
    /// SNR points of the SER sweep.
    pub snr_db_list: Vec<f64>,
    /// Operating point of the trade-off sweep, the beampattern report, the
    /// SQP traces and single designs.
    pub reference_snr_db: f64,
    /// Channel realizations.
    pub n_trials: usize,
    /// OFDM frames per trial.
    pub n_symbols: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub channel: ChannelModel,
    /// Use this channel instead of a random draw for `design`.
    pub channel_file: Option<PathBuf>,
    pub sqp: SqpOptions,
    pub grid_points: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            system: SystemConfig::default(),
            scene: RadarScene::default(),
            strategies: vec![Strategy::IsiMinStrict, Strategy::IsiMinTradeoff, Strategy::ArmaxTradeoff],
            tradeoff_factors: vec![0.2, 0.4, 0.6, 0.8, 1.0],
            snr_db_list: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
            reference_snr_db: 20.0,
            n_trials: 50,
            n_symbols: 200,
            seed: 2023,
            output_dir: PathBuf::from("out"),
            channel: ChannelModel::Iid,
            channel_file: None,
            sqp: SqpOptions::default(),
            grid_points: DEFAULT_GRID_POINTS,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.scene.validate()?;
        if self.strategies.is_empty() {
            return Err(Error::Config("no strategies selected".into()));
        }
        if self.n_trials == 0 || self.n_symbols == 0 {
            return Err(Error::Config("n_trials and n_symbols must be at least 1".into()));
        }
        if self.snr_db_list.is_empty() || self.snr_db_list.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config("snr_db_list must hold at least one finite value".into()));
        }
        if !self.reference_snr_db.is_finite() {
            return Err(Error::Config("reference_snr_db must be finite".into()));
        }
        if self.grid_points < 2 {
            return Err(Error::Config("grid_points must be at least 2".into()));
        }
        if !(self.sqp.tol > 0.0) || self.sqp.max_iter == 0 {
            return Err(Error::Config("SQP tolerance and iteration cap must be positive".into()));
        }
        if let ChannelModel::Taps { n_taps } = self.channel {
            if n_taps == 0 || n_taps > self.system.n_cp + 1 {
                return Err(Error::Config(format!("{n_taps} taps do not fit a cyclic prefix of {}", self.system.n_cp)));
            }
        }
        let needs_factor = self.strategies.iter().any(|s| s.takes_factor());
        if needs_factor && self.tradeoff_factors.is_empty() {
            return Err(Error::Config("trade-off strategies need at least one factor".into()));
        }
        for st in self.strategies.iter().filter(|s| s.takes_factor()) {
            for &rho in &self.tradeoff_factors {
                st.check_factor(rho)?;
            }
        }
        Ok(())
    }

    /// `(strategy, factor)` pairs in configuration order.
    pub fn design_points(&self) -> Vec<(Strategy, Option<f64>)> {
        let mut points = Vec::new();
        for &st in &self.strategies {
            if st.takes_factor() {
                points.extend(self.tradeoff_factors.iter().map(|&r| (st, Some(r))));
            } else {
                points.push((st, None));
            }
        }
        points
    }

    pub fn system_at(&self, snr_db: f64) -> SystemConfig {
        self.system.with_snr_db(snr_db)
    }

    pub fn reference_system(&self) -> SystemConfig {
        self.system_at(self.reference_snr_db)
    }

    pub fn trial_channel(&self, trial: u64, attempt: u64) -> Result<FreqChannel> {
        let s = &self.system;
        let mut rng = GaussianSource::for_trial(self.seed, trial, attempt, Purpose::Channel);
        let mut chan = match self.channel {
            ChannelModel::Iid => FreqChannel::random_iid(s.n_tx, s.n_rx, s.n_sc, &mut rng),
            ChannelModel::Taps { n_taps } => FreqChannel::random_taps(s.n_tx, s.n_rx, s.n_sc, n_taps, &mut rng)?,
        };
        chan.seed = Some(self.seed);
        Ok(chan)
    }

    /// The configured channel file, or trial 0's channel.
    pub fn design_channel(&self) -> Result<FreqChannel> {
        match &self.channel_file {
            Some(path) => {
                let chan = FreqChannel::load_json(path)?;
                chan.check_against(self.system.n_tx, self.system.n_rx, self.system.n_sc)?;
                Ok(chan)
            }
            None => self.trial_channel(0, 0),
        }
    }
}
