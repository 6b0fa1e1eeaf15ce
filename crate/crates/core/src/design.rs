//! Uniform view over every strategy's output, used by the experiment driver,
//! the CLI and the C interface.

use serde::{Deserialize, Serialize};

use crate::armax::{design_comm_only, design_tradeoff2_with, rate_logdet};
use crate::error::{Error, Result};
use crate::isi_min::{design_strict, design_tradeoff1, rate_isi, StrictDesign};
use crate::linalg::{CMat, C64};
use crate::model::{CovarianceSet, FreqChannel, PrecoderSet, SystemConfig};
use crate::opt::{SqpIterate, SqpOptions, SqpOutcome};
use crate::radar::{beampattern, beampattern_nmse, crb, BeamPattern, RadarScene};
use crate::radar_design::{design_radar_only, RadarOnlyDesign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    IsiMinStrict,
    IsiMinTradeoff,
    ArmaxTradeoff,
    CommOnly,
    RadarOnly,
}

impl Strategy {
    pub const ALL: [Strategy; 5] =
        [Strategy::IsiMinStrict, Strategy::IsiMinTradeoff, Strategy::ArmaxTradeoff, Strategy::CommOnly, Strategy::RadarOnly];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::IsiMinStrict => "isi_min_strict",
            Strategy::IsiMinTradeoff => "isi_min_tradeoff",
            Strategy::ArmaxTradeoff => "armax_tradeoff",
            Strategy::CommOnly => "comm_only",
            Strategy::RadarOnly => "radar_only",
        }
    }

    /// Whether the strategy is parameterized by a trade-off factor.
    pub fn takes_factor(self) -> bool {
        matches!(self, Strategy::IsiMinTradeoff | Strategy::ArmaxTradeoff)
    }

    pub fn has_link(self) -> bool {
        !matches!(self, Strategy::RadarOnly)
    }

    pub fn check_factor(self, rho: f64) -> Result<()> {
        let ok = match self {
            Strategy::IsiMinTradeoff => (0.0..=1.0).contains(&rho),
            Strategy::ArmaxTradeoff => rho > 0.0 && rho <= 1.0,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("trade-off factor {rho} is outside the range of {}", self.name())))
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown strategy '{s}'")))
    }
}

/// How the user turns `Y(k)` back into symbols.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Receiver {
    /// Slice each receive antenna directly.
    Slicer,
    /// Linear MMSE on `H W` with prior stream powers `P_S / prior_scale`.
    Mmse { prior_scale: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignOutcome {
    pub strategy: Strategy,
    pub rho: Option<f64>,
    /// `None` for the radar-only design, which carries no data.
    pub precoders: Option<PrecoderSet>,
    /// Covariance the radar metrics are evaluated on.
    pub covariances: CovarianceSet,
    /// Subcarrier weights (`alpha` or `omega`).
    pub weights: Option<Vec<f64>>,
    pub comm_precoders: Option<Vec<CMat>>,
    pub radar_precoders: Option<Vec<CMat>>,
    pub sqp: Option<SqpOutcome>,
    pub receiver: Receiver,
}

impl DesignOutcome {
    pub fn radar_covariance(&self) -> &CMat {
        &self.covariances.time_domain
    }

    pub fn crb(&self, config: &SystemConfig, scene: &RadarScene) -> Result<f64> {
        crb(&config.geometry(), scene, self.radar_covariance())
    }

    pub fn beampattern(&self, config: &SystemConfig, grid: &[f64]) -> BeamPattern {
        beampattern(&config.geometry(), self.radar_covariance(), grid)
    }

    /// `(rate, ideal rate)` in bits per subcarrier use. The ideal rate exists
    /// only for the achievable-rate trade-off.
    pub fn rates(&self, chan: &FreqChannel, noise_var: f64) -> Result<(f64, Option<f64>)> {
        let Some(pre) = &self.precoders else { return Ok((0.0, None)) };
        match self.strategy {
            Strategy::IsiMinStrict | Strategy::IsiMinTradeoff => Ok((rate_isi(chan, pre, noise_var)?, None)),
            Strategy::ArmaxTradeoff => {
                let ideal = rate_logdet(chan, &self.covariances, noise_var)?;
                let actual = rate_logdet(chan, &pre.covariance(), noise_var)?;
                Ok((actual, Some(ideal)))
            }
            Strategy::CommOnly | Strategy::RadarOnly => Ok((rate_logdet(chan, &pre.covariance(), noise_var)?, None)),
        }
    }

    pub fn sqp_iterations(&self) -> Option<usize> {
        self.sqp.as_ref().map(|s| s.iterations())
    }

    /// Fail-fast checks before a design is simulated.
    pub fn validate(&self, total_power: f64) -> Result<()> {
        if let Some(pre) = &self.precoders {
            pre.validate(total_power)?;
        }
        let exact_power = !matches!(self.strategy, Strategy::IsiMinTradeoff);
        self.covariances.validate(exact_power.then_some(total_power))
    }

    /// Serializable summary with precoders and metrics.
    pub fn report(&self, chan: &FreqChannel, config: &SystemConfig, scene: &RadarScene, reference: &RadarOnlyDesign) -> Result<DesignReport> {
        let grid = crate::radar::angle_grid(crate::radar::DEFAULT_GRID_POINTS);
        let strict_pattern = beampattern(&config.geometry(), &reference.covariance, &grid);
        let achieved = self.crb(config, scene)?;
        let (rate, rate_ideal) = self.rates(chan, config.noise_var)?;
        let pre = self.precoders.as_ref();
        Ok(DesignReport {
            strategy: self.strategy,
            rho: self.rho,
            n_tx: config.n_tx,
            n_rx: config.n_rx,
            n_sc: chan.n_sc(),
            weights: self.weights.clone(),
            precoders: pre.map(|p| p.precoders.iter().map(MatrixJson::from).collect()),
            stream_powers: pre.map(|p| p.stream_powers.iter().map(|v| v.iter().copied().collect()).collect()),
            comm_precoders: self.comm_precoders.as_ref().map(|v| v.iter().map(MatrixJson::from).collect()),
            radar_precoders: self.radar_precoders.as_ref().map(|v| v.iter().map(MatrixJson::from).collect()),
            covariance: MatrixJson::from(self.radar_covariance()),
            achieved_crb: finite_or_none(achieved),
            normalized_crb: finite_or_none(achieved / reference.achieved_crb),
            nmse: beampattern_nmse(&strict_pattern, &self.beampattern(config, &grid))?,
            rate,
            rate_ideal,
            sqp_trace: self.sqp.as_ref().map(|s| s.trace.clone()),
        })
    }
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Complex matrix as row-major real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CMat> for MatrixJson {
    fn from(m: &CMat) -> Self {
        let rows = |f: fn(&C64) -> f64| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect();
        Self { re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<CMat> {
        let r = self.re.len();
        let c = self.re.first().map_or(0, |row| row.len());
        if self.im.len() != r || self.re.iter().chain(&self.im).any(|row| row.len() != c) {
            return Err(Error::dim("ragged matrix in JSON"));
        }
        Ok(CMat::from_fn(r, c, |i, j| C64::new(self.re[i][j], self.im[i][j])))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DesignReport {
    pub strategy: Strategy,
    pub rho: Option<f64>,
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_sc: usize,
    pub weights: Option<Vec<f64>>,
    pub precoders: Option<Vec<MatrixJson>>,
    pub stream_powers: Option<Vec<Vec<f64>>>,
    pub comm_precoders: Option<Vec<MatrixJson>>,
    pub radar_precoders: Option<Vec<MatrixJson>>,
    /// Time-domain covariance used for the radar metrics.
    pub covariance: MatrixJson,
    /// `None` when the target is not illuminated.
    pub achieved_crb: Option<f64>,
    pub normalized_crb: Option<f64>,
    pub nmse: f64,
    pub rate: f64,
    pub rate_ideal: Option<f64>,
    pub sqp_trace: Option<Vec<SqpIterate>>,
}

/// Builds designs for one channel, sharing the radar-only and strict
/// designs between strategies.
pub struct Designer<'a> {
    chan: &'a FreqChannel,
    config: SystemConfig,
    radar: RadarOnlyDesign,
    strict: Option<StrictDesign>,
    sqp: SqpOptions,
}

impl<'a> Designer<'a> {
    pub fn new(chan: &'a FreqChannel, config: &SystemConfig, scene: &RadarScene, sqp: SqpOptions) -> Result<Self> {
        config.validate()?;
        chan.check_against(config.n_tx, config.n_rx, config.n_sc)?;
        let radar = design_radar_only(&config.geometry(), scene, config.total_power)?;
        Ok(Self { chan, config: config.clone(), radar, strict: None, sqp })
    }

    pub fn radar(&self) -> &RadarOnlyDesign {
        &self.radar
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    /// Changes the noise level for later designs; the strict design does not
    /// depend on it and stays cached.
    pub fn set_noise_var(&mut self, noise_var: f64) {
        self.config.noise_var = noise_var;
    }

    pub fn strict(&mut self) -> Result<&StrictDesign> {
        if self.strict.is_none() {
            self.strict = Some(design_strict(self.chan, &self.radar, &self.config)?);
        }
        Ok(self.strict.as_ref().expect("just computed"))
    }

    pub fn design(&mut self, strategy: Strategy, rho: Option<f64>) -> Result<DesignOutcome> {
        let rho = if strategy.takes_factor() {
            let r = rho.ok_or_else(|| Error::Config(format!("{} needs a trade-off factor", strategy.name())))?;
            strategy.check_factor(r)?;
            Some(r)
        } else {
            None
        };
        let e_s = self.config.symbol_energy;
        let n = self.chan.n_sc();
        Ok(match strategy {
            Strategy::RadarOnly => {
                let per = self.radar.covariance.map(|z| z * n as f64);
                DesignOutcome {
                    strategy,
                    rho,
                    precoders: None,
                    covariances: CovarianceSet::from_freq(vec![per; n])?,
                    weights: Some(vec![1.0 / n as f64; n]),
                    comm_precoders: None,
                    radar_precoders: None,
                    sqp: None,
                    receiver: Receiver::Slicer,
                }
            }
            Strategy::IsiMinStrict => {
                let s = self.strict()?.clone();
                DesignOutcome {
                    strategy,
                    rho,
                    precoders: Some(s.precoders),
                    covariances: s.covariances,
                    weights: Some(s.alphas),
                    comm_precoders: None,
                    radar_precoders: None,
                    sqp: None,
                    receiver: Receiver::Slicer,
                }
            }
            Strategy::IsiMinTradeoff => {
                let config = self.config.clone();
                let chan = self.chan;
                let s = self.strict()?;
                let t = design_tradeoff1(chan, s, rho.expect("checked"), &config)?;
                let covariances = t.precoders.covariance();
                let weights = s.alphas.clone();
                debug_assert!(t.precoders.stream_powers.iter().all(|p| p.iter().all(|&x| x == e_s)));
                DesignOutcome {
                    strategy,
                    rho,
                    precoders: Some(t.precoders),
                    covariances,
                    weights: Some(weights),
                    comm_precoders: None,
                    radar_precoders: None,
                    sqp: None,
                    receiver: Receiver::Slicer,
                }
            }
            Strategy::ArmaxTradeoff => {
                let r = rho.expect("checked");
                let d = design_tradeoff2_with(self.chan, &self.radar, r, &self.config, &self.sqp)?;
                DesignOutcome {
                    strategy,
                    rho,
                    precoders: Some(d.precoders),
                    covariances: d.covariances,
                    weights: Some(d.omega),
                    comm_precoders: Some(d.comm.precoders.precoders),
                    radar_precoders: Some(d.radar_precoders),
                    sqp: d.sqp,
                    receiver: Receiver::Mmse { prior_scale: r },
                }
            }
            Strategy::CommOnly => {
                let c = design_comm_only(self.chan, self.config.total_power, self.config.noise_var)?;
                DesignOutcome {
                    strategy,
                    rho,
                    precoders: Some(c.precoders),
                    covariances: c.covariances,
                    weights: None,
                    comm_precoders: None,
                    radar_precoders: None,
                    sqp: None,
                    receiver: Receiver::Mmse { prior_scale: 1.0 },
                }
            }
        })
    }
}
