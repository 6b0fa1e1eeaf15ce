//! Achievable-rate strategy: water-filling for the communication share of
//! the power, SQP over subcarrier weights for the radar share, and a
//! closed-form precoder built from both parts.

use std::f64::consts::LN_2;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{diag_real, fro2, hermitian_eigen_desc, ln_det_hpd, svd_desc, CMat, C64};
use crate::model::{CovarianceSet, FreqChannel, PrecoderSet, SystemConfig};
use crate::opt::{simplex_kkt_residual, sqp_minimize, waterfill, SimplexObjective, SqpOptions, SqpOutcome};
use crate::radar_design::RadarOnlyDesign;

/// Eigen-directions of `R_f2(k)` below this fraction of the largest
/// eigenvalue are treated as zero.
const EIGEN_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CommOnlyDesign {
    /// Right singular vectors of `H(k)` with water-filled stream powers.
    pub precoders: PrecoderSet,
    pub covariances: CovarianceSet,
    /// Bits per subcarrier use.
    pub rate: f64,
    pub water_level: f64,
}

/// Water-filling over all subcarrier eigenmodes with
/// `(1/N^2) sum_k tr(W P_S W^H) = budget`.
pub fn design_comm_only(chan: &FreqChannel, budget: f64, noise_var: f64) -> Result<CommOnlyDesign> {
    let n = chan.n_sc();
    let streams = chan.n_rx().min(chan.n_tx());
    let svds: Vec<Result<(Vec<f64>, CMat)>> = chan
        .per_subcarrier
        .par_iter()
        .map(|h| {
            let (_, s, v) = svd_desc(h)?;
            Ok((s[..streams].to_vec(), v.columns(0, streams).into_owned()))
        })
        .collect();
    let svds: Vec<(Vec<f64>, CMat)> = svds.into_iter().collect::<Result<_>>()?;
    let gains: Vec<f64> = svds.iter().flat_map(|(s, _)| s.iter().map(|x| x * x)).collect();
    if gains.iter().all(|&g| g == 0.0) {
        return Err(Error::InvalidInput("channel is identically zero".into()));
    }
    let wf = waterfill(&gains, noise_var, (n * n) as f64 * budget)?;
    let mut precoders = Vec::with_capacity(n);
    let mut powers = Vec::with_capacity(n);
    for (k, (_, v)) in svds.into_iter().enumerate() {
        precoders.push(v);
        powers.push(DVector::from_column_slice(&wf.powers[k * streams..(k + 1) * streams]));
    }
    let rate = wf.rate_bits(&gains, noise_var) / n as f64;
    let precoders = PrecoderSet::new(precoders, powers)?;
    let covariances = precoders.covariance();
    Ok(CommOnlyDesign { precoders, covariances, rate, water_level: wf.water_level })
}

/// `(1/N) sum_k log2 det(I + H(k) R_f(k) H(k)^H / noise_var)`.
pub fn rate_logdet(chan: &FreqChannel, cov: &CovarianceSet, noise_var: f64) -> Result<f64> {
    if chan.n_sc() != cov.n_sc() {
        return Err(Error::dim("channel and covariance set cover different subcarriers"));
    }
    if !(noise_var > 0.0) {
        return Err(Error::InvalidInput("noise variance must be positive".into()));
    }
    let mut total = 0.0;
    for k in 0..chan.n_sc() {
        total += subcarrier_rate(chan.h(k), &cov.freq_domain[k], noise_var)?;
    }
    Ok(total / chan.n_sc() as f64)
}

fn subcarrier_rate(h: &CMat, r_f: &CMat, noise_var: f64) -> Result<f64> {
    if h.ncols() != r_f.nrows() {
        return Err(Error::dim("covariance does not match the channel's transmit dimension"));
    }
    let n_rx = h.nrows();
    let m = CMat::identity(n_rx, n_rx) + h * r_f * h.adjoint() / C64::new(noise_var, 0.0);
    Ok(ln_det_hpd(&m)? / LN_2)
}

/// Negative rate as a function of the radar-share subcarrier weights:
/// `f(w) = -(1/N) sum_k log2 det(I + H (R_f1(k) + w_k N^2 R_2) H^H / s2)`.
pub struct SubcarrierWeightObjective {
    /// `I + H R_f1 H^H / s2` per subcarrier.
    base: Vec<CMat>,
    /// `N^2 H R_2 H^H / s2` per subcarrier.
    radar: Vec<CMat>,
}

impl SubcarrierWeightObjective {
    pub fn new(chan: &FreqChannel, r_f1: &[CMat], r_2: &CMat, noise_var: f64) -> Result<Self> {
        if r_f1.len() != chan.n_sc() {
            return Err(Error::dim("need one communication covariance per subcarrier"));
        }
        let n = chan.n_sc() as f64;
        let n_rx = chan.n_rx();
        let s2 = C64::new(noise_var, 0.0);
        let mut base = Vec::with_capacity(chan.n_sc());
        let mut radar = Vec::with_capacity(chan.n_sc());
        for (k, r1) in r_f1.iter().enumerate() {
            let h = chan.h(k);
            base.push(CMat::identity(n_rx, n_rx) + h * r1 * h.adjoint() / s2);
            radar.push(h * r_2 * h.adjoint() * C64::new(n * n / noise_var, 0.0));
        }
        Ok(Self { base, radar })
    }

    fn system(&self, k: usize, w: f64) -> CMat {
        &self.base[k] + &self.radar[k] * C64::new(w, 0.0)
    }
}

impl SimplexObjective for SubcarrierWeightObjective {
    fn dim(&self) -> usize {
        self.base.len()
    }

    fn value(&self, omega: &DVector<f64>) -> f64 {
        let n = self.dim() as f64;
        let mut sum = 0.0;
        for k in 0..self.dim() {
            match ln_det_hpd(&self.system(k, omega[k])) {
                Ok(v) => sum += v,
                Err(_) => return f64::NAN,
            }
        }
        -sum / (n * LN_2)
    }

    /// `-(1/(N ln 2)) tr(M_k^{-1} N^2 H R_2 H^H / s2)` per weight.
    fn gradient(&self, omega: &DVector<f64>) -> DVector<f64> {
        let n = self.dim() as f64;
        DVector::from_fn(self.dim(), |k, _| {
            let m = self.system(k, omega[k]);
            match m.cholesky() {
                Some(chol) => -chol.solve(&self.radar[k]).trace().re / (n * LN_2),
                None => f64::NAN,
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TradeoffDesign2 {
    pub rho2: f64,
    pub omega: Vec<f64>,
    /// Communication part from water-filling with budget `rho2 * P_T`.
    pub comm: CommOnlyDesign,
    /// `R_1`, the time-domain communication covariance.
    pub r1: CMat,
    /// `R_2 = (1 - rho2) R_d`.
    pub r2: CMat,
    /// Radar-part precoders `W_2(k)`.
    pub radar_precoders: Vec<CMat>,
    /// Final `W(k)` with stream powers `P_S1(k)`.
    pub precoders: PrecoderSet,
    /// `R_f1(k) + R_f2(k)`.
    pub covariances: CovarianceSet,
    /// `||((1 - rho2)/rho2) W_2 P_S1 W_2^H - R_f2(k)||_F` per subcarrier.
    pub reconstruction_residuals: Vec<f64>,
    /// `None` when `rho2 = 1` and there is nothing to optimize.
    pub sqp: Option<SqpOutcome>,
}

impl TradeoffDesign2 {
    pub fn sqp_iterations(&self) -> usize {
        self.sqp.as_ref().map_or(0, |s| s.iterations())
    }

    pub fn radar_covariance(&self, k: usize) -> CMat {
        &self.covariances.freq_domain[k] - &self.comm.covariances.freq_domain[k]
    }
}

pub fn design_tradeoff2(chan: &FreqChannel, radar: &RadarOnlyDesign, rho2: f64, config: &SystemConfig) -> Result<TradeoffDesign2> {
    design_tradeoff2_with(chan, radar, rho2, config, &SqpOptions::default())
}

pub fn design_tradeoff2_with(
    chan: &FreqChannel,
    radar: &RadarOnlyDesign,
    rho2: f64,
    config: &SystemConfig,
    options: &SqpOptions,
) -> Result<TradeoffDesign2> {
    if !(rho2 > 0.0 && rho2 <= 1.0) {
        return Err(Error::InvalidInput(format!("trade-off factor must lie in (0, 1], got {rho2}")));
    }
    config.validate()?;
    chan.check_against(config.n_tx, config.n_rx, config.n_sc)?;
    let n = chan.n_sc();
    let p_t = config.total_power;
    let comm = design_comm_only(chan, rho2 * p_t, config.noise_var)?;
    let r1 = comm.covariances.time_domain.clone();

    if rho2 == 1.0 {
        return Ok(TradeoffDesign2 {
            rho2,
            omega: vec![1.0 / n as f64; n],
            r1,
            r2: CMat::zeros(config.n_tx, config.n_tx),
            radar_precoders: vec![CMat::zeros(config.n_tx, config.n_rx); n],
            precoders: comm.precoders.clone(),
            covariances: comm.covariances.clone(),
            reconstruction_residuals: vec![0.0; n],
            sqp: None,
            comm,
        });
    }

    let r2 = radar.covariance.map(|z| z * (1.0 - rho2));
    let objective = SubcarrierWeightObjective::new(chan, &comm.covariances.freq_domain, &r2, config.noise_var)?;
    let sqp = sqp_minimize(&objective, options)?;
    let omega: Vec<f64> = sqp.omega.iter().copied().collect();
    let n2 = (n * n) as f64;
    let scale = ((1.0 - rho2) / rho2).sqrt();

    let parts: Vec<(CMat, CMat, CMat, f64)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let r_f2 = r2.map(|z| z * (omega[k] * n2));
            let w1 = &comm.precoders.precoders[k];
            let p1 = &comm.precoders.stream_powers[k];
            let w2 = radar_precoder(chan.h(k), w1, p1, &r_f2, rho2, config.noise_var);
            let rebuilt = &w2 * diag_real(p1) * w2.adjoint() * C64::new(scale * scale, 0.0);
            let residual = fro2(&(rebuilt - &r_f2)).sqrt();
            let w = &w2 * C64::new(scale, 0.0) + w1;
            (&comm.covariances.freq_domain[k] + &r_f2, w2, w, residual)
        })
        .collect();
    let mut freq = Vec::with_capacity(n);
    let mut radar_precoders = Vec::with_capacity(n);
    let mut finals = Vec::with_capacity(n);
    let mut reconstruction_residuals = Vec::with_capacity(n);
    for (r_f, w2, w, res) in parts {
        freq.push(r_f);
        radar_precoders.push(w2);
        finals.push(w);
        reconstruction_residuals.push(res);
    }
    Ok(TradeoffDesign2 {
        rho2,
        omega,
        r1,
        r2,
        radar_precoders,
        precoders: PrecoderSet::new(finals, comm.precoders.stream_powers.clone())?,
        covariances: CovarianceSet::from_freq(freq)?,
        reconstruction_residuals,
        sqp: Some(sqp),
        comm,
    })
}

/// `W_2 = Q D^{1/2} I_{N_T x N_R} (P_S1^{1/2})^+` from the eigendecomposition
/// `Q D Q^H` of `(rho2 / (1 - rho2)) R_f2`, eigenvalues descending.
///
/// Each eigenvector is defined only up to a phase. The phase of column `j`
/// is chosen so that its cross terms with `W_1` column `j` neither add power
/// nor raise the rate above the ideal covariance: with
/// `z1 = v_j^H q` and `z2 = (H v_j)^H B^{-1} H q`, where `B` is the noise
/// plus the other streams, the column is rotated by `-conj(z1/|z1| + z2/|z2|)`
/// normalized, which makes both `Re(z1 e^{j phi})` and `Re(z2 e^{j phi})`
/// nonpositive.
fn radar_precoder(h: &CMat, w1: &CMat, p1: &DVector<f64>, r_f2: &CMat, rho2: f64, noise_var: f64) -> CMat {
    let (n_tx, n_rx) = w1.shape();
    let target = r_f2.map(|z| z * (rho2 / (1.0 - rho2)));
    let (d, q) = hermitian_eigen_desc(&target);
    let d_max = d.first().copied().unwrap_or(0.0);
    let mut w2 = CMat::zeros(n_tx, n_rx);
    for j in 0..n_rx.min(n_tx) {
        let dj = d[j];
        if !(dj > EIGEN_FLOOR * d_max) || p1[j] <= 0.0 {
            continue;
        }
        let qj = q.column(j).into_owned();
        let vj = w1.column(j).into_owned();
        let z1 = vj.dotc(&qj);
        let others = (0..n_rx).filter(|&i| i != j).fold(CMat::identity(h.nrows(), h.nrows()) * C64::new(noise_var, 0.0), |acc, i| {
            let hv = h * w1.column(i);
            acc + &hv * hv.adjoint() * C64::new(p1[i], 0.0)
        });
        let hq = h * &qj;
        let hv = h * &vj;
        let z2 = others.cholesky().map(|c| hv.dotc(&c.solve(&hq))).unwrap_or(C64::new(0.0, 0.0));
        let unit = |z: C64| if z.norm() > 0.0 { z / z.norm() } else { C64::new(0.0, 0.0) };
        let sum = unit(z1) + unit(z2);
        let phase = if sum.norm() > 1e-12 {
            -(sum.conj() / sum.norm())
        } else if z1.norm() > 0.0 {
            C64::new(0.0, 1.0) * unit(z1).conj()
        } else {
            C64::new(1.0, 0.0)
        };
        let col = qj * (phase * C64::new(dj.sqrt() / p1[j].sqrt(), 0.0));
        w2.set_column(j, &col);
    }
    w2
}

/// `(ideal, actual)`: the rate of `R_f1 + R_f2` and the rate of the
/// covariance the final precoders actually produce.
pub fn ideal_vs_actual_rate(chan: &FreqChannel, design: &TradeoffDesign2, noise_var: f64) -> Result<(f64, f64)> {
    let ideal = rate_logdet(chan, &design.covariances, noise_var)?;
    let actual = rate_logdet(chan, &design.precoders.covariance(), noise_var)?;
    Ok((ideal, actual))
}

/// Simplex KKT residual of the subcarrier-weight problem at `omega`.
pub fn weight_kkt_residual(chan: &FreqChannel, design: &TradeoffDesign2, noise_var: f64) -> Result<f64> {
    if design.rho2 == 1.0 {
        return Ok(0.0);
    }
    let obj = SubcarrierWeightObjective::new(chan, &design.comm.covariances.freq_domain, &design.r2, noise_var)?;
    let omega = DVector::from_column_slice(&design.omega);
    Ok(simplex_kkt_residual(&obj.gradient(&omega), &omega))
}
