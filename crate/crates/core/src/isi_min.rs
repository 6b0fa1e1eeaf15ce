//! Radar-strict precoding and the ISI/CRB trade-off.
//!
//! The strict design keeps the transmit covariance equal to the radar-only
//! optimum, spreads it over subcarriers with simplex weights `alpha_k`, and
//! picks each precoder as `W_d(k) = T(k) W~(k)` where `T T^H` factors the
//! subcarrier covariance and `W~` solves an orthogonal Procrustes problem.
//! The trade-off design then pulls each `W(k)` from `W_d(k)` toward zero
//! forcing, weighted by `rho1`, without exceeding the strict power.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{fro2, hermitian_eigen_desc, CMat, CVec, C64};
use crate::model::{CovarianceSet, FreqChannel, PrecoderSet, SystemConfig};
use crate::opt::{solve_opp, solve_simplex_qp, SimplexQpProblem};
use crate::radar_design::RadarOnlyDesign;

/// Relative diagonal loading applied before the Cholesky factorization.
pub const CHOLESKY_LOADING: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct StrictDesign {
    pub alphas: Vec<f64>,
    /// `W_d(k)` with every stream at energy `E_s`.
    pub precoders: PrecoderSet,
    /// `R_f(k) = alpha_k N^2 R_d`.
    pub covariances: CovarianceSet,
    /// Diagonal loading `delta(k)` used per subcarrier.
    pub loading: Vec<f64>,
    /// `max_k ||E_s W_d W_d^H - R_f(k)||_F`.
    pub reconstruction_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TradeoffDesign1 {
    pub rho1: f64,
    pub precoders: PrecoderSet,
    /// Multiplier of the per-subcarrier power constraint.
    pub multipliers: Vec<f64>,
}

impl TradeoffDesign1 {
    /// Sum over subcarriers of the per-subcarrier trade-off objective.
    pub fn objective(&self, chan: &FreqChannel, strict: &StrictDesign) -> f64 {
        (0..chan.n_sc())
            .map(|k| tradeoff_objective(chan.h(k), &self.precoders.precoders[k], &strict.precoders.precoders[k], self.rho1))
            .sum()
    }
}

/// Subcarrier-weight problem: `sum_k ||alpha_k G_k - I||^2` over the simplex
/// with `G_k = (N^2/E_s) H(k) R_d H(k)^H`.
///
/// The objective is separable, so the Hessian is diagonal with
/// `2 ||G_k||^2` and the linear term is `-2 Re tr G_k`.
pub fn subcarrier_weight_problem(chan: &FreqChannel, r_d: &CMat, config: &SystemConfig) -> Result<SimplexQpProblem> {
    chan.check_against(config.n_tx, config.n_rx, config.n_sc)?;
    if r_d.shape() != (config.n_tx, config.n_tx) {
        return Err(Error::dim("radar covariance must be n_tx x n_tx"));
    }
    let n = chan.n_sc();
    let scale = (n * n) as f64 / config.symbol_energy;
    let mut q = DMatrix::zeros(n, n);
    let mut c = DVector::zeros(n);
    for k in 0..n {
        let h = chan.h(k);
        let g = h * r_d * h.adjoint() * C64::new(scale, 0.0);
        q[(k, k)] = 2.0 * fro2(&g);
        c[k] = -2.0 * g.trace().re;
    }
    SimplexQpProblem::new(q, c, (n * config.n_rx) as f64)
}

/// Radar-strict design: subcarrier weights, then Cholesky and Procrustes per
/// subcarrier.
pub fn design_strict(chan: &FreqChannel, radar: &RadarOnlyDesign, config: &SystemConfig) -> Result<StrictDesign> {
    config.validate()?;
    let problem = subcarrier_weight_problem(chan, &radar.covariance, config)?;
    let alphas: Vec<f64> = solve_simplex_qp(&problem)?.iter().copied().collect();
    let n2 = (chan.n_sc() * chan.n_sc()) as f64;
    let e_s = config.symbol_energy;

    let per_k: Vec<Result<(CMat, CMat, f64, f64)>> = (0..chan.n_sc())
        .into_par_iter()
        .map(|k| {
            let r_f = radar.covariance.map(|z| z * (alphas[k] * n2));
            let gamma = r_f.map(|z| z / e_s);
            let (w_d, delta) = strict_precoder(chan.h(k), &gamma)?;
            let rebuilt = &w_d * w_d.adjoint() * C64::new(e_s, 0.0);
            let residual = fro2(&(rebuilt - &r_f)).sqrt();
            Ok((r_f, w_d, delta, residual))
        })
        .collect();
    let mut freq = Vec::with_capacity(chan.n_sc());
    let mut precoders = Vec::with_capacity(chan.n_sc());
    let mut loading = Vec::with_capacity(chan.n_sc());
    let mut reconstruction_residual = 0.0f64;
    for item in per_k {
        let (r_f, w_d, delta, residual) = item?;
        freq.push(r_f);
        precoders.push(w_d);
        loading.push(delta);
        reconstruction_residual = reconstruction_residual.max(residual);
    }
    Ok(StrictDesign {
        alphas,
        precoders: PrecoderSet::with_uniform_power(precoders, e_s)?,
        covariances: CovarianceSet::from_freq(freq)?,
        loading,
        reconstruction_residual,
    })
}

/// `W_d = T W~` with `T T^H = Gamma + delta I` and `W~ = OPP(T^H H^H)`,
/// scaled so its power matches `tr(Gamma)`. A zero `Gamma` gives a zero
/// precoder.
fn strict_precoder(h: &CMat, gamma: &CMat) -> Result<(CMat, f64)> {
    let (n_rx, n_tx) = h.shape();
    let tr = gamma.trace().re;
    if tr <= 0.0 {
        return Ok((CMat::zeros(n_tx, n_rx), 0.0));
    }
    let delta = CHOLESKY_LOADING * tr / n_tx as f64;
    let loaded = gamma + CMat::identity(n_tx, n_tx) * C64::new(delta, 0.0);
    let chol = loaded.cholesky().ok_or_else(|| Error::Numerical("Cholesky factorization failed after diagonal loading".into()))?;
    let t = chol.l();
    if t.diagonal().iter().any(|d| !(d.re > 0.0) || !d.re.is_finite()) {
        return Err(Error::Numerical("loaded subcarrier covariance is not positive definite".into()));
    }
    let w_tilde = solve_opp(&(t.adjoint() * h.adjoint()))?;
    let w_d = &t * w_tilde;
    // The loading adds O(delta) power; rescale so tr(W_d W_d^H) = tr(Gamma).
    let used = fro2(&w_d);
    let w_d = if used > 0.0 { w_d * C64::new((tr / used).sqrt(), 0.0) } else { w_d };
    Ok((w_d, delta))
}

/// `rho ||H W - I||^2 + (1 - rho) ||W - W_d||^2`.
pub fn tradeoff_objective(h: &CMat, w: &CMat, w_d: &CMat, rho: f64) -> f64 {
    let n_rx = h.nrows();
    rho * fro2(&(h * w - CMat::identity(n_rx, n_rx))) + (1.0 - rho) * fro2(&(w - w_d))
}

/// Trade-off design with weight `rho1` in `[0, 1]`.
///
/// Each subcarrier minimizes [`tradeoff_objective`] under
/// `tr(W W^H) <= tr(W_d W_d^H)`. The stationary point for multiplier `lambda`
/// is `(rho H^H H + (1 - rho + lambda) I)^{-1} (rho H^H + (1 - rho) W_d)`;
/// `lambda` is zero when that point is feasible and is otherwise found by
/// bisection on the power.
pub fn design_tradeoff1(chan: &FreqChannel, strict: &StrictDesign, rho1: f64, config: &SystemConfig) -> Result<TradeoffDesign1> {
    if !(0.0..=1.0).contains(&rho1) {
        return Err(Error::InvalidInput(format!("trade-off factor must lie in [0, 1], got {rho1}")));
    }
    chan.check_against(config.n_tx, config.n_rx, config.n_sc)?;
    if strict.precoders.n_sc() != chan.n_sc() {
        return Err(Error::dim("strict design and channel cover different subcarriers"));
    }
    let solved: Vec<Result<(CMat, f64)>> = (0..chan.n_sc())
        .into_par_iter()
        .map(|k| {
            let w_d = &strict.precoders.precoders[k];
            if rho1 == 0.0 {
                return Ok((w_d.clone(), 0.0));
            }
            solve_tradeoff_subcarrier(chan.h(k), w_d, rho1)
        })
        .collect();
    let mut precoders = Vec::with_capacity(chan.n_sc());
    let mut multipliers = Vec::with_capacity(chan.n_sc());
    for item in solved {
        let (w, lambda) = item?;
        precoders.push(w);
        multipliers.push(lambda);
    }
    Ok(TradeoffDesign1 { rho1, precoders: PrecoderSet::with_uniform_power(precoders, config.symbol_energy)?, multipliers })
}

fn solve_tradeoff_subcarrier(h: &CMat, w_d: &CMat, rho: f64) -> Result<(CMat, f64)> {
    let budget = fro2(w_d);
    let (d, v) = hermitian_eigen_desc(&(h.adjoint() * h));
    let d_max = d.first().copied().unwrap_or(0.0).max(0.0);
    // Rotated right-hand side V^H (rho H^H + (1 - rho) W_d); rows tied to
    // zero eigenvalues of H^H H carry only the W_d part.
    let rhs = v.adjoint() * (h.adjoint() * C64::new(rho, 0.0) + w_d * C64::new(1.0 - rho, 0.0));
    let row_norms: Vec<f64> = rhs.row_iter().map(|r| r.norm_squared()).collect();
    let eig: Vec<f64> = d.iter().map(|&x| if x > 1e-12 * d_max { x } else { 0.0 }).collect();

    let power = |lambda: f64| -> f64 {
        eig.iter()
            .zip(&row_norms)
            .map(|(&e, &r)| {
                let den = rho * e + 1.0 - rho + lambda;
                if den > 0.0 { r / (den * den) } else { 0.0 }
            })
            .sum()
    };
    let build = |lambda: f64| -> CMat {
        let mut scaled = rhs.clone();
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            let den = rho * eig[i] + 1.0 - rho + lambda;
            let f = if den > 0.0 { 1.0 / den } else { 0.0 };
            row *= C64::new(f, 0.0);
        }
        &v * scaled
    };

    let slack = 1e-12 * budget.max(1e-300);
    if power(0.0) <= budget + slack {
        return Ok((build(0.0), 0.0));
    }
    if budget <= 0.0 {
        return Ok((CMat::zeros(w_d.nrows(), w_d.ncols()), f64::INFINITY));
    }
    let mut lo = 0.0;
    let mut hi = (1.0 - rho + rho * d_max).max(1.0);
    let mut doublings = 0;
    while power(hi) > budget {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NotConverged { iterations: doublings, best: vec![hi] });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if power(mid) > budget {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    if (hi - lo) > 1e-10 * hi.max(1.0) {
        return Err(Error::NotConverged { iterations: 200, best: vec![hi] });
    }
    Ok((build(hi), hi))
}

/// Gradient residual of the trade-off Lagrangian, `2[rho H^H (H W - I) +
/// (1 - rho)(W - W_d) + lambda W]`, as a max-abs entry.
pub fn tradeoff_kkt_residual(h: &CMat, w: &CMat, w_d: &CMat, rho: f64, lambda: f64) -> f64 {
    let n_rx = h.nrows();
    let grad = (h.adjoint() * (h * w - CMat::identity(n_rx, n_rx))) * C64::new(rho, 0.0)
        + (w - w_d) * C64::new(1.0 - rho, 0.0)
        + w * C64::new(lambda, 0.0);
    2.0 * grad.camax()
}

/// `sum_k ||H(k) W(k) S(k) - S(k)||^2`.
pub fn isi_power(chan: &FreqChannel, precoders: &PrecoderSet, symbols: &[CVec]) -> Result<f64> {
    if chan.n_sc() != precoders.n_sc() || symbols.len() != chan.n_sc() {
        return Err(Error::dim("channel, precoders and symbols must cover the same subcarriers"));
    }
    let mut total = 0.0;
    for (k, s) in symbols.iter().enumerate() {
        let h = chan.h(k);
        let w = &precoders.precoders[k];
        if h.ncols() != w.nrows() || w.ncols() != s.len() || h.nrows() != s.len() {
            return Err(Error::dim(format!("subcarrier {k}: H, W and S do not chain")));
        }
        total += (h * (w * s) - s).norm_squared();
    }
    Ok(total)
}

/// Rate in bits per subcarrier use when each receive antenna decodes its own
/// stream and treats the residual `H W - I` leakage as noise:
/// `(1/N) sum_k sum_i log2(1 + p_i / (sum_j p_j |(H W - I)_ij|^2 + noise_var))`.
pub fn rate_isi(chan: &FreqChannel, precoders: &PrecoderSet, noise_var: f64) -> Result<f64> {
    if chan.n_sc() != precoders.n_sc() {
        return Err(Error::dim("channel and precoders cover different subcarriers"));
    }
    if !(noise_var > 0.0) {
        return Err(Error::InvalidInput("noise variance must be positive".into()));
    }
    let mut total = 0.0;
    for k in 0..chan.n_sc() {
        let h = chan.h(k);
        let w = &precoders.precoders[k];
        if h.ncols() != w.nrows() || w.ncols() != h.nrows() {
            return Err(Error::dim(format!("subcarrier {k}: H W is not square")));
        }
        let p = &precoders.stream_powers[k];
        let leak = h * w - CMat::identity(h.nrows(), h.nrows());
        for i in 0..h.nrows() {
            let interference: f64 = (0..h.nrows()).map(|j| p[j] * leak[(i, j)].norm_sqr()).sum();
            total += (1.0 + p[i] / (interference + noise_var)).log2();
        }
    }
    Ok(total / chan.n_sc() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::partial_identity;
    use crate::model::ArrayGeometry;
    use crate::radar::RadarScene;
    use crate::radar_design::design_radar_only;
    use crate::rng::GaussianSource;

    fn small() -> (SystemConfig, FreqChannel, RadarOnlyDesign) {
        let config = SystemConfig { n_tx: 6, n_rx: 3, n_sc: 4, ..Default::default() };
        let chan = FreqChannel::random_iid_seeded(6, 3, 4, 11);
        let radar = design_radar_only(&ArrayGeometry::new(6, 0.5), &RadarScene::default(), 1.0).unwrap();
        (config, chan, radar)
    }

    #[test]
    fn strict_design_invariants() {
        let (config, chan, radar) = small();
        let d = design_strict(&chan, &radar, &config).unwrap();
        assert!((d.alphas.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(d.alphas.iter().all(|&a| a >= 0.0));
        assert!((&d.covariances.time_domain - &radar.covariance).camax() < 1e-10);
        for k in 0..4 {
            let expect = radar.covariance.map(|z| z * (d.alphas[k] * 16.0));
            assert!((&d.covariances.freq_domain[k] - expect).camax() < 1e-10);
        }
        let max_delta = d.loading.iter().cloned().fold(0.0, f64::max);
        assert!(d.reconstruction_residual <= 10.0 * max_delta * 6.0, "{} vs {}", d.reconstruction_residual, max_delta);
        assert!((d.precoders.total_power() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_subcarrier_weight() {
        let config = SystemConfig { n_tx: 4, n_rx: 2, n_sc: 1, ..Default::default() };
        let chan = FreqChannel::random_iid_seeded(4, 2, 1, 3);
        let radar = design_radar_only(&ArrayGeometry::new(4, 0.5), &RadarScene::default(), 1.0).unwrap();
        assert_eq!(design_strict(&chan, &radar, &config).unwrap().alphas, vec![1.0]);
    }

    #[test]
    fn identical_subcarriers_give_uniform_weights() {
        let config = SystemConfig { n_tx: 6, n_rx: 3, n_sc: 5, ..Default::default() };
        let mut rng = GaussianSource::new(8);
        let h = rng.complex_matrix(3, 6, 1.0);
        let chan = FreqChannel::new(vec![h; 5]).unwrap();
        let radar = design_radar_only(&ArrayGeometry::new(6, 0.5), &RadarScene { theta: 0.2, ..Default::default() }, 1.0).unwrap();
        let d = design_strict(&chan, &radar, &config).unwrap();
        assert!(d.alphas.iter().all(|a| (a - 0.2).abs() < 1e-9), "{:?}", d.alphas);
    }

    #[test]
    fn tradeoff_endpoints() {
        let (config, chan, radar) = small();
        let strict = design_strict(&chan, &radar, &config).unwrap();
        let t0 = design_tradeoff1(&chan, &strict, 0.0, &config).unwrap();
        assert_eq!(t0.precoders.precoders, strict.precoders.precoders);
        let t1 = design_tradeoff1(&chan, &strict, 1.0, &config).unwrap();
        for k in 0..4 {
            let w = &t1.precoders.precoders[k];
            assert!(fro2(w) <= fro2(&strict.precoders.precoders[k]) + 1e-9);
            assert!(tradeoff_kkt_residual(chan.h(k), w, &strict.precoders.precoders[k], 1.0, t1.multipliers[k]) < 1e-8);
        }
        let isi = |p: &PrecoderSet| -> f64 {
            (0..4).map(|k| fro2(&(chan.h(k) * &p.precoders[k] - CMat::identity(3, 3)))).sum()
        };
        assert!(isi(&t1.precoders) < isi(&t0.precoders));
        assert!(t0.objective(&chan, &strict) == 0.0);
    }

    #[test]
    fn square_invertible_zero_forcing() {
        let mut rng = GaussianSource::new(2);
        let h = rng.complex_matrix(3, 3, 1.0);
        // A large reference keeps the power constraint slack.
        let w_d = partial_identity(3, 3) * C64::new(100.0, 0.0);
        let (w, lambda) = solve_tradeoff_subcarrier(&h, &w_d, 1.0).unwrap();
        assert_eq!(lambda, 0.0);
        let inv = h.clone().try_inverse().unwrap();
        assert!((w - inv).camax() < 1e-9);
    }

    #[test]
    fn isi_power_cases() {
        let chan = FreqChannel::new(vec![partial_identity(2, 4); 3]).unwrap();
        let ident = PrecoderSet::with_uniform_power(vec![partial_identity(4, 2); 3], 1.0).unwrap();
        let mut rng = GaussianSource::new(5);
        let s: Vec<CVec> = (0..3).map(|_| rng.complex_vector(2, 1.0)).collect();
        assert!(isi_power(&chan, &ident, &s).unwrap() < 1e-28);
        let zero = PrecoderSet::with_uniform_power(vec![CMat::zeros(4, 2); 3], 1.0).unwrap();
        let energy: f64 = s.iter().map(|v| v.norm_squared()).sum();
        assert!((isi_power(&chan, &zero, &s).unwrap() - energy).abs() < 1e-12);
    }

    #[test]
    fn rate_isi_perfect_and_noisy() {
        let chan = FreqChannel::new(vec![partial_identity(2, 4); 3]).unwrap();
        let ident = PrecoderSet::with_uniform_power(vec![partial_identity(4, 2); 3], 1.0).unwrap();
        let r = rate_isi(&chan, &ident, 0.1).unwrap();
        assert!((r - 2.0 * 11f64.log2()).abs() < 1e-12);
        assert!(rate_isi(&chan, &ident, 1e12).unwrap() < 1e-11);
    }
}
