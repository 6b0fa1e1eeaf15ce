use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{diag_real, CMat, CVec};
use crate::model::{CovarianceSet, FreqChannel};
use crate::rng::GaussianSource;

/// Per-subcarrier precoders `W(k)` (`n_tx x n_rx`) and stream powers `P_S(k)`
/// (stored as the diagonal).
#[derive(Clone, Debug, PartialEq)]
pub struct PrecoderSet {
    pub precoders: Vec<CMat>,
    pub stream_powers: Vec<DVector<f64>>,
}

impl PrecoderSet {
    pub fn new(precoders: Vec<CMat>, stream_powers: Vec<DVector<f64>>) -> Result<Self> {
        if precoders.is_empty() || precoders.len() != stream_powers.len() {
            return Err(Error::dim("need one stream-power vector per precoder"));
        }
        let shape = precoders[0].shape();
        for (w, p) in precoders.iter().zip(&stream_powers) {
            if w.shape() != shape || p.len() != shape.1 {
                return Err(Error::dim("precoder and stream-power shapes disagree"));
            }
            if p.iter().any(|&x| !(x >= 0.0)) {
                return Err(Error::InvalidInput("stream powers must be nonnegative".into()));
            }
        }
        Ok(Self { precoders, stream_powers })
    }

    /// Every stream carries the same energy `e_s`.
    pub fn with_uniform_power(precoders: Vec<CMat>, e_s: f64) -> Result<Self> {
        let powers = precoders.iter().map(|w| DVector::from_element(w.ncols(), e_s)).collect();
        Self::new(precoders, powers)
    }

    pub fn n_sc(&self) -> usize {
        self.precoders.len()
    }

    /// `W(k) P_S(k) W(k)^H`.
    pub fn freq_covariance(&self, k: usize) -> CMat {
        let w = &self.precoders[k];
        w * diag_real(&self.stream_powers[k]) * w.adjoint()
    }

    pub fn covariance(&self) -> CovarianceSet {
        let freq = (0..self.n_sc()).map(|k| self.freq_covariance(k)).collect();
        CovarianceSet::from_freq(freq).expect("precoder set is non-empty and uniformly shaped")
    }

    /// `(1/N^2) sum_k tr(W(k) P_S(k) W(k)^H)`.
    pub fn total_power(&self) -> f64 {
        let n = self.n_sc() as f64;
        let sum: f64 = self
            .precoders
            .iter()
            .zip(&self.stream_powers)
            .map(|(w, p)| {
                w.column_iter().zip(p.iter()).map(|(c, &pi)| pi * c.norm_squared()).sum::<f64>()
            })
            .sum();
        sum / (n * n)
    }

    pub fn validate(&self, total_power: f64) -> Result<()> {
        let p = self.total_power();
        if p > total_power + 1e-9 {
            return Err(Error::InvalidInput(format!(
                "precoders use {p} power, budget is {total_power}"
            )));
        }
        self.covariance().validate(None)
    }
}

/// `Y(k) = H(k) W(k) S(k) + Z(k)` for every subcarrier.
///
/// With `noise`, `Z(k)` is circularly-symmetric complex Gaussian with
/// covariance `var * I`.
pub fn receive_freq(
    chan: &FreqChannel,
    precoders: &PrecoderSet,
    symbols: &[CVec],
    mut noise: Option<(f64, &mut GaussianSource)>,
) -> Result<Vec<CVec>> {
    if chan.n_sc() != precoders.n_sc() || symbols.len() != chan.n_sc() {
        return Err(Error::dim("channel, precoders and symbols must cover the same subcarriers"));
    }
    let mut out = Vec::with_capacity(chan.n_sc());
    for (k, s) in symbols.iter().enumerate() {
        let h = chan.h(k);
        let w = &precoders.precoders[k];
        if h.ncols() != w.nrows() || w.ncols() != s.len() {
            return Err(Error::dim(format!("subcarrier {k}: H, W and S do not chain")));
        }
        let mut y = h * (w * s);
        if let Some((var, rng)) = noise.as_mut() {
            y += rng.complex_vector(y.len(), *var);
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_identity, right_pseudo_inverse, C64};

    #[test]
    fn padded_identity_covariance() {
        let set = PrecoderSet::with_uniform_power(vec![partial_identity(4, 2)], 1.0).unwrap();
        let cov = set.covariance();
        let expect = CMat::from_fn(4, 4, |i, j| if i == j && i < 2 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        assert_eq!(cov.time_domain, expect);
        cov.validate(Some(2.0)).unwrap();
    }

    #[test]
    fn trace_matches_stream_sum() {
        let mut rng = GaussianSource::new(8);
        let n = 5;
        let ws: Vec<CMat> = (0..n).map(|_| rng.complex_matrix(6, 3, 1.0)).collect();
        let ps: Vec<DVector<f64>> = (0..n).map(|_| DVector::from_fn(3, |_, _| rng.uniform())).collect();
        let set = PrecoderSet::new(ws.clone(), ps.clone()).unwrap();
        let cov = set.covariance();
        assert!(cov.time_freq_residual() < 1e-12);
        let mut oracle = 0.0;
        for k in 0..n {
            for i in 0..3 {
                oracle += ps[k][i] * ws[k].column(i).norm_squared();
            }
        }
        oracle /= (n * n) as f64;
        assert!((cov.trace() - oracle).abs() < 1e-12);
        assert!((set.total_power() - oracle).abs() < 1e-12);
    }

    #[test]
    fn zero_forcing_recovers_symbols() {
        let chan = FreqChannel::random_iid_seeded(6, 3, 4, 5);
        let ws = chan.per_subcarrier.iter().map(|h| right_pseudo_inverse(h).unwrap()).collect();
        let set = PrecoderSet::with_uniform_power(ws, 1.0).unwrap();
        let mut rng = GaussianSource::new(6);
        let s: Vec<CVec> = (0..4).map(|_| rng.complex_vector(3, 1.0)).collect();
        let y = receive_freq(&chan, &set, &s, None).unwrap();
        for (a, b) in y.iter().zip(&s) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn residual_is_isi_term() {
        let chan = FreqChannel::random_iid_seeded(4, 2, 3, 1);
        let mut rng = GaussianSource::new(2);
        let ws: Vec<CMat> = (0..3).map(|_| rng.complex_matrix(4, 2, 1.0)).collect();
        let set = PrecoderSet::with_uniform_power(ws.clone(), 1.0).unwrap();
        let s: Vec<CVec> = (0..3).map(|_| rng.complex_vector(2, 1.0)).collect();
        let y = receive_freq(&chan, &set, &s, None).unwrap();
        for k in 0..3 {
            let isi = chan.h(k) * &ws[k] * &s[k] - &s[k];
            assert!((&y[k] - &s[k] - isi).norm() < 1e-12);
        }
    }

    #[test]
    fn noise_covariance() {
        let chan = FreqChannel::new(vec![CMat::zeros(2, 3)]).unwrap();
        let set = PrecoderSet::with_uniform_power(vec![CMat::zeros(3, 2)], 1.0).unwrap();
        let mut rng = GaussianSource::new(77);
        let draws = 100_000;
        let mut acc = CMat::zeros(2, 2);
        let s = vec![CVec::zeros(2)];
        for _ in 0..draws {
            let y = receive_freq(&chan, &set, &s, Some((0.3, &mut rng))).unwrap();
            acc += &y[0] * y[0].adjoint();
        }
        acc /= C64::new(draws as f64, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 0.3 } else { 0.0 };
                assert!((acc[(i, j)] - C64::new(expect, 0.0)).norm() < 0.05 * 0.3, "{i},{j}: {}", acc[(i, j)]);
            }
        }
    }
}
