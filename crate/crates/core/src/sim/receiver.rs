use nalgebra::DVector;

use super::qpsk;
use crate::design::{DesignOutcome, Receiver};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::model::FreqChannel;

/// Per-subcarrier effective channel `H W`, amplitudes and receive filter for
/// one design at one noise level.
pub struct LinkFilter {
    effective: Vec<CMat>,
    amplitudes: Vec<DVector<f64>>,
    /// Streams that carry data, per subcarrier.
    active: Vec<Vec<usize>>,
    /// `None` means slicing the raw antenna outputs.
    filters: Vec<Option<CMat>>,
    noise_std: f64,
}

impl LinkFilter {
    pub fn new(chan: &FreqChannel, design: &DesignOutcome, noise_var: f64) -> Result<Self> {
        let pre = design
            .precoders
            .as_ref()
            .ok_or_else(|| Error::Config(format!("{} carries no data", design.strategy)))?;
        if pre.n_sc() != chan.n_sc() {
            return Err(Error::dim("design and channel cover different subcarriers"));
        }
        let mut effective = Vec::with_capacity(chan.n_sc());
        let mut amplitudes = Vec::with_capacity(chan.n_sc());
        let mut active = Vec::with_capacity(chan.n_sc());
        let mut filters = Vec::with_capacity(chan.n_sc());
        for k in 0..chan.n_sc() {
            let g = chan.h(k) * &pre.precoders[k];
            if !g.is_square() {
                return Err(Error::dim("effective channel H W must be square"));
            }
            let p = &pre.stream_powers[k];
            let on: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
            let filter = match design.receiver {
                Receiver::Slicer => None,
                Receiver::Mmse { prior_scale } => Some(mmse_filter(&g, p, &on, noise_var, prior_scale)?),
            };
            amplitudes.push(p.map(f64::sqrt));
            effective.push(g);
            active.push(on);
            filters.push(filter);
        }
        Ok(Self { effective, amplitudes, active, filters, noise_std: noise_var.sqrt() })
    }

    pub fn n_sc(&self) -> usize {
        self.effective.len()
    }

    /// Sends one frame. `symbols` and `noise` are indexed `[k * n_rx + i]`;
    /// `noise` has unit variance. Returns `(errors, decisions)`.
    pub fn transmit(&self, symbols: &[u8], noise: &[C64]) -> (u64, u64) {
        let mut errors = 0;
        let mut decisions = 0;
        for k in 0..self.n_sc() {
            let g = &self.effective[k];
            let n_rx = g.nrows();
            let sent = &symbols[k * n_rx..(k + 1) * n_rx];
            let s = DVector::from_fn(n_rx, |i, _| qpsk::modulate(sent[i]) * self.amplitudes[k][i]);
            let y = g * s + DVector::from_fn(n_rx, |i, _| noise[k * n_rx + i] * self.noise_std);
            let active = &self.active[k];
            // The MMSE filter only outputs the active streams, in order.
            let estimates: Vec<C64> = match &self.filters[k] {
                None => active.iter().map(|&i| y[i]).collect(),
                Some(f) => (f * y).iter().copied().collect(),
            };
            errors += count_errors(&estimates, sent, active);
            decisions += active.len() as u64;
        }
        (errors, decisions)
    }
}

/// Symbol errors of `estimates[j]` against `sent[active[j]]`.
pub fn count_errors(estimates: &[C64], sent: &[u8], active: &[usize]) -> u64 {
    estimates.iter().zip(active).filter(|(z, &i)| qpsk::slice(**z) != sent[i]).count() as u64
}

/// `(G_A^H G_A + noise_var diag(prior_scale / p_A))^{-1} G_A^H` over the
/// active streams `A`.
fn mmse_filter(g: &CMat, p: &DVector<f64>, active: &[usize], noise_var: f64, prior_scale: f64) -> Result<CMat> {
    let g_a = CMat::from_fn(g.nrows(), active.len(), |r, c| g[(r, active[c])]);
    let mut gram = g_a.adjoint() * &g_a;
    for (c, &i) in active.iter().enumerate() {
        gram[(c, c)] += C64::new(noise_var * prior_scale / p[i], 0.0);
    }
    let chol = gram.cholesky().ok_or_else(|| Error::Numerical("MMSE Gram matrix is not positive definite".into()))?;
    Ok(chol.solve(&g_a.adjoint()))
}
