use crate::error::{Error, Result};
use crate::linalg::{check_hermitian_psd, C64, CMat};

/// Time-domain covariance `R` together with the per-subcarrier covariances
/// `R_f(k)`, tied by `R = (1/N^2) sum_k R_f(k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceSet {
    pub time_domain: CMat,
    pub freq_domain: Vec<CMat>,
}

impl CovarianceSet {
    pub fn from_freq(freq_domain: Vec<CMat>) -> Result<Self> {
        let first = freq_domain
            .first()
            .ok_or_else(|| Error::InvalidInput("covariance set needs at least one subcarrier".into()))?;
        if !first.is_square() || freq_domain.iter().any(|r| r.shape() != first.shape()) {
            return Err(Error::dim("subcarrier covariances must be square and equally sized"));
        }
        let time_domain = time_from_freq(&freq_domain);
        Ok(Self { time_domain, freq_domain })
    }

    pub fn n_sc(&self) -> usize {
        self.freq_domain.len()
    }

    pub fn trace(&self) -> f64 {
        self.time_domain.trace().re
    }

    /// Largest entrywise deviation from `R = (1/N^2) sum_k R_f(k)`.
    pub fn time_freq_residual(&self) -> f64 {
        (time_from_freq(&self.freq_domain) - &self.time_domain).camax()
    }

    /// Checks Hermitian symmetry, positive semidefiniteness and the
    /// time/frequency identity. With `total_power`, also checks `tr(R)`.
    pub fn validate(&self, total_power: Option<f64>) -> Result<()> {
        let scale = |m: &CMat| m.camax().max(1.0);
        check_hermitian_psd(&self.time_domain, 1e-12 * scale(&self.time_domain), 1e-10 * scale(&self.time_domain), "R")?;
        for (k, r) in self.freq_domain.iter().enumerate() {
            check_hermitian_psd(r, 1e-12 * scale(r), 1e-10 * scale(r), &format!("R_f({k})"))?;
        }
        let res = self.time_freq_residual();
        if res > 1e-10 {
            return Err(Error::InvalidInput(format!("time/frequency covariance mismatch {res:e}")));
        }
        if let Some(p) = total_power {
            let tr = self.trace();
            if (tr - p).abs() > 1e-9 * p.max(1.0) {
                return Err(Error::InvalidInput(format!("trace(R) = {tr}, expected {p}")));
            }
        }
        Ok(())
    }
}

fn time_from_freq(freq: &[CMat]) -> CMat {
    let n = freq.len() as f64;
    let mut acc = CMat::zeros(freq[0].nrows(), freq[0].ncols());
    for r in freq {
        acc += r;
    }
    acc / C64::new(n * n, 0.0)
}
