use std::f64::consts::TAU;

use crate::linalg::{C64, CVec};

/// Uniform linear array referenced to its center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArrayGeometry {
    pub n_tx: usize,
    /// Element spacing in wavelengths.
    pub spacing: f64,
}

impl ArrayGeometry {
    pub fn new(n_tx: usize, spacing: f64) -> Self {
        Self { n_tx, spacing }
    }

    /// Element offset from the array center, in units of the spacing.
    /// Runs from `-(n-1)/2` to `(n-1)/2`.
    fn offset(&self, i: usize) -> f64 {
        (2.0 * i as f64 + 1.0 - self.n_tx as f64) / 2.0
    }

    /// Steering vector toward `theta` (radians from broadside).
    pub fn steering_vector(&self, theta: f64) -> CVec {
        let k = TAU * self.spacing * theta.sin();
        CVec::from_fn(self.n_tx, |i, _| C64::from_polar(1.0, k * self.offset(i)))
    }

    /// Elementwise derivative of [`Self::steering_vector`] with respect to `theta`.
    pub fn steering_derivative(&self, theta: f64) -> CVec {
        let k = TAU * self.spacing * theta.sin();
        let dk = TAU * self.spacing * theta.cos();
        CVec::from_fn(self.n_tx, |i, _| {
            let d = self.offset(i);
            C64::new(0.0, dk * d) * C64::from_polar(1.0, k * d)
        })
    }
}
