//! Radar figures of merit: angle CRB, transmit beampattern and beampattern
//! mismatch, plus a point-target echo model.

mod crb;
mod echo;
mod pattern;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

pub use crb::{crb, crb_general};
pub use echo::simulate_echo;
pub use pattern::{angle_grid, beampattern, beampattern_nmse, BeamPattern, DEFAULT_GRID_POINTS};

/// Single point target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadarScene {
    /// Target angle in radians from broadside.
    pub theta: f64,
    /// Echo SNR (linear). Independent of the communication SNR.
    pub snr: f64,
    /// Complex reflection coefficient, only used by [`simulate_echo`].
    #[serde(default = "unit_reflection")]
    pub reflection: C64,
}

fn unit_reflection() -> C64 {
    C64::new(1.0, 0.0)
}

impl Default for RadarScene {
    fn default() -> Self {
        Self { theta: 0.0, snr: 10.0, reflection: unit_reflection() }
    }
}

impl RadarScene {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta.abs() <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::Config(format!("target angle {} outside [-pi/2, pi/2]", self.theta)));
        }
        if !(self.snr.is_finite() && self.snr > 0.0) {
            return Err(Error::Config(format!("radar SNR must be positive, got {}", self.snr)));
        }
        Ok(())
    }
}
