use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensions and power levels of a MIMO-OFDM link.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    /// Transmit antennas at the base station.
    pub n_tx: usize,
    /// Receive antennas at the user.
    pub n_rx: usize,
    /// Subcarriers (IDFT size).
    pub n_sc: usize,
    /// Cyclic-prefix length in samples.
    pub n_cp: usize,
    /// Total transmit power (linear).
    pub total_power: f64,
    /// Receiver noise variance per subcarrier (linear).
    pub noise_var: f64,
    /// Element spacing in wavelengths.
    pub antenna_spacing: f64,
    /// Per-stream symbol energy.
    pub symbol_energy: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            n_tx: 20,
            n_rx: 10,
            n_sc: 16,
            n_cp: 4,
            total_power: 1.0,
            noise_var: 0.01,
            antenna_spacing: 0.5,
            symbol_energy: 1.0,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_tx == 0 || self.n_rx == 0 || self.n_sc == 0 {
            return Err(Error::Config("antenna and subcarrier counts must be positive".into()));
        }
        if self.n_rx >= self.n_tx {
            return Err(Error::Config(format!(
                "receive antennas ({}) must be fewer than transmit antennas ({})",
                self.n_rx, self.n_tx
            )));
        }
        for (name, v) in [
            ("total_power", self.total_power),
            ("noise_var", self.noise_var),
            ("antenna_spacing", self.antenna_spacing),
            ("symbol_energy", self.symbol_energy),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn with_snr_db(&self, snr_db: f64) -> Self {
        Self { noise_var: self.total_power * super::noise_var_from_snr_db(snr_db), ..self.clone() }
    }

    pub fn geometry(&self) -> super::ArrayGeometry {
        super::ArrayGeometry::new(self.n_tx, self.antenna_spacing)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        SystemConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_more_rx_than_tx() {
        let cfg = SystemConfig { n_rx: 20, ..SystemConfig::default() };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn snr_conversion() {
        let cfg = SystemConfig::default().with_snr_db(20.0);
        assert!((cfg.noise_var - 0.01).abs() < 1e-15);
    }
}
