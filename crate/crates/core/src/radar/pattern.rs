use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, CMat};
use crate::model::ArrayGeometry;

/// 0.25 degree spacing over [-90, 90] degrees.
pub const DEFAULT_GRID_POINTS: usize = 721;

/// Transmit power `a^H(theta) R a(theta)` sampled on an angle grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamPattern {
    pub angles: Vec<f64>,
    pub gains: Vec<f64>,
}

/// Uniform grid of `points` angles over `[-pi/2, pi/2]`.
pub fn angle_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| -FRAC_PI_2 + std::f64::consts::PI * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

pub fn beampattern(geom: &ArrayGeometry, cov: &CMat, grid: &[f64]) -> BeamPattern {
    let r = hermitian_part(cov);
    let gains = grid
        .iter()
        .map(|&theta| {
            let a = geom.steering_vector(theta);
            (a.adjoint() * &r * &a)[0].re
        })
        .collect();
    BeamPattern { angles: grid.to_vec(), gains }
}

fn trapezoid(x: &[f64], y: impl Fn(usize) -> f64) -> f64 {
    x.windows(2)
        .enumerate()
        .map(|(i, w)| 0.5 * (w[1] - w[0]) * (y(i) + y(i + 1)))
        .sum()
}

/// Normalized squared mismatch between a reference (`strict`) pattern and a
/// trade-off pattern, integrated with the trapezoidal rule.
pub fn beampattern_nmse(strict: &BeamPattern, tradeoff: &BeamPattern) -> Result<f64> {
    if strict.angles.len() != tradeoff.angles.len()
        || strict.gains.len() != strict.angles.len()
        || tradeoff.gains.len() != tradeoff.angles.len()
        || strict.angles.iter().zip(&tradeoff.angles).any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(Error::dim("beampatterns are sampled on different grids"));
    }
    if strict.angles.len() < 2 {
        return Err(Error::InvalidInput("need at least two grid points".into()));
    }
    let den = trapezoid(&strict.angles, |i| strict.gains[i].powi(2));
    if den <= 0.0 {
        return Err(Error::InvalidInput("reference beampattern is identically zero".into()));
    }
    let num = trapezoid(&strict.angles, |i| (strict.gains[i] - tradeoff.gains[i]).powi(2));
    Ok(num / den)
}

impl BeamPattern {
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.angles
            .iter()
            .zip(&self.gains)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(&a, &g)| (a, g))
    }

    /// Columns: `angle_deg, gain_linear, gain_db`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["angle_deg", "gain_linear", "gain_db"])?;
        for (a, g) in self.angles.iter().zip(&self.gains) {
            let db = 10.0 * g.max(1e-30).log10();
            w.write_record([format!("{:.4}", a.to_degrees()), format!("{g:.12e}"), format!("{db:.6}")])?;
        }
        w.flush()?;
        Ok(())
    }
}
