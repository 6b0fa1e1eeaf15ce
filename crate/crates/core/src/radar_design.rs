//! Radar-only transmit covariance for a single point target.

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::model::ArrayGeometry;
use crate::radar::{crb, RadarScene};

#[derive(Clone, Debug, PartialEq)]
pub struct RadarOnlyDesign {
    /// `R_d`, `n_tx x n_tx`, trace equal to the power budget.
    pub covariance: CMat,
    pub achieved_crb: f64,
}

impl RadarOnlyDesign {
    /// `a^H R_d a`, the beam gain toward the target.
    pub fn target_gain(&self, geom: &ArrayGeometry, theta: f64) -> f64 {
        let a = geom.steering_vector(theta);
        (a.adjoint() * &self.covariance * &a)[(0, 0)].re
    }
}

/// Covariance minimizing the angle CRB under `tr(R) = total_power`, `R` PSD.
///
/// The CRB falls as `a^H R a` grows, and over PSD matrices with fixed trace
/// that quadratic form peaks at the rank-one beam `(P_T/N_T) a a^H`.
pub fn design_radar_only(geom: &ArrayGeometry, scene: &RadarScene, total_power: f64) -> Result<RadarOnlyDesign> {
    if !(total_power > 0.0 && total_power.is_finite()) {
        return Err(Error::InvalidInput(format!("total power must be positive, got {total_power}")));
    }
    scene.validate()?;
    let a = geom.steering_vector(scene.theta);
    let covariance = (&a * a.adjoint()).map(|z| z * C64::new(total_power / geom.n_tx as f64, 0.0));
    let achieved_crb = crb(geom, scene, &covariance)?;
    Ok(RadarOnlyDesign { covariance, achieved_crb })
}
