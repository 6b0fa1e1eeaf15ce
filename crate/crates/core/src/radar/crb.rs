use crate::error::{Error, Result};
use crate::linalg::{hermitian_residual, CMat};
use crate::model::ArrayGeometry;
use crate::radar::RadarScene;

fn check_input(geom: &ArrayGeometry, cov: &CMat) -> Result<()> {
    if cov.shape() != (geom.n_tx, geom.n_tx) {
        return Err(Error::dim(format!(
            "covariance is {}x{}, array has {} elements",
            cov.nrows(),
            cov.ncols(),
            geom.n_tx
        )));
    }
    let res = hermitian_residual(cov);
    if res > 1e-9 * cov.camax().max(1.0) {
        return Err(Error::InvalidInput(format!("covariance is not Hermitian (residual {res:e})")));
    }
    Ok(())
}

/// Angle CRB for a centered ULA: `1 / (2 SNR |a'|^2 a^H R a)`.
///
/// Returns `+inf` when the covariance puts no power toward the target.
pub fn crb(geom: &ArrayGeometry, scene: &RadarScene, cov: &CMat) -> Result<f64> {
    check_input(geom, cov)?;
    let a = geom.steering_vector(scene.theta);
    let da = geom.steering_derivative(scene.theta);
    let gain = (a.adjoint() * cov * &a)[0].re;
    let floor = 1e-14 * cov.trace().re.abs().max(f64::MIN_POSITIVE) * geom.n_tx as f64;
    if gain <= floor {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (2.0 * scene.snr * da.norm_squared() * gain))
}

/// Angle CRB from the general trace form with `A = a a^H` and its
/// derivative `A' = a' a^H + a a'^H`:
///
/// ```text
/// CRB = tr(A^H A R) / (2 SNR (tr(A'^H A' R) tr(A^H A R) - |tr(A'^H A R)|^2))
/// ```
///
/// Coincides with [`crb`] whenever `R` has rank one. For higher-rank `R` the
/// two differ and this form is never larger.
pub fn crb_general(geom: &ArrayGeometry, scene: &RadarScene, cov: &CMat) -> Result<f64> {
    check_input(geom, cov)?;
    let a = geom.steering_vector(scene.theta);
    let da = geom.steering_derivative(scene.theta);
    let big_a = &a * a.adjoint();
    let big_da = &da * a.adjoint() + &a * da.adjoint();
    let t_aa = (big_a.adjoint() * &big_a * cov).trace().re;
    let t_dd = (big_da.adjoint() * &big_da * cov).trace().re;
    let t_da = (big_da.adjoint() * &big_a * cov).trace();
    let den = t_dd * t_aa - t_da.norm_sqr();
    let scale = (t_dd * t_aa).abs().max(f64::MIN_POSITIVE);
    if t_aa <= 0.0 || den <= 1e-14 * scale {
        return Ok(f64::INFINITY);
    }
    Ok(t_aa / (2.0 * scene.snr * den))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::linalg::{C64, CVec};
    use crate::rng::GaussianSource;

    fn scene(theta: f64, snr: f64) -> RadarScene {
        RadarScene { theta, snr, ..RadarScene::default() }
    }

    #[test]
    fn matched_beam_two_elements() {
        let g = ArrayGeometry::new(2, 0.5);
        let a = g.steering_vector(0.0);
        let r = &a * a.adjoint() / C64::new(2.0, 0.0);
        let v = crb(&g, &scene(0.0, 1.0), &r).unwrap();
        assert!((v - 1.0 / (2.0 * PI * PI)).abs() < 1e-14);
    }

    #[test]
    fn orthogonal_covariance_is_infinite() {
        let g = ArrayGeometry::new(2, 0.5);
        let b = CVec::from_vec(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
        let r = &b * b.adjoint();
        assert!(crb(&g, &scene(0.0, 1.0), &r).unwrap().is_infinite());
    }

    #[test]
    fn snr_and_power_homogeneity() {
        let g = ArrayGeometry::new(8, 0.5);
        let mut rng = GaussianSource::new(3);
        let b = rng.complex_matrix(8, 3, 1.0);
        let r = &b * b.adjoint();
        let base = crb(&g, &scene(0.2, 1.0), &r).unwrap();
        let doubled = crb(&g, &scene(0.2, 2.0), &r).unwrap();
        assert!((doubled - base / 2.0).abs() < 1e-12 * base);
        let scaled = crb(&g, &scene(0.2, 1.0), &(&r * C64::new(3.0, 0.0))).unwrap();
        assert!((scaled - base / 3.0).abs() < 1e-12 * base);
    }

    #[test]
    fn rejects_non_hermitian() {
        let g = ArrayGeometry::new(2, 0.5);
        let r = CMat::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(crb(&g, &scene(0.0, 1.0), &r).is_err());
        assert!(crb_general(&g, &scene(0.0, 1.0), &r).is_err());
    }

    #[test]
    fn general_form_agrees_on_rank_one() {
        let g = ArrayGeometry::new(20, 0.5);
        let mut rng = GaussianSource::new(10);
        for _ in 0..100 {
            let theta = (rng.uniform() - 0.5) * 3.0;
            let b = rng.complex_vector(20, 1.0);
            let r = &b * b.adjoint();
            let s = scene(theta, 1.0 + rng.uniform());
            let x = crb(&g, &s, &r).unwrap();
            let y = crb_general(&g, &s, &r).unwrap();
            assert!((x - y).abs() <= 1e-9 * x, "{x} vs {y}");
        }
        let a = g.steering_vector(0.0);
        let v = crb_general(&g, &scene(0.0, 1.0), &(&a * a.adjoint())).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn general_form_never_exceeds_closed_form() {
        let g = ArrayGeometry::new(6, 0.5);
        let mut rng = GaussianSource::new(11);
        for _ in 0..50 {
            let b = rng.complex_matrix(6, 4, 1.0);
            let r = &b * b.adjoint();
            let s = scene(0.3, 1.0);
            assert!(crb_general(&g, &s, &r).unwrap() <= crb(&g, &s, &r).unwrap() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn zero_covariance_is_degenerate() {
        let g = ArrayGeometry::new(4, 0.5);
        assert!(crb_general(&g, &scene(0.0, 1.0), &CMat::zeros(4, 4)).unwrap().is_infinite());
        assert!(crb(&g, &scene(0.0, 1.0), &CMat::zeros(4, 4)).unwrap().is_infinite());
    }
}
