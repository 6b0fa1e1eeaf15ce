use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::model::ArrayGeometry;
use crate::radar::RadarScene;
use crate::rng::GaussianSource;

/// Point-target echo `y_r(n) = zeta a(theta) a^H(theta) x(n) + z_r(n)`.
///
/// `samples` holds one transmit snapshot per row.
pub fn simulate_echo(
    geom: &ArrayGeometry,
    scene: &RadarScene,
    samples: &CMat,
    noise: Option<(f64, &mut GaussianSource)>,
) -> Result<CMat> {
    if samples.ncols() != geom.n_tx {
        return Err(Error::dim(format!(
            "snapshots have {} antennas, array has {}",
            samples.ncols(),
            geom.n_tx
        )));
    }
    let a = geom.steering_vector(scene.theta);
    let steer = &a * a.adjoint() * scene.reflection;
    // Rows are snapshots, so apply the (symmetric-in-role) operator on the right.
    let mut echo = samples * steer.transpose();
    if let Some((var, rng)) = noise {
        for z in echo.iter_mut() {
            *z += rng.complex_normal(var);
        }
    }
    Ok(echo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn no_reflection_is_pure_noise() {
        let g = ArrayGeometry::new(4, 0.5);
        let scene = RadarScene { reflection: C64::new(0.0, 0.0), ..RadarScene::default() };
        let x = GaussianSource::new(1).complex_matrix(10, 4, 1.0);
        let clean = simulate_echo(&g, &scene, &x, None).unwrap();
        assert!(clean.norm() == 0.0);
        let mut rng = GaussianSource::new(2);
        let noisy = simulate_echo(&g, &scene, &x, Some((0.5, &mut rng))).unwrap();
        assert!(noisy.norm() > 0.0);
    }

    #[test]
    fn echo_is_collinear_with_steering() {
        let g = ArrayGeometry::new(6, 0.5);
        let scene = RadarScene { theta: 0.4, ..RadarScene::default() };
        let a = g.steering_vector(0.4);
        let x = GaussianSource::new(3).complex_matrix(5, 6, 1.0);
        let y = simulate_echo(&g, &scene, &x, None).unwrap();
        for r in 0..5 {
            let row = y.row(r).transpose();
            let coef = (a.adjoint() * &row)[0] / C64::new(6.0, 0.0);
            assert!((row - &a * coef).norm() < 1e-12);
        }
    }

    #[test]
    fn sample_covariance_matches_model() {
        let g = ArrayGeometry::new(4, 0.5);
        let scene = RadarScene { theta: 0.2, reflection: C64::new(0.6, -0.3), ..RadarScene::default() };
        let mut rng = GaussianSource::new(9);
        let b = rng.complex_matrix(4, 4, 0.5);
        let r = &b * b.adjoint();
        let chol = r.clone().cholesky().unwrap().l();
        let snapshots = 100_000;
        let white = rng.complex_matrix(snapshots, 4, 1.0);
        let x = white * chol.transpose();
        let y = simulate_echo(&g, &scene, &x, None).unwrap();
        let emp = y.transpose() * y.map(|z| z.conj()) / C64::new(snapshots as f64, 0.0);
        let a = g.steering_vector(0.2);
        let big_a = &a * a.adjoint();
        let expect = &big_a * &r * big_a.adjoint() * C64::new(scene.reflection.norm_sqr(), 0.0);
        let rel = (&emp - &expect).norm() / expect.norm();
        assert!(rel < 0.05, "relative error {rel}");
    }
}
