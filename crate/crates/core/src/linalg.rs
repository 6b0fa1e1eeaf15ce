//! Small complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// `I_{rows x cols}`: ones on the main diagonal, zeros elsewhere.
pub fn partial_identity(rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |i, j| if i == j { ONE } else { ZERO })
}

pub fn real_to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

/// Largest entrywise modulus of `m - m^H`.
pub fn hermitian_residual(m: &CMat) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m^H) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order. Columns of the returned matrix are the eigenvectors.
pub fn hermitian_eigen_desc(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = hermitian_part(m).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    let (values, _) = hermitian_eigen_desc(m);
    values.last().copied().unwrap_or(0.0)
}

/// Fails unless `m` is Hermitian within `herm_tol` and its smallest
/// eigenvalue is at least `-psd_tol`.
pub fn check_hermitian_psd(m: &CMat, herm_tol: f64, psd_tol: f64, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::dim(format!("{what} is {}x{}, expected square", m.nrows(), m.ncols())));
    }
    let h = hermitian_residual(m);
    if h > herm_tol {
        return Err(Error::InvalidInput(format!("{what} is not Hermitian (residual {h:e})")));
    }
    let lo = min_eigenvalue(m);
    if lo < -psd_tol {
        return Err(Error::InvalidInput(format!(
            "{what} is not positive semidefinite (min eigenvalue {lo:e})"
        )));
    }
    Ok(())
}

/// Natural log-determinant of a Hermitian positive definite matrix.
pub fn ln_det_hpd(m: &CMat) -> Result<f64> {
    let chol = hermitian_part(m)
        .cholesky()
        .ok_or_else(|| Error::Numerical("log-det of a matrix that is not positive definite".into()))?;
    let l = chol.l_dirty();
    // nalgebra happily takes complex square roots of negative pivots.
    if (0..m.nrows()).any(|i| !(l[(i, i)].re > 0.0) || l[(i, i)].im.abs() > 1e-12 * l[(i, i)].re) {
        return Err(Error::Numerical("log-det of a matrix that is not positive definite".into()));
    }
    Ok((0..m.nrows()).map(|i| 2.0 * l[(i, i)].re.ln()).sum())
}

/// Thin SVD `m = U diag(s) V^H` with singular values in descending order.
/// Returns `(U, s, V)` where `U` is rows x r, `V` is cols x r and r = min(rows, cols).
pub fn svd_desc(m: &CMat) -> Result<(CMat, Vec<f64>, CMat)> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.ok_or_else(|| Error::Numerical("SVD did not return U".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::Numerical("SVD did not return V^H".into()))?;
    let r = svd.singular_values.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u_sorted = CMat::from_fn(u.nrows(), r, |i, c| u[(i, order[c])]);
    let v_sorted = CMat::from_fn(v_t.ncols(), r, |i, c| v_t[(order[c], i)].conj());
    Ok((u_sorted, s, v_sorted))
}

/// Squared Frobenius norm.
pub fn fro2(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Moore-Penrose right inverse `H^H (H H^H)^{-1}` of a full-row-rank matrix.
pub fn right_pseudo_inverse(h: &CMat) -> Result<CMat> {
    let gram = h * h.adjoint();
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Numerical("channel matrix is rank deficient".into()))?;
    Ok(h.adjoint() * inv)
}

pub fn diag_real(values: &DVector<f64>) -> CMat {
    CMat::from_diagonal(&values.map(|p| C64::new(p, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, data: &[(f64, f64)]) -> CMat {
        CMat::from_row_iterator(rows, cols, data.iter().map(|&(a, b)| C64::new(a, b)))
    }

    #[test]
    fn eigen_is_sorted_and_reconstructs() {
        let a = m(2, 2, &[(2.0, 0.0), (0.0, 1.0), (0.0, -1.0), (3.0, 0.0)]);
        let (vals, vecs) = hermitian_eigen_desc(&a);
        assert!(vals[0] >= vals[1]);
        let rebuilt = &vecs * diag_real(&DVector::from_vec(vals)) * vecs.adjoint();
        assert!((rebuilt - a).norm() < 1e-12);
    }

    #[test]
    fn svd_sorted_reconstructs() {
        let a = m(2, 3, &[(1.0, 0.5), (0.0, 0.0), (2.0, -1.0), (0.3, 0.0), (4.0, 1.0), (0.0, 0.2)]);
        let (u, s, v) = svd_desc(&a).unwrap();
        assert!(s[0] >= s[1]);
        let sigma = diag_real(&DVector::from_vec(s));
        assert!((u * sigma * v.adjoint() - a).norm() < 1e-12);
    }

    #[test]
    fn log_det_of_diagonal() {
        let a = m(2, 2, &[(2.0, 0.0), (0.0, 0.0), (0.0, 0.0), (5.0, 0.0)]);
        assert!((ln_det_hpd(&a).unwrap() - 10f64.ln()).abs() < 1e-14);
        let neg = m(1, 1, &[(-1.0, 0.0)]);
        assert!(ln_det_hpd(&neg).is_err());
    }

    #[test]
    fn psd_check_rejects_non_hermitian() {
        let a = m(2, 2, &[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        assert!(check_hermitian_psd(&a, 1e-12, 1e-10, "a").is_err());
    }
}
