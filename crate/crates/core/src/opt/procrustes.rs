use crate::error::{Error, Result};
use crate::linalg::{fro2, svd_desc, CMat};

/// Orthogonal Procrustes step: the semi-unitary `W` (`W^H W = I`) closest to
/// `target` in Frobenius norm, equivalently the maximizer of
/// `Re tr(W^H target)`.
///
/// With `target = U S V^H` (thin SVD) the solution is `U V^H`.
pub fn solve_opp(target: &CMat) -> Result<CMat> {
    if target.ncols() > target.nrows() {
        return Err(Error::dim(format!(
            "Procrustes target is {}x{}; needs at least as many rows as columns",
            target.nrows(),
            target.ncols()
        )));
    }
    let (u, _, v) = svd_desc(target)?;
    Ok(u * v.adjoint())
}

/// `||W - target||_F^2`, the quantity [`solve_opp`] minimizes.
pub fn procrustes_objective(target: &CMat, w: &CMat) -> f64 {
    fro2(&(w - target))
}
