use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A single linear equality `coeffs^T x = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearEquality {
    pub coeffs: DVector<f64>,
    pub rhs: f64,
}

impl LinearEquality {
    pub fn new(coeffs: DVector<f64>, rhs: f64) -> Self {
        Self { coeffs, rhs }
    }

    /// `1^T x = rhs`.
    pub fn sum_to(n: usize, rhs: f64) -> Self {
        Self { coeffs: DVector::from_element(n, 1.0), rhs }
    }
}

/// Minimizer with its Lagrange multipliers.
///
/// Stationarity reads `G x + c = eq_multiplier * a + bound_multipliers`, with
/// `bound_multipliers[i] >= 0` and zero on inactive bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct QpSolution {
    pub x: DVector<f64>,
    pub eq_multiplier: f64,
    pub bound_multipliers: DVector<f64>,
    pub iterations: usize,
}

impl QpSolution {
    /// Largest violation among stationarity, feasibility, dual feasibility and
    /// complementary slackness.
    pub fn kkt_residual(&self, hessian: &DMatrix<f64>, gradient: &DVector<f64>, eq: &LinearEquality, lower: &DVector<f64>) -> f64 {
        let grad = hessian * &self.x + gradient;
        let station = (&grad - &eq.coeffs * self.eq_multiplier - &self.bound_multipliers).amax();
        let primal_eq = (eq.coeffs.dot(&self.x) - eq.rhs).abs();
        let mut worst = station.max(primal_eq);
        for i in 0..self.x.len() {
            let slack = self.x[i] - lower[i];
            worst = worst.max((-slack).max(0.0));
            worst = worst.max((-self.bound_multipliers[i]).max(0.0));
            worst = worst.max((self.bound_multipliers[i] * slack).abs());
        }
        worst
    }
}

/// Minimizes `0.5 x^T G x + c^T x` subject to `a^T x = b` and `x >= lower`
/// with a primal active-set method.
pub fn solve_qp_active_set(
    hessian: &DMatrix<f64>,
    gradient: &DVector<f64>,
    eq: &LinearEquality,
    lower: &DVector<f64>,
) -> Result<QpSolution> {
    check_shapes(hessian, gradient, eq, lower)?;
    // Phase 1: all coordinates at their bounds except one that absorbs the
    // equality residual.
    let residual = eq.rhs - eq.coeffs.dot(lower);
    let scale = eq.coeffs.amax();
    let pivot = (0..lower.len())
        .filter(|&i| eq.coeffs[i].abs() > 1e-14 * scale)
        .filter(|&i| residual == 0.0 || residual / eq.coeffs[i] > 0.0)
        .max_by(|&i, &j| eq.coeffs[i].abs().total_cmp(&eq.coeffs[j].abs()))
        .ok_or_else(|| Error::Infeasible("no point satisfies the equality above the bounds".into()))?;
    let mut x0 = lower.clone();
    x0[pivot] += residual / eq.coeffs[pivot];
    solve_from(hessian, gradient, eq, lower, x0, Some(pivot))
}

/// Same as [`solve_qp_active_set`] but starts from a feasible point `x0`.
pub fn solve_qp_active_set_from(
    hessian: &DMatrix<f64>,
    gradient: &DVector<f64>,
    eq: &LinearEquality,
    lower: &DVector<f64>,
    x0: DVector<f64>,
) -> Result<QpSolution> {
    check_shapes(hessian, gradient, eq, lower)?;
    if x0.len() != lower.len() {
        return Err(Error::dim("starting point length differs from the bound vector"));
    }
    let tol = 1e-10 * (1.0 + eq.rhs.abs());
    if (eq.coeffs.dot(&x0) - eq.rhs).abs() > tol || (0..x0.len()).any(|i| x0[i] < lower[i] - tol) {
        return Err(Error::InvalidInput("active-set starting point is not feasible".into()));
    }
    solve_from(hessian, gradient, eq, lower, x0, None)
}

fn check_shapes(hessian: &DMatrix<f64>, gradient: &DVector<f64>, eq: &LinearEquality, lower: &DVector<f64>) -> Result<()> {
    let n = gradient.len();
    if n == 0 || hessian.shape() != (n, n) || eq.coeffs.len() != n || lower.len() != n {
        return Err(Error::dim("active-set QP operands have inconsistent sizes"));
    }
    if eq.coeffs.amax() == 0.0 {
        return Err(Error::InvalidInput("equality constraint has no nonzero coefficient".into()));
    }
    if lower.iter().chain(gradient.iter()).chain(hessian.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("active-set QP operands must be finite".into()));
    }
    Ok(())
}

fn solve_from(
    hessian: &DMatrix<f64>,
    gradient: &DVector<f64>,
    eq: &LinearEquality,
    lower: &DVector<f64>,
    mut x: DVector<f64>,
    keep_free: Option<usize>,
) -> Result<QpSolution> {
    let n = x.len();
    let a = &eq.coeffs;
    let a_scale = a.amax();
    let bound_tol = 1e-12 * (1.0 + lower.amax());
    let mut active: Vec<bool> = (0..n).map(|i| x[i] <= lower[i] + bound_tol).collect();
    if let Some(p) = keep_free {
        active[p] = false;
    }
    if !(0..n).any(|i| !active[i] && a[i].abs() > 1e-14 * a_scale) {
        // The equality must keep one free coordinate, otherwise the working
        // set is linearly dependent.
        let p = (0..n).max_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs())).unwrap();
        active[p] = false;
    }
    for i in 0..n {
        if active[i] {
            x[i] = lower[i];
        }
    }

    let max_iter = 50 * (n + 1);
    for iteration in 1..=max_iter {
        let grad = hessian * &x + gradient;
        let free: Vec<usize> = (0..n).filter(|&i| !active[i]).collect();
        let (step, nu) = equality_step(hessian, &grad, a, &free)?;
        let step_size = step.amax();
        if step_size <= 1e-14 * (1.0 + x.amax()) {
            // Stationary on the working set: check bound multipliers.
            let lambda = -nu;
            let mut mu = DVector::zeros(n);
            let mut worst: Option<(usize, f64)> = None;
            for i in (0..n).filter(|&i| active[i]) {
                mu[i] = grad[i] - lambda * a[i];
                if worst.is_none_or(|(_, m)| mu[i] < m) {
                    worst = Some((i, mu[i]));
                }
            }
            let g_scale = grad.amax().max(1.0);
            match worst {
                Some((i, m)) if m < -1e-12 * g_scale => active[i] = false,
                _ => {
                    for i in 0..n {
                        if !active[i] {
                            mu[i] = 0.0;
                        }
                    }
                    return Ok(QpSolution { x, eq_multiplier: lambda, bound_multipliers: mu.map(|m| m.max(0.0)), iterations: iteration });
                }
            }
            continue;
        }
        let mut alpha = 1.0;
        let mut blocking = None;
        for &i in &free {
            if step[i] < 0.0 {
                let t = (lower[i] - x[i]) / step[i];
                if t < alpha {
                    alpha = t.max(0.0);
                    blocking = Some(i);
                }
            }
        }
        x += &step * alpha;
        if let Some(i) = blocking {
            x[i] = lower[i];
            active[i] = true;
        }
    }
    Err(Error::NotConverged { iterations: max_iter, best: x.iter().copied().collect() })
}

/// Solves `[G_FF a_F; a_F^T 0][p_F; nu] = [-g_F; 0]`, returning the full-length
/// step (zero on the working set) and `nu`.
fn equality_step(hessian: &DMatrix<f64>, grad: &DVector<f64>, a: &DVector<f64>, free: &[usize]) -> Result<(DVector<f64>, f64)> {
    let m = free.len();
    let mut kkt = DMatrix::zeros(m + 1, m + 1);
    let mut rhs = DVector::zeros(m + 1);
    for (r, &i) in free.iter().enumerate() {
        for (c, &j) in free.iter().enumerate() {
            kkt[(r, c)] = hessian[(i, j)];
        }
        kkt[(r, m)] = a[i];
        kkt[(m, r)] = a[i];
        rhs[r] = -grad[i];
    }
    let sol = kkt
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::Numerical("singular KKT system in active-set QP (Hessian not PD?)".into()))?;
    let mut step = DVector::zeros(grad.len());
    for (r, &i) in free.iter().enumerate() {
        step[i] = sol[r];
    }
    Ok((step, sol[m]))
}
