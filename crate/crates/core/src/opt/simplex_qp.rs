use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Convex quadratic `0.5 x^T Q x + c^T x + constant` over the probability
/// simplex `{x : sum x = 1, x >= 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexQpProblem {
    pub hessian: DMatrix<f64>,
    pub linear: DVector<f64>,
    pub constant: f64,
}

impl SimplexQpProblem {
    pub fn new(hessian: DMatrix<f64>, linear: DVector<f64>, constant: f64) -> Result<Self> {
        let n = linear.len();
        if n == 0 || hessian.shape() != (n, n) {
            return Err(Error::dim("simplex QP needs an n x n Hessian and length-n linear term"));
        }
        let asym = (&hessian - hessian.transpose()).amax();
        let scale = hessian.amax().max(1.0);
        if asym > 1e-12 * scale {
            return Err(Error::InvalidInput("simplex QP Hessian is not symmetric".into()));
        }
        let lo = hessian.clone().symmetric_eigen().eigenvalues.min();
        if lo < -1e-10 * scale {
            return Err(Error::InvalidInput(format!("simplex QP Hessian is not PSD (min eigenvalue {lo:e})")));
        }
        Ok(Self { hessian, linear, constant })
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.hessian * x)) + self.linear.dot(x) + self.constant
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.hessian * x + &self.linear
    }
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_to_simplex(v: &DVector<f64>) -> DVector<f64> {
    let mut u: Vec<f64> = v.iter().copied().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            tau = t;
        }
    }
    v.map(|x| (x - tau).max(0.0))
}

/// Simplex KKT residual, scaled by the gradient magnitude.
///
/// With `lambda` the common gradient value on the support, returns the
/// largest of `|g_i - lambda|` on the support and `lambda - g_i` off it.
pub fn simplex_kkt_residual(grad: &DVector<f64>, x: &DVector<f64>) -> f64 {
    let support_tol = 1e-12;
    let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] > support_tol).collect();
    if support.is_empty() {
        return f64::INFINITY;
    }
    let lambda = support.iter().map(|&i| grad[i]).sum::<f64>() / support.len() as f64;
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let r = if x[i] > support_tol { (grad[i] - lambda).abs() } else { (lambda - grad[i]).max(0.0) };
        worst = worst.max(r);
    }
    worst / grad.amax().max(1.0)
}

/// Minimizes a convex quadratic over the probability simplex.
///
/// Accelerated projected gradient with adaptive restart, then an exact
/// equality-constrained solve on the detected support. Fails with
/// [`Error::NotConverged`] (carrying the best iterate) if the projected-gradient
/// fixed point is not reached.
pub fn solve_simplex_qp(problem: &SimplexQpProblem) -> Result<DVector<f64>> {
    const MAX_ITER: usize = 200_000;
    const TOL: f64 = 1e-13;

    let n = problem.dim();
    if n == 1 {
        return Ok(DVector::from_element(1, 1.0));
    }
    let lipschitz = problem.hessian.clone().symmetric_eigen().eigenvalues.max();
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    if lipschitz <= 0.0 {
        // Linear objective: a vertex at the smallest cost coordinate.
        let best = problem.linear.argmin().0;
        x.fill(0.0);
        x[best] = 1.0;
        return Ok(x);
    }
    let step = 1.0 / lipschitz;
    let mut y = x.clone();
    let mut momentum = 1.0f64;
    let mut best = (problem.objective(&x), x.clone());
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let next = project_to_simplex(&(&y - problem.gradient(&y) * step));
        let f_next = problem.objective(&next);
        let moved = (&next - &x).amax();
        if moved <= TOL {
            converged = true;
            break;
        }
        let f_x = problem.objective(&x);
        if f_next > f_x + 1e-15 * f_x.abs().max(1.0) {
            // Adaptive restart keeps the sequence monotone.
            momentum = 1.0;
            y = x.clone();
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        y = &next + (&next - &x) * ((momentum - 1.0) / t_next);
        momentum = t_next;
        x = next;
        if f_next < best.0 {
            best = (f_next, x.clone());
        }
    }
    if !converged {
        return Err(Error::NotConverged { iterations: MAX_ITER, best: best.1.iter().copied().collect() });
    }
    let x = if problem.objective(&x) <= best.0 { x } else { best.1 };
    Ok(polish_on_support(problem, x))
}

/// Solves the stationarity system restricted to the support of `x`; keeps the
/// polished point only if it stays feasible and is no worse.
fn polish_on_support(problem: &SimplexQpProblem, x: DVector<f64>) -> DVector<f64> {
    let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] > 1e-12).collect();
    let m = support.len();
    let mut kkt = DMatrix::zeros(m + 1, m + 1);
    let mut rhs = DVector::zeros(m + 1);
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            kkt[(a, b)] = problem.hessian[(i, j)];
        }
        kkt[(a, m)] = 1.0;
        kkt[(m, a)] = 1.0;
        rhs[a] = -problem.linear[i];
    }
    rhs[m] = 1.0;
    let Some(sol) = kkt.lu().solve(&rhs) else { return x };
    let mut polished = DVector::zeros(x.len());
    for (a, &i) in support.iter().enumerate() {
        if !(sol[a] >= 0.0) {
            return x;
        }
        polished[i] = sol[a];
    }
    let f_old = problem.objective(&x);
    let f_new = problem.objective(&polished);
    let g_old = simplex_kkt_residual(&problem.gradient(&x), &x);
    let g_new = simplex_kkt_residual(&problem.gradient(&polished), &polished);
    if f_new <= f_old + 1e-12 * f_old.abs().max(1.0) && g_new <= g_old {
        polished
    } else {
        x
    }
}
