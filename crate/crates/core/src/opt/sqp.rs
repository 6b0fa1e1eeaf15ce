use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::active_set::{solve_qp_active_set_from, LinearEquality};
use crate::error::{Error, Result};

/// Smooth objective over the probability simplex.
pub trait SimplexObjective {
    fn dim(&self) -> usize;
    fn value(&self, omega: &DVector<f64>) -> f64;
    fn gradient(&self, omega: &DVector<f64>) -> DVector<f64>;
}

/// Closure-backed [`SimplexObjective`].
pub struct FnObjective<F, G> {
    pub dim: usize,
    pub value: F,
    pub gradient: G,
}

impl<F, G> FnObjective<F, G>
where
    F: Fn(&DVector<f64>) -> f64,
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    pub fn new(dim: usize, value: F, gradient: G) -> Self {
        Self { dim, value, gradient }
    }
}

impl<F, G> SimplexObjective for FnObjective<F, G>
where
    F: Fn(&DVector<f64>) -> f64,
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, omega: &DVector<f64>) -> f64 {
        (self.value)(omega)
    }
    fn gradient(&self, omega: &DVector<f64>) -> DVector<f64> {
        (self.gradient)(omega)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HessianUpdate {
    #[default]
    Bfgs,
    Dfp,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SqpOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub update: HessianUpdate,
    pub armijo: f64,
    pub max_halvings: usize,
    /// Rescale the identity by `y^T y / s^T y` right before the first update.
    pub initial_scaling: bool,
}

impl Default for SqpOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 200, update: HessianUpdate::Bfgs, armijo: 1e-4, max_halvings: 30, initial_scaling: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SqpState {
    pub iterate: DVector<f64>,
    pub hessian_approx: DMatrix<f64>,
    pub iteration: usize,
    pub last_step_norm: f64,
}

/// One row of the convergence trace. Row 0 is the starting point and has no step.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SqpIterate {
    pub iteration: usize,
    pub objective: f64,
    pub step_norm: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SqpOutcome {
    pub omega: DVector<f64>,
    pub objective: f64,
    pub trace: Vec<SqpIterate>,
    pub converged: bool,
    pub state: SqpState,
}

impl SqpOutcome {
    pub fn iterations(&self) -> usize {
        self.state.iteration
    }

    /// Writes `iteration,objective,step_norm` rows; the first row has an empty step.
    pub fn write_trace_csv(&self, path: &Path) -> Result<()> {
        write_trace_csv(&self.trace, path)
    }
}

pub(crate) fn write_trace_csv(trace: &[SqpIterate], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["iteration", "objective", "step_norm"])?;
    for row in trace {
        let step = row.step_norm.map(|s| format!("{s:e}")).unwrap_or_default();
        w.write_record([row.iteration.to_string(), format!("{:.12e}", row.objective), step])?;
    }
    w.flush().map_err(Error::Io)?;
    Ok(())
}

/// Minimizes `objective` over `{omega : sum omega = 1, omega >= 0}`.
///
/// Starts from the uniform point with an identity Hessian model. Each
/// iteration solves the quadratic model over the simplex with the active-set
/// QP, backtracks along the step (Armijo) and refreshes the model with a
/// damped quasi-Newton update. Stops once `||omega_{m+1} - omega_m|| <= tol`.
/// Reaching `max_iter` is not an error; `converged` reports it.
pub fn sqp_minimize<O: SimplexObjective + ?Sized>(objective: &O, options: &SqpOptions) -> Result<SqpOutcome> {
    let n = objective.dim();
    if n == 0 {
        return Err(Error::InvalidInput("SQP needs at least one weight".into()));
    }
    if !(options.tol > 0.0) {
        return Err(Error::InvalidInput("SQP tolerance must be positive".into()));
    }
    let mut omega = DVector::from_element(n, 1.0 / n as f64);
    let mut f = finite(objective.value(&omega), "objective")?;
    let mut grad = objective.gradient(&omega);
    if grad.len() != n || grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::Numerical("objective gradient is not finite".into()));
    }
    let mut hess = DMatrix::<f64>::identity(n, n);
    let mut trace = vec![SqpIterate { iteration: 0, objective: f, step_norm: None }];
    let eq = LinearEquality::sum_to(n, 0.0);
    let mut updated_once = false;
    let mut converged = false;
    let mut iteration = 0;
    let mut last_step_norm = f64::NAN;

    while iteration < options.max_iter {
        iteration += 1;
        let lower = -&omega;
        let qp = solve_qp_active_set_from(&hess, &grad, &eq, &lower, DVector::zeros(n)).map_err(|e| match e {
            Error::Infeasible(m) => Error::Numerical(format!("SQP subproblem infeasible from a feasible iterate: {m}")),
            other => other,
        })?;
        let direction = qp.x;
        let slope = grad.dot(&direction);

        let mut t = 1.0;
        let mut accepted = None;
        if slope < 0.0 {
            for _ in 0..=options.max_halvings {
                let trial = retract(&(&omega + &direction * t));
                let f_trial = objective.value(&trial);
                if f_trial.is_nan() {
                    return Err(Error::Numerical("objective returned NaN".into()));
                }
                if f_trial <= f + options.armijo * t * slope {
                    accepted = Some((trial, f_trial));
                    break;
                }
                t *= 0.5;
            }
        }
        let Some((next, f_next)) = accepted else {
            // No descent available from the model: the iterate is stationary
            // to working precision.
            last_step_norm = 0.0;
            trace.push(SqpIterate { iteration, objective: f, step_norm: Some(0.0) });
            converged = true;
            break;
        };

        let s = &next - &omega;
        let step_norm = s.norm();
        let grad_next = objective.gradient(&next);
        if grad_next.iter().any(|g| !g.is_finite()) {
            return Err(Error::Numerical("objective gradient is not finite".into()));
        }
        let y = &grad_next - &grad;
        if step_norm > 0.0 {
            if options.initial_scaling && !updated_once {
                let sy = s.dot(&y);
                if sy > 1e-12 * step_norm * y.norm() {
                    hess = DMatrix::identity(n, n) * (y.norm_squared() / sy);
                }
            }
            quasi_newton_update(&mut hess, &s, &y, options.update);
            updated_once = true;
        }
        omega = next;
        f = f_next;
        grad = grad_next;
        last_step_norm = step_norm;
        trace.push(SqpIterate { iteration, objective: f, step_norm: Some(step_norm) });
        if step_norm <= options.tol {
            converged = true;
            break;
        }
    }

    Ok(SqpOutcome {
        objective: f,
        state: SqpState { iterate: omega.clone(), hessian_approx: hess, iteration, last_step_norm },
        omega,
        trace,
        converged,
    })
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!("{what} is not finite at the starting point")))
    }
}

/// Clears round-off so the point sits on the simplex.
fn retract(omega: &DVector<f64>) -> DVector<f64> {
    let clipped = omega.map(|w| w.max(0.0));
    let total = clipped.sum();
    clipped / total
}

/// Damped BFGS or DFP update of the Hessian model.
///
/// Powell damping replaces `y` by a blend with `B s` whenever `s^T y` falls
/// below `0.2 s^T B s`, which keeps the model positive definite.
fn quasi_newton_update(hess: &mut DMatrix<f64>, s: &DVector<f64>, y: &DVector<f64>, kind: HessianUpdate) {
    let bs = &*hess * s;
    let sbs = s.dot(&bs);
    if !(sbs > 0.0) {
        return;
    }
    let sy = s.dot(y);
    let r = if sy < 0.2 * sbs {
        let theta = 0.8 * sbs / (sbs - sy);
        y * theta + &bs * (1.0 - theta)
    } else {
        y.clone()
    };
    let sr = s.dot(&r);
    if sr <= 1e-12 * s.norm() * r.norm() {
        return;
    }
    match kind {
        HessianUpdate::Bfgs => {
            *hess += &r * r.transpose() / sr - &bs * bs.transpose() / sbs;
        }
        HessianUpdate::Dfp => {
            let n = s.len();
            let left = DMatrix::identity(n, n) - &r * s.transpose() / sr;
            *hess = &left * &*hess * left.transpose() + &r * r.transpose() / sr;
        }
    }
    let sym = (&*hess + hess.transpose()) * 0.5;
    *hess = sym;
}
