//! Constrained solvers shared by both design strategies.

mod active_set;
mod procrustes;
mod simplex_qp;
mod sqp;
mod waterfill;

pub use active_set::{solve_qp_active_set, solve_qp_active_set_from, LinearEquality, QpSolution};
pub use procrustes::{procrustes_objective, solve_opp};
pub use simplex_qp::{project_to_simplex, simplex_kkt_residual, solve_simplex_qp, SimplexQpProblem};
pub use sqp::{
    sqp_minimize, FnObjective, HessianUpdate, SimplexObjective, SqpIterate, SqpOptions, SqpOutcome, SqpState,
};
pub use waterfill::{waterfill, WaterfillResult};
