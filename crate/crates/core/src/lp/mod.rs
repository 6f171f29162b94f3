//! Linear programming: a small dense simplex solver and the generator
//! design programs built on it.

mod cop;
mod simplex;

pub use cop::{
    design_capacity_bounds, joint_belief_lp, optimal_generator, Bounds, SolveReport,
};
pub use simplex::{
    max_residual, solve_lp, Constraint, LinearProgram, LpSolution, LpStatus, Relation,
};
