//! Solver kernels: integral min-cost flow and a dense bounded simplex.

mod mcf;
mod simplex;

pub use mcf::{solve_min_cost_flow, FlowArc, FlowError, FlowNetwork, FlowSolution};
pub use simplex::{
    solve_lp, solve_lp_warm, BasisVar, LinearProgram, LpSolution, LpStatus, Sense, SimplexOptions,
};
