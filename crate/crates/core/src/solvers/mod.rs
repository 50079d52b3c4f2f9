//! Exact solvers shared by the invariants: bipartite transport feasibility
//! and a small dense maximin linear program.

pub mod flow;
pub mod simplex;

pub use flow::{max_flow_value, maxflow_feasible, FlowOutcome, FlowProblem};
pub use simplex::{lp_maximin, Constraint, LinearProgram, LpSolution, Piece};
