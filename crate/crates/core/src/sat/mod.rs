//! Incremental SAT solving under assumptions.

mod dimacs;
mod solver;

pub use dimacs::Cnf;
pub use solver::{Lit, SatResult, SatSolver, SatStats, Var};
