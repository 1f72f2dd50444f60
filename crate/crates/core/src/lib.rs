//! Implicit hitting set (IHS) solving for weighted constraint satisfaction
//! problems.
//!
//! The solver alternates between computing a cheap cost vector that hits
//! every known core and asking a SAT oracle whether the CSP induced by that
//! vector is satisfiable. Unsatisfiable vectors are grown into larger cores;
//! satisfiable ones give upper bounds. The loop stops once the cheapest
//! hitting vector is as expensive as the best solution.

pub mod hitting;
pub mod ihs;
pub mod improve;
pub mod instance;
pub mod merge;
pub mod model;
pub mod oracle;
pub mod sat;

pub use ihs::{solve, CoreStrategy, HvStrategy, RunReport, RunStatus, SolveError, SolverConfig};
pub use model::{Assignment, CoreSet, Cost, CostFunction, CostVector, HardConstraint, WcspInstance};
