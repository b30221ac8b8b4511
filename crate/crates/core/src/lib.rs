//! Two-agent allocation of mixed goods and chores under per-category
//! capacity constraints.
//!
//! [`solver::solve`] returns a feasible allocation that is Pareto optimal
//! and envy-free up to removing one item from each side (EF\[1,1\]). The
//! [`oracle`] module enumerates every feasible allocation of small
//! instances and serves as ground truth in tests.

pub mod fairness;
pub mod fixtures;
pub mod generate;
pub mod instance;
pub mod lines;
pub mod matching;
pub mod oracle;
pub mod rational;
pub mod report;
pub mod schema;
pub mod solver;

pub use fairness::{FairnessVerdict, Property};
pub use instance::{Agent, Allocation, Instance, Item};
pub use rational::Rational;
pub use solver::{solve, SolveError, SolveOutcome, SolveTrace};
