//! Optimistic multi-objective optimization over hierarchical partitions.
//!
//! The crate provides the multi-objective simultaneous optimistic optimizer
//! ([`optimizer::Mosoo`]) and its single-objective ancestor
//! ([`optimizer::Soo`]), Pareto dominance utilities, quality indicators
//! (additive epsilon, two-objective hypervolume), benchmark problems with
//! known optima, and numerical evaluation of the finite-time loss and
//! indicator bounds.

pub mod error;
pub mod indicators;
pub mod optimizer;
pub mod pareto;
pub mod partition;
pub mod problems;
pub mod theory;

pub use error::{Error, Result};
pub use pareto::{ApproximationSet, ObjectiveVector};
pub use partition::{HyperBox, NodeId, SplitPolicy, Tree};
pub use problems::{BudgetedEvaluator, Problem};
