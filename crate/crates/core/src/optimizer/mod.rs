//! Optimistic tree-search optimizers and their run traces.
//!
//! Both optimizers sweep the tree from the root down to
//! `min(h_max(t), depth)`, one depth per step, re-evaluating that limit before
//! every step. They differ in what they expand at each depth and in how the
//! counter `t` advances: [`Mosoo`] counts depth visits, [`Soo`] counts
//! expansions.

mod mosoo;
mod soo;

pub use mosoo::{mosoo_run, Mosoo, MosooOutcome};
pub use soo::{soo_run, Soo, SooOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::{empirical_ideal, ApproximationSet, ObjectiveVector};
use crate::partition::{NodeId, SplitPolicy, Tree};
use crate::problems::Evaluation;

/// Depth cap `h_max(t)` as a function of the iteration counter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HMaxPolicy {
    /// `floor(t^p)` with `0 < p < 1`.
    Power { p: f64 },
    Constant { depth: usize },
    Unbounded,
}

impl Default for HMaxPolicy {
    fn default() -> Self {
        HMaxPolicy::Power { p: 0.5 }
    }
}

impl HMaxPolicy {
    pub fn power(p: f64) -> Result<Self> {
        if p > 0.0 && p < 1.0 {
            Ok(HMaxPolicy::Power { p })
        } else {
            Err(Error::InvalidParameter(format!("h_max exponent must lie in (0, 1), got {p}")))
        }
    }

    pub fn value(&self, t: usize) -> usize {
        match *self {
            HMaxPolicy::Power { p } => (t as f64).powf(p).floor() as usize,
            HMaxPolicy::Constant { depth } => depth,
            HMaxPolicy::Unbounded => usize::MAX,
        }
    }

    /// Whether `h_max(t)` keeps increasing without bound.
    pub fn is_growing(&self) -> bool {
        matches!(self, HMaxPolicy::Power { .. })
    }
}

/// Parameters shared by [`Mosoo`] and [`Soo`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Partition factor `K >= 2`.
    pub k: usize,
    /// Evaluation budget, root evaluation included.
    pub budget: usize,
    pub hmax: HMaxPolicy,
    pub split: SplitPolicy,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            k: 3,
            budget: 10_000,
            hmax: HMaxPolicy::default(),
            split: SplitPolicy::Sequential,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidParameter("evaluation budget must be at least 1".into()));
        }
        if self.k < 2 {
            return Err(Error::InvalidParameter(format!("partition factor must be >= 2, got {}", self.k)));
        }
        if let HMaxPolicy::Power { p } = self.hmax {
            HMaxPolicy::power(p)?;
        }
        Ok(())
    }
}

/// One visit of one depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Counter value when the depth was visited (per-visit for MO-SOO,
    /// per-expansion for SOO).
    pub t: usize,
    pub sweep: usize,
    pub depth: usize,
    /// Number of leaves at `depth` when visited.
    pub leaves: usize,
    /// Nodes chosen for expansion.
    pub selected: Vec<NodeId>,
    /// Nodes actually expanded, a prefix of `selected` minus frozen ones.
    pub expanded: Vec<NodeId>,
    /// Selected nodes whose cells turned out too thin to split.
    pub frozen: Vec<NodeId>,
    /// Cumulative evaluations after the visit.
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The budget cannot pay for another expansion.
    BudgetExhausted,
    /// No expansion is possible any more under the depth policy.
    TreeExhausted,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub iterations: Vec<IterationRecord>,
    /// Depths visited by each sweep, indexed by sweep number.
    pub sweep_depths: Vec<usize>,
    pub evaluations: Vec<Evaluation>,
    pub termination: Option<Termination>,
}

impl RunTrace {
    pub fn expansions(&self) -> usize {
        self.iterations.iter().map(|r| r.expanded.len()).sum()
    }

    /// For each recorded iteration, the largest number of depths visited by
    /// any sweep up to and including the one it belongs to. A final sweep cut
    /// short by the budget therefore inherits the length of earlier sweeps.
    pub fn depth_multipliers(&self) -> Vec<usize> {
        let mut longest = Vec::with_capacity(self.sweep_depths.len());
        let mut acc = 0;
        for &d in &self.sweep_depths {
            acc = acc.max(d);
            longest.push(acc);
        }
        self.iterations.iter().map(|r| longest[r.sweep]).collect()
    }

    /// Replays the run one iteration at a time. `f` receives each record,
    /// the archive as it stood after that iteration, and the evaluations
    /// performed during it.
    pub fn replay<F>(&self, mut f: F) -> Result<()>
    where
        F: FnMut(&IterationRecord, &ApproximationSet, &[Evaluation]) -> Result<()>,
    {
        let mut archive = ApproximationSet::new();
        let mut seen = 0;
        if let Some(root) = self.evaluations.first() {
            archive.insert(root.value.clone())?;
            seen = 1;
        }
        for record in &self.iterations {
            let fresh = &self.evaluations[seen..record.evaluations];
            for e in fresh {
                archive.insert(e.value.clone())?;
            }
            seen = record.evaluations;
            f(record, &archive, fresh)?;
        }
        Ok(())
    }
}

/// `r = empirical_ideal(archive) - y*`, coordinate-wise.
pub fn loss_vector(archive: &[ObjectiveVector], ideal: &ObjectiveVector) -> Result<ObjectiveVector> {
    let found = empirical_ideal(archive)?;
    Error::check_dim(ideal.dim(), found.dim())?;
    ObjectiveVector::new(
        found
            .values()
            .iter()
            .zip(ideal.values())
            .map(|(a, b)| a - b)
            .collect(),
    )
}

/// Depth of the deepest expanded node whose cell contains `optimum`; `-1`
/// while nothing is expanded.
pub fn deepest_j_optimal_depth(tree: &Tree, optimum: &[f64]) -> Result<i64> {
    tree.deepest_expanded_containing(optimum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(v: &[f64]) -> ObjectiveVector {
        ObjectiveVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn power_policy_values() {
        let h = HMaxPolicy::power(0.5).unwrap();
        let vals: Vec<_> = (1..=10).map(|t| h.value(t)).collect();
        assert_eq!(vals, vec![1, 1, 1, 2, 2, 2, 2, 2, 3, 3]);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        assert!(HMaxPolicy::power(1.0).is_err());
        assert!(HMaxPolicy::power(0.0).is_err());
        assert_eq!(HMaxPolicy::Constant { depth: 4 }.value(100), 4);
        assert_eq!(HMaxPolicy::Unbounded.value(1), usize::MAX);
    }

    #[test]
    fn loss_vector_examples() {
        let r = loss_vector(&[ov(&[1., 3.]), ov(&[3., 1.])], &ov(&[1., 1.])).unwrap();
        assert_eq!(r, ov(&[0., 0.]));
        let r = loss_vector(&[ov(&[2., 2.])], &ov(&[1., 1.])).unwrap();
        assert_eq!(r, ov(&[1., 1.]));
        assert!(loss_vector(&[ov(&[2., 2.])], &ov(&[1.])).is_err());
        assert!(loss_vector(&[], &ov(&[1.])).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = OptimizerConfig { budget: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig { k: 1, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig { hmax: HMaxPolicy::Power { p: 1.5 }, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(OptimizerConfig::default().validate().is_ok());
    }
}
