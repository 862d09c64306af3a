use crate::error::{Error, Result};
use crate::pareto::{nd_filter_indices, ApproximationSet};
use crate::partition::{NodeId, Tree};
use crate::problems::{BudgetedEvaluator, Problem};

use super::{IterationRecord, OptimizerConfig, RunTrace, Termination};

/// Result of a finished MO-SOO run.
#[derive(Debug, Clone)]
pub struct MosooOutcome {
    /// Non-dominated layer of every evaluated representative.
    pub archive: ApproximationSet,
    pub trace: RunTrace,
    pub tree: Tree,
}

/// Multi-objective simultaneous optimistic optimization.
///
/// At each depth `h` the leaves `P` at that depth are merged with the set
/// `V` of vectors kept from shallower depths of the current sweep; `V`
/// becomes the non-dominated layer of the union and every leaf of `P` that
/// survives is expanded. Set membership is tracked by node, and leaves come
/// before `V` in the union, so a child that repeats its parent's value
/// still counts as non-dominated.
#[derive(Debug)]
pub struct Mosoo<'p> {
    config: OptimizerConfig,
    evaluator: BudgetedEvaluator<'p>,
    tree: Tree,
    archive: ApproximationSet,
    t: usize,
    cursor: usize,
    retained: Vec<NodeId>,
    sweep_expansions: usize,
    trace: RunTrace,
}

impl<'p> Mosoo<'p> {
    /// Builds the tree and evaluates the root.
    pub fn new(problem: &'p Problem, config: OptimizerConfig) -> Result<Self> {
        config.validate()?;
        let mut evaluator = BudgetedEvaluator::new(problem, config.budget);
        let tree = Tree::new(config.k, config.split, config.seed, &mut evaluator)?;
        let mut archive = ApproximationSet::new();
        archive.insert(tree.node(tree.root()).value.clone())?;
        Ok(Self {
            config,
            evaluator,
            tree,
            archive,
            t: 1,
            cursor: 0,
            retained: Vec::new(),
            sweep_expansions: 0,
            trace: RunTrace {
                sweep_depths: vec![0],
                ..Default::default()
            },
        })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn archive(&self) -> &ApproximationSet {
        &self.archive
    }

    pub fn trace(&self) -> &RunTrace {
        &self.trace
    }

    pub fn evaluations(&self) -> usize {
        self.evaluator.count()
    }

    /// Counter of the next iteration (starts at 1).
    pub fn iteration(&self) -> usize {
        self.t
    }

    pub fn is_finished(&self) -> bool {
        self.trace.termination.is_some()
    }

    fn stop(&mut self, why: Termination) -> Result<bool> {
        self.trace.termination = Some(why);
        Ok(false)
    }

    /// Executes one iteration, i.e. one depth of the current sweep. Returns
    /// `false` once the run has terminated.
    pub fn step(&mut self) -> Result<bool> {
        if self.is_finished() {
            return Ok(false);
        }
        while self.cursor > self.config.hmax.value(self.t).min(self.tree.depth()) {
            if self.sweep_expansions == 0
                && (!self.config.hmax.is_growing() || self.tree.leaf_count() == 0)
            {
                return self.stop(Termination::TreeExhausted);
            }
            self.cursor = 0;
            self.retained.clear();
            self.sweep_expansions = 0;
            self.trace.sweep_depths.push(0);
        }
        let cost = self.tree.expansion_cost();
        if self.evaluator.remaining() < cost {
            return self.stop(Termination::BudgetExhausted);
        }

        let depth = self.cursor;
        let leaves = self.tree.leaves_at(depth).to_vec();
        let candidates: Vec<NodeId> = leaves.iter().chain(&self.retained).copied().collect();
        let values: Vec<&[f64]> = candidates
            .iter()
            .map(|&id| self.tree.node(id).value.values())
            .collect();
        let survivors = nd_filter_indices(&values)?;
        let selected: Vec<NodeId> = survivors
            .iter()
            .filter(|&&i| i < leaves.len())
            .map(|&i| candidates[i])
            .collect();
        self.retained = survivors.iter().map(|&i| candidates[i]).collect();

        let mut expanded = Vec::with_capacity(selected.len());
        let mut frozen = Vec::new();
        for &id in &selected {
            if self.evaluator.remaining() < cost {
                self.trace.termination = Some(Termination::BudgetExhausted);
                break;
            }
            match self.tree.expand(id, &mut self.evaluator) {
                Ok(children) => {
                    for c in children {
                        self.archive.insert(self.tree.node(c).value.clone())?;
                    }
                    expanded.push(id);
                }
                Err(Error::ZeroWidth { .. }) => {
                    self.tree.freeze(id)?;
                    frozen.push(id);
                }
                Err(e) => return Err(e),
            }
        }

        let sweep = self.trace.sweep_depths.len() - 1;
        self.trace.sweep_depths[sweep] += 1;
        self.sweep_expansions += expanded.len();
        self.trace.iterations.push(IterationRecord {
            t: self.t,
            sweep,
            depth,
            leaves: leaves.len(),
            selected,
            expanded,
            frozen,
            evaluations: self.evaluator.count(),
        });
        self.t += 1;
        self.cursor += 1;
        Ok(true)
    }

    /// Runs until termination.
    pub fn run(mut self) -> Result<MosooOutcome> {
        while self.step()? {}
        Ok(self.finish())
    }

    /// Stops where the run currently stands.
    pub fn finish(self) -> MosooOutcome {
        let mut trace = self.trace;
        trace.evaluations = self.evaluator.into_log();
        MosooOutcome {
            archive: self.archive,
            trace,
            tree: self.tree,
        }
    }
}

/// Runs MO-SOO to completion on `problem`.
pub fn mosoo_run(problem: &Problem, config: OptimizerConfig) -> Result<MosooOutcome> {
    Mosoo::new(problem, config)?.run()
}
