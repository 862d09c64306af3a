use crate::error::{Error, Result};
use crate::partition::{NodeId, Tree};
use crate::problems::{BudgetedEvaluator, Problem};

use super::{IterationRecord, OptimizerConfig, RunTrace, Termination};

/// Result of a finished SOO run.
#[derive(Debug, Clone)]
pub struct SooOutcome {
    pub best_value: f64,
    pub best_point: Vec<f64>,
    pub trace: RunTrace,
    pub tree: Tree,
}

/// Single-objective simultaneous optimistic optimization.
///
/// Within a sweep, the best leaf at each depth is expanded when its value
/// is no worse than the best value expanded at a shallower depth of the
/// same sweep. Ties among leaves go to the earliest created leaf.
#[derive(Debug)]
pub struct Soo<'p> {
    config: OptimizerConfig,
    evaluator: BudgetedEvaluator<'p>,
    tree: Tree,
    t: usize,
    cursor: usize,
    threshold: f64,
    sweep_expansions: usize,
    trace: RunTrace,
}

impl<'p> Soo<'p> {
    pub fn new(problem: &'p Problem, config: OptimizerConfig) -> Result<Self> {
        config.validate()?;
        if problem.m() != 1 {
            return Err(Error::InvalidParameter(format!(
                "SOO needs a single objective, problem has {}",
                problem.m()
            )));
        }
        let mut evaluator = BudgetedEvaluator::new(problem, config.budget);
        let tree = Tree::new(config.k, config.split, config.seed, &mut evaluator)?;
        Ok(Self {
            config,
            evaluator,
            tree,
            t: 1,
            cursor: 0,
            threshold: f64::INFINITY,
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

    pub fn trace(&self) -> &RunTrace {
        &self.trace
    }

    pub fn evaluations(&self) -> usize {
        self.evaluator.count()
    }

    /// Number of expansions performed plus one.
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

    /// Visits one depth of the current sweep. Returns `false` once the run
    /// has terminated.
    pub fn step(&mut self) -> Result<bool> {
        if self.is_finished() {
            return Ok(false);
        }
        while self.cursor > self.config.hmax.value(self.t).min(self.tree.depth()) {
            if self.sweep_expansions == 0 {
                return self.stop(Termination::TreeExhausted);
            }
            self.cursor = 0;
            self.threshold = f64::INFINITY;
            self.sweep_expansions = 0;
            self.trace.sweep_depths.push(0);
        }
        if self.evaluator.remaining() < self.tree.expansion_cost() {
            return self.stop(Termination::BudgetExhausted);
        }

        let depth = self.cursor;
        let visited_at = self.t;
        let leaves = self.tree.leaves_at(depth).to_vec();
        let mut best: Option<(NodeId, f64)> = None;
        for &id in &leaves {
            let v = self.tree.node(id).value[0];
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((id, v));
            }
        }

        let mut selected = Vec::new();
        let mut expanded = Vec::new();
        let mut frozen = Vec::new();
        if let Some((id, v)) = best.filter(|&(_, v)| v <= self.threshold) {
            selected.push(id);
            match self.tree.expand(id, &mut self.evaluator) {
                Ok(_) => {
                    expanded.push(id);
                    self.threshold = v;
                    self.t += 1;
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
            t: visited_at,
            sweep,
            depth,
            leaves: leaves.len(),
            selected,
            expanded,
            frozen,
            evaluations: self.evaluator.count(),
        });
        self.cursor += 1;
        Ok(true)
    }

    pub fn run(mut self) -> Result<SooOutcome> {
        while self.step()? {}
        Ok(self.finish())
    }

    pub fn finish(self) -> SooOutcome {
        let log = self.evaluator.into_log();
        let mut best = &log[0];
        for e in &log[1..] {
            if e.value[0] < best.value[0] {
                best = e;
            }
        }
        let (best_value, best_point) = (best.value[0], best.point.clone());
        SooOutcome {
            best_value,
            best_point,
            trace: RunTrace {
                evaluations: log,
                ..self.trace
            },
            tree: self.tree,
        }
    }
}

/// Runs SOO to completion on a single-objective `problem`.
pub fn soo_run(problem: &Problem, config: OptimizerConfig) -> Result<SooOutcome> {
    Soo::new(problem, config)?.run()
}
