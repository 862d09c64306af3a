//! K-ary hierarchical partitioning of a box.
//!
//! Each node owns a cell of the decision box together with the objective
//! vector evaluated at the cell center. Expanding a node splits its cell into
//! `K` equal-width slabs along one coordinate. For odd `K` the middle child
//! has the same center as its parent and inherits the parent's evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::ObjectiveVector;
use crate::problems::BudgetedEvaluator;

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl HyperBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Error::check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::Empty("box"));
        }
        for (d, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::InvalidParameter(format!(
                    "invalid bounds [{lo}, {hi}] on dimension {d}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, d: usize) -> f64 {
        self.upper[d] - self.lower[d]
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(lo, hi)| lo < hi)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .collect()
    }

    /// Closed-box membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(xi, (lo, hi))| lo <= xi && xi <= hi)
    }
}

/// How the split coordinate is chosen at each depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitPolicy {
    /// Coordinate `depth mod n`.
    #[default]
    Sequential,
    /// One uniform draw per depth from the tree's seeded generator.
    Random,
}

/// Coordinate along which cells at `depth` are split.
pub fn split_dimension<R: Rng>(depth: usize, n: usize, policy: SplitPolicy, rng: &mut R) -> usize {
    assert!(n >= 1, "decision space must have at least one dimension");
    match policy {
        SplitPolicy::Sequential => depth % n,
        SplitPolicy::Random => rng.gen_range(0..n),
    }
}

/// Splits `cell` along `dim` into `k` equal-width boxes, ordered low to high.
pub fn split_cell(cell: &HyperBox, dim: usize, k: usize) -> Result<Vec<HyperBox>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("partition factor must be >= 2, got {k}")));
    }
    if dim >= cell.dim() {
        return Err(Error::InvalidParameter(format!(
            "split dimension {dim} out of range for a {}-dimensional cell",
            cell.dim()
        )));
    }
    let (lo, hi) = (cell.lower[dim], cell.upper[dim]);
    let width = hi - lo;
    let mut cuts: Vec<f64> = (0..k)
        .map(|i| lo + width * i as f64 / k as f64)
        .collect();
    cuts.push(hi);
    if cuts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::ZeroWidth { dim });
    }
    Ok(cuts
        .windows(2)
        .map(|w| {
            let mut child = cell.clone();
            child.lower[dim] = w[0];
            child.upper[dim] = w[1];
            child
        })
        .collect())
}

/// Arena handle of a node. Handles are assigned in creation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeStatus {
    Leaf,
    Expanded,
    /// The cell became too thin to split in floating point; never expanded.
    Frozen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub depth: usize,
    /// Position `i` among the `K^depth` cells of this depth, or `None` once
    /// it no longer fits in 128 bits.
    pub index: Option<u128>,
    pub cell: HyperBox,
    pub rep: Vec<f64>,
    pub value: ObjectiveVector,
    pub status: NodeStatus,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
}

/// Chooses split coordinates, caching one draw per depth under the random
/// policy.
#[derive(Debug, Clone)]
struct Splitter {
    policy: SplitPolicy,
    rng: ChaCha8Rng,
    drawn: Vec<usize>,
}

impl Splitter {
    fn dimension(&mut self, depth: usize, n: usize) -> usize {
        match self.policy {
            SplitPolicy::Sequential => split_dimension(depth, n, SplitPolicy::Sequential, &mut self.rng),
            SplitPolicy::Random => {
                while self.drawn.len() <= depth {
                    let d = split_dimension(self.drawn.len(), n, SplitPolicy::Random, &mut self.rng);
                    self.drawn.push(d);
                }
                self.drawn[depth]
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Tree {
    k: usize,
    nodes: Vec<Node>,
    leaves: Vec<Vec<NodeId>>,
    splitter: Splitter,
    expansions: usize,
}

impl Tree {
    /// Creates the tree and evaluates the root at the box center.
    pub fn new(
        k: usize,
        policy: SplitPolicy,
        seed: u64,
        evaluator: &mut BudgetedEvaluator<'_>,
    ) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("partition factor must be >= 2, got {k}")));
        }
        let cell = evaluator.problem().bounds().clone();
        let rep = cell.center();
        let value = evaluator.evaluate(&rep)?;
        let root = Node {
            depth: 0,
            index: Some(0),
            cell,
            rep,
            value,
            status: NodeStatus::Leaf,
            parent: None,
            children: Vec::new(),
        };
        Ok(Self {
            k,
            nodes: vec![root],
            leaves: vec![vec![NodeId(0)]],
            splitter: Splitter {
                policy,
                rng: ChaCha8Rng::seed_from_u64(seed),
                drawn: Vec::new(),
            },
            expansions: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Depth of the deepest node.
    pub fn depth(&self) -> usize {
        self.leaves.len() - 1
    }

    pub fn expansions(&self) -> usize {
        self.expansions
    }

    /// Expandable leaves at `depth`, in registration order.
    pub fn leaves_at(&self, depth: usize) -> &[NodeId] {
        self.leaves.get(depth).map_or(&[], Vec::as_slice)
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.iter().map(Vec::len).sum()
    }

    /// Evaluations one expansion consumes.
    pub fn expansion_cost(&self) -> usize {
        if self.k % 2 == 1 {
            self.k - 1
        } else {
            self.k
        }
    }

    /// Expands a leaf into `K` children and registers them as leaves at the
    /// next depth.
    ///
    /// The expansion is atomic: when the budget cannot pay for every fresh
    /// evaluation, or the cell cannot be split, nothing changes.
    pub fn expand(&mut self, id: NodeId, evaluator: &mut BudgetedEvaluator<'_>) -> Result<Vec<NodeId>> {
        let node = &self.nodes[id.0];
        if node.status != NodeStatus::Leaf {
            return Err(Error::NotALeaf(id));
        }
        let cost = self.expansion_cost();
        if evaluator.remaining() < cost {
            return Err(Error::BudgetExhausted { cap: evaluator.cap() });
        }
        let depth = node.depth;
        let dim = self.splitter.dimension(depth, node.cell.dim());
        let cells = split_cell(&node.cell, dim, self.k)?;
        let middle = (self.k % 2 == 1).then_some(self.k / 2);

        let mut children = Vec::with_capacity(self.k);
        for (k, cell) in cells.into_iter().enumerate() {
            let (rep, value) = if Some(k) == middle {
                (node.rep.clone(), node.value.clone())
            } else {
                let rep = cell.center();
                let value = evaluator.evaluate(&rep)?;
                (rep, value)
            };
            let index = node
                .index
                .and_then(|i| i.checked_mul(self.k as u128))
                .and_then(|i| i.checked_add(k as u128));
            children.push(Node {
                depth: depth + 1,
                index,
                cell,
                rep,
                value,
                status: NodeStatus::Leaf,
                parent: Some(id),
                children: Vec::new(),
            });
        }

        let first = self.nodes.len();
        let ids: Vec<NodeId> = (first..first + children.len()).map(NodeId).collect();
        self.nodes.extend(children);
        let parent = &mut self.nodes[id.0];
        parent.status = NodeStatus::Expanded;
        parent.children = ids.clone();
        self.leaves[depth].retain(|&l| l != id);
        if self.leaves.len() == depth + 1 {
            self.leaves.push(Vec::new());
        }
        self.leaves[depth + 1].extend(&ids);
        self.expansions += 1;
        Ok(ids)
    }

    /// Marks a leaf as unsplittable and drops it from the leaf registry.
    pub fn freeze(&mut self, id: NodeId) -> Result<()> {
        let node = &mut self.nodes[id.0];
        if node.status != NodeStatus::Leaf {
            return Err(Error::NotALeaf(id));
        }
        node.status = NodeStatus::Frozen;
        let depth = node.depth;
        self.leaves[depth].retain(|&l| l != id);
        Ok(())
    }

    /// Depth of the deepest expanded node whose cell contains `x`, or `-1`
    /// before the root has been expanded.
    pub fn deepest_expanded_containing(&self, x: &[f64]) -> Result<i64> {
        let root = &self.nodes[0];
        Error::check_dim(root.cell.dim(), x.len())?;
        if !root.cell.contains(x) {
            return Err(Error::OutsideBox { point: x.to_vec() });
        }
        Ok(self
            .nodes
            .iter()
            .filter(|n| n.status == NodeStatus::Expanded && n.cell.contains(x))
            .map(|n| n.depth as i64)
            .max()
            .unwrap_or(-1))
    }
}
