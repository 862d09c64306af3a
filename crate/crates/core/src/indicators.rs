//! Quality indicators for approximation sets.
//!
//! The additive epsilon indicator `I(A, B)` is the smallest `eps` such that
//! every `b` in `B` is weakly dominated by some `a - eps`. Its unary form
//! measures an archive against a reference front.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::{nd_filter_indices, ApproximationSet, ObjectiveVector};
use crate::problems::Problem;

/// Where a reference front came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Analytic { count: usize },
    Sampled { count: usize, seed: u64 },
    Supplied,
}

/// A stand-in for the true Pareto front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFront {
    set: ApproximationSet,
    provenance: Provenance,
    /// Decision points behind each member, when known.
    points: Option<Vec<Vec<f64>>>,
    /// Whether the known per-objective extrema were merged in.
    augmented: bool,
}

impl ReferenceFront {
    /// Filters `members` down to their non-dominated layer.
    pub fn from_vectors(members: &[ObjectiveVector], provenance: Provenance) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Empty("reference front"));
        }
        let kept = nd_filter_indices(members)?;
        Ok(Self {
            set: ApproximationSet::from_filtered(kept.into_iter().map(|i| members[i].clone()).collect()),
            provenance,
            points: None,
            augmented: false,
        })
    }

    pub fn set(&self) -> &ApproximationSet {
        &self.set
    }

    pub fn members(&self) -> &[ObjectiveVector] {
        self.set.members()
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.set.dim().unwrap_or(0)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn points(&self) -> Option<&[Vec<f64>]> {
        self.points.as_deref()
    }

    pub fn is_augmented(&self) -> bool {
        self.augmented
    }

    /// Merges `extrema` into the front. Decision points are dropped since
    /// the extrema come without them.
    pub fn augmented_with(&self, extrema: &[ObjectiveVector]) -> Result<Self> {
        let mut all = self.members().to_vec();
        all.extend_from_slice(extrema);
        let mut out = Self::from_vectors(&all, self.provenance.clone())?;
        out.augmented = true;
        Ok(out)
    }

    /// Front members minimizing each objective (first one on ties).
    pub fn extrema(&self) -> Vec<ObjectiveVector> {
        let members = self.members();
        (0..self.dim())
            .map(|j| {
                let mut best = &members[0];
                for y in &members[1..] {
                    if y[j] < best[j] {
                        best = y;
                    }
                }
                best.clone()
            })
            .collect()
    }
}

fn check_pair(a: &[ObjectiveVector], b: &[ObjectiveVector]) -> Result<usize> {
    let first = a.first().ok_or(Error::Empty("first set of epsilon indicator"))?;
    if b.is_empty() {
        return Err(Error::Empty("second set of epsilon indicator"));
    }
    let m = first.dim();
    for y in a.iter().chain(b) {
        Error::check_dim(m, y.dim())?;
    }
    Ok(m)
}

#[inline]
fn shift(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `max_b min_a max_j (a_j - b_j)`. Negative when `A` strictly dominates
/// every member of `B` with room to spare.
pub fn additive_epsilon(a: &[ObjectiveVector], b: &[ObjectiveVector]) -> Result<f64> {
    let m = check_pair(a, b)?;
    if m == 2 {
        let staircase = Staircase::new(a);
        return Ok(b
            .iter()
            .map(|y| staircase.min_shift(y.values()))
            .fold(f64::NEG_INFINITY, f64::max));
    }
    Ok(b.iter()
        .map(|y| {
            a.iter()
                .map(|x| shift(x.values(), y.values()))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Two-objective set sorted by the first objective, so the second one is
/// strictly decreasing. For a target `b`, `a_1 - b_1` then rises and
/// `a_2 - b_2` falls along the staircase, and the minimum of their maximum
/// sits where the two cross.
struct Staircase {
    first: Vec<f64>,
    second: Vec<f64>,
}

impl Staircase {
    fn new(a: &[ObjectiveVector]) -> Self {
        let mut kept: Vec<&ObjectiveVector> = nd_filter_indices(a)
            .expect("dimensions checked")
            .into_iter()
            .map(|i| &a[i])
            .collect();
        kept.sort_by(|x, y| x[0].total_cmp(&y[0]));
        Self {
            first: kept.iter().map(|y| y[0]).collect(),
            second: kept.iter().map(|y| y[1]).collect(),
        }
    }

    fn min_shift(&self, b: &[f64]) -> f64 {
        let n = self.first.len();
        let (mut lo, mut hi) = (0, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.first[mid] - b[0] < self.second[mid] - b[1] {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let i = lo;
        let at = |i: usize| (self.first[i] - b[0]).max(self.second[i] - b[1]);
        match i {
            0 => at(0),
            i if i == n => at(n - 1),
            i => at(i).min(at(i - 1)),
        }
    }
}

/// Additive epsilon of `a` against a reference front.
pub fn unary_epsilon(a: &[ObjectiveVector], front: &ReferenceFront) -> Result<f64> {
    additive_epsilon(a, front.members())
}

/// Epsilon of the extrema `{f(x*_j)}` against the front.
pub fn conflict_dimension(extrema: &[ObjectiveVector], front: &ReferenceFront) -> Result<f64> {
    additive_epsilon(extrema, front.members())
}

/// Area dominated by `a` inside the box bounded by `reference`. Members
/// that do not strictly dominate `reference` are discarded with a warning.
pub fn hypervolume_2d(a: &[ObjectiveVector], reference: &ObjectiveVector) -> Result<f64> {
    if reference.dim() != 2 {
        return Err(Error::UnsupportedDimension(reference.dim()));
    }
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(a.len());
    for y in a {
        if y.dim() != 2 {
            return Err(Error::UnsupportedDimension(y.dim()));
        }
        if y[0] < reference[0] && y[1] < reference[1] {
            pts.push([y[0], y[1]]);
        } else {
            log::warn!("discarding {:?}: it does not strictly dominate the reference point", y.values());
        }
    }
    pts.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for p in pts {
        if p[1] < ceiling {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    Ok(area)
}

/// Evaluates `count` seeded uniform samples of the decision box and keeps
/// the non-dominated ones. These evaluations are not budgeted.
pub fn sample_reference_front(problem: &Problem, count: usize, seed: u64) -> Result<ReferenceFront> {
    if count == 0 {
        return Err(Error::InvalidParameter("front sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounds = problem.bounds();
    let mut points = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let x: Vec<f64> = bounds
            .lower()
            .iter()
            .zip(bounds.upper())
            .map(|(&lo, &hi)| rng.gen_range(lo..=hi))
            .collect();
        values.push(problem.evaluate(&x)?);
        points.push(x);
    }
    let kept = nd_filter_indices(&values)?;
    Ok(ReferenceFront {
        set: ApproximationSet::from_filtered(kept.iter().map(|&i| values[i].clone()).collect()),
        provenance: Provenance::Sampled { count, seed },
        points: Some(kept.iter().map(|&i| points[i].clone()).collect()),
        augmented: false,
    })
}

/// Unary epsilon of a growing archive, updated one offered vector at a time.
///
/// For every front member the tracker keeps the smallest shift seen so far.
/// Vectors weakly dominated by the current archive cannot lower any of them
/// and are skipped.
#[derive(Debug, Clone)]
pub struct EpsilonTracker {
    front: Vec<ObjectiveVector>,
    best: Vec<f64>,
    archive: ApproximationSet,
    value: f64,
}

impl EpsilonTracker {
    pub fn new(front: &ReferenceFront) -> Self {
        Self {
            front: front.members().to_vec(),
            best: vec![f64::INFINITY; front.len()],
            archive: ApproximationSet::new(),
            value: f64::INFINITY,
        }
    }

    /// Offers `y`; returns whether the indicator changed.
    pub fn offer(&mut self, y: &ObjectiveVector) -> Result<bool> {
        if let Some(f) = self.front.first() {
            Error::check_dim(f.dim(), y.dim())?;
        }
        if !self.archive.insert(y.clone())? {
            return Ok(false);
        }
        let mut changed = false;
        for (b, best) in self.front.iter().zip(self.best.iter_mut()) {
            let s = shift(y.values(), b.values());
            if s < *best {
                *best = s;
                changed = true;
            }
        }
        if changed {
            self.value = self.best.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        }
        Ok(changed)
    }

    /// Current indicator value; `+inf` before the first offer.
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn archive(&self) -> &ApproximationSet {
        &self.archive
    }
}
