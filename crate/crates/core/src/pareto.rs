//! Pareto dominance relations and non-dominated filtering.
//!
//! All comparisons are exact: no tolerance is applied anywhere, so the
//! dominance relation stays transitive and results are reproducible bit for
//! bit. Objectives are minimized.

use std::cmp::Ordering;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the objective space. Never empty, never holds NaN or infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("objective vector"));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index, value });
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dominates(&self, other: &Self) -> Result<bool> {
        dominates(self, other)
    }
}

impl TryFrom<Vec<f64>> for ObjectiveVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<ObjectiveVector> for Vec<f64> {
    fn from(v: ObjectiveVector) -> Self {
        v.0
    }
}

impl AsRef<[f64]> for ObjectiveVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for ObjectiveVector {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

/// Pareto dominance: no worse everywhere, strictly better somewhere.
pub fn dominates(y1: &ObjectiveVector, y2: &ObjectiveVector) -> Result<bool> {
    Error::check_dim(y1.dim(), y2.dim())?;
    Ok(dominates_raw(y1.values(), y2.values()))
}

/// Strict dominance: strictly better in every objective.
pub fn strictly_dominates(y1: &ObjectiveVector, y2: &ObjectiveVector) -> Result<bool> {
    Error::check_dim(y1.dim(), y2.dim())?;
    Ok(y1.values().iter().zip(y2.values()).all(|(a, b)| a < b))
}

/// Weak dominance: no worse in any objective.
pub fn weakly_dominates(y1: &ObjectiveVector, y2: &ObjectiveVector) -> Result<bool> {
    Error::check_dim(y1.dim(), y2.dim())?;
    Ok(weakly_dominates_raw(y1.values(), y2.values()))
}

pub(crate) fn dominates_raw(a: &[f64], b: &[f64]) -> bool {
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

pub(crate) fn weakly_dominates_raw(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// A duplicate-free set of mutually non-dominated objective vectors.
///
/// Members keep the order in which they were accepted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ApproximationSet {
    members: Vec<ObjectiveVector>,
}

impl ApproximationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Objective count, or `None` for the empty set.
    pub fn dim(&self) -> Option<usize> {
        self.members.first().map(ObjectiveVector::dim)
    }

    pub fn members(&self) -> &[ObjectiveVector] {
        &self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ObjectiveVector> {
        self.members.iter()
    }

    pub fn into_members(self) -> Vec<ObjectiveVector> {
        self.members
    }

    /// Offers `y` to the set. Returns `true` when `y` was accepted, in which
    /// case every member it dominates has been removed. A vector equal to an
    /// existing member is rejected, so the first occurrence wins.
    pub fn insert(&mut self, y: ObjectiveVector) -> Result<bool> {
        if let Some(m) = self.dim() {
            Error::check_dim(m, y.dim())?;
        }
        if self
            .members
            .iter()
            .any(|a| weakly_dominates_raw(a.values(), y.values()))
        {
            return Ok(false);
        }
        self.members
            .retain(|a| !dominates_raw(y.values(), a.values()));
        self.members.push(y);
        Ok(true)
    }

    /// Builds a set from vectors that are already known to be mutually
    /// non-dominated and duplicate-free.
    pub(crate) fn from_filtered(members: Vec<ObjectiveVector>) -> Self {
        Self { members }
    }
}

impl<'a> IntoIterator for &'a ApproximationSet {
    type Item = &'a ObjectiveVector;
    type IntoIter = std::slice::Iter<'a, ObjectiveVector>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

fn check_uniform<T: AsRef<[f64]>>(ys: &[T]) -> Result<usize> {
    let m = ys.first().map_or(0, |y| y.as_ref().len());
    for y in ys {
        Error::check_dim(m, y.as_ref().len())?;
    }
    Ok(m)
}

/// Indices of the non-dominated, first-occurrence members of `ys`, in
/// ascending order.
///
/// This is the selection step shared by [`nd_filter`] and the optimizers,
/// which need to know *which* inputs survived rather than just their values.
pub fn nd_filter_indices<T: AsRef<[f64]>>(ys: &[T]) -> Result<Vec<usize>> {
    let m = check_uniform(ys)?;
    if ys.is_empty() {
        return Ok(Vec::new());
    }
    if m == 2 {
        return Ok(nd_indices_biobjective(ys));
    }
    let mut kept: Vec<usize> = Vec::new();
    for (i, y) in ys.iter().enumerate() {
        let y = y.as_ref();
        if kept
            .iter()
            .any(|&k| weakly_dominates_raw(ys[k].as_ref(), y))
        {
            continue;
        }
        kept.retain(|&k| !dominates_raw(y, ys[k].as_ref()));
        kept.push(i);
    }
    Ok(kept)
}

// Lexicographic sort then a single sweep on the second objective. Equal
// vectors sort by input position, so the first occurrence survives.
fn nd_indices_biobjective<T: AsRef<[f64]>>(ys: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ys.len()).collect();
    order.sort_by(|&a, &b| {
        let (ya, yb) = (ys[a].as_ref(), ys[b].as_ref());
        total(ya[0], yb[0])
            .then(total(ya[1], yb[1]))
            .then(a.cmp(&b))
    });
    let mut best_second = f64::INFINITY;
    let mut kept = Vec::new();
    for i in order {
        let y = ys[i].as_ref();
        if y[1] < best_second {
            best_second = y[1];
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept
}

fn total(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// The non-dominated layer of `ys`, duplicates removed, in first-occurrence
/// order.
pub fn nd_filter(ys: &[ObjectiveVector]) -> Result<ApproximationSet> {
    let kept = nd_filter_indices(ys)?;
    Ok(ApproximationSet::from_filtered(
        kept.into_iter().map(|i| ys[i].clone()).collect(),
    ))
}

/// Union over objectives of every vector attaining that objective's minimum,
/// ties included, deduplicated, in first-occurrence order.
pub fn nd_min(ys: &[ObjectiveVector]) -> Result<Vec<ObjectiveVector>> {
    let m = check_uniform(ys)?;
    if ys.is_empty() {
        return Ok(Vec::new());
    }
    let ideal: Vec<f64> = (0..m)
        .map(|j| ys.iter().map(|y| y[j]).fold(f64::INFINITY, f64::min))
        .collect();
    let mut out: Vec<ObjectiveVector> = Vec::new();
    for y in ys {
        let attains = (0..m).any(|j| y[j] == ideal[j]);
        if attains && !out.contains(y) {
            out.push(y.clone());
        }
    }
    Ok(out)
}

fn coordinatewise(ys: &[ObjectiveVector], what: &'static str, pick: fn(f64, f64) -> f64) -> Result<ObjectiveVector> {
    let m = check_uniform(ys)?;
    let first = ys.first().ok_or(Error::Empty(what))?;
    let mut acc = first.values().to_vec();
    for y in &ys[1..] {
        for j in 0..m {
            acc[j] = pick(acc[j], y[j]);
        }
    }
    Ok(ObjectiveVector(acc))
}

/// Coordinate-wise minimum: the empirical ideal point of a set.
pub fn empirical_ideal(ys: &[ObjectiveVector]) -> Result<ObjectiveVector> {
    coordinatewise(ys, "set for ideal point", f64::min)
}

/// Coordinate-wise maximum: the nadir point of a set.
pub fn nadir(ys: &[ObjectiveVector]) -> Result<ObjectiveVector> {
    coordinatewise(ys, "set for nadir point", f64::max)
}
