//! Finite-time loss and indicator bounds, evaluated numerically.
//!
//! A [`BoundModel`] holds, per objective, a cell-size sequence `delta_j(h)`,
//! a packing constant `C_j` and a near-optimality dimension `d_j`, plus the
//! conflict dimension `psi` of the problem. From those, `h(t)` is the
//! smallest depth `h` with
//!
//! ```text
//! M(t) * sum_{l=0..=h} max_j C_j * delta_j(l)^(-d_j) >= t
//! ```
//!
//! where `M(t)` is the per-iteration depth multiplier.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{HMaxPolicy, RunTrace};

/// Decreasing sequence bounding the cell diameters at depth `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaSequence {
    /// `c * gamma^h`.
    Geometric { c: f64, gamma: f64 },
    /// `2^-alpha * K^(-3 alpha floor(h/n))`.
    HolderVerbatim { alpha: f64, k: usize, n: usize },
    /// `2^-alpha * K^(-alpha floor(h/n))`: the half-width of a cell after
    /// `floor(h/n)` splits of every coordinate, raised to `alpha`.
    HolderCellDiameter { alpha: f64, k: usize, n: usize },
}

impl DeltaSequence {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DeltaSequence::Geometric { c, gamma } => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::InvalidParameter(format!("delta scale must be positive, got {c}")));
                }
                if !(gamma > 0.0 && gamma < 1.0) {
                    return Err(Error::InvalidParameter(format!("delta ratio must lie in (0, 1), got {gamma}")));
                }
            }
            DeltaSequence::HolderVerbatim { alpha, k, n } | DeltaSequence::HolderCellDiameter { alpha, k, n } => {
                check_holder(alpha, k, n)?;
            }
        }
        Ok(())
    }

    pub fn value(&self, h: usize) -> f64 {
        match *self {
            DeltaSequence::Geometric { c, gamma } => c * gamma.powi(saturating_i32(h)),
            DeltaSequence::HolderVerbatim { alpha, k, n } => holder(alpha, k, n, h, 3.0),
            DeltaSequence::HolderCellDiameter { alpha, k, n } => holder(alpha, k, n, h, 1.0),
        }
    }
}

fn saturating_i32(h: usize) -> i32 {
    i32::try_from(h).unwrap_or(i32::MAX)
}

fn check_holder(alpha: f64, k: usize, n: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("partition factor must be >= 2, got {k}")));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("decision dimension must be >= 1".into()));
    }
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("Hoelder exponent must be >= 1, got {alpha}")));
    }
    Ok(())
}

fn holder(alpha: f64, k: usize, n: usize, h: usize, stretch: f64) -> f64 {
    let levels = (h / n) as f64;
    2f64.powf(-alpha) * (k as f64).powf(-stretch * alpha * levels)
}

/// `2^-alpha * K^(-3 alpha floor(h/n))`.
pub fn delta_from_holder(alpha: f64, k: usize, n: usize, h: usize) -> Result<f64> {
    check_holder(alpha, k, n)?;
    Ok(holder(alpha, k, n, h, 3.0))
}

/// `n (1/beta - 1/alpha)` for an objective behaving like `|x|^alpha` under
/// the semi-metric `|x|^beta`.
pub fn near_optimality_dimension(alpha: f64, beta: f64, n: usize) -> Result<f64> {
    if beta < 1.0 || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "exponents must be finite with beta >= 1, got alpha {alpha}, beta {beta}"
        )));
    }
    if beta > alpha {
        return Err(Error::AssumptionViolation(format!(
            "semi-metric exponent {beta} exceeds the function exponent {alpha}"
        )));
    }
    Ok(n as f64 * (1.0 / beta - 1.0 / alpha))
}

/// Smoothness description of one objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveModel {
    pub delta: DeltaSequence,
    /// Packing constant `C_j`.
    pub c: f64,
    /// Near-optimality dimension `d_j`.
    pub d: f64,
    /// Scaling factor `s_j`; carried along, not used in any formula.
    pub s: f64,
}

impl ObjectiveModel {
    pub fn new(delta: DeltaSequence, c: f64, d: f64) -> Self {
        Self { delta, c, d, s: 1.0 }
    }

    fn count(&self, h: usize) -> f64 {
        self.c * self.delta.value(h).powf(-self.d)
    }
}

/// Where the multiplier `M(t)` comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierSource {
    /// `max(h_max(t), 1)`.
    Nominal { hmax: HMaxPolicy },
    /// Depths visited by the sweep containing iteration `t`, as recorded.
    Recorded { depths: Vec<usize> },
}

impl MultiplierSource {
    pub fn recorded(trace: &RunTrace) -> Self {
        MultiplierSource::Recorded {
            depths: trace.depth_multipliers(),
        }
    }

    pub fn multiplier(&self, t: usize) -> Result<f64> {
        match self {
            MultiplierSource::Nominal { hmax } => match hmax {
                HMaxPolicy::Unbounded => Err(Error::InvalidParameter(
                    "an unbounded depth cap gives no finite multiplier".into(),
                )),
                _ => Ok(hmax.value(t).max(1) as f64),
            },
            MultiplierSource::Recorded { depths } => t
                .checked_sub(1)
                .and_then(|i| depths.get(i))
                .map(|&d| d.max(1) as f64)
                .ok_or_else(|| Error::InvalidParameter(format!("no recorded multiplier for iteration {t}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundModel {
    pub objectives: Vec<ObjectiveModel>,
    /// Conflict dimension.
    pub psi: f64,
}

impl BoundModel {
    pub fn new(objectives: Vec<ObjectiveModel>, psi: f64) -> Result<Self> {
        if objectives.is_empty() {
            return Err(Error::Empty("bound model objectives"));
        }
        for o in &objectives {
            o.delta.validate()?;
            if !(o.c > 0.0 && o.c.is_finite()) {
                return Err(Error::InvalidParameter(format!("packing constant must be positive, got {}", o.c)));
            }
            if !(o.d >= 0.0 && o.d.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "near-optimality dimension must be >= 0, got {}",
                    o.d
                )));
            }
        }
        if !(psi >= 0.0 && psi.is_finite()) {
            return Err(Error::InvalidParameter(format!("conflict dimension must be >= 0, got {psi}")));
        }
        Ok(Self { objectives, psi })
    }

    /// Two-objective Hoelder model with `d = n (1/beta - 1/alpha)` per
    /// objective and a shared packing constant.
    pub fn holder(
        form: HolderForm,
        alpha: [f64; 2],
        beta: [f64; 2],
        k: usize,
        n: usize,
        c: f64,
        psi: f64,
    ) -> Result<Self> {
        let objectives = (0..2)
            .map(|j| {
                let delta = match form {
                    HolderForm::Verbatim => DeltaSequence::HolderVerbatim { alpha: alpha[j], k, n },
                    HolderForm::CellDiameter => DeltaSequence::HolderCellDiameter { alpha: alpha[j], k, n },
                };
                Ok(ObjectiveModel::new(delta, c, near_optimality_dimension(alpha[j], beta[j], n)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(objectives, psi)
    }

    pub fn m(&self) -> usize {
        self.objectives.len()
    }

    /// Smallest `h` with `multiplier * sum_{l<=h} max_j C_j delta_j(l)^-d_j >= t`.
    pub fn h_of_t(&self, t: usize, multiplier: f64) -> usize {
        let target = t as f64;
        let mut sum = NeumaierSum::default();
        let mut h = 0;
        loop {
            let term = self
                .objectives
                .iter()
                .map(|o| o.count(h))
                .fold(0.0, f64::max);
            sum.add(term);
            if multiplier * sum.value() >= target {
                return h;
            }
            h += 1;
        }
    }

    fn effective_depth(&self, t: usize, multiplier: f64, hmax_value: usize) -> usize {
        self.h_of_t(t, multiplier).min(hmax_value.saturating_add(1))
    }

    /// `delta_j(min(h(t), h_max + 1))` for every objective.
    pub fn loss_bound(&self, t: usize, multiplier: f64, hmax_value: usize) -> Vec<f64> {
        let h = self.effective_depth(t, multiplier, hmax_value);
        self.objectives.iter().map(|o| o.delta.value(h)).collect()
    }

    /// `psi + max_{k,l} (1 + 2 C_k delta_k(h)^-d_k) * delta_l(h)` with
    /// `h = min(h(t), h_max + 1)`.
    pub fn indicator_bound(&self, t: usize, multiplier: f64, hmax_value: usize) -> f64 {
        let h = self.effective_depth(t, multiplier, hmax_value);
        let spread = self
            .objectives
            .iter()
            .map(|o| 1.0 + 2.0 * o.count(h))
            .fold(f64::NEG_INFINITY, f64::max);
        let widest = self
            .objectives
            .iter()
            .map(|o| o.delta.value(h))
            .fold(f64::NEG_INFINITY, f64::max);
        self.psi + spread * widest
    }
}

/// Which Hoelder delta form to use in [`BoundModel::holder`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HolderForm {
    Verbatim,
    CellDiameter,
}

#[derive(Debug, Default, Clone, Copy)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Bound values at one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub t: usize,
    pub loss: Vec<f64>,
    pub indicator: f64,
}

/// Bounds at every recorded iteration of `trace`, using the recorded depth
/// counts as multipliers and `hmax` for the depth limit.
pub fn bound_curve(model: &BoundModel, trace: &RunTrace, hmax: HMaxPolicy) -> Result<Vec<BoundPoint>> {
    let source = MultiplierSource::recorded(trace);
    trace
        .iterations
        .iter()
        .map(|r| {
            let mult = source.multiplier(r.t)?;
            let cap = hmax.value(r.t);
            Ok(BoundPoint {
                t: r.t,
                loss: model.loss_bound(r.t, mult, cap),
                indicator: model.indicator_bound(r.t, mult, cap),
            })
        })
        .collect()
}
