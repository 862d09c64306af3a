//! Benchmark problems, ground-truth metadata and budgeted evaluation.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::ObjectiveVector;
use crate::partition::HyperBox;

pub type ObjectiveFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Maps a curve parameter `s` in `[0, 1]` onto the analytic Pareto front.
pub type FrontCurve = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Known optima of a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemMetadata {
    /// `optimizers[j]` minimizes objective `j`.
    pub optimizers: Vec<Vec<f64>>,
    pub ideal: ObjectiveVector,
}

/// A box-constrained vector objective to be minimized.
#[derive(Clone)]
pub struct Problem {
    id: String,
    bounds: HyperBox,
    m: usize,
    objective: ObjectiveFn,
    metadata: Option<ProblemMetadata>,
    front: Option<FrontCurve>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("id", &self.id)
            .field("n", &self.n())
            .field("m", &self.m)
            .field("metadata", &self.metadata)
            .finish_non_exhaustive()
    }
}

impl Problem {
    pub fn new(
        id: impl Into<String>,
        bounds: HyperBox,
        m: usize,
        objective: ObjectiveFn,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("objective count must be at least 1".into()));
        }
        if !bounds.is_nondegenerate() {
            return Err(Error::InvalidParameter("decision box must have positive width".into()));
        }
        Ok(Self {
            id: id.into(),
            bounds,
            m,
            objective,
            metadata: None,
            front: None,
        })
    }

    pub fn with_metadata(mut self, metadata: ProblemMetadata) -> Result<Self> {
        Error::check_dim(self.m, metadata.optimizers.len())?;
        Error::check_dim(self.m, metadata.ideal.dim())?;
        for x in &metadata.optimizers {
            Error::check_dim(self.n(), x.len())?;
            if !self.bounds.contains(x) {
                return Err(Error::OutsideBox { point: x.clone() });
            }
        }
        self.metadata = Some(metadata);
        Ok(self)
    }

    pub fn with_front_curve(mut self, front: FrontCurve) -> Self {
        self.front = Some(front);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn n(&self) -> usize {
        self.bounds.dim()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bounds(&self) -> &HyperBox {
        &self.bounds
    }

    pub fn metadata(&self) -> Option<&ProblemMetadata> {
        self.metadata.as_ref()
    }

    /// Evaluates outside any budget. Fails on non-finite output.
    pub fn evaluate(&self, x: &[f64]) -> Result<ObjectiveVector> {
        Error::check_dim(self.n(), x.len())?;
        let values = (self.objective)(x);
        Error::check_dim(self.m, values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteObjective {
                point: x.to_vec(),
                values,
            });
        }
        ObjectiveVector::new(values)
    }

    /// `f(x*_j)` for every objective, when the optima are known.
    pub fn extrema(&self) -> Option<Result<Vec<ObjectiveVector>>> {
        self.metadata.as_ref().map(|md| {
            md.optimizers
                .iter()
                .map(|x| self.evaluate(x))
                .collect()
        })
    }

    /// `count` points spread evenly along the analytic Pareto front.
    pub fn analytic_front(&self, count: usize) -> Option<Vec<ObjectiveVector>> {
        let curve = self.front.as_ref()?;
        let denom = count.saturating_sub(1).max(1) as f64;
        (0..count)
            .map(|i| ObjectiveVector::new(curve(i as f64 / denom)).ok())
            .collect()
    }
}

/// One entry of an evaluation log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub index: usize,
    pub point: Vec<f64>,
    pub value: ObjectiveVector,
}

/// Wraps a problem with a hard evaluation cap and a log of every call.
#[derive(Debug)]
pub struct BudgetedEvaluator<'p> {
    problem: &'p Problem,
    cap: usize,
    calls: usize,
    log: Vec<Evaluation>,
}

impl<'p> BudgetedEvaluator<'p> {
    pub fn new(problem: &'p Problem, cap: usize) -> Self {
        Self {
            problem,
            cap,
            calls: 0,
            log: Vec::new(),
        }
    }

    pub fn problem(&self) -> &'p Problem {
        self.problem
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn count(&self) -> usize {
        self.calls
    }

    pub fn remaining(&self) -> usize {
        self.cap - self.calls
    }

    pub fn log(&self) -> &[Evaluation] {
        &self.log
    }

    pub fn into_log(self) -> Vec<Evaluation> {
        self.log
    }

    pub fn evaluate(&mut self, x: &[f64]) -> Result<ObjectiveVector> {
        if self.calls >= self.cap {
            return Err(Error::BudgetExhausted { cap: self.cap });
        }
        self.calls += 1;
        let value = self.problem.evaluate(x)?;
        self.log.push(Evaluation {
            index: self.calls - 1,
            point: x.to_vec(),
            value: value.clone(),
        });
        Ok(value)
    }
}

fn unit_box(n: usize) -> HyperBox {
    HyperBox::new(vec![0.0; n], vec![1.0; n]).expect("unit box is valid")
}

fn ov(values: Vec<f64>) -> ObjectiveVector {
    ObjectiveVector::new(values).expect("finite metadata")
}

/// Two shifted paraboloids on `[-1, 1]^2`:
/// `f1 = (x1 - 0.25)^2 + (x2 - 0.66)^2`, `f2 = (x1 + 0.25)^2 + (x2 - 0.66)^2`.
pub fn worked_example() -> Problem {
    let bounds = HyperBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).expect("valid box");
    let objective: ObjectiveFn = Arc::new(|x: &[f64]| {
        let f1 = (x[0] - 0.25).powi(2) + (x[1] - 0.66).powi(2);
        let f2 = (x[0] + 0.25).powi(2) + (x[1] - 0.66).powi(2);
        vec![f1, f2]
    });
    Problem::new("worked_example", bounds, 2, objective)
        .expect("valid problem")
        .with_metadata(ProblemMetadata {
            optimizers: vec![vec![0.25, 0.66], vec![-0.25, 0.66]],
            ideal: ov(vec![0.0, 0.0]),
        })
        .expect("optima inside box")
        .with_front_curve(Arc::new(|s| vec![(0.5 * s).powi(2), (0.5 * (1.0 - s)).powi(2)]))
}

fn linf(x: &[f64], a: &[f64]) -> f64 {
    x.iter().zip(a).map(|(xi, ai)| (xi - ai).abs()).fold(0.0, f64::max)
}

/// `f_j(x) = ||x - a_j||_inf ^ alpha_j` on `[0, 1]^n`.
pub fn holder_family(n: usize, alpha: [f64; 2], a1: Vec<f64>, a2: Vec<f64>) -> Result<Problem> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    for &al in &alpha {
        if !(al >= 1.0 && al.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be >= 1, got {al}")));
        }
    }
    Error::check_dim(n, a1.len())?;
    Error::check_dim(n, a2.len())?;
    for a in a1.iter().chain(&a2) {
        if !(0.0..=1.0).contains(a) {
            return Err(Error::InvalidParameter(format!("optimum coordinate {a} outside [0, 1]")));
        }
    }
    let id = format!(
        "holder:n={n},alpha1={},alpha2={},a1={},a2={}",
        alpha[0],
        alpha[1],
        join(&a1),
        join(&a2)
    );
    let (c1, c2) = (a1.clone(), a2.clone());
    let objective: ObjectiveFn = Arc::new(move |x: &[f64]| {
        vec![linf(x, &c1).powf(alpha[0]), linf(x, &c2).powf(alpha[1])]
    });
    let spread = linf(&a1, &a2);
    let front: FrontCurve = Arc::new(move |s| {
        vec![(s * spread).powf(alpha[0]), ((1.0 - s) * spread).powf(alpha[1])]
    });
    Ok(Problem::new(id, unit_box(n), 2, objective)?
        .with_metadata(ProblemMetadata {
            optimizers: vec![a1, a2],
            ideal: ov(vec![0.0, 0.0]),
        })?
        .with_front_curve(front))
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join("/")
}

/// Classic bi-objective test problems: `schaffer` and `fonseca`.
pub fn classic_biobjective(name: &str) -> Result<Problem> {
    match name {
        "schaffer" => {
            let bounds = HyperBox::new(vec![-5.0], vec![5.0])?;
            let objective: ObjectiveFn = Arc::new(|x: &[f64]| vec![x[0] * x[0], (x[0] - 2.0).powi(2)]);
            Ok(Problem::new("schaffer", bounds, 2, objective)?
                .with_metadata(ProblemMetadata {
                    optimizers: vec![vec![0.0], vec![2.0]],
                    ideal: ov(vec![0.0, 0.0]),
                })?
                .with_front_curve(Arc::new(|s| {
                    let x = 2.0 * s;
                    vec![x * x, (x - 2.0).powi(2)]
                })))
        }
        "fonseca" => {
            let n = 2usize;
            let shift = 1.0 / (n as f64).sqrt();
            let bounds = HyperBox::new(vec![-4.0; n], vec![4.0; n])?;
            let objective: ObjectiveFn = Arc::new(move |x: &[f64]| {
                let s1: f64 = x.iter().map(|xi| (xi - shift).powi(2)).sum();
                let s2: f64 = x.iter().map(|xi| (xi + shift).powi(2)).sum();
                vec![1.0 - (-s1).exp(), 1.0 - (-s2).exp()]
            });
            Ok(Problem::new("fonseca", bounds, 2, objective)?
                .with_metadata(ProblemMetadata {
                    optimizers: vec![vec![shift; n], vec![-shift; n]],
                    ideal: ov(vec![0.0, 0.0]),
                })?
                .with_front_curve(Arc::new(move |s| {
                    let t = shift - 2.0 * shift * s;
                    let s1 = n as f64 * (t - shift).powi(2);
                    let s2 = n as f64 * (t + shift).powi(2);
                    vec![1.0 - (-s1).exp(), 1.0 - (-s2).exp()]
                })))
        }
        other => Err(Error::UnknownProblem(other.to_string())),
    }
}

/// Single-objective `(x - 0.25)^2` on `[0, 1]`.
pub fn quadratic() -> Problem {
    let objective: ObjectiveFn = Arc::new(|x: &[f64]| vec![(x[0] - 0.25).powi(2)]);
    Problem::new("quadratic", unit_box(1), 1, objective)
        .expect("valid problem")
        .with_metadata(ProblemMetadata {
            optimizers: vec![vec![0.25]],
            ideal: ov(vec![0.0]),
        })
        .expect("optimum inside box")
}

/// A registry listing entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegistryEntry {
    pub id: &'static str,
    /// `None` for parametric entries whose dimension is a parameter.
    pub n: Option<usize>,
    pub m: usize,
    pub has_metadata: bool,
    pub parameters: &'static str,
}

/// All registered problem ids, in a fixed order.
pub fn registry() -> Vec<RegistryEntry> {
    vec![
        RegistryEntry {
            id: "worked_example",
            n: Some(2),
            m: 2,
            has_metadata: true,
            parameters: "",
        },
        RegistryEntry {
            id: "holder",
            n: None,
            m: 2,
            has_metadata: true,
            parameters: "holder:n=<int>,alpha1=<>=1>,alpha2=<>=1>,a1=<[0,1]>,a2=<[0,1]> \
                         (a1/a2 are repeated on every coordinate, or given per coordinate as v1/v2/...)",
        },
        RegistryEntry {
            id: "schaffer",
            n: Some(1),
            m: 2,
            has_metadata: true,
            parameters: "",
        },
        RegistryEntry {
            id: "fonseca",
            n: Some(2),
            m: 2,
            has_metadata: true,
            parameters: "",
        },
        RegistryEntry {
            id: "quadratic",
            n: Some(1),
            m: 1,
            has_metadata: true,
            parameters: "",
        },
    ]
}

/// Resolves a registry id, including parametric `holder:...` ids.
pub fn resolve(id: &str) -> Result<Problem> {
    let (name, params) = match id.split_once(':') {
        Some((name, params)) => (name, Some(params)),
        None => (id, None),
    };
    match (name, params) {
        ("worked_example", None) => Ok(worked_example()),
        ("quadratic", None) => Ok(quadratic()),
        ("schaffer" | "fonseca", None) => classic_biobjective(name),
        ("holder", params) => {
            let hp = HolderParameters::parse(params.unwrap_or(""))?;
            holder_family(hp.n, hp.alpha, hp.a1, hp.a2)
        }
        _ => Err(Error::UnknownProblem(id.to_string())),
    }
}

/// Parameters of a `holder:...` registry id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderParameters {
    pub n: usize,
    pub alpha: [f64; 2],
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
}

impl HolderParameters {
    /// Parses the `k=v,...` part of a `holder:` id. Missing keys default to
    /// `n=1, alpha1=alpha2=1, a1=0.25, a2=0.75`; a single optimum coordinate
    /// is repeated on every axis.
    pub fn parse(params: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidParameter(format!("holder: {msg}"));
        let mut n = 1usize;
        let mut alpha = [1.0, 1.0];
        let mut a1 = vec![0.25];
        let mut a2 = vec![0.75];
        for kv in params.split(',').filter(|s| !s.is_empty()) {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{kv}`")))?;
            let num = |v: &str| -> Result<f64> {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("`{v}` is not a number")))
            };
            let list = |v: &str| -> Result<Vec<f64>> { v.split('/').map(num).collect() };
            match key.trim() {
                "n" => {
                    n = value
                        .trim()
                        .parse()
                        .map_err(|_| bad(format!("`{value}` is not an integer")))?
                }
                "alpha1" => alpha[0] = num(value)?,
                "alpha2" => alpha[1] = num(value)?,
                "a1" => a1 = list(value)?,
                "a2" => a2 = list(value)?,
                other => return Err(bad(format!("unknown parameter `{other}`"))),
            }
        }
        let widen = |a: Vec<f64>| if a.len() == 1 { vec![a[0]; n] } else { a };
        Ok(Self {
            n,
            alpha,
            a1: widen(a1),
            a2: widen(a2),
        })
    }

    /// Parameters of `id` when it names a Hoelder problem.
    pub fn from_id(id: &str) -> Option<Result<Self>> {
        match id.split_once(':') {
            Some(("holder", params)) => Some(Self::parse(params)),
            None if id == "holder" => Some(Self::parse("")),
            _ => None,
        }
    }
}
