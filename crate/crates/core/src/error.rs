use thiserror::Error;

use crate::partition::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("non-finite value {value} at coordinate {index}")]
    NonFiniteValue { index: usize, value: f64 },

    #[error("objective returned non-finite value {values:?} at decision point {point:?}")]
    NonFiniteObjective { point: Vec<f64>, values: Vec<f64> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("evaluation budget of {cap} exhausted")]
    BudgetExhausted { cap: usize },

    #[error("cell has zero width along dimension {dim}")]
    ZeroWidth { dim: usize },

    #[error("node {0:?} is not an expandable leaf")]
    NotALeaf(NodeId),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("hypervolume is only implemented for two objectives, got {0}")]
    UnsupportedDimension(usize),

    #[error("assumption violated: {0}")]
    AssumptionViolation(String),

    #[error("point {point:?} lies outside the decision box")]
    OutsideBox { point: Vec<f64> },
}

impl Error {
    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
