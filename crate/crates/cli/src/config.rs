use serde::{Deserialize, Serialize};

use mosoo_core::optimizer::{HMaxPolicy, OptimizerConfig};
use mosoo_core::problems::{self, HolderParameters};
use mosoo_core::theory::HolderForm;
use mosoo_core::{Problem, SplitPolicy};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Mosoo,
    Soo,
}

/// Settings of the optional bound curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsConfig {
    pub form: HolderForm,
    /// Packing constant shared by both objectives.
    pub c: f64,
    /// Lower Hoelder exponents; `None` means equal to the upper ones.
    pub beta: Option<[f64; 2]>,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            form: HolderForm::CellDiameter,
            c: 2.0,
            beta: None,
        }
    }
}

/// Everything needed to reproduce a run. The output directory is not part
/// of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: String,
    pub algorithm: Algorithm,
    pub k: usize,
    pub budget: usize,
    pub hmax: HMaxPolicy,
    pub split: SplitPolicy,
    pub seed: u64,
    pub front_samples: usize,
    pub front_seed: u64,
    pub bounds: Option<BoundsConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let opt = OptimizerConfig::default();
        Self {
            problem: "worked_example".into(),
            algorithm: Algorithm::Mosoo,
            k: opt.k,
            budget: opt.budget,
            hmax: opt.hmax,
            split: opt.split,
            seed: opt.seed,
            front_samples: 100_000,
            front_seed: opt.seed,
            bounds: None,
        }
    }
}

impl RunConfig {
    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            k: self.k,
            budget: self.budget,
            hmax: self.hmax,
            split: self.split,
            seed: self.seed,
        }
    }

    /// Checks the configuration and resolves the problem it names.
    pub fn resolve(&self) -> CliResult<Problem> {
        let problem = problems::resolve(&self.problem)?;
        if self.budget == 0 {
            return Err(CliError::Config("budget must be at least 1".into()));
        }
        if self.k < 2 {
            return Err(CliError::Config(format!("K must be at least 2, got {}", self.k)));
        }
        if let HMaxPolicy::Power { p } = self.hmax {
            HMaxPolicy::power(p)?;
        }
        if self.front_samples == 0 {
            return Err(CliError::Config("front sample count must be at least 1".into()));
        }
        if self.algorithm == Algorithm::Soo && problem.m() != 1 {
            return Err(CliError::Config(format!(
                "soo needs a single-objective problem, `{}` has {} objectives",
                self.problem,
                problem.m()
            )));
        }
        if let Some(bounds) = &self.bounds {
            if self.algorithm != Algorithm::Mosoo {
                return Err(CliError::Config("bound curves are only available for mosoo".into()));
            }
            if HolderParameters::from_id(&self.problem).is_none() {
                return Err(CliError::Config(format!(
                    "bound curves need a holder problem, got `{}`",
                    self.problem
                )));
            }
            if !(bounds.c > 0.0 && bounds.c.is_finite()) {
                return Err(CliError::Config(format!("packing constant must be positive, got {}", bounds.c)));
            }
        }
        Ok(problem)
    }
}
