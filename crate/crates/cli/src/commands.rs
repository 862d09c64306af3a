use std::fs;
use std::io::Write;
use std::path::Path;

use log::info;
use serde::{Deserialize, Serialize};

use mosoo_core::indicators::{
    conflict_dimension, hypervolume_2d, sample_reference_front, unary_epsilon, EpsilonTracker, Provenance,
    ReferenceFront,
};
use mosoo_core::optimizer::{loss_vector, mosoo_run, soo_run, RunTrace, Termination};
use mosoo_core::pareto::{empirical_ideal, nadir, nd_filter};
use mosoo_core::problems::{self, HolderParameters};
use mosoo_core::theory::{bound_curve, BoundModel};
use mosoo_core::{ObjectiveVector, Problem};

use crate::config::{Algorithm, RunConfig};
use crate::csvio::{columns, read_vectors, real, write_json, write_vectors, Table};
use crate::error::{CliError, CliResult};

pub const EVALUATIONS_FILE: &str = "evaluations.csv";
pub const TRACE_FILE: &str = "trace.csv";
pub const ARCHIVE_FILE: &str = "archive.csv";
pub const CURVE_FILE: &str = "curve.csv";
pub const BOUNDS_FILE: &str = "bounds.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Contents of `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: RunConfig,
    pub n: usize,
    pub m: usize,
    pub evaluations: usize,
    pub iterations: usize,
    pub termination: Option<Termination>,
    pub archive_size: usize,
    pub front_size: usize,
    pub hypervolume_reference: Option<Vec<f64>>,
    pub conflict_dimension: Option<f64>,
}

impl Manifest {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Malformed {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// Sampled reference front, merged with the known extrema when the problem
/// has them.
pub fn problem_front(problem: &Problem, samples: usize, seed: u64) -> CliResult<ReferenceFront> {
    let sampled = sample_reference_front(problem, samples, seed)?;
    match problem.extrema() {
        Some(extrema) => Ok(sampled.augmented_with(&extrema?)?),
        None => Ok(sampled),
    }
}

/// Hypervolume reference point: the front's nadir pushed out by a tenth of
/// the front's range, or by 1 along coordinates where the range is zero.
pub fn hypervolume_reference(front: &ReferenceFront) -> CliResult<ObjectiveVector> {
    let worst = nadir(front.members())?;
    let best = empirical_ideal(front.members())?;
    let values = worst
        .values()
        .iter()
        .zip(best.values())
        .map(|(&hi, &lo)| {
            let range = hi - lo;
            if range > 0.0 {
                hi + 0.1 * range
            } else {
                hi + 1.0
            }
        })
        .collect();
    Ok(ObjectiveVector::new(values)?)
}

fn count(v: usize) -> String {
    v.to_string()
}

fn write_evaluations(path: &Path, trace: &RunTrace, n: usize, m: usize) -> CliResult<()> {
    let mut header = vec!["index".to_string()];
    header.extend(columns("x", n));
    header.extend(columns("f", m));
    let mut table = Table::create(path, &header)?;
    for e in &trace.evaluations {
        let mut row = vec![count(e.index)];
        row.extend(e.point.iter().map(|&x| real(x)));
        row.extend(e.value.values().iter().map(|&v| real(v)));
        table.row(&row)?;
    }
    table.finish()
}

fn write_trace(path: &Path, trace: &RunTrace) -> CliResult<()> {
    let header: Vec<String> = ["t", "sweep", "depth", "leaves", "selected", "expanded", "frozen", "evaluations"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut table = Table::create(path, &header)?;
    for r in &trace.iterations {
        table.row(&[
            count(r.t),
            count(r.sweep),
            count(r.depth),
            count(r.leaves),
            count(r.selected.len()),
            count(r.expanded.len()),
            count(r.frozen.len()),
            count(r.evaluations),
        ])?;
    }
    table.finish()
}

struct CurveWriter<'a> {
    table: Table,
    tracker: EpsilonTracker,
    reference: Option<&'a ObjectiveVector>,
    ideal: Option<&'a ObjectiveVector>,
}

impl CurveWriter<'_> {
    fn row(&mut self, t: usize, evaluations: usize, fresh: &[ObjectiveVector], archive: &[ObjectiveVector]) -> CliResult<()> {
        for y in fresh {
            self.tracker.offer(y)?;
        }
        let mut row = vec![count(t), count(evaluations), real(self.tracker.value())];
        if let Some(reference) = self.reference {
            row.push(real(hypervolume_2d(archive, reference)?));
        }
        if let Some(ideal) = self.ideal {
            row.extend(loss_vector(archive, ideal)?.values().iter().map(|&v| real(v)));
        }
        self.table.row(&row)
    }
}

fn write_curve(
    path: &Path,
    trace: &RunTrace,
    front: &ReferenceFront,
    reference: Option<&ObjectiveVector>,
    ideal: Option<&ObjectiveVector>,
) -> CliResult<()> {
    let mut header = vec!["t".to_string(), "evaluations".into(), "epsilon".into()];
    if reference.is_some() {
        header.push("hypervolume".into());
    }
    if let Some(ideal) = ideal {
        header.extend(columns("loss", ideal.dim()));
    }
    let mut writer = CurveWriter {
        table: Table::create(path, &header)?,
        tracker: EpsilonTracker::new(front),
        reference,
        ideal,
    };
    if let Some(root) = trace.evaluations.first() {
        let root = [root.value.clone()];
        writer.row(0, 1, &root, &root)?;
    }
    let mut failure = None;
    let replayed = trace.replay(|record, archive, fresh| {
        let fresh: Vec<ObjectiveVector> = fresh.iter().map(|e| e.value.clone()).collect();
        if let Err(e) = writer.row(record.t, record.evaluations, &fresh, archive.members()) {
            failure = Some(e);
            return Err(mosoo_core::Error::InvalidParameter("curve row failed".into()));
        }
        Ok(())
    });
    if let Some(e) = failure {
        return Err(e);
    }
    replayed?;
    writer.table.finish()
}

fn write_bounds(
    path: &Path,
    config: &RunConfig,
    problem: &Problem,
    trace: &RunTrace,
    psi: f64,
) -> CliResult<()> {
    let settings = config.bounds.clone().unwrap_or_default();
    let params = HolderParameters::from_id(&config.problem)
        .ok_or_else(|| CliError::Config(format!("`{}` is not a holder problem", config.problem)))??;
    let model = BoundModel::holder(
        settings.form,
        params.alpha,
        settings.beta.unwrap_or(params.alpha),
        config.k,
        problem.n(),
        settings.c,
        psi,
    )?;
    let header: Vec<String> = columns("rbar", model.m());
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain(header)
        .chain(std::iter::once("ibar_eps".to_string()))
        .collect();
    let mut table = Table::create(path, &header)?;
    for point in bound_curve(&model, trace, config.hmax)? {
        let mut row = vec![count(point.t)];
        row.extend(point.loss.iter().map(|&v| real(v)));
        row.push(real(point.indicator));
        table.row(&row)?;
    }
    table.finish()
}

/// Runs the configured optimizer and writes every artifact into `out`.
pub fn run(config: &RunConfig, out: &Path) -> CliResult<Manifest> {
    let problem = config.resolve()?;
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    info!("running {:?} on `{}` with budget {}", config.algorithm, config.problem, config.budget);

    let (trace, archive) = match config.algorithm {
        Algorithm::Mosoo => {
            let outcome = mosoo_run(&problem, config.optimizer())?;
            (outcome.trace, outcome.archive.into_members())
        }
        Algorithm::Soo => {
            let outcome = soo_run(&problem, config.optimizer())?;
            let values: Vec<ObjectiveVector> = outcome.trace.evaluations.iter().map(|e| e.value.clone()).collect();
            let archive = nd_filter(&values)?.into_members();
            (outcome.trace, archive)
        }
    };

    let sampled = sample_reference_front(&problem, config.front_samples, config.front_seed)?;
    let extrema = problem.extrema().transpose()?;
    let front = match &extrema {
        Some(extrema) => sampled.augmented_with(extrema)?,
        None => sampled.clone(),
    };
    let reference = if problem.m() == 2 {
        Some(hypervolume_reference(&front)?)
    } else {
        None
    };
    let ideal = problem.metadata().map(|md| md.ideal.clone());

    write_evaluations(&out.join(EVALUATIONS_FILE), &trace, problem.n(), problem.m())?;
    write_trace(&out.join(TRACE_FILE), &trace)?;
    write_vectors(&out.join(ARCHIVE_FILE), &archive, problem.m())?;
    write_curve(&out.join(CURVE_FILE), &trace, &front, reference.as_ref(), ideal.as_ref())?;

    let psi = match (&config.bounds, &extrema) {
        (Some(_), Some(extrema)) => {
            let psi = conflict_dimension(extrema, &sampled)?.max(0.0);
            write_bounds(&out.join(BOUNDS_FILE), config, &problem, &trace, psi)?;
            Some(psi)
        }
        (Some(_), None) => {
            return Err(CliError::Config(format!("`{}` has no known optima", config.problem)));
        }
        _ => None,
    };

    let manifest = Manifest {
        config: config.clone(),
        n: problem.n(),
        m: problem.m(),
        evaluations: trace.evaluations.len(),
        iterations: trace.iterations.len(),
        termination: trace.termination,
        archive_size: archive.len(),
        front_size: front.len(),
        hypervolume_reference: reference.map(ObjectiveVector::into_inner),
        conflict_dimension: psi,
    };
    write_json(&out.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

/// Where `indicators` gets its reference front.
#[derive(Debug, Clone, PartialEq)]
pub enum FrontSource {
    File(std::path::PathBuf),
    Problem { id: String, samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorValues {
    pub epsilon: f64,
    pub hypervolume: Option<f64>,
}

/// Unary epsilon, and hypervolume for two objectives, of the set in `set`.
pub fn indicators(set: &Path, source: &FrontSource) -> CliResult<IndicatorValues> {
    let approximation = read_vectors(set)?;
    let front = match source {
        FrontSource::File(path) => ReferenceFront::from_vectors(&read_vectors(path)?, Provenance::Supplied)?,
        FrontSource::Problem { id, samples, seed } => {
            if *samples == 0 {
                return Err(CliError::Config("front sample count must be at least 1".into()));
            }
            problem_front(&problems::resolve(id)?, *samples, *seed)?
        }
    };
    let epsilon = unary_epsilon(&approximation, &front)?;
    let hypervolume = if front.dim() == 2 {
        Some(hypervolume_2d(&approximation, &hypervolume_reference(&front)?)?)
    } else {
        None
    };
    Ok(IndicatorValues { epsilon, hypervolume })
}

pub fn print_indicators<W: Write>(values: &IndicatorValues, mut w: W) -> std::io::Result<()> {
    writeln!(w, "indicator,value")?;
    writeln!(w, "epsilon,{}", real(values.epsilon))?;
    if let Some(hv) = values.hypervolume {
        writeln!(w, "hypervolume,{}", real(hv))?;
    }
    Ok(())
}

pub fn list_problems<W: Write>(mut w: W) -> std::io::Result<()> {
    writeln!(w, "id\tn\tm\tmetadata\tparameters")?;
    for entry in problems::registry() {
        let n = entry.n.map_or_else(|| "param".to_string(), |n| n.to_string());
        let metadata = if entry.has_metadata { "yes" } else { "no" };
        writeln!(w, "{}\t{}\t{}\t{}\t{}", entry.id, n, entry.m, metadata, entry.parameters)?;
    }
    Ok(())
}
