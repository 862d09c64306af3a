//! CSV reading and writing. Reals are written in scientific notation with
//! 17 significant digits, which round-trips every `f64` exactly.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use mosoo_core::ObjectiveVector;

use crate::error::{CliError, CliResult};

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Buffered CSV writer that maps failures to I/O errors on `path`.
pub struct Table {
    path: std::path::PathBuf,
    writer: csv::Writer<File>,
}

impl Table {
    pub fn create(path: &Path, header: &[String]) -> CliResult<Self> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut table = Self {
            path: path.to_path_buf(),
            writer: csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file),
        };
        table.row(header)?;
        Ok(table)
    }

    pub fn row<S: AsRef<[u8]>>(&mut self, fields: &[S]) -> CliResult<()> {
        self.writer.write_record(fields).map_err(|e| self.fail(e))
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.writer
            .flush()
            .map_err(|e| CliError::io(&self.path, e))
    }

    fn fail(&self, e: csv::Error) -> CliError {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(&self.path, io),
            other => CliError::Malformed {
                path: self.path.clone(),
                message: format!("{other:?}"),
            },
        }
    }
}

pub fn columns(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|j| format!("{prefix}_{j}")).collect()
}

/// Writes a set of objective vectors with header `f_1,...,f_m`.
pub fn write_vectors(path: &Path, vectors: &[ObjectiveVector], m: usize) -> CliResult<()> {
    let mut table = Table::create(path, &columns("f", m))?;
    for y in vectors {
        let fields: Vec<String> = y.values().iter().map(|&v| real(v)).collect();
        table.row(&fields)?;
    }
    table.finish()
}

/// Reads objective vectors from a headed CSV file whose every column is a
/// real number.
pub fn read_vectors(path: &Path) -> CliResult<Vec<ObjectiveVector>> {
    let malformed = |message: String| CliError::Malformed {
        path: path.to_path_buf(),
        message,
    };
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            other => malformed(format!("{other:?}")),
        })?;
        let values = record
            .iter()
            .map(|field| {
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| malformed(format!("row {}: `{field}` is not a number", line + 1)))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        let y = ObjectiveVector::new(values).map_err(|e| malformed(format!("row {}: {e}", line + 1)))?;
        if let Some(first) = out.first() {
            let first: &ObjectiveVector = first;
            if first.dim() != y.dim() {
                return Err(malformed(format!(
                    "row {} has {} values, expected {}",
                    line + 1,
                    y.dim(),
                    first.dim()
                )));
            }
        }
        out.push(y);
    }
    if out.is_empty() {
        return Err(malformed("no data rows".into()));
    }
    Ok(out)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    let mut file = File::create(path).map_err(|e| CliError::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))
}
