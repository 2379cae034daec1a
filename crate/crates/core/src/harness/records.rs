//! Per-generation run records and their CSV form.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::GenerationRecord;

pub const CSV_HEADER: &str = "arm,run,generation,best_total,mean_total,best_cartpole,best_classification";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub arm: String,
    pub run: usize,
    pub generation: usize,
    pub best_total: f64,
    pub mean_total: f64,
    pub best_cartpole: f64,
    pub best_classification: f64,
}

impl RunRecord {
    pub fn from_generation(arm: &str, run: usize, g: &GenerationRecord) -> Self {
        RunRecord {
            arm: arm.to_string(),
            run,
            generation: g.generation,
            best_total: g.stats.best.total,
            mean_total: g.stats.mean_total,
            best_cartpole: g.stats.best.cartpole,
            best_classification: g.stats.best.classification,
        }
    }
}

/// Write records without a header. Floats use the shortest representation
/// that reads back to the same value.
pub fn write_records<W: Write>(w: W, records: &[RunRecord]) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Header line followed by the records.
pub fn write_csv<W: Write>(mut w: W, records: &[RunRecord]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}").map_err(csv::Error::from)?;
    write_records(w, records)
}

/// Parse a records CSV. The header must match [`CSV_HEADER`] exactly.
///
/// A malformed final line is dropped when `tolerate_torn_tail` is set, which
/// is how an interrupted append looks on disk.
pub fn read_csv<R: Read>(r: R, path: &Path, tolerate_torn_tail: bool) -> Result<Vec<RunRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(r);
    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::Load { path: path.to_path_buf(), line: 1, msg: format!("unexpected header {header:?}") });
    }
    let mut rows = reader.deserialize::<RunRecord>().peekable();
    let mut records = Vec::new();
    while let Some(row) = rows.next() {
        match row {
            Ok(r) => records.push(r),
            Err(_) if tolerate_torn_tail && rows.peek().is_none() => break,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                return Err(Error::Load { path: path.to_path_buf(), line, msg: e.to_string() });
            }
        }
    }
    Ok(records)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(std::io::BufReader::new(file), path, false)
}
