//! Trial records and their CSV encoding.
//!
//! Every row starts with the schema version so that files stay
//! self-describing when concatenated. `inf` encodes both an exact SER and
//! noiseless magnitudes.

use std::io::{Read, Write};

use thiserror::Error;

use super::config::Method;
use crate::metrics::Ser;

pub const SCHEMA_VERSION: &str = "1";
pub const HEADER: [&str; 11] = [
    "schema=1",
    "method",
    "L",
    "d",
    "contiguous",
    "seed",
    "snr_db",
    "ser_db",
    "iterations",
    "final_loss",
    "wall_ms",
];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("csv i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub method: Method,
    pub len: usize,
    pub d: usize,
    pub contiguous: bool,
    pub seed: u64,
    pub snr_db: f64,
    pub ser: Ser,
    pub iterations: usize,
    pub final_loss: f64,
    pub wall_ms: f64,
}

impl TrialRecord {
    pub fn fields(&self) -> [String; 11] {
        [
            SCHEMA_VERSION.to_string(),
            self.method.to_string(),
            self.len.to_string(),
            self.d.to_string(),
            self.contiguous.to_string(),
            self.seed.to_string(),
            self.snr_db.to_string(),
            self.ser.to_string(),
            self.iterations.to_string(),
            self.final_loss.to_string(),
            format!("{:.3}", self.wall_ms),
        ]
    }

    pub fn fraction(&self) -> f64 {
        self.d as f64 / self.len as f64
    }
}

/// Streams records to a CSV sink, flushing after each row.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(sink: W) -> Result<Self, CsvError> {
        let mut inner = csv::Writer::from_writer(sink);
        inner.write_record(HEADER).map_err(csv_io)?;
        inner.flush()?;
        Ok(RecordWriter { inner })
    }

    pub fn write(&mut self, record: &TrialRecord) -> Result<(), CsvError> {
        self.inner.write_record(record.fields()).map_err(csv_io)?;
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W, CsvError> {
        self.inner
            .into_inner()
            .map_err(|e| CsvError::Io(std::io::Error::other(e.to_string())))
    }
}

fn csv_io(e: csv::Error) -> CsvError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CsvError::Io(io),
        other => CsvError::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn parse_float(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        _ => s.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

fn parse_row(row: &csv::StringRecord) -> Result<TrialRecord, String> {
    if row.len() != HEADER.len() {
        return Err(format!(
            "expected {} fields, found {}",
            HEADER.len(),
            row.len()
        ));
    }
    let field = |i: usize| &row[i];
    let bad = |i: usize| format!("bad value `{}` in column `{}`", &row[i], HEADER[i]);
    if field(0) != SCHEMA_VERSION {
        return Err(format!("unsupported schema version `{}`", field(0)));
    }
    let method = field(1).parse::<Method>().map_err(|_| bad(1))?;
    let len: usize = field(2).parse().map_err(|_| bad(2))?;
    let d: usize = field(3).parse().map_err(|_| bad(3))?;
    if len == 0 || d > len {
        return Err(format!("gap of {d} samples in length {len}"));
    }
    let contiguous: bool = field(4).parse().map_err(|_| bad(4))?;
    let seed: u64 = field(5).parse().map_err(|_| bad(5))?;
    let snr_db = parse_float(field(6)).ok_or_else(|| bad(6))?;
    let ser = match field(7) {
        "inf" => Ser::Exact,
        s => Ser::Db(parse_float(s).ok_or_else(|| bad(7))?),
    };
    let iterations: usize = field(8).parse().map_err(|_| bad(8))?;
    let final_loss = parse_float(field(9))
        .filter(|v| *v >= 0.0 && v.is_finite())
        .ok_or_else(|| bad(9))?;
    let wall_ms = parse_float(field(10))
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(10))?;
    Ok(TrialRecord {
        method,
        len,
        d,
        contiguous,
        seed,
        snr_db,
        ser,
        iterations,
        final_loss,
        wall_ms,
    })
}

/// Parses a results file produced by [`RecordWriter`]. Errors carry the
/// 1-based line number of the offending row.
pub fn read_records<R: Read>(source: R) -> Result<Vec<TrialRecord>, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut rows = reader.records();
    let line_of = |e: &csv::Error| e.position().map(|p| p.line()).unwrap_or(0);
    match rows.next() {
        Some(Ok(h)) if h.iter().eq(HEADER.iter().copied()) => {}
        Some(Ok(_)) => {
            return Err(CsvError::Parse {
                line: 1,
                message: "missing or unsupported header (expected schema=1)".into(),
            })
        }
        Some(Err(e)) => {
            return Err(CsvError::Parse {
                line: line_of(&e),
                message: e.to_string(),
            })
        }
        None => {
            return Err(CsvError::Parse {
                line: 1,
                message: "empty file".into(),
            })
        }
    }
    let mut out = Vec::new();
    for row in rows {
        let row = row.map_err(|e| CsvError::Parse {
            line: line_of(&e),
            message: e.to_string(),
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        out.push(parse_row(&row).map_err(|message| CsvError::Parse { line, message })?);
    }
    Ok(out)
}
