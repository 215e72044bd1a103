//! CSV traces, one row per iterate.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use polyeig_core::TraceRow;

use crate::error::{Error, Result};

pub const HEADER: [&str; 10] = [
    "iter",
    "rho",
    "abs_err",
    "delta",
    "residual_norm",
    "normalized_residual",
    "subspace_dim",
    "orth_check",
    "linesearch_rho_check",
    "wall_time_s",
];

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

pub fn write_trace_to<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.iter.to_string(),
            real(r.rho),
            opt(r.abs_err),
            opt(r.delta),
            real(r.residual_norm),
            real(r.normalized_residual),
            r.subspace_dim.to_string(),
            opt(r.orth_check),
            opt(r.linesearch_rho_check),
            real(r.wall_time_s),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_trace(rows: &[TraceRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Usage("refusing to write an empty trace".into()));
    }
    let mut buf = Vec::new();
    write_trace_to(rows, &mut buf)?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Parses a trace; `origin` only labels errors.
pub fn read_trace_from<R: Read>(input: R, origin: &Path) -> Result<Vec<TraceRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(Error::parse(origin, 1, "unexpected trace header"));
    }
    let mut rows = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let bad = |col: &str| Error::parse(origin, line, format!("bad `{col}` field"));
        let field = |i: usize| rec.get(i).ok_or_else(|| bad(HEADER[i]));
        let real = |i: usize| field(i)?.parse::<f64>().map_err(|_| bad(HEADER[i]));
        let int = |i: usize| field(i)?.parse::<usize>().map_err(|_| bad(HEADER[i]));
        let opt = |i: usize| -> Result<Option<f64>> {
            match field(i)? {
                "" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad(HEADER[i])),
            }
        };
        rows.push(TraceRow {
            iter: int(0)?,
            rho: real(1)?,
            abs_err: opt(2)?,
            delta: opt(3)?,
            residual_norm: real(4)?,
            normalized_residual: real(5)?,
            subspace_dim: int(6)?,
            orth_check: opt(7)?,
            linesearch_rho_check: opt(8)?,
            wall_time_s: real(9)?,
        });
    }
    Ok(rows)
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_trace_from(file, path)
}
