//! CSV traces.
//!
//! Snapshot files have the header `iteration,vertex,i,j,value`, one row per
//! (snapshot, vertex) ordered by iteration then vertex. Residual files have
//! `iteration,residual_l2`. Reals are written with 17 significant digits so
//! `f64` values survive a round trip bit-exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, VertexId};
use crate::solvers::{Snapshot, SolveTrace};

pub const SNAPSHOT_HEADER: &str = "iteration,vertex,i,j,value";
pub const RESIDUAL_HEADER: &str = "iteration,residual_l2";

/// `{:.16e}`: one leading digit plus 16 decimals.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_snapshots<W: Write>(trace: &SolveTrace<f64>, grid: &GridSpec, mut out: W) -> Result<W> {
    let io = |e| Error::io("<snapshot stream>", e);
    writeln!(out, "{SNAPSHOT_HEADER}").map_err(io)?;
    for snap in &trace.snapshots {
        for (v, &value) in snap.values.iter().enumerate() {
            let (i, j) = grid.coords(VertexId(v))?;
            writeln!(out, "{},{v},{i},{j},{}", snap.iteration, format_real(value)).map_err(io)?;
        }
    }
    Ok(out)
}

pub fn write_residuals<W: Write>(trace: &SolveTrace<f64>, mut out: W) -> Result<W> {
    let io = |e| Error::io("<residual stream>", e);
    writeln!(out, "{RESIDUAL_HEADER}").map_err(io)?;
    for &(k, r) in &trace.residual_norms {
        writeln!(out, "{k},{}", format_real(r)).map_err(io)?;
    }
    Ok(out)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn flush(path: &Path, mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `<stem>_snapshots.csv` and `<stem>_residuals.csv` into `dir`.
pub fn export_csv(trace: &SolveTrace<f64>, grid: &GridSpec, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    if trace.snapshots.is_empty() {
        return Err(Error::domain("cannot export an empty trace"));
    }
    let snapshots = dir.join(format!("{stem}_snapshots.csv"));
    let residuals = dir.join(format!("{stem}_residuals.csv"));
    let w = write_snapshots(trace, grid, create(&snapshots)?).map_err(|e| relabel(e, &snapshots))?;
    flush(&snapshots, w)?;
    let w = write_residuals(trace, create(&residuals)?).map_err(|e| relabel(e, &residuals))?;
    flush(&residuals, w)?;
    Ok((snapshots, residuals))
}

fn relabel(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    }
}

fn parse_field<V: std::str::FromStr>(path: &Path, line: usize, field: &str) -> Result<V> {
    field.trim().parse().map_err(|_| {
        Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("line {line}: bad field '{field}'")),
        )
    })
}

fn bad_data(path: &Path, msg: String) -> Error {
    Error::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, msg))
}

/// Reads a snapshot CSV back into per-iteration vectors.
pub fn read_snapshots(path: &Path) -> Result<Vec<Snapshot<f64>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines.next().transpose().map_err(|e| Error::io(path, e))?;
    if header.as_deref() != Some(SNAPSHOT_HEADER) {
        return Err(bad_data(path, format!("unexpected header {header:?}")));
    }
    let mut out: Vec<Snapshot<f64>> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = idx + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(bad_data(path, format!("line {lineno}: expected 5 fields")));
        }
        let iteration: usize = parse_field(path, lineno, fields[0])?;
        let vertex: usize = parse_field(path, lineno, fields[1])?;
        let value: f64 = parse_field(path, lineno, fields[4])?;
        if out.last().is_none_or(|s| s.iteration != iteration) {
            out.push(Snapshot { iteration, values: Vec::new() });
        }
        let snap = out.last_mut().expect("just pushed");
        if vertex != snap.values.len() {
            return Err(bad_data(path, format!("line {lineno}: vertex {vertex} out of order")));
        }
        snap.values.push(value);
    }
    Ok(out)
}

/// Reads a residual CSV back into `(iteration, residual)` pairs.
pub fn read_residuals(path: &Path) -> Result<Vec<(usize, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(RESIDUAL_HEADER) {
        return Err(bad_data(path, "unexpected residual header".into()));
    }
    lines
        .enumerate()
        .map(|(idx, line)| {
            let (k, r) = line
                .split_once(',')
                .ok_or_else(|| bad_data(path, format!("line {}: expected 2 fields", idx + 2)))?;
            Ok((parse_field(path, idx + 2, k)?, parse_field(path, idx + 2, r)?))
        })
        .collect()
}
