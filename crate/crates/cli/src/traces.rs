//! CSV trace ingestion.
//!
//! Headers are matched exactly:
//!
//! | trace       | columns                                        |
//! |-------------|------------------------------------------------|
//! | penetration | `time_s,depth_cm,force_N`                      |
//! | shear       | `time_s,disp_cm,force_N`                       |
//! | mocap       | `time_s,x_cm,y_cm,z_cm,pitch_deg[,tail_z_cm]`  |
//!
//! Lines starting with `#` are ignored. Values are converted to SI on read.

use std::fs;
use std::path::Path;

use tailsim_core::units::CM;
use tailsim_core::{ForceSample, ForceTrace, MocapSample, MocapTrace, ModelError, TraceKind};

use crate::error::{CliError, CliResult};

pub const PENETRATION_HEADER: [&str; 3] = ["time_s", "depth_cm", "force_N"];
pub const SHEAR_HEADER: [&str; 3] = ["time_s", "disp_cm", "force_N"];
pub const MOCAP_HEADER: [&str; 5] = ["time_s", "x_cm", "y_cm", "z_cm", "pitch_deg"];
pub const MOCAP_TAIL_COLUMN: &str = "tail_z_cm";

struct Table {
    header: Vec<String>,
    /// `(line number, fields)`.
    rows: Vec<(u64, Vec<f64>)>,
}

fn read_table(path: &Path, expected: &[&str], optional: &[&str]) -> CliResult<Table> {
    let bytes = fs::read(path).map_err(|e| CliError::input_at(path, None, format!("cannot read: {e}")))?;
    parse_table(path, &bytes, expected, optional)
}

fn parse_table(path: &Path, bytes: &[u8], expected: &[&str], optional: &[&str]) -> CliResult<Table> {
    // Drop comment and blank lines ourselves so reported line numbers refer
    // to the original file.
    let text = std::str::from_utf8(bytes).map_err(|e| CliError::input_at(path, None, format!("not UTF-8: {e}")))?;
    let mut kept = String::with_capacity(text.len());
    let mut line_of = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        kept.push_str(line);
        kept.push('\n');
        line_of.push(i as u64 + 1);
    }
    let orig = |pos: Option<&csv::Position>| pos.and_then(|p| line_of.get(p.line() as usize - 1).copied());

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(kept.as_bytes());

    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::input_at(path, orig(e.position()), e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let header_line = line_of.first().copied();

    for (i, col) in expected.iter().enumerate() {
        match header.get(i) {
            Some(h) if h == col => {}
            Some(h) if header.iter().any(|x| x == col) => {
                return Err(CliError::input_at(
                    path,
                    header_line,
                    format!("column `{col}` must be column {} (found `{h}` there)", i + 1),
                ));
            }
            _ => {
                return Err(CliError::input_at(
                    path,
                    header_line,
                    format!("missing column `{col}` (expected header {})", expected.join(",")),
                ));
            }
        }
    }
    let extra = &header[expected.len()..];
    if extra.len() > optional.len() || extra.iter().zip(optional).any(|(a, b)| a != b) {
        return Err(CliError::input_at(
            path,
            header_line,
            format!("unexpected columns {:?}", extra),
        ));
    }

    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::input_at(path, orig(e.position()), e.to_string()))?;
        let line = orig(rec.position()).unwrap_or(0);
        let vals = rec
            .iter()
            .zip(&header)
            .map(|(field, col)| {
                field.trim().parse::<f64>().map_err(|_| {
                    CliError::input_at(
                        path,
                        Some(line),
                        format!("column `{col}`: cannot parse `{field}` as a number"),
                    )
                })
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push((line, vals));
    }
    Ok(Table { header, rows })
}

fn domain_error(path: &Path, e: tailsim_core::ValidationError) -> CliError {
    CliError::input_at(path, None, ModelError::from(e).to_string())
}

fn force_trace(path: &Path, table: Table, kind: TraceKind) -> CliResult<ForceTrace> {
    let samples = table
        .rows
        .iter()
        .map(|(_, v)| ForceSample {
            time: v[0],
            position: v[1] * CM,
            force: v[2],
        })
        .collect();
    ForceTrace::new(kind, samples).map_err(|e| domain_error(path, e))
}

pub fn read_penetration(path: &Path) -> CliResult<ForceTrace> {
    let table = read_table(path, &PENETRATION_HEADER, &[])?;
    force_trace(path, table, TraceKind::Penetration)
}

pub fn read_shear(path: &Path) -> CliResult<ForceTrace> {
    let table = read_table(path, &SHEAR_HEADER, &[])?;
    force_trace(path, table, TraceKind::Shear)
}

fn mocap_from_table(path: &Path, table: Table) -> CliResult<MocapTrace> {
    let has_tail = table.header.len() > MOCAP_HEADER.len();
    let samples = table
        .rows
        .iter()
        .map(|(_, v)| MocapSample {
            time: v[0],
            x: v[1] * CM,
            y: v[2] * CM,
            z: v[3] * CM,
            pitch: v[4],
            tail_z: has_tail.then(|| v[5] * CM),
        })
        .collect();
    MocapTrace::new(samples).map_err(|e| domain_error(path, e))
}

pub fn read_mocap(path: &Path) -> CliResult<MocapTrace> {
    let table = read_table(path, &MOCAP_HEADER, &[MOCAP_TAIL_COLUMN])?;
    mocap_from_table(path, table)
}
