//! CSV and JSON sinks for sweep rows and extrapolation results.
//!
//! Floats are printed with Rust's `Display`, the shortest decimal string that
//! parses back to the same `f64`. Missing values are empty CSV fields and JSON
//! `null`s.

use std::fmt::Display;
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::KkentError;
use crate::runner::SweepRow;

pub const BASE_COLUMNS: [&str; 13] = [
    "n_sites",
    "j_spin",
    "i_pseudo",
    "k_coupling",
    "field_s_mag",
    "field_s_pattern",
    "field_t_mag",
    "field_t_pattern",
    "temperature",
    "log_negativity",
    "trace_norm",
    "ground_energy",
    "ground_degeneracy",
];
pub const OBSERVABLE_COLUMNS: [&str; 5] = ["ss_bond_mean", "tt_bond_mean", "sstt_bond_mean", "mag_s", "mag_t"];
pub const TRAILING_COLUMNS: [&str; 2] = ["wall_time_ms", "status"];

pub const EXTRAPOLATION_COLUMNS: [&str; 14] = [
    "j_spin",
    "i_pseudo",
    "k_coupling",
    "field_s_mag",
    "field_s_pattern",
    "field_t_mag",
    "field_t_pattern",
    "temperature",
    "n_points",
    "n_sites_min",
    "n_sites_max",
    "intercept",
    "slope",
    "residual",
];

/// Column names of a sweep CSV.
pub fn sweep_header(with_observables: bool) -> Vec<&'static str> {
    let mut cols = BASE_COLUMNS.to_vec();
    if with_observables {
        cols.extend(OBSERVABLE_COLUMNS);
    }
    cols.extend(TRAILING_COLUMNS);
    cols
}

fn opt<T: Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn sweep_record(row: &SweepRow, with_observables: bool) -> Vec<String> {
    let mut rec = vec![
        row.n_sites.to_string(),
        row.j_spin.to_string(),
        row.i_pseudo.to_string(),
        row.k_coupling.to_string(),
        row.field_s_mag.to_string(),
        row.field_s_pattern.clone(),
        row.field_t_mag.to_string(),
        row.field_t_pattern.clone(),
        row.temperature.to_string(),
        opt(row.log_negativity),
        opt(row.trace_norm),
        opt(row.ground_energy),
        opt(row.ground_degeneracy),
    ];
    if with_observables {
        rec.extend([
            opt(row.ss_bond_mean),
            opt(row.tt_bond_mean),
            opt(row.sstt_bond_mean),
            opt(row.mag_s),
            opt(row.mag_t),
        ]);
    }
    rec.push(row.wall_time_ms.to_string());
    rec.push(row.status.clone());
    rec
}

/// Renders a complete CSV document (header plus rows).
pub fn sweep_csv_string(rows: &[SweepRow], with_observables: bool) -> String {
    let mut out = render_csv(&sweep_header(with_observables), None::<Vec<String>>);
    for row in rows {
        out.push_str(&render_csv::<&str>(&[], Some(sweep_record(row, with_observables))));
    }
    out
}

fn render_csv<H: AsRef<[u8]>>(header: &[H], record: Option<Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    if !header.is_empty() {
        w.write_record(header).expect("writing to memory");
    }
    if let Some(rec) = record {
        w.write_record(&rec).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("CSV of UTF-8 fields")
}

/// Appends `records` to the CSV file at `path`.
///
/// A missing or empty file gets the header first. An existing file must
/// start with exactly the same header, otherwise nothing is written.
fn append_csv(path: &Path, header: &[&str], records: impl Iterator<Item = Vec<String>>) -> Result<(), KkentError> {
    let expected = render_csv(header, None);
    let existing_header = match fs::File::open(path) {
        Ok(file) => {
            let mut first = String::new();
            BufReader::new(file)
                .read_line(&mut first)
                .map_err(|e| KkentError::io(path, e))?;
            Some(first)
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(KkentError::io(path, e)),
    };
    let mut body = String::new();
    match existing_header.as_deref() {
        None | Some("") => body.push_str(&expected),
        Some(line) if line == expected => {}
        Some(line) => {
            return Err(KkentError::Format {
                path: path.to_path_buf(),
                message: format!(
                    "cannot append: existing header `{}` differs from `{}`",
                    line.trim_end(),
                    expected.trim_end()
                ),
            })
        }
    }
    for rec in records {
        body.push_str(&render_csv::<&str>(&[], Some(rec)));
    }
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| KkentError::io(path, e))?;
    file.write_all(body.as_bytes()).map_err(|e| KkentError::io(path, e))
}

pub fn append_sweep_csv(path: &Path, rows: &[SweepRow], with_observables: bool) -> Result<(), KkentError> {
    append_csv(
        path,
        &sweep_header(with_observables),
        rows.iter().map(|r| sweep_record(r, with_observables)),
    )
}

/// Reads a sweep CSV written by [`append_sweep_csv`], with or without the
/// observable columns.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>, KkentError> {
    let format_err = |message: String| KkentError::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => KkentError::io(path, io),
        other => format_err(format!("{other:?}")),
    })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| format_err(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != sweep_header(false) && header != sweep_header(true) {
        return Err(format_err(format!("unexpected header `{}`", header.join(","))));
    }
    reader
        .deserialize::<SweepRow>()
        .map(|r| r.map_err(|e| format_err(e.to_string())))
        .collect()
}

/// JSON document: run metadata plus the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonDocument<R> {
    pub metadata: Metadata,
    pub rows: Vec<R>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    /// The run configuration as interpreted by the tool.
    pub spec: serde_json::Value,
    pub total_wall_time_ms: f64,
}

impl Metadata {
    pub fn new(spec: serde_json::Value, total_wall_time_ms: f64) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            spec,
            total_wall_time_ms,
        }
    }
}

/// Writes (replacing) a JSON document.
pub fn write_json<R: Serialize>(path: &Path, doc: &JsonDocument<R>) -> Result<(), KkentError> {
    let mut text = serde_json::to_string_pretty(doc).expect("rows serialize to JSON");
    text.push('\n');
    fs::write(path, text).map_err(|e| KkentError::io(path, e))
}

pub fn read_json<R: for<'de> Deserialize<'de>>(path: &Path) -> Result<JsonDocument<R>, KkentError> {
    let text = fs::read_to_string(path).map_err(|e| KkentError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| KkentError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// One `1/N → 0` fit of the log-negativity at fixed couplings, fields and temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationRow {
    pub j_spin: f64,
    pub i_pseudo: f64,
    pub k_coupling: f64,
    pub field_s_mag: f64,
    pub field_s_pattern: String,
    pub field_t_mag: f64,
    pub field_t_pattern: String,
    pub temperature: f64,
    pub n_points: usize,
    pub n_sites_min: usize,
    pub n_sites_max: usize,
    pub intercept: f64,
    pub slope: f64,
    pub residual: f64,
}

fn extrapolation_record(row: &ExtrapolationRow) -> Vec<String> {
    vec![
        row.j_spin.to_string(),
        row.i_pseudo.to_string(),
        row.k_coupling.to_string(),
        row.field_s_mag.to_string(),
        row.field_s_pattern.clone(),
        row.field_t_mag.to_string(),
        row.field_t_pattern.clone(),
        row.temperature.to_string(),
        row.n_points.to_string(),
        row.n_sites_min.to_string(),
        row.n_sites_max.to_string(),
        row.intercept.to_string(),
        row.slope.to_string(),
        row.residual.to_string(),
    ]
}

pub fn extrapolation_csv_string(rows: &[ExtrapolationRow]) -> String {
    let mut out = render_csv(&EXTRAPOLATION_COLUMNS, None);
    for row in rows {
        out.push_str(&render_csv::<&str>(&[], Some(extrapolation_record(row))));
    }
    out
}

pub fn append_extrapolation_csv(path: &Path, rows: &[ExtrapolationRow]) -> Result<(), KkentError> {
    append_csv(path, &EXTRAPOLATION_COLUMNS, rows.iter().map(extrapolation_record))
}
