//! CSV, markdown and JSON renderings of reproduction results.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::repro::{ReproResult, ReproRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "md" => Ok(Format::Markdown),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("unknown format `{s}` (csv, md or json)"))),
        }
    }
}

pub const CSV_HEADER: [&str; 15] = [
    "table",
    "cell",
    "n",
    "L",
    "p",
    "r",
    "metric",
    "measured",
    "reference",
    "tolerance",
    "status",
    "runtime_s",
    "entry_calls",
    "max_expansion",
    "note",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn number(v: Option<f64>) -> String {
    match v {
        Some(x) if x.fract() == 0.0 && x.abs() < 1e15 => format!("{x:.0}"),
        Some(x) => format!("{x:.6e}"),
        None => String::new(),
    }
}

fn fields(r: &ReproRow) -> [String; 15] {
    [
        r.table.to_string(),
        r.cell.clone(),
        r.n.to_string(),
        opt(r.levels),
        opt(r.p),
        opt(r.r),
        r.metric.to_string(),
        number(r.measured),
        number(r.reference),
        r.tolerance.clone(),
        r.status.name().to_string(),
        format!("{:.3}", r.runtime_s),
        opt(r.entry_calls),
        r.max_expansion.map(|e| format!("{e:.4}")).unwrap_or_default(),
        r.note.clone(),
    ]
}

pub fn to_csv(results: &[ReproResult]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for res in results {
        for row in &res.rows {
            w.write_record(fields(row))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn to_markdown(results: &[ReproResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", CSV_HEADER.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(CSV_HEADER.len()));
    for res in results {
        for row in &res.rows {
            let cells: Vec<String> = fields(row).iter().map(|f| f.replace('|', "\\|")).collect();
            let _ = writeln!(out, "| {} |", cells.join(" | "));
        }
    }
    out
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

pub fn render(results: &[ReproResult], format: Format) -> CliResult<String> {
    match format {
        Format::Csv => to_csv(results),
        Format::Markdown => Ok(to_markdown(results)),
        Format::Json => Ok(to_json(results)),
    }
}
