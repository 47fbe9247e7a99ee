//! Command implementations behind the `mqc-lab` binary.
//!
//! Every command builds a serializable report and a [`Status`]; the binary only parses
//! arguments, writes the report and maps the status to an exit code. Reports carry no
//! timestamps or timings, so equal flags and seeds give byte-identical output.

use std::fmt;
use std::path::Path;

use anyhow::Context;
use clap::ValueEnum;
use serde::Serialize;

pub mod analyze;
pub mod bellpair;
pub mod encode;
pub mod family;
pub mod measures;
pub mod pattern;
pub mod protocol;
pub mod scaling;
pub mod transform;

pub const EXIT_OK: u8 = 0;
/// A resource was found to violate a criterion (or a Bell pair is impossible).
pub const EXIT_CRITERION: u8 = 2;
/// A structural or verification check failed.
pub const EXIT_STRUCTURE: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

/// Bad flags or inputs; reported with [`EXIT_USAGE`].
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    CriterionViolation,
    StructuralFailure,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => EXIT_OK,
            Status::CriterionViolation => EXIT_CRITERION,
            Status::StructuralFailure => EXIT_STRUCTURE,
        }
    }
}

/// Exit code for an error escaping a command.
pub fn error_code(err: &anyhow::Error) -> u8 {
    use mqc_lab::Error as E;
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<E>() {
        Some(
            E::StructureCheck(_)
            | E::ImpossibleOutcome { .. }
            | E::NonOrthogonal(_)
            | E::NotNormalized(_),
        ) => EXIT_STRUCTURE,
        _ => EXIT_USAGE,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// A command result: JSON always, CSV as a flat per-row table.
pub trait Report: Serialize {
    fn status(&self) -> Status;

    fn csv(&self) -> anyhow::Result<String>;

    fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Csv => self.csv(),
        }
    }
}

/// Serializes rows with a header line.
pub fn csv_table<T: Serialize>(rows: impl IntoIterator<Item = T>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Writes the rendered report to `out`, or stdout when absent.
pub fn emit(report: &impl Report, format: Format, out: Option<&Path>) -> anyhow::Result<()> {
    let text = report.render(format)?;
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Configures the global thread pool from `MQC_LAB_THREADS`, if set.
pub fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("MQC_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        UsageError(format!(
            "MQC_LAB_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")
}
