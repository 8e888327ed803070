use std::io::{self, Write};
use std::process::ExitCode;

use mahler_core::expr::ParseError;
use mahler_core::measure::MeasureError;
use mahler_core::poly::PolyError;
use mahler_core::special::SpecialError;
use mahler_core::transform::TransformError;
use serde::Serialize;
use serde_json::Value;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_INVALID_SPEC: u8 = 4;
pub const EXIT_VERIFICATION: u8 = 5;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    InvalidSpec(String),
}

impl CliError {
    pub fn code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::InvalidSpec(_) => EXIT_INVALID_SPEC,
        })
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) | CliError::InvalidSpec(m) => m,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(format!("parse error: {e}"))
    }
}

impl From<SpecialError> for CliError {
    fn from(e: SpecialError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::InvalidConfig(_) | MeasureError::ReductionVariableAbsent(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Parse(p) => p.into(),
            TransformError::Measure(m) => m.into(),
            TransformError::Root(_) => CliError::Numeric(e.to_string()),
            TransformError::FamilyIndex(_) | TransformError::UnknownFamilyVariable(_) => CliError::Usage(e.to_string()),
            TransformError::Poly(PolyError::ExponentOverflow) => CliError::Numeric(e.to_string()),
            TransformError::Invalid(_) | TransformError::VariableAbsent(_) | TransformError::Poly(_) => {
                CliError::InvalidSpec(e.to_string())
            }
        }
    }
}

/// The machine-readable result of one invocation. Everything except
/// `timing` is a pure function of the inputs and the seed.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub command: &'static str,
    pub inputs: Value,
    pub seed: u64,
    pub results: Value,
    /// `None` when the command makes no pass/fail judgement.
    pub pass: Option<bool>,
    pub warnings: Vec<String>,
    pub timing: Timing,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub threads: usize,
}

/// What a command hands back to `main` for printing.
pub struct Outcome {
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub pass: Option<bool>,
    pub warnings: Vec<String>,
    /// Rows of the human-readable table.
    pub rows: Vec<(String, String)>,
}

impl Outcome {
    pub fn new(command: &'static str, inputs: Value, results: Value) -> Self {
        Self {
            command,
            inputs,
            results,
            pass: None,
            warnings: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.rows.push((key.into(), value.to_string()));
        self
    }
}

/// Writes the table to `out`. Errors (typically a closed pipe) are returned
/// so the caller can stop quietly.
pub fn print_table(o: &Outcome, out: &mut impl Write) -> io::Result<()> {
    let width = o.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0).max(12);
    for (k, v) in &o.rows {
        let mut lines = v.lines();
        writeln!(out, "{k:<width$}  {}", lines.next().unwrap_or(""))?;
        for l in lines {
            writeln!(out, "{:<width$}  {l}", "")?;
        }
    }
    for w in &o.warnings {
        writeln!(out, "{:<width$}  {w}", "warning")?;
    }
    if let Some(p) = o.pass {
        writeln!(out, "{:<width$}  {}", "result", if p { "PASS" } else { "FAIL" })?;
    }
    out.flush()
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialise")
}

pub fn fmt_value(v: f64, err: f64) -> String {
    format!("{v:.12} +- {err:.2e}")
}
