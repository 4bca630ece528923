use std::fmt::{Display, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use kgrowth::ingest_store::{write_atomic, Cache, Report};
use serde::Serialize;

use crate::args::Global;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or values: exit 2.
    Usage(String),
    /// Input or computation failure: exit 1.
    Data(kgrowth::Error),
}

impl From<kgrowth::Error> for CliError {
    fn from(e: kgrowth::Error) -> Self {
        CliError::Data(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.into())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

pub fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Parse a flag value, mapping failures to usage errors.
pub fn parse_flag<T>(flag: &str, value: &str) -> CliResult<T>
where
    T: FromStr,
    T::Err: Display,
{
    value
        .parse()
        .map_err(|e| CliError::Usage(format!("invalid value {value:?} for --{flag}: {e}")))
}

pub fn parse_opt<T>(flag: &str, value: Option<&String>) -> CliResult<Option<T>>
where
    T: FromStr,
    T::Err: Display,
{
    value.map(|v| parse_flag(flag, v)).transpose()
}

/// Per-invocation output state.
pub struct Ctx {
    pub seed: u64,
    quiet: bool,
    plot_path: Option<PathBuf>,
    json_path: Option<PathBuf>,
    plot: String,
    report: Option<String>,
}

impl Ctx {
    pub fn new(g: &Global) -> Self {
        Ctx {
            seed: g.seed,
            quiet: g.quiet,
            plot_path: g.plot_csv.clone(),
            json_path: g.json.clone(),
            plot: String::from("series,x,y\n"),
            report: None,
        }
    }

    pub fn wants_plot(&self) -> bool {
        self.plot_path.is_some()
    }

    /// One row of the long-format plot table.
    pub fn plot(&mut self, series: &str, x: impl Display, y: f64) {
        if self.plot_path.is_some() {
            let _ = writeln!(self.plot, "{series},{x},{y}");
        }
    }

    pub fn say(&self, line: impl Display) {
        if !self.quiet {
            println!("{line}");
        }
    }

    pub fn report<T: Serialize>(&mut self, report: &Report<T>) -> CliResult {
        self.report = Some(report.to_json()?);
        Ok(())
    }

    pub fn cache(&self) -> CliResult<Option<Cache>> {
        Ok(Cache::from_env()?)
    }

    pub fn finish(self) -> CliResult {
        if let Some(p) = &self.plot_path {
            write_atomic(p, self.plot.as_bytes())?;
        }
        if let (Some(p), Some(r)) = (&self.json_path, &self.report) {
            write_atomic(p, r.as_bytes())?;
        }
        Ok(())
    }
}
