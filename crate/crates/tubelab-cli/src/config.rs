//! Run configuration and error-to-exit-code policy.
//!
//! Command-line parsing produces a [`RunConfig`] whose parameters live in a
//! flat string map; the executors pull typed values back out through
//! [`Params`], which rejects keys a command does not understand.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use tubelab::concentration::ConcentrationError;
use tubelab::mmdist::MMDistError;
use tubelab::quad::QuadError;
use tubelab::specfun::SpecFunError;
use tubelab::sphere_lab::SphereLabError;
use tubelab::tube::TubeError;

/// Which subcommand a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Tube,
    Scan,
    Sample,
    Mmdist,
    Audit,
}

/// Output document format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// A fully parsed invocation: one command, its parameters, and the output
/// plumbing. Identical configs produce byte-identical documents.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Failure classes with distinct exit codes: validation problems exit 2,
/// numerical non-convergence exits 3.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        CliError::Validation(message.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "{m}"),
            CliError::Numeric(m) => write!(f, "numerical non-convergence: {m}"),
        }
    }
}

impl From<SpecFunError> for CliError {
    fn from(err: SpecFunError) -> Self {
        match err {
            SpecFunError::NonConvergence { .. } => CliError::Numeric(err.to_string()),
            SpecFunError::Domain(_) => CliError::Validation(err.to_string()),
        }
    }
}

impl From<QuadError> for CliError {
    fn from(err: QuadError) -> Self {
        match err {
            QuadError::Tolerance { .. } => CliError::Numeric(err.to_string()),
            _ => CliError::Validation(err.to_string()),
        }
    }
}

impl From<TubeError> for CliError {
    fn from(err: TubeError) -> Self {
        match err {
            TubeError::SpecFun(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<ConcentrationError> for CliError {
    fn from(err: ConcentrationError) -> Self {
        match err {
            ConcentrationError::Quad(inner) => inner.into(),
            ConcentrationError::SpecFun(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<SphereLabError> for CliError {
    fn from(err: SphereLabError) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<MMDistError> for CliError {
    fn from(err: MMDistError) -> Self {
        CliError::Validation(err.to_string())
    }
}

/// Typed extraction from the parameter map. Every key must be consumed;
/// [`Params::finish`] rejects leftovers so a parameter that a command (or a
/// chosen mode of a command) does not use is an error, not a silent no-op.
pub struct Params {
    map: BTreeMap<String, String>,
}

impl Params {
    pub fn new(map: BTreeMap<String, String>) -> Self {
        Self { map }
    }

    pub fn take_opt(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    pub fn take(&mut self, key: &str) -> Result<String, CliError> {
        self.take_opt(key)
            .ok_or_else(|| CliError::invalid(format!("missing required parameter --{}", flag(key))))
    }

    pub fn parse<T>(&mut self, key: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        parse_value(key, &self.take(key)?)
    }

    pub fn parse_opt<T>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        self.take_opt(key).map(|raw| parse_value(key, &raw)).transpose()
    }

    pub fn finish(self) -> Result<(), CliError> {
        match self.map.into_keys().next() {
            None => Ok(()),
            Some(key) => Err(CliError::invalid(format!(
                "parameter --{} does not apply to this command",
                flag(&key)
            ))),
        }
    }
}

fn parse_value<T>(key: &str, raw: &str) -> Result<T, CliError>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    raw.parse().map_err(|e| CliError::invalid(format!("invalid --{} value {raw:?}: {e}", flag(key))))
}

/// Map keys use underscores; the flags users see use dashes.
fn flag(key: &str) -> String {
    key.replace('_', "-")
}

/// Parses a comma-separated list of floats.
pub fn parse_float_list(key: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|piece| {
            piece.trim().parse::<f64>().map_err(|e| {
                CliError::invalid(format!("invalid --{} entry {piece:?}: {e}", flag(key)))
            })
        })
        .collect()
}
