use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

/// One violated field in a configuration or scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldViolation {
    pub field: String,
    pub message: String,
}

impl FieldViolation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Every violation found while validating a value. Never empty when returned
/// as an error.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Violations(pub Vec<FieldViolation>);

impl Violations {
    pub fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(FieldViolation::new(field, message));
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn fields(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|v| v.field.as_str())
    }

    /// Prefixes every field path with `prefix.`.
    pub fn nest(self, prefix: &str) -> Self {
        Self(
            self.0
                .into_iter()
                .map(|v| FieldViolation::new(format!("{prefix}.{}", v.field), v.message))
                .collect(),
        )
    }

    pub fn extend(&mut self, other: Violations) {
        self.0.extend(other.0);
    }

    pub fn into_result(self) -> Result<(), Error> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(self))
        }
    }
}

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", v.field, v.message)?;
        }
        Ok(())
    }
}

/// A problem found in an input file, tied to its 1-based line number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowDiagnostic {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RowDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Validation(Violations),

    #[error("{} has {} problem(s): {}", path.display(), diagnostics.len(), join(diagnostics))]
    Input {
        path: PathBuf,
        diagnostics: Vec<RowDiagnostic>,
    },

    #[error("invalid network: {0}")]
    Network(String),

    #[error("prevalence curve would be empty (horizon is 0)")]
    EmptyCurve,

    #[error("non-finite model parameter: {0}")]
    Parameter(String),

    #[error("local day {local_day} is beyond the prevalence curve (length {len})")]
    HorizonExceeded { local_day: u32, len: usize },

    #[error("day {day} is outside the simulation horizon of {horizon} days")]
    DayOutOfRange { day: u32, horizon: u32 },

    #[error("unknown county {0}")]
    UnknownCounty(String),

    #[error("unknown metric {0:?}")]
    UnknownMetric(String),

    #[error("unknown scenario {0}")]
    UnknownScenario(String),

    #[error("scenario {0} has not been run")]
    NotRun(String),

    #[error("action {kind} starts on day {start_day}, before branch day {branch_day}")]
    BranchHistory {
        kind: String,
        start_day: u32,
        branch_day: u32,
    },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn join(diagnostics: &[RowDiagnostic]) -> String {
    diagnostics
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
