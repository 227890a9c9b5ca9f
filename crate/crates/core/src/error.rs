use std::path::PathBuf;

use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which exponential dimension hit its configured cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapKind {
    /// Oracle enumeration over 2^n disease instances.
    Diseases,
    /// Quickscore enumeration over 2^m+ subsets of positive findings.
    PositiveFindings,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation failed:\n{0}")]
    Invalid(ValidationReport),

    #[error("{}", cap_message(*.kind, *.count, *.cap))]
    CapExceeded {
        kind: CapKind,
        count: usize,
        cap: usize,
    },

    #[error("evidence has zero probability under the model; posteriors are undefined")]
    InfeasibleEvidence,

    #[error("finding `{0}` has already been incorporated")]
    DuplicateFinding(String),

    #[error("unknown finding `{0}`")]
    UnknownFinding(String),

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn cap_message(kind: CapKind, count: usize, cap: usize) -> String {
    match kind {
        CapKind::Diseases => format!(
            "oracle enumeration over {count} diseases exceeds the cap of {cap} \
             (2^{count} instances); use the quickscore method or raise the cap"
        ),
        CapKind::PositiveFindings => format!(
            "{count} positive findings exceed the cap of {cap}; scoring cost doubles \
             with every additional positive finding (2^{count} subset terms), \
             raise the cap explicitly if this is intended"
        ),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
