use std::fmt;
use std::process::ExitCode;

use strata_core::analysis::{QueryError, ReportError};
use strata_core::force::ForceError;
use strata_core::layering::LayeringError;
use strata_core::model::DatasetError;
use strata_core::render::RenderError;
use strata_core::synth::SynthError;

/// Why a command failed, which decides the exit status.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable, malformed or invalid input, unknown ids: exit 2.
    Input(String),
    /// Non-finite simulation state: exit 3.
    Numerical(String),
    /// The service could not start: exit 4.
    Serve(String),
    /// Writing an output file failed: exit 1.
    Output(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Output(_) => 1,
            Self::Input(_) => 2,
            Self::Numerical(_) => 3,
            Self::Serve(_) => 4,
        }
    }
}

impl From<&Failure> for ExitCode {
    fn from(f: &Failure) -> Self {
        ExitCode::from(f.exit_code())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Input(m) | Self::Numerical(m) | Self::Serve(m) | Self::Output(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for Failure {}

impl From<DatasetError> for Failure {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::Validation(vs) => {
                let lines: Vec<String> = vs.iter().map(ToString::to_string).collect();
                Self::Input(format!("dataset is invalid:\n  {}", lines.join("\n  ")))
            }
            other => Self::Input(other.to_string()),
        }
    }
}

impl From<ForceError> for Failure {
    fn from(e: ForceError) -> Self {
        match e {
            ForceError::Numerical { .. } => Self::Numerical(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}

impl From<LayeringError> for Failure {
    fn from(e: LayeringError) -> Self {
        Self::Input(e.to_string())
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Force(f) => f.into(),
            other => Self::Input(other.to_string()),
        }
    }
}

impl From<QueryError> for Failure {
    fn from(e: QueryError) -> Self {
        Self::Input(e.to_string())
    }
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Self {
        Self::Input(e.to_string())
    }
}

impl From<RenderError> for Failure {
    fn from(e: RenderError) -> Self {
        Self::Input(e.to_string())
    }
}
