//! Failure classes and the process exit codes they map to.

use std::fmt;

use nvespin::Error;

/// What a failing core call was working on, which decides whether bad
/// input is blamed on the configuration or on a data file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Simulation,
    Fit,
}

#[derive(Debug)]
pub enum CliError {
    /// Invalid or inconsistent configuration; exit code 2.
    Config(String),
    /// A numerical routine failed to converge or produced an unusable state; exit code 3.
    Solver(String),
    /// A data file is missing, malformed or cannot support the fit; exit code 4.
    Data(String),
    /// Writing outputs failed; exit code 1.
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output(_) => 1,
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Data(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Classifies a core error raised while `stage` was running.
    pub fn from_core(err: Error, stage: Stage) -> Self {
        let msg = err.to_string();
        match err {
            Error::NotHermitian { .. }
            | Error::NoConvergence { .. }
            | Error::AmbiguousManifold { .. }
            | Error::NonConvergence { .. }
            | Error::RankDeficient => CliError::Solver(msg),
            Error::DataFormat { .. }
            | Error::DegenerateData(_)
            | Error::UnderDetermined(_)
            | Error::NoLarmorAnchor { .. }
            | Error::MinimumNotBracketed => CliError::Data(msg),
            Error::InvalidInput(_) | Error::EmptyAfterDeadTime { .. } => match stage {
                Stage::Simulation => CliError::Config(msg),
                Stage::Fit => CliError::Data(msg),
            },
            Error::DimensionCap { .. } | Error::InvalidRegime { .. } => CliError::Config(msg),
            Error::Io(_) => CliError::Output(msg),
        }
    }

    /// Attaches the file a data error came from.
    pub fn in_file(err: Error, path: &std::path::Path) -> Self {
        CliError::Data(format!("{}: {}", path.display(), err))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            CliError::Config(m) => ("config error", m),
            CliError::Solver(m) => ("solver error", m),
            CliError::Data(m) => ("data error", m),
            CliError::Output(m) => ("output error", m),
        };
        write!(f, "{kind}: {msg}")
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;

/// Maps core results into CLI errors for the stage that produced them.
pub trait CoreContext<T> {
    fn sim(self) -> CliResult<T>;
    fn fit(self) -> CliResult<T>;
}

impl<T> CoreContext<T> for nvespin::Result<T> {
    fn sim(self) -> CliResult<T> {
        self.map_err(|e| CliError::from_core(e, Stage::Simulation))
    }
    fn fit(self) -> CliResult<T> {
        self.map_err(|e| CliError::from_core(e, Stage::Fit))
    }
}
