use std::path::PathBuf;

use msd_core::Stage;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    EdgeList {
        path: PathBuf,
        #[source]
        source: msd_core::Error,
    },
    #[error("{}: invalid snapshot: {message}", path.display())]
    Snapshot { path: PathBuf, message: String },
    #[error("invalid experiment config:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("{0}")]
    Parameter(msd_core::Error),
    #[error("detection failed: {0}")]
    Detect(msd_core::Error),
    #[error("{failed} of {total} replicate evaluations failed")]
    Incomplete { failed: usize, total: usize },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this error. Usage errors (2) are reported by
    /// the argument parser before any of these can occur.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Csv { .. } => 1,
            CliError::EdgeList { .. } => 3,
            CliError::Snapshot { .. } => 4,
            CliError::Config(_) => 5,
            CliError::Parameter(_) => 6,
            CliError::Incomplete { .. } => 7,
            CliError::Detect(e) => match e.stage() {
                Some(stage) => stage_code(stage),
                None => 6,
            },
        }
    }
}

pub fn stage_code(stage: Stage) -> u8 {
    match stage {
        Stage::ExtendedNetwork => 10,
        Stage::Clustering => 11,
        Stage::Membership => 12,
        Stage::Ages => 13,
        Stage::Labels => 14,
        Stage::Propagation => 15,
        Stage::Identification => 16,
    }
}
