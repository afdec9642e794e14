use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI run, each tied to a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("invalid input: {0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] giant_atom::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 success, 1 IO or numerical failure, 2 usage/validation,
    /// 3 structural impossibility.
    pub fn exit_code(&self) -> u8 {
        use giant_atom::Error as E;
        match self {
            Self::Io { .. } => 1,
            Self::Usage(_) => 2,
            Self::Model(e) => match e {
                E::StructuralImpossibility { .. } => 3,
                E::Validation { .. }
                | E::OutOfRange { .. }
                | E::SingularMode { .. }
                | E::InvalidMode { .. }
                | E::PairMismatch { .. } => 2,
                E::Divergence { .. } | E::IncompleteSearch { .. } | E::EmptyPoleSet => 1,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let io = CliError::io("x", io::Error::other("boom"));
        assert_eq!(io.exit_code(), 1);
        assert_eq!(CliError::Usage("bad".into()).exit_code(), 2);
        let model = |e| CliError::Model(e).exit_code();
        assert_eq!(
            model(giant_atom::Error::StructuralImpossibility { n_legs: 2 }),
            3
        );
        assert_eq!(
            model(giant_atom::Error::SingularMode { n: 3, n_legs: 3 }),
            2
        );
        assert_eq!(model(giant_atom::Error::EmptyPoleSet), 1);
    }
}
