//! Game-spec files, CSV tables and error reporting for the `deception`
//! command-line tool.

mod csv;
mod spec;

use std::io;
use std::path::PathBuf;

pub use csv::{emit_csv, format_value, write_csv};
pub use spec::{
    parse_game_spec, parse_game_spec_str, BeliefsSpec, GameSpec, InsiderSpec, Model, ModulatorSpec,
};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// `line` is 0 when the offending field could not be located.
    #[error("validation error at line {line} ({field}): {message}")]
    Validation {
        line: usize,
        field: String,
        message: String,
    },
    #[error("refusing to write an empty table")]
    EmptyTable,
    #[error(transparent)]
    Core(#[from] deception_core::Error),
}

impl Error {
    /// 2 for invalid input, 3 for solver failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use deception_core::Error as E;
        match self {
            Error::Parse { .. } | Error::Validation { .. } => 2,
            Error::Core(E::NumericalFailure { .. }) => 3,
            Error::Core(
                E::Invalid(_)
                | E::InvalidParams(_)
                | E::UnknownFigure(_)
                | E::EmptyGrid
                | E::UnsupportedDimension { .. }
                | E::SpaceTooLarge { .. }
                | E::PreconditionViolated(_),
            ) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
