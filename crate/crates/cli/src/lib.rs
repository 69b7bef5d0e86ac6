//! Library side of the `bowtie` binary: config handling, the subcommands and
//! their output files.

pub mod commands;
pub mod config;
pub mod output;
pub mod plot;

use std::fmt;

use bowtie_core::Error;

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Bad config, flags, input files or IO.
pub const EXIT_USAGE: i32 = 2;
/// The numerics gave up (solver abort, non-finite values, degenerate gap, ...).
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) => match e {
                Error::NumericalAbort { .. }
                | Error::NonFinite(_)
                | Error::DegenerateGap(_)
                | Error::ImaginaryResidue(_)
                | Error::Overflow(_) => EXIT_NUMERICAL,
                _ => EXIT_USAGE,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_class() {
        let abort = CliError::from(Error::NumericalAbort { step: 3, msg: "x".into() });
        assert_eq!(abort.exit_code(), EXIT_NUMERICAL);
        assert!(abort.to_string().contains("step 3"));
        assert_eq!(CliError::from(Error::DegenerateGap(0.0)).exit_code(), EXIT_NUMERICAL);
        assert_eq!(CliError::from(Error::Parse { line: 2, msg: "x".into() }).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_USAGE);
    }
}
