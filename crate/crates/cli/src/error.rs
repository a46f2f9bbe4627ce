use sectorwalk_core::Error;
use std::fmt;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;
pub const EXIT_GUARD: u8 = 5;

/// Front-end failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INPUT, message: message.into() }
    }

    pub fn guard(message: impl Into<String>) -> Self {
        CliError { code: EXIT_GUARD, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn core_exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_)
        | Error::NegativeWeight(_)
        | Error::NotPlanar(_)
        | Error::Disconnected(_)
        | Error::NotPsd { .. }
        | Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_) => EXIT_INPUT,
        Error::Infeasible(_)
        | Error::ConditioningOutsideSupport
        | Error::EmptySupport
        | Error::OutsideSupport
        | Error::ReferenceUnreachable { .. } => EXIT_INFEASIBLE,
        Error::Numerical(_) | Error::NonRealSpectrum(_) => EXIT_NUMERIC,
        Error::TooLarge(_) => EXIT_GUARD,
    }
}

/// Exit code for an error chain: the first recognized cause decides, and
/// anything else (unreadable files, bad arguments) is an input error.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return e.code;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return core_exit_code(e);
        }
    }
    EXIT_INPUT
}
