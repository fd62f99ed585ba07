use std::fmt;

use fraclps_core::Error;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    VerifyFailed = 1,
    Config = 2,
    Input = 3,
    Accuracy = 4,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }
}

/// A failure with the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { exit: Exit::Config, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self { exit: Exit::Input, message: message.into() }
    }

    pub fn accuracy(message: impl Into<String>) -> Self {
        Self { exit: Exit::Accuracy, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self.exit {
            Exit::Config => "config error",
            Exit::Input => "input error",
            Exit::Accuracy => "accuracy error",
            Exit::VerifyFailed => "verification failed",
            Exit::Ok => "ok",
        };
        write!(f, "{label}: {}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::InvalidParameter { .. } | Error::Nyquist { .. } => Self::config(message),
            Error::AccuracyBudget { .. } => Self::accuracy(message),
            Error::Parse { .. } | Error::Incompatible(_) | Error::Io(_) => Self::input(message),
        }
    }
}
