//! Command-line front end for the indivisible-goods equilibrium library:
//! economy documents on disk, structured reports, and worked examples.
//!
//! Exit codes: 0 — computed; 1 — the checked property fails or no
//! equilibrium exists; 2 — input error; 3 — the level search stopped
//! without a verdict.

pub mod commands;
pub mod document;
pub mod fixture_docs;
pub mod render;

use std::fmt;

/// An input-side failure: unreadable or malformed documents, unknown names,
/// malformed flags, or a domain precondition the input does not meet.
/// Always mapped to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError(pub String);

impl CliError {
    pub fn input(msg: impl Into<String>) -> CliError {
        CliError(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for CliError {}

impl From<indivisible::Error> for CliError {
    fn from(e: indivisible::Error) -> CliError {
        CliError(e.to_string())
    }
}

/// A finished command: a machine-readable report, its plain-text rendering,
/// and the process exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub json: serde_json::Value,
    pub text: String,
    pub code: i32,
}

impl Outcome {
    pub fn new(json: serde_json::Value, text: impl Into<String>, code: i32) -> Outcome {
        Outcome {
            json,
            text: text.into(),
            code,
        }
    }
}
