//! Text formats: addresses, preopetopes, OCMT literals, derivation scripts, and JSON export.

use std::fmt;

use thiserror::Error;

mod json;
mod lexer;
mod parse;
mod script;

pub use json::{
    address_from_json, complex_to_json, ocmt_to_json, preopetope_from_json, preopetope_to_json, sequent_to_json,
    unnamed_to_json, value_to_json,
};
pub use lexer::is_name_char;
pub use parse::{parse_address, parse_ocmt, parse_preopetope, serialize_address, serialize_ocmt, serialize_preopetope};
pub use script::{named_script, parse_script, parse_script_as, run_script, Dialect, Script, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Syntax errors and rule violations, both located in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("{pos}: syntax error: {msg}")]
    Parse { pos: Pos, msg: String },
    #[error("{pos}: {msg}")]
    Rule { pos: Pos, msg: String },
}

impl TextError {
    pub fn parse(pos: Pos, msg: impl Into<String>) -> Self {
        TextError::Parse { pos, msg: msg.into() }
    }

    pub fn rule(pos: Pos, msg: impl Into<String>) -> Self {
        TextError::Rule { pos, msg: msg.into() }
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, TextError::Parse { .. })
    }
}
