//! Lexing and parsing for the Python subset the toolchain understands.

pub mod ast;
pub mod lexer;
pub mod parser;

pub use parser::{parse_expression, parse_module, parse_module_recovering};

/// A located syntax error. `line` is 1-based, `col` 0-based.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, serde::Serialize, serde::Deserialize)]
#[error("{line}:{col}: {message}")]
pub struct SyntaxError {
    pub message: String,
    pub line: u32,
    pub col: u32,
}
