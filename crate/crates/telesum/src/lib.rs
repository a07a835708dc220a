//! Parsing, rendering and the command-line driver around `telesum-core`.

pub mod cli;
pub mod json;
pub mod parse;
pub mod render;

pub use parse::{parse, parse_expr, ParseError, SourceSpan};
pub use render::plain;
