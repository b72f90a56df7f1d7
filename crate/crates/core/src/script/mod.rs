//! The command language: lexer, AST, parser and canonical renderer.
//!
//! Statements end with a period at the end of a physical line. Keywords are
//! case-insensitive and may also be used as variable names; identifier
//! spelling is preserved. Subcommands the engine does not interpret
//! (`WINDOW=FRONT`, `/ORDER=ANALYSIS`, `/COMPRESSED`, ...) are kept on the
//! statement as inert annotations.

mod ast;
mod lexer;
mod parser;
mod render;

pub use ast::{
    Annotation, AnnotationArg, Command, FileRef, Pattern, RecodeRule, RecodeSpec, RecodeSpecError, Script, Statement,
};
pub use lexer::{tokenize, Keyword, LexError, Span, Token, TokenKind};
pub use parser::{parse_recode_spec, parse_script, ParseError};
pub use render::{render_recode_spec, render_script, render_statement};
