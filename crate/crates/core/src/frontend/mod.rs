//! Lexing, parsing and printing of `.hml` source.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;

pub use ast::*;
pub use lexer::{tokenize, LexError, Token, TokenKind};
pub use parser::{parse, parse_source, ParseError};
pub use pretty::{pretty_print, print_expr, print_type};
