//! SimSeQL lexer, parser and printer.

mod ast;
mod lexer;
mod parse;
mod print;

pub use ast::*;
pub use lexer::{tokenize, Keyword, Token, TokenKind};
pub use parse::{parse, parse_expr};
pub use print::{print, print_expr};
