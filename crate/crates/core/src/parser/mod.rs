//! Java method parsing and AST linearization.

mod ast;
mod lexer;
mod parse;
mod sbt;

pub use ast::{AstNode, NodeKind};
pub use lexer::{tokenize_source, LexError, Token, TokenKind};
pub use parse::{parse_method, ParseError};
pub use sbt::{erase_sbt_values, is_well_formed, label, sbt, sbt_ao, OTHER};
