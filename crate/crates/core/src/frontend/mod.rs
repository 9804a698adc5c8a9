//! Lexing and parsing of the design subset and SVA-lite assertions.
//!
//! The design grammar is a small synthesizable Verilog/SystemVerilog subset:
//! ANSI port lists, `reg`/`wire`/`logic` declarations, continuous `assign`,
//! and `always_ff @(posedge clk)` processes with nonblocking assignments and
//! `if`/`else`. Assertions are per-cycle boolean invariants with no temporal
//! operators.

mod ast;
mod lexer;
mod parser;
mod print;

pub use ast::*;
pub use lexer::{tokenize, NumLit, Radix, Token, TokenKind, KEYWORDS};
pub use parser::{parse_assertion, parse_assertion_file, parse_module, parse_module_source};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrontendError {
    #[error("{line}:{col}: {message}")]
    Lex { line: usize, col: usize, message: String },
    #[error("{line}:{col}: expected {expected}, found {found}")]
    Parse {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("unknown symbol `{name}`")]
    UnknownSymbol { name: String },
}
