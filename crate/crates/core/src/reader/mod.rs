//! Prolog source reading: tokens, operator-precedence terms, and the
//! comments that surround them.

pub mod ops;
pub mod parser;
pub mod source;
pub mod term;
pub mod token;
pub mod write;

use serde::Serialize;

pub use ops::{default_operator_table, header_operator_table, OpDef, OpType, OperatorTable};
pub use parser::{read_term, read_term_from_str, SyntaxError, TokenCursor};
pub use source::{read_source, ClauseUnit, CommentRecord, CommentStyle, ReadError, SourceRead};
pub use term::{Term, TermKind};
pub use token::{tokenize, Token, TokenKind, TokenizeError};

/// Byte and line extent of a piece of source text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SourceSpan {
    /// 0-based, inclusive.
    pub byte_start: usize,
    /// Exclusive.
    pub byte_end: usize,
    /// 1-based.
    pub line_start: usize,
    pub line_end: usize,
}

impl SourceSpan {
    pub fn len(&self) -> usize {
        self.byte_end - self.byte_start
    }

    pub fn is_empty(&self) -> bool {
        self.byte_end == self.byte_start
    }

    pub fn contains(&self, other: &SourceSpan) -> bool {
        self.byte_start <= other.byte_start && other.byte_end <= self.byte_end
    }
}
