//! Whole-file reading with comment attachment.
//!
//! Each clause term is paired with the comments met from where reading of
//! that term started up to its end token. Consecutive `%` lines are merged
//! into one comment record so a multi-line structured comment arrives as a
//! single unit.

use serde::Serialize;

use super::ops::{default_operator_table, OperatorTable};
use super::parser::{read_term, TokenCursor};
use super::term::Term;
use super::token::{tokenize_lenient, Token, TokenKind};
use super::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CommentStyle {
    Line,
    Block,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommentRecord {
    /// Raw source text, delimiters included. For merged `%` lines this is
    /// the exact slice from the first `%` to the end of the last line.
    pub text: String,
    pub span: SourceSpan,
    pub style: CommentStyle,
    /// Number of comment tokens merged into this record.
    pub token_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClauseUnit {
    /// `None` for trailing comments or a clause that failed to read.
    pub term: Option<Term>,
    pub leading_comments: Vec<CommentRecord>,
    pub term_span: Option<SourceSpan>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReadError {
    pub span: SourceSpan,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SourceRead {
    pub tokens: Vec<Token>,
    pub units: Vec<ClauseUnit>,
    pub errors: Vec<ReadError>,
    pub warnings: Vec<ReadError>,
}

pub fn read_source(text: &str) -> SourceRead {
    read_source_with(text, &default_operator_table())
}

pub fn read_source_with(text: &str, ops: &OperatorTable) -> SourceRead {
    let (tokens, lex_errors) = tokenize_lenient(text);
    let mut errors: Vec<ReadError> = lex_errors
        .iter()
        .map(|e| ReadError {
            span: e.span(),
            message: e.to_string(),
        })
        .collect();
    let mut warnings = Vec::new();
    let records = group_comments(text, &tokens);

    // (term, byte offset just past the end token)
    let mut clauses: Vec<(Option<Term>, usize)> = Vec::new();
    let mut cursor = TokenCursor::new(&tokens);
    while !cursor.is_done() {
        match read_term(&mut cursor, ops) {
            Ok(term) => {
                if is_op_directive(&term) {
                    log::warn!("line {}: operator directive ignored", term.span.line_start);
                    warnings.push(ReadError {
                        span: term.span,
                        message: "operator directive ignored; the default operator table is used"
                            .into(),
                    });
                }
                let end = cursor.last().map_or(text.len(), |t| t.span.byte_end);
                clauses.push((Some(term), end));
            }
            Err(e) => {
                errors.push(ReadError {
                    span: e.span,
                    message: e.message.clone(),
                });
                let ended = cursor.last().is_some_and(|t| t.kind == TokenKind::End);
                let end = if ended {
                    cursor.last().map(|t| t.span.byte_end)
                } else {
                    cursor.skip_to_end().map(|t| t.span.byte_end)
                };
                clauses.push((None, end.unwrap_or(text.len())));
            }
        }
    }

    let ends: Vec<usize> = clauses.iter().map(|(_, end)| *end).collect();
    let mut units: Vec<ClauseUnit> = clauses
        .into_iter()
        .map(|(term, _)| ClauseUnit {
            term_span: term.as_ref().map(|t| t.span),
            term,
            leading_comments: Vec::new(),
        })
        .collect();
    let mut trailing = Vec::new();
    for rec in records {
        match ends.iter().position(|&end| rec.span.byte_start < end) {
            Some(i) => units[i].leading_comments.push(rec),
            None => trailing.push(rec),
        }
    }
    if !trailing.is_empty() {
        units.push(ClauseUnit {
            term: None,
            leading_comments: trailing,
            term_span: None,
        });
    }

    SourceRead {
        tokens,
        units,
        errors,
        warnings,
    }
}

fn is_op_directive(t: &Term) -> bool {
    t.is_functor(":-", 1) && t.args()[0].is_functor("op", 3)
}

fn is_marker_line(text: &str) -> bool {
    let mut chars = text.chars();
    chars.next() == Some('%')
        && matches!(chars.next(), Some('%' | '!'))
        && chars.next().is_none_or(char::is_whitespace)
}

struct LineGroup {
    start: usize,
    end: usize,
    last_line: usize,
    count: usize,
    structured: bool,
    past_header: bool,
    mergeable: bool,
}

fn group_comments(text: &str, tokens: &[Token]) -> Vec<CommentRecord> {
    let mut out = Vec::new();
    let mut group: Option<LineGroup> = None;
    let lines = super::token::LineIndex::new(text);
    let flush = |g: LineGroup, out: &mut Vec<CommentRecord>| {
        out.push(CommentRecord {
            text: text[g.start..g.end].to_string(),
            span: lines.span(g.start, g.end),
            style: CommentStyle::Line,
            token_count: g.count,
        });
    };

    for (i, tok) in tokens.iter().enumerate() {
        let first_on_line = i == 0 || tokens[i - 1].span.line_end < tok.span.line_start;
        match tok.kind {
            TokenKind::CommentBlock => {
                if let Some(g) = group.take() {
                    flush(g, &mut out);
                }
                out.push(CommentRecord {
                    text: tok.text.clone(),
                    span: tok.span,
                    style: CommentStyle::Block,
                    token_count: 1,
                });
            }
            TokenKind::CommentLine => {
                let marker = is_marker_line(&tok.text);
                let extend = group.as_ref().is_some_and(|g| {
                    g.mergeable
                        && first_on_line
                        && tok.span.line_start == g.last_line + 1
                        && !(marker && (!g.structured || g.past_header))
                });
                if extend {
                    let g = group.as_mut().expect("checked");
                    g.end = tok.span.byte_end;
                    g.last_line = tok.span.line_end;
                    g.count += 1;
                    if g.structured && !marker {
                        g.past_header = true;
                    }
                } else {
                    if let Some(g) = group.take() {
                        flush(g, &mut out);
                    }
                    group = Some(LineGroup {
                        start: tok.span.byte_start,
                        end: tok.span.byte_end,
                        last_line: tok.span.line_end,
                        count: 1,
                        structured: marker,
                        past_header: false,
                        mergeable: first_on_line,
                    });
                }
            }
            _ => {
                if let Some(g) = group.take() {
                    flush(g, &mut out);
                }
            }
        }
    }
    if let Some(g) = group.take() {
        flush(g, &mut out);
    }
    out
}
