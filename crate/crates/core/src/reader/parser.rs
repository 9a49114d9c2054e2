//! Operator precedence term reader.

use super::ops::{OpDef, OperatorTable};
use super::term::{Term, TermKind};
use super::token::{Token, TokenKind, TokenValue};
use super::SourceSpan;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("syntax error at line {}: {message}", .span.line_start)]
pub struct SyntaxError {
    pub span: SourceSpan,
    pub message: String,
}

/// Cursor over a token slice that never yields comment tokens.
#[derive(Debug, Clone)]
pub struct TokenCursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    last: Option<&'a Token>,
}

impl<'a> TokenCursor<'a> {
    pub fn new(tokens: &'a [Token]) -> Self {
        let mut c = TokenCursor {
            tokens,
            pos: 0,
            last: None,
        };
        c.skip_comments();
        c
    }

    fn skip_comments(&mut self) {
        while self
            .tokens
            .get(self.pos)
            .is_some_and(|t| t.kind.is_comment())
        {
            self.pos += 1;
        }
    }

    pub fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    /// The token after the next one.
    pub fn peek2(&self) -> Option<&'a Token> {
        self.tokens[(self.pos + 1).min(self.tokens.len())..]
            .iter()
            .find(|t| !t.kind.is_comment())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos)?;
        self.pos += 1;
        self.skip_comments();
        self.last = Some(t);
        Some(t)
    }

    /// The most recently consumed token.
    pub fn last(&self) -> Option<&'a Token> {
        self.last
    }

    pub fn is_done(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    /// Index into the underlying slice of the next token.
    pub fn position(&self) -> usize {
        self.pos
    }

    /// Advance past the next `end` token, returning it.
    pub fn skip_to_end(&mut self) -> Option<&'a Token> {
        while let Some(t) = self.next() {
            if t.kind == TokenKind::End {
                return Some(t);
            }
        }
        None
    }
}

/// Reads one clause-level term terminated by `.` and consumes the end token.
pub fn read_term(cursor: &mut TokenCursor<'_>, ops: &OperatorTable) -> Result<Term, SyntaxError> {
    let mut p = Parser { cur: cursor, ops };
    let (term, _) = p.parse(1200)?;
    match p.cur.next() {
        Some(t) if t.kind == TokenKind::End => Ok(term),
        Some(t) => Err(err(
            t.span,
            format!("operator expected, found `{}`", t.text),
        )),
        None => Err(err(term.span, "unexpected end of input, missing `.`")),
    }
}

/// Reads a single term from a string, which must be terminated by `.`.
pub fn read_term_from_str(text: &str, ops: &OperatorTable) -> Result<Term, SyntaxError> {
    let tokens = super::token::tokenize(text).map_err(|e| err(e.span(), e.to_string()))?;
    let mut cursor = TokenCursor::new(&tokens);
    let term = read_term(&mut cursor, ops)?;
    match cursor.peek() {
        None => Ok(term),
        Some(t) => Err(err(t.span, "extra input after term")),
    }
}

/// `name(` with the bracket touching the name, i.e. functional notation.
fn applies(name: &Token, open: &Token) -> bool {
    matches!(name.kind, TokenKind::Atom | TokenKind::Punct)
        && open.kind == TokenKind::Open
        && open.span.byte_start == name.span.byte_end
}

fn err(span: SourceSpan, message: impl Into<String>) -> SyntaxError {
    SyntaxError {
        span,
        message: message.into(),
    }
}

fn join(a: SourceSpan, b: SourceSpan) -> SourceSpan {
    SourceSpan {
        byte_start: a.byte_start.min(b.byte_start),
        byte_end: a.byte_end.max(b.byte_end),
        line_start: a.line_start.min(b.line_start),
        line_end: a.line_end.max(b.line_end),
    }
}

fn can_start_term(t: &Token) -> bool {
    use TokenKind::*;
    matches!(
        t.kind,
        Atom | Punct | Variable | Integer | Float | Str | Open | OpenList | OpenCurly
    )
}

fn op_name(t: &Token) -> Option<&str> {
    match t.kind {
        TokenKind::Atom | TokenKind::Punct => Some(t.name()),
        TokenKind::Comma => Some(","),
        TokenKind::Bar => Some("|"),
        _ => None,
    }
}

struct Parser<'c, 'a> {
    cur: &'c mut TokenCursor<'a>,
    ops: &'c OperatorTable,
}

impl<'c, 'a> Parser<'c, 'a> {
    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<&'a Token, SyntaxError> {
        match self.cur.next() {
            Some(t) if t.kind == kind => Ok(t),
            Some(t) => Err(err(t.span, format!("expected {what}, found `{}`", t.text))),
            None => Err(err(
                SourceSpan::default(),
                format!("expected {what}, found end of input"),
            )),
        }
    }

    /// True when `t` reads as an infix or postfix operator that cannot open
    /// a term, so a preceding prefix operator must be an atom operand.
    fn is_pure_infix(&self, t: &Token) -> bool {
        match t.kind {
            TokenKind::Comma | TokenKind::Bar => true,
            TokenKind::Atom | TokenKind::Punct => match self.ops.lookup(t.name()) {
                Some(e) => e.prefix.is_none() && (e.infix.is_some() || e.postfix.is_some()),
                None => false,
            },
            _ => false,
        }
    }

    fn parse(&mut self, max: u16) -> Result<(Term, u16), SyntaxError> {
        let (mut left, mut left_prio) = self.primary(max)?;
        while let Some(tok) = self.cur.peek() {
            let Some(name) = op_name(tok) else { break };
            let (name, infix) = if tok.kind == TokenKind::Bar {
                (
                    ";",
                    Some(OpDef {
                        priority: 1100,
                        kind: super::ops::OpType::Xfy,
                    }),
                )
            } else {
                (name, self.ops.infix(name))
            };
            let postfix = self.ops.postfix(name);
            let next = self.cur.peek2();
            let infix_fits =
                infix.filter(|d| d.priority <= max && left_prio <= d.kind.left_max(d.priority));
            let postfix_fits =
                postfix.filter(|d| d.priority <= max && left_prio <= d.kind.left_max(d.priority));
            let rhs_follows = next.is_some_and(|n| can_start_term(n) && !self.is_pure_infix(n));
            if let Some(d) = infix_fits.filter(|_| rhs_follows || postfix_fits.is_none()) {
                let op_tok = self.cur.next().expect("peeked");
                let (right, _) = self.parse(d.kind.right_max(d.priority))?;
                let span = join(left.span, right.span);
                left = Term {
                    kind: TermKind::Compound(name.to_string(), vec![left, right]),
                    span,
                    functor_span: Some(op_tok.span),
                };
                left_prio = d.priority;
            } else if let Some(d) = postfix_fits {
                let op_tok = self.cur.next().expect("peeked");
                let span = join(left.span, op_tok.span);
                left = Term {
                    kind: TermKind::Compound(name.to_string(), vec![left]),
                    span,
                    functor_span: Some(op_tok.span),
                };
                left_prio = d.priority;
            } else {
                break;
            }
        }
        Ok((left, left_prio))
    }

    fn primary(&mut self, max: u16) -> Result<(Term, u16), SyntaxError> {
        let Some(tok) = self.cur.next() else {
            return Err(err(SourceSpan::default(), "unexpected end of input"));
        };
        let leaf = |kind| Ok((Term::new(kind, tok.span), 0));
        match tok.kind {
            TokenKind::Integer => match tok.value {
                TokenValue::Int(v) => leaf(TermKind::Integer(v)),
                _ => unreachable!("integer token without value"),
            },
            TokenKind::Float => match tok.value {
                TokenValue::Float(v) => leaf(TermKind::Float(v)),
                _ => unreachable!("float token without value"),
            },
            TokenKind::Variable => leaf(TermKind::Var(tok.text.clone())),
            TokenKind::Str => leaf(TermKind::Str(tok.name().to_string())),
            TokenKind::Open => {
                let (inner, _) = self.parse(1200)?;
                self.expect(TokenKind::Close, "`)`")?;
                Ok((inner, 0))
            }
            TokenKind::OpenList => self.list(tok),
            TokenKind::OpenCurly => {
                if self
                    .cur
                    .peek()
                    .is_some_and(|t| t.kind == TokenKind::CloseCurly)
                {
                    let close = self.cur.next().expect("peeked");
                    return Ok((
                        Term::new(TermKind::Atom("{}".into()), join(tok.span, close.span)),
                        0,
                    ));
                }
                let (inner, _) = self.parse(1200)?;
                let close = self.expect(TokenKind::CloseCurly, "`}`")?;
                Ok((
                    Term {
                        kind: TermKind::Compound("{}".into(), vec![inner]),
                        span: join(tok.span, close.span),
                        functor_span: Some(tok.span),
                    },
                    0,
                ))
            }
            TokenKind::Atom | TokenKind::Punct => self.name_term(tok, max),
            _ => Err(err(tok.span, format!("unexpected `{}`", tok.text))),
        }
    }

    fn name_term(&mut self, tok: &'a Token, max: u16) -> Result<(Term, u16), SyntaxError> {
        let name = tok.name();
        let next = self.cur.peek();

        // Functional notation needs the `(` to touch the name.
        if next.is_some_and(|n| n.kind == TokenKind::Open && n.span.byte_start == tok.span.byte_end)
        {
            self.cur.next();
            let mut args = Vec::new();
            loop {
                let (arg, _) = self.parse(999)?;
                args.push(arg);
                let t = self
                    .cur
                    .next()
                    .ok_or_else(|| err(tok.span, "unterminated argument list"))?;
                match t.kind {
                    TokenKind::Comma => continue,
                    TokenKind::Close => {
                        return Ok((
                            Term {
                                kind: TermKind::Compound(name.to_string(), args),
                                span: join(tok.span, t.span),
                                functor_span: Some(tok.span),
                            },
                            0,
                        ));
                    }
                    _ => {
                        return Err(err(
                            t.span,
                            format!("expected `,` or `)`, found `{}`", t.text),
                        ))
                    }
                }
            }
        }

        // A minus sign glued to a number is part of the literal.
        if tok.kind == TokenKind::Punct && name == "-" {
            if let Some(n) = next.filter(|n| n.span.byte_start == tok.span.byte_end) {
                let span = join(tok.span, n.span);
                match n.value {
                    TokenValue::Int(v) if n.kind == TokenKind::Integer => {
                        self.cur.next();
                        return Ok((Term::new(TermKind::Integer(-v), span), 0));
                    }
                    TokenValue::Float(v) if n.kind == TokenKind::Float => {
                        self.cur.next();
                        return Ok((Term::new(TermKind::Float(-v), span), 0));
                    }
                    _ => {}
                }
            }
        }

        let atom = Term {
            kind: TermKind::Atom(name.to_string()),
            span: tok.span,
            functor_span: Some(tok.span),
        };
        if let Some(def) = self.ops.prefix(name) {
            let operand_follows = next.is_some_and(|n| {
                can_start_term(n)
                    && !(self.is_pure_infix(n)
                        && self
                            .cur
                            .peek2()
                            .is_some_and(|m| can_start_term(m) && !applies(n, m)))
            });
            if operand_follows {
                // Clamp so an over-priority prefix operator still reads in
                // argument position.
                let priority = def.priority.min(max);
                let arg_max = def.kind.right_max(def.priority).min(priority);
                let (arg, _) = self.parse(arg_max)?;
                let span = join(tok.span, arg.span);
                return Ok((
                    Term {
                        kind: TermKind::Compound(name.to_string(), vec![arg]),
                        span,
                        functor_span: Some(tok.span),
                    },
                    priority,
                ));
            }
        }
        Ok((atom, 0))
    }

    fn list(&mut self, open: &'a Token) -> Result<(Term, u16), SyntaxError> {
        if self
            .cur
            .peek()
            .is_some_and(|t| t.kind == TokenKind::CloseList)
        {
            let close = self.cur.next().expect("peeked");
            return Ok((
                Term::new(TermKind::Atom("[]".into()), join(open.span, close.span)),
                0,
            ));
        }
        let mut items = Vec::new();
        let mut tail = None;
        loop {
            let (item, _) = self.parse(999)?;
            items.push(item);
            let t = self
                .cur
                .next()
                .ok_or_else(|| err(open.span, "unterminated list"))?;
            match t.kind {
                TokenKind::Comma => continue,
                TokenKind::Bar => {
                    let (tl, _) = self.parse(999)?;
                    tail = Some(tl);
                    let close = self.expect(TokenKind::CloseList, "`]`")?;
                    return Ok((build_list(items, tail, open.span, close.span), 0));
                }
                TokenKind::CloseList => return Ok((build_list(items, tail, open.span, t.span), 0)),
                _ => {
                    return Err(err(
                        t.span,
                        format!("expected `,`, `|` or `]`, found `{}`", t.text),
                    ))
                }
            }
        }
    }
}

fn build_list(items: Vec<Term>, tail: Option<Term>, open: SourceSpan, close: SourceSpan) -> Term {
    let end_span = SourceSpan {
        byte_start: close.byte_start,
        ..close
    };
    let mut acc = tail.unwrap_or_else(|| Term::new(TermKind::Atom("[]".into()), end_span));
    let whole = join(open, close);
    for item in items.into_iter().rev() {
        let span = SourceSpan {
            byte_start: item.span.byte_start,
            line_start: item.span.line_start,
            ..whole
        };
        acc = Term::new(TermKind::Compound(".".into(), vec![item, acc]), span);
    }
    acc
}
