//! Prolog tokenizer.
//!
//! Every byte of the input ends up either inside a token's `text` or in the
//! layout (whitespace) between two tokens. Comments are tokens too, so the
//! reader can hand them to the documentation layer with their positions.

use std::fmt;

use super::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    /// Letter-initial or quoted atom.
    Atom,
    Variable,
    Integer,
    Float,
    /// Double- or back-quoted text.
    Str,
    /// Symbol-char atom (`:-`, `=..`) or one of the solo atoms `!` and `;`.
    Punct,
    Open,
    Close,
    OpenList,
    CloseList,
    OpenCurly,
    CloseCurly,
    Comma,
    Bar,
    End,
    CommentLine,
    CommentBlock,
}

impl TokenKind {
    pub fn is_comment(self) -> bool {
        matches!(self, TokenKind::CommentLine | TokenKind::CommentBlock)
    }
}

/// Decoded payload of a token, where one exists.
#[derive(Debug, Clone, PartialEq)]
pub enum TokenValue {
    None,
    Name(String),
    Int(i64),
    Float(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Exact source slice.
    pub text: String,
    pub span: SourceSpan,
    pub value: TokenValue,
}

impl Token {
    /// Atom name, variable name or string contents.
    pub fn name(&self) -> &str {
        match &self.value {
            TokenValue::Name(n) => n,
            _ => &self.text,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TokenizeError {
    #[error("unterminated block comment starting at line {}", .0.line_start)]
    UnterminatedBlockComment(SourceSpan),
    #[error("unterminated quoted item starting at line {}", .0.line_start)]
    UnterminatedQuoted(SourceSpan),
    #[error("illegal character {ch:?} at line {}", .span.line_start)]
    IllegalCharacter { ch: char, span: SourceSpan },
    #[error("bad number at line {}: {message}", .span.line_start)]
    BadNumber { message: String, span: SourceSpan },
}

impl TokenizeError {
    pub fn span(&self) -> SourceSpan {
        match self {
            TokenizeError::UnterminatedBlockComment(s) | TokenizeError::UnterminatedQuoted(s) => *s,
            TokenizeError::IllegalCharacter { span, .. }
            | TokenizeError::BadNumber { span, .. } => *span,
        }
    }
}

/// Maps byte offsets to 1-based line numbers.
#[derive(Debug, Clone)]
pub struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    pub fn new(text: &str) -> Self {
        let mut starts = vec![0];
        starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { starts }
    }

    pub fn line_of(&self, offset: usize) -> usize {
        match self.starts.binary_search(&offset) {
            Ok(i) => i + 1,
            Err(i) => i,
        }
    }

    pub fn span(&self, start: usize, end: usize) -> SourceSpan {
        // The last byte of a non-empty range decides the closing line.
        let last = if end > start { end - 1 } else { start };
        SourceSpan {
            byte_start: start,
            byte_end: end,
            line_start: self.line_of(start),
            line_end: self.line_of(last),
        }
    }
}

pub(crate) fn is_symbol_char(c: char) -> bool {
    matches!(
        c,
        '+' | '-'
            | '*'
            | '/'
            | '\\'
            | '^'
            | '<'
            | '>'
            | '='
            | '~'
            | ':'
            | '.'
            | '?'
            | '@'
            | '#'
            | '&'
            | '$'
    )
}

pub(crate) fn is_alnum(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Tokenize `text`, failing on the first lexical error.
pub fn tokenize(text: &str) -> Result<Vec<Token>, TokenizeError> {
    let (tokens, mut errors) = Lexer::new(text).run(false);
    match errors.is_empty() {
        true => Ok(tokens),
        false => Err(errors.remove(0)),
    }
}

/// Tokenize `text`, skipping past lexical errors. Used by the source reader
/// so one bad quote does not hide the rest of a file.
pub fn tokenize_lenient(text: &str) -> (Vec<Token>, Vec<TokenizeError>) {
    Lexer::new(text).run(true)
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    lines: LineIndex,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        let pos = if src.starts_with('\u{feff}') {
            '\u{feff}'.len_utf8()
        } else {
            0
        };
        Lexer {
            src,
            pos,
            lines: LineIndex::new(src),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat_while(&mut self, f: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn token(&self, kind: TokenKind, start: usize, value: TokenValue) -> Token {
        Token {
            kind,
            text: self.src[start..self.pos].to_string(),
            span: self.lines.span(start, self.pos),
            value,
        }
    }

    fn run(mut self, lenient: bool) -> (Vec<Token>, Vec<TokenizeError>) {
        let mut tokens = Vec::new();
        let mut errors = Vec::new();
        loop {
            self.eat_while(char::is_whitespace);
            if self.pos >= self.src.len() {
                break;
            }
            let start = self.pos;
            match self.next_token() {
                Ok(tok) => tokens.push(tok),
                Err(e) => {
                    errors.push(e);
                    if !lenient {
                        break;
                    }
                    // Resume on the line after the offending construct.
                    self.pos = start;
                    self.eat_while(|c| c != '\n');
                }
            }
        }
        (tokens, errors)
    }

    fn next_token(&mut self) -> Result<Token, TokenizeError> {
        let start = self.pos;
        let c = self.bump().expect("caller checked for input");
        let simple = |lx: &Self, kind| Ok(lx.token(kind, start, TokenValue::None));
        match c {
            '%' => {
                self.eat_while(|c| c != '\n');
                simple(self, TokenKind::CommentLine)
            }
            '/' if self.peek() == Some('*') => {
                self.bump();
                match self.src[self.pos..].find("*/") {
                    Some(off) => {
                        self.pos += off + 2;
                        simple(self, TokenKind::CommentBlock)
                    }
                    None => {
                        let span = self.lines.span(start, start + 2);
                        self.pos = self.src.len();
                        Err(TokenizeError::UnterminatedBlockComment(span))
                    }
                }
            }
            '0'..='9' => self.number(start, c),
            '_' => {
                self.eat_while(is_alnum);
                simple(self, TokenKind::Variable)
            }
            c if c.is_uppercase() => {
                self.eat_while(is_alnum);
                simple(self, TokenKind::Variable)
            }
            c if c.is_alphabetic() => {
                self.eat_while(is_alnum);
                let name = self.src[start..self.pos].to_string();
                Ok(self.token(TokenKind::Atom, start, TokenValue::Name(name)))
            }
            '\'' => {
                let name = self.quoted(start, '\'')?;
                Ok(self.token(TokenKind::Atom, start, TokenValue::Name(name)))
            }
            '"' | '`' => {
                let body = self.quoted(start, c)?;
                Ok(self.token(TokenKind::Str, start, TokenValue::Name(body)))
            }
            '(' => simple(self, TokenKind::Open),
            ')' => simple(self, TokenKind::Close),
            '[' => simple(self, TokenKind::OpenList),
            ']' => simple(self, TokenKind::CloseList),
            '{' => simple(self, TokenKind::OpenCurly),
            '}' => simple(self, TokenKind::CloseCurly),
            ',' => simple(self, TokenKind::Comma),
            '|' if self.peek() == Some('|') => {
                self.bump();
                Ok(self.token(TokenKind::Punct, start, TokenValue::Name("||".into())))
            }
            '|' => simple(self, TokenKind::Bar),
            '!' | ';' => Ok(self.token(TokenKind::Punct, start, TokenValue::Name(c.to_string()))),
            c if is_symbol_char(c) => {
                self.eat_while(is_symbol_char);
                let run = &self.src[start..self.pos];
                let at_end = self.peek().is_none_or(|n| n.is_whitespace() || n == '%');
                if run == "." && at_end {
                    simple(self, TokenKind::End)
                } else if at_end && run.len() > 1 && run.bytes().all(|b| b == b'.') {
                    // Elided code such as `head :- ...` ends the clause on
                    // the last dot.
                    self.pos -= 1;
                    let name = self.src[start..self.pos].to_string();
                    Ok(self.token(TokenKind::Punct, start, TokenValue::Name(name)))
                } else {
                    let name = run.to_string();
                    Ok(self.token(TokenKind::Punct, start, TokenValue::Name(name)))
                }
            }
            ch => Err(TokenizeError::IllegalCharacter {
                ch,
                span: self.lines.span(start, self.pos),
            }),
        }
    }

    fn number(&mut self, start: usize, first: char) -> Result<Token, TokenizeError> {
        let bad = |lx: &Self, message: &str| TokenizeError::BadNumber {
            message: message.to_string(),
            span: lx.lines.span(start, lx.pos),
        };
        if first == '0' {
            match self.peek() {
                Some('\'') => {
                    self.bump();
                    let code = match self.bump() {
                        None => return Err(bad(self, "missing character after 0'")),
                        Some('\\') => match self.escape(start)? {
                            Some(ch) => ch as i64,
                            None => return Err(bad(self, "line continuation in character code")),
                        },
                        Some('\'') => {
                            if self.peek() == Some('\'') {
                                self.bump();
                            }
                            '\'' as i64
                        }
                        Some(ch) => ch as i64,
                    };
                    return Ok(self.token(TokenKind::Integer, start, TokenValue::Int(code)));
                }
                Some(r @ ('x' | 'o' | 'b')) => {
                    let radix = match r {
                        'x' => 16,
                        'o' => 8,
                        _ => 2,
                    };
                    if self.peek_at(1).is_some_and(|d| d.is_digit(radix)) {
                        self.bump();
                        let digits_start = self.pos;
                        self.eat_while(|d| d.is_digit(radix));
                        let v = i64::from_str_radix(&self.src[digits_start..self.pos], radix)
                            .map_err(|_| bad(self, "integer too large"))?;
                        return Ok(self.token(TokenKind::Integer, start, TokenValue::Int(v)));
                    }
                }
                _ => {}
            }
        }
        self.eat_while(|d| d.is_ascii_digit());
        let mut is_float = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
            is_float = true;
            self.bump();
            self.eat_while(|d| d.is_ascii_digit());
            if matches!(self.peek(), Some('e' | 'E')) {
                let signed = matches!(self.peek_at(1), Some('+' | '-'));
                let digit_at = if signed { 2 } else { 1 };
                if self.peek_at(digit_at).is_some_and(|d| d.is_ascii_digit()) {
                    for _ in 0..digit_at {
                        self.bump();
                    }
                    self.eat_while(|d| d.is_ascii_digit());
                }
            }
        }
        let text = &self.src[start..self.pos];
        if is_float {
            let v: f64 = text.parse().map_err(|_| bad(self, "malformed float"))?;
            Ok(self.token(TokenKind::Float, start, TokenValue::Float(v)))
        } else {
            let v: i64 = text.parse().map_err(|_| bad(self, "integer too large"))?;
            Ok(self.token(TokenKind::Integer, start, TokenValue::Int(v)))
        }
    }

    /// Reads the body of a quoted item; the opening quote is consumed.
    fn quoted(&mut self, start: usize, quote: char) -> Result<String, TokenizeError> {
        let mut out = String::new();
        loop {
            match self.bump() {
                None => {
                    self.pos = start + quote.len_utf8();
                    return Err(TokenizeError::UnterminatedQuoted(
                        self.lines.span(start, self.pos),
                    ));
                }
                Some(c) if c == quote => {
                    if self.peek() == Some(quote) {
                        self.bump();
                        out.push(quote);
                    } else {
                        return Ok(out);
                    }
                }
                Some('\\') => {
                    if let Some(ch) = self.escape(start)? {
                        out.push(ch);
                    }
                }
                Some(c) => out.push(c),
            }
        }
    }

    /// Decodes an escape sequence after the backslash. `None` for a line
    /// continuation.
    fn escape(&mut self, start: usize) -> Result<Option<char>, TokenizeError> {
        let unterminated =
            |lx: &Self| TokenizeError::UnterminatedQuoted(lx.lines.span(start, start + 1));
        let c = self.bump().ok_or_else(|| unterminated(self))?;
        let ch = match c {
            'n' => '\n',
            't' => '\t',
            'r' => '\r',
            'a' => '\x07',
            'b' => '\x08',
            'f' => '\x0c',
            'v' => '\x0b',
            'e' => '\x1b',
            's' => ' ',
            '0'..='7' => {
                let from = self.pos - 1;
                self.eat_while(|d| d.is_digit(8));
                let code = u32::from_str_radix(&self.src[from..self.pos], 8).unwrap_or(0xFFFD);
                if self.peek() == Some('\\') {
                    self.bump();
                }
                char::from_u32(code).unwrap_or('\u{fffd}')
            }
            'x' => {
                let from = self.pos;
                self.eat_while(|d| d.is_ascii_hexdigit());
                let code = u32::from_str_radix(&self.src[from..self.pos], 16).unwrap_or(0xFFFD);
                if self.peek() == Some('\\') {
                    self.bump();
                }
                char::from_u32(code).unwrap_or('\u{fffd}')
            }
            '\n' => return Ok(None),
            other => other,
        };
        Ok(Some(ch))
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Atom => "atom",
            TokenKind::Variable => "variable",
            TokenKind::Integer => "integer",
            TokenKind::Float => "float",
            TokenKind::Str => "string",
            TokenKind::Punct => "punct",
            TokenKind::Open => "open",
            TokenKind::Close => "close",
            TokenKind::OpenList => "open_list",
            TokenKind::CloseList => "close_list",
            TokenKind::OpenCurly => "open_curly",
            TokenKind::CloseCurly => "close_curly",
            TokenKind::Comma => "comma",
            TokenKind::Bar => "bar",
            TokenKind::End => "end",
            TokenKind::CommentLine => "comment_line",
            TokenKind::CommentBlock => "comment_block",
        };
        f.write_str(s)
    }
}
