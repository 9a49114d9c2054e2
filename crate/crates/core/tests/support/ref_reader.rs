//! A small standalone Prolog term reader used as a test oracle.
//!
//! It shares no code with the library: its own tokenizer, its own copy of
//! the standard operator table and a plain top-down operator precedence
//! parser. Terms are compared through [`RTerm`].

#![allow(dead_code)]

use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum RTerm {
    Atom(String),
    Var(String),
    Int(i64),
    Float(f64),
    Str(String),
    Cmp(String, Vec<RTerm>),
}

impl RTerm {
    pub fn cmp(name: &str, args: Vec<RTerm>) -> RTerm {
        RTerm::Cmp(name.to_string(), args)
    }
}

impl fmt::Display for RTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RTerm::Atom(a) => write!(f, "{a:?}"),
            RTerm::Var(v) => write!(f, "{v}"),
            RTerm::Int(i) => write!(f, "{i}"),
            RTerm::Float(x) => write!(f, "{x:?}"),
            RTerm::Str(s) => write!(f, "str({s:?})"),
            RTerm::Cmp(n, args) => {
                write!(f, "{n:?}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Assoc {
    Xfx,
    Xfy,
    Yfx,
    Fy,
    Fx,
}

type OpMap = HashMap<&'static str, (u32, Assoc)>;

fn standard_ops() -> (OpMap, OpMap) {
    use Assoc::*;
    let infix: &[(u32, Assoc, &[&str])] = &[
        (1200, Xfx, &[":-", "-->"]),
        (1100, Xfy, &[";", "|"]),
        (1050, Xfy, &["->", "*->"]),
        (1000, Xfy, &[","]),
        (990, Xfx, &[":="]),
        (
            700,
            Xfx,
            &[
                "=", "\\=", "==", "\\==", "@<", "@>", "@=<", "@>=", "=..", "is", "=:=", "=\\=",
                "<", ">", "=<", ">=", ">:<", ":<", "as",
            ],
        ),
        (500, Yfx, &["+", "-", "/\\", "\\/", "xor"]),
        (
            400,
            Yfx,
            &[
                "*", "/", "//", "rem", "mod", "div", "<<", ">>", "divmod", "rdiv",
            ],
        ),
        (200, Xfx, &["**"]),
        (200, Xfy, &["^", ":"]),
    ];
    let prefix: &[(u32, Assoc, &[&str])] = &[
        (1200, Fx, &[":-", "?-"]),
        (
            1150,
            Fx,
            &[
                "dynamic",
                "discontiguous",
                "initialization",
                "meta_predicate",
                "module_transparent",
                "multifile",
                "public",
                "thread_local",
                "table",
            ],
        ),
        (900, Fy, &["\\+"]),
        (200, Fy, &["-", "+", "\\", "?", ":", "@", "!"]),
    ];
    let build = |rows: &[(u32, Assoc, &[&'static str])]| {
        let mut m = HashMap::new();
        for (p, a, names) in rows {
            for n in *names {
                m.insert(*n, (*p, *a));
            }
        }
        m
    };
    (build(infix), build(prefix))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    /// Quoted atom; never a functor-less operator.
    QName(String),
    Var(String),
    Int(i64),
    Float(f64),
    Str(String),
    Open,
    /// `(` directly after the previous token.
    OpenCt,
    Close,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Bar,
    End,
}

#[derive(Debug, Clone)]
struct Lexeme {
    tok: Tok,
    /// Layout or comment directly before the token.
    spaced: bool,
}

const SYMBOLS: &str = "+-*/\\^<>=~:.?@#&$";

fn lex(src: &str) -> Result<Vec<Lexeme>, String> {
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    let mut spaced = true;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            spaced = true;
            i += 1;
            continue;
        }
        if c == '%' {
            while i < cs.len() && cs[i] != '\n' {
                i += 1;
            }
            spaced = true;
            continue;
        }
        if c == '/' && cs.get(i + 1) == Some(&'*') {
            i += 2;
            while i + 1 < cs.len() && !(cs[i] == '*' && cs[i + 1] == '/') {
                i += 1;
            }
            i += 2;
            spaced = true;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let mut is_float = false;
            if i + 1 < cs.len() && cs[i] == '.' && cs[i + 1].is_ascii_digit() {
                is_float = true;
                i += 1;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if is_float && i < cs.len() && (cs[i] == 'e' || cs[i] == 'E') {
                let mut j = i + 1;
                if j < cs.len() && (cs[j] == '+' || cs[j] == '-') {
                    j += 1;
                }
                if j < cs.len() && cs[j].is_ascii_digit() {
                    i = j;
                    while i < cs.len() && cs[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = cs[start..i].iter().collect();
            if is_float {
                Tok::Float(text.parse().map_err(|e| format!("{e}"))?)
            } else {
                Tok::Int(text.parse().map_err(|e| format!("{e}"))?)
            }
        } else if c == '_' || c.is_uppercase() {
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            Tok::Var(cs[start..i].iter().collect())
        } else if c.is_alphabetic() {
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            Tok::Name(cs[start..i].iter().collect())
        } else if c == '\'' || c == '"' {
            let (text, next) = quoted(&cs, i)?;
            i = next;
            if c == '\'' {
                Tok::QName(text)
            } else {
                Tok::Str(text)
            }
        } else if c == '.' && cs.get(i + 1).is_none_or(|n| n.is_whitespace() || *n == '%') {
            i += 1;
            Tok::End
        } else if SYMBOLS.contains(c) {
            while i < cs.len() && SYMBOLS.contains(cs[i]) {
                i += 1;
            }
            Tok::Name(cs[start..i].iter().collect())
        } else {
            i += 1;
            match c {
                '(' if !spaced => Tok::OpenCt,
                '(' => Tok::Open,
                ')' => Tok::Close,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                '|' => Tok::Bar,
                '!' | ';' => Tok::Name(c.to_string()),
                _ => return Err(format!("unexpected character {c:?}")),
            }
        };
        out.push(Lexeme { tok, spaced });
        spaced = false;
    }
    Ok(out)
}

fn quoted(cs: &[char], start: usize) -> Result<(String, usize), String> {
    let q = cs[start];
    let mut i = start + 1;
    let mut s = String::new();
    loop {
        let c = *cs.get(i).ok_or("unterminated quoted item")?;
        i += 1;
        if c == q {
            if cs.get(i) == Some(&q) {
                s.push(q);
                i += 1;
                continue;
            }
            return Ok((s, i));
        }
        if c == '\\' {
            let e = *cs.get(i).ok_or("unterminated escape")?;
            i += 1;
            s.push(match e {
                'n' => '\n',
                't' => '\t',
                'r' => '\r',
                'a' => '\u{7}',
                'b' => '\u{8}',
                'f' => '\u{c}',
                'v' => '\u{b}',
                '0' => '\0',
                'e' => '\u{1b}',
                's' => ' ',
                '\n' => continue,
                'x' => {
                    let mut v = 0u32;
                    while cs.get(i).is_some_and(|c| c.is_ascii_hexdigit()) {
                        v = v * 16 + cs[i].to_digit(16).unwrap_or(0);
                        i += 1;
                    }
                    if cs.get(i) == Some(&'\\') {
                        i += 1;
                    }
                    char::from_u32(v).ok_or("bad escape")?
                }
                other => other,
            });
            continue;
        }
        s.push(c);
    }
}

struct P {
    toks: Vec<Lexeme>,
    pos: usize,
    infix: HashMap<&'static str, (u32, Assoc)>,
    prefix: HashMap<&'static str, (u32, Assoc)>,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Lexeme> {
        self.toks.get(self.pos + k)
    }

    fn bump(&mut self) -> Result<Tok, String> {
        let t = self.toks.get(self.pos).ok_or("unexpected end")?.tok.clone();
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, t: Tok) -> Result<(), String> {
        let got = self.bump()?;
        if got == t {
            Ok(())
        } else {
            Err(format!("expected {t:?}, got {got:?}"))
        }
    }

    /// Name of an infix operator at the cursor, if any.
    fn infix_here(&self) -> Option<(String, u32, Assoc)> {
        let name = match self.peek()? {
            Tok::Name(n) => n.as_str(),
            Tok::Comma => ",",
            Tok::Bar => "|",
            _ => return None,
        };
        self.infix
            .get(name)
            .map(|(p, a)| (name.to_string(), *p, *a))
    }

    fn parse(&mut self, max: u32) -> Result<(RTerm, u32), String> {
        let (mut left, mut lp) = self.primary(max)?;
        while let Some((name, p, a)) = self.infix_here() {
            let (lmax, rmax) = match a {
                Assoc::Xfx => (p - 1, p - 1),
                Assoc::Xfy => (p - 1, p),
                Assoc::Yfx => (p, p - 1),
                _ => unreachable!(),
            };
            if p > max || lp > lmax {
                break;
            }
            self.pos += 1;
            let (right, _) = self.parse(rmax)?;
            let name = if name == "|" { ";".to_string() } else { name };
            left = RTerm::Cmp(name, vec![left, right]);
            lp = p;
        }
        Ok((left, lp))
    }

    fn args(&mut self) -> Result<Vec<RTerm>, String> {
        let mut args = vec![self.parse(999)?.0];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            args.push(self.parse(999)?.0);
        }
        self.expect(Tok::Close)?;
        Ok(args)
    }

    /// Whether the token after a prefix operator ends the operand
    /// position, making the operator an atom.
    fn operand_follows(&self) -> bool {
        match self.peek_at(1).map(|l| &l.tok) {
            None
            | Some(Tok::Close | Tok::RBrack | Tok::RBrace | Tok::Comma | Tok::Bar | Tok::End) => {
                false
            }
            Some(Tok::Name(n)) => {
                // `- = x` reads `-` as an atom; `- - a` nests.
                !(self.infix.contains_key(n.as_str()) && !self.prefix.contains_key(n.as_str()))
                    || self
                        .peek_at(2)
                        .is_some_and(|l| matches!(l.tok, Tok::OpenCt))
            }
            _ => true,
        }
    }

    fn primary(&mut self, max: u32) -> Result<(RTerm, u32), String> {
        let tok = self.bump()?;
        Ok(match tok {
            Tok::Int(i) => (RTerm::Int(i), 0),
            Tok::Float(f) => (RTerm::Float(f), 0),
            Tok::Var(v) => (RTerm::Var(v), 0),
            Tok::Str(s) => (RTerm::Str(s), 0),
            Tok::Open | Tok::OpenCt => {
                let (t, _) = self.parse(1200)?;
                self.expect(Tok::Close)?;
                (t, 0)
            }
            Tok::LBrack => {
                if self.peek() == Some(&Tok::RBrack) {
                    self.pos += 1;
                    return Ok((RTerm::Atom("[]".into()), 0));
                }
                let mut items = vec![self.parse(999)?.0];
                while self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    items.push(self.parse(999)?.0);
                }
                let mut tail = RTerm::Atom("[]".into());
                if self.peek() == Some(&Tok::Bar) {
                    self.pos += 1;
                    tail = self.parse(999)?.0;
                }
                self.expect(Tok::RBrack)?;
                let list = items
                    .into_iter()
                    .rev()
                    .fold(tail, |acc, x| RTerm::cmp(".", vec![x, acc]));
                (list, 0)
            }
            Tok::LBrace => {
                if self.peek() == Some(&Tok::RBrace) {
                    self.pos += 1;
                    return Ok((RTerm::Atom("{}".into()), 0));
                }
                let (t, _) = self.parse(1200)?;
                self.expect(Tok::RBrace)?;
                (RTerm::cmp("{}", vec![t]), 0)
            }
            Tok::QName(n) => {
                if self.peek() == Some(&Tok::OpenCt) {
                    self.pos += 1;
                    return Ok((RTerm::Cmp(n, self.args()?), 0));
                }
                (RTerm::Atom(n), 0)
            }
            Tok::Name(n) => {
                if self.peek() == Some(&Tok::OpenCt) {
                    self.pos += 1;
                    return Ok((RTerm::Cmp(n, self.args()?), 0));
                }
                // A minus sign glued to a number is part of the number.
                if n == "-" {
                    if let Some(l) = self.toks.get(self.pos).filter(|l| !l.spaced) {
                        match l.tok {
                            Tok::Int(i) => {
                                self.pos += 1;
                                return Ok((RTerm::Int(-i), 0));
                            }
                            Tok::Float(f) => {
                                self.pos += 1;
                                return Ok((RTerm::Float(-f), 0));
                            }
                            _ => {}
                        }
                    }
                }
                self.pos -= 1;
                let prefix = self.prefix.get(n.as_str()).copied();
                match prefix {
                    Some((p, a)) if self.operand_follows() => {
                        self.pos += 1;
                        let (p, arg_max) = if p > max {
                            (999, 999)
                        } else {
                            (p, if a == Assoc::Fy { p } else { p - 1 })
                        };
                        let (arg, _) = self.parse(arg_max)?;
                        (RTerm::Cmp(n, vec![arg]), p)
                    }
                    _ => {
                        self.pos += 1;
                        (RTerm::Atom(n), 0)
                    }
                }
            }
            other => return Err(format!("unexpected {other:?}")),
        })
    }
}

/// Reads one clause terminated by `.`.
pub fn read(src: &str) -> Result<RTerm, String> {
    let (infix, prefix) = standard_ops();
    let mut p = P {
        toks: lex(src)?,
        pos: 0,
        infix,
        prefix,
    };
    let (t, _) = p.parse(1200)?;
    p.expect(Tok::End)?;
    if p.pos != p.toks.len() {
        return Err("extra input".into());
    }
    Ok(t)
}

#[cfg(test)]
mod self_tests {
    use super::*;

    fn c(n: &str, a: Vec<RTerm>) -> RTerm {
        RTerm::cmp(n, a)
    }

    fn at(n: &str) -> RTerm {
        RTerm::Atom(n.into())
    }

    #[test]
    fn basics() {
        assert_eq!(
            read("1 + 2 * 3.").unwrap(),
            c(
                "+",
                vec![RTerm::Int(1), c("*", vec![RTerm::Int(2), RTerm::Int(3)])]
            )
        );
        assert_eq!(
            read("a - b - c.").unwrap(),
            c("-", vec![c("-", vec![at("a"), at("b")]), at("c")])
        );
        assert_eq!(
            read("X = -1.").unwrap(),
            c("=", vec![RTerm::Var("X".into()), RTerm::Int(-1)])
        );
        assert_eq!(
            read("X = - 1.").unwrap(),
            c(
                "=",
                vec![RTerm::Var("X".into()), c("-", vec![RTerm::Int(1)])]
            )
        );
        assert_eq!(read("f(-, (+)).").unwrap(), c("f", vec![at("-"), at("+")]));
        assert_eq!(
            read("[a|T].").unwrap(),
            c(".", vec![at("a"), RTerm::Var("T".into())])
        );
        assert_eq!(read("'it''s'.").unwrap(), at("it's"));
        assert_eq!(
            read("\\+ a, b.").unwrap(),
            c(",", vec![c("\\+", vec![at("a")]), at("b")])
        );
        assert_eq!(read("- (1).").unwrap(), c("-", vec![RTerm::Int(1)]));
    }
}
