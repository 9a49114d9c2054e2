//! Formal comment headers: mode declarations and module titles.
//!
//! Grammar:
//!
//! ```text
//! modedef     ::= head ['//'] ['is' determinism]
//! head        ::= functor '(' argspec {',' argspec} ')' | atom
//! argspec     ::= [mode] argname [':' type]
//! mode        ::= '+' | '-' | '?' | ':' | '@' | '!'
//! determinism ::= 'det' | 'semidet' | 'nondet' | 'multi'
//! ```
//!
//! Each header is read as a Prolog term with [`header_operator_table`] and
//! the resulting term is matched against this grammar.

use std::fmt;

use serde::Serialize;

use crate::reader::write::{quote_atom, write_term_prec};
use crate::reader::{
    header_operator_table, read_term_from_str, tokenize, OperatorTable, Term, TermKind, TokenKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    /// `+`: instantiated on entry.
    In,
    /// `-`: output.
    Out,
    /// `?`: either.
    Either,
    /// `:`: meta argument, implies `+`.
    Meta,
    /// `@`: not further instantiated.
    Preserved,
    /// `!`: mutable structure.
    Mutable,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::In,
        Mode::Out,
        Mode::Either,
        Mode::Meta,
        Mode::Preserved,
        Mode::Mutable,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Mode::In => "+",
            Mode::Out => "-",
            Mode::Either => "?",
            Mode::Meta => ":",
            Mode::Preserved => "@",
            Mode::Mutable => "!",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.symbol() == s)
    }

    pub fn description(self) -> &'static str {
        match self {
            Mode::In => "Argument must be instantiated",
            Mode::Out => "Argument must be unbound",
            Mode::Either => "Argument may be bound or unbound",
            Mode::Meta => "Meta argument; implies +",
            Mode::Preserved => "Argument is not further instantiated",
            Mode::Mutable => "Argument contains a mutable structure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Determinism {
    Det,
    Semidet,
    Nondet,
    Multi,
}

impl Determinism {
    pub const ALL: [Determinism; 4] = [
        Determinism::Det,
        Determinism::Semidet,
        Determinism::Nondet,
        Determinism::Multi,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Determinism::Det => "det",
            Determinism::Semidet => "semidet",
            Determinism::Nondet => "nondet",
            Determinism::Multi => "multi",
        }
    }
}

impl fmt::Display for Determinism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArgSpec {
    pub mode: Option<Mode>,
    pub name: String,
    #[serde(serialize_with = "ser_type")]
    pub type_: Option<Term>,
}

fn ser_type<S: serde::Serializer>(t: &Option<Term>, s: S) -> Result<S::Ok, S::Error> {
    match t {
        Some(t) => s.serialize_some(&type_text(t)),
        None => s.serialize_none(),
    }
}

/// Source form of an argument type.
pub fn type_text(t: &Term) -> String {
    write_term_prec(t, &header_operator_table(), 200)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeDecl {
    pub name: String,
    pub arity: usize,
    pub is_dcg: bool,
    pub det: Option<Determinism>,
    pub args: Vec<ArgSpec>,
    /// Header line (0-based, within the header text) this came from.
    pub line_offset: usize,
}

impl ModeDecl {
    pub fn indicator(&self) -> String {
        indicator(self)
    }

    pub fn arg_names(&self) -> impl Iterator<Item = &str> {
        self.args.iter().map(|a| a.name.as_str())
    }

    /// Head without the determinism part, e.g. `foo(+X:atom)//`.
    pub fn head_text(&self) -> String {
        let mut s = quote_atom(&self.name);
        if !self.args.is_empty() {
            s.push('(');
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                if let Some(m) = a.mode {
                    s.push_str(m.symbol());
                }
                s.push_str(&a.name);
                if let Some(t) = &a.type_ {
                    s.push(':');
                    s.push_str(&type_text(t));
                }
            }
            s.push(')');
        }
        if self.is_dcg {
            s.push_str("//");
        }
        s
    }
}

impl fmt::Display for ModeDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.head_text())?;
        if let Some(d) = self.det {
            write!(f, " is {d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleHeader {
    pub title: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FormalHeader {
    Module(ModuleHeader),
    Modes(Vec<ModeDecl>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum HeaderErrorReason {
    NonVariableArgName(String),
    BadDeterminism(String),
    BadMode(String),
    NotAHead(String),
    EmptyModuleTitle,
    Syntax(String),
}

impl fmt::Display for HeaderErrorReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeaderErrorReason::NonVariableArgName(s) => {
                write!(f, "argument name `{s}` is not a variable name")
            }
            HeaderErrorReason::BadDeterminism(s) => write!(
                f,
                "unknown determinism `{s}` (expected det, semidet, nondet or multi)"
            ),
            HeaderErrorReason::BadMode(s) => write!(f, "unknown argument mode `{s}`"),
            HeaderErrorReason::NotAHead(s) => write!(f, "`{s}` is not a predicate head"),
            HeaderErrorReason::EmptyModuleTitle => f.write_str("module header without a title"),
            HeaderErrorReason::Syntax(s) => write!(f, "syntax error: {s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("header line {}: {reason}", .line_offset + 1)]
pub struct HeaderError {
    /// Line within the header text, 0-based.
    pub line_offset: usize,
    pub reason: HeaderErrorReason,
}

pub fn validate_determinism(atom: &str) -> Result<Determinism, HeaderErrorReason> {
    Determinism::ALL
        .into_iter()
        .find(|d| d.as_str() == atom)
        .ok_or_else(|| HeaderErrorReason::BadDeterminism(atom.to_string()))
}

pub fn indicator(md: &ModeDecl) -> String {
    let sep = if md.is_dcg { "//" } else { "/" };
    format!("{}{sep}{}", md.name, md.arity)
}

/// Parses the header of a structured comment. Every header line (or group
/// of lines with open brackets) gives one mode declaration.
pub fn parse_formal_header(
    header_text: &str,
    ops: &OperatorTable,
) -> Result<FormalHeader, HeaderError> {
    if let Some(rest) = header_text.trim_start().strip_prefix("<module>") {
        let title = rest.split_whitespace().collect::<Vec<_>>().join(" ");
        if title.is_empty() {
            return Err(HeaderError {
                line_offset: 0,
                reason: HeaderErrorReason::EmptyModuleTitle,
            });
        }
        return Ok(FormalHeader::Module(ModuleHeader { title }));
    }
    let mut decls = Vec::new();
    let mut pending = String::new();
    let mut start = 0;
    let lines: Vec<&str> = header_text.lines().collect();
    for (i, line) in lines.iter().enumerate() {
        if pending.is_empty() {
            start = i;
            if line.trim().is_empty() {
                continue;
            }
        } else {
            pending.push('\n');
        }
        pending.push_str(line);
        if bracket_depth(&pending) > 0 && i + 1 < lines.len() {
            continue;
        }
        let md = parse_mode_line(&pending, ops).map_err(|reason| HeaderError {
            line_offset: start,
            reason,
        })?;
        decls.push(ModeDecl {
            line_offset: start,
            ..md
        });
        pending.clear();
    }
    if decls.is_empty() {
        return Err(HeaderError {
            line_offset: 0,
            reason: HeaderErrorReason::NotAHead(header_text.trim().to_string()),
        });
    }
    Ok(FormalHeader::Modes(decls))
}

fn bracket_depth(s: &str) -> i32 {
    s.chars().fold(0, |d, c| match c {
        '(' | '[' | '{' => d + 1,
        ')' | ']' | '}' => d - 1,
        _ => d,
    })
}

fn parse_mode_line(text: &str, ops: &OperatorTable) -> Result<ModeDecl, HeaderErrorReason> {
    let text = text.trim();
    let text = text.strip_suffix('.').unwrap_or(text).trim_end();
    check_mode_chars(text)?;
    let term = read_term_from_str(&format!("{text} ."), ops)
        .map_err(|e| HeaderErrorReason::Syntax(e.message))?;

    let (head, det) = match term.functor() {
        Some(("is", [h, d])) => {
            let name = d
                .as_atom()
                .map(str::to_string)
                .unwrap_or_else(|| d.to_string());
            (h, Some(validate_determinism(&name)?))
        }
        _ => (&term, None),
    };
    let (head, is_dcg) = match head.functor() {
        Some(("//", [h])) => (h, true),
        _ => (head, false),
    };
    let (name, args) = match &head.kind {
        TermKind::Atom(a) => (a.clone(), Vec::new()),
        TermKind::Compound(f, args) if is_head_shape(head, f, args.len()) => (
            f.clone(),
            args.iter().map(arg_spec).collect::<Result<Vec<_>, _>>()?,
        ),
        _ => return Err(HeaderErrorReason::NotAHead(head.to_string())),
    };
    Ok(ModeDecl {
        name,
        arity: args.len(),
        is_dcg,
        det,
        args,
        line_offset: 0,
    })
}

/// Infix operator terms and mode-prefixed terms are not heads.
fn is_head_shape(t: &Term, f: &str, arity: usize) -> bool {
    let prefix_form = t
        .functor_span
        .is_none_or(|fs| fs.byte_start == t.span.byte_start);
    prefix_form && !(arity == 1 && Mode::from_symbol(f).is_some())
}

/// Flags a symbol glued to an argument name that is not one of the modes,
/// since such headers usually fail to read at all.
fn check_mode_chars(text: &str) -> Result<(), HeaderErrorReason> {
    let Ok(tokens) = tokenize(text) else {
        return Ok(());
    };
    for w in tokens.windows(3) {
        let opens = matches!(w[0].kind, TokenKind::Open | TokenKind::Comma);
        let glued = w[1].span.byte_end == w[2].span.byte_start;
        let marked = w[1].kind == TokenKind::Punct && w[2].kind == TokenKind::Variable;
        if opens && glued && marked && Mode::from_symbol(&w[1].text).is_none() {
            return Err(HeaderErrorReason::BadMode(w[1].text.clone()));
        }
    }
    Ok(())
}

fn arg_spec(t: &Term) -> Result<ArgSpec, HeaderErrorReason> {
    // A prefix mode applied to `Name` or `Name:Type`.
    let (mode, rest) = match &t.kind {
        TermKind::Compound(f, args) if args.len() == 1 => match Mode::from_symbol(f) {
            Some(m) => (Some(m), &args[0]),
            None => return Err(HeaderErrorReason::BadMode(f.clone())),
        },
        _ => (None, t),
    };
    let (name, type_) = match rest.functor() {
        Some((":", [n, ty])) => (n, Some(ty.clone())),
        _ => (rest, None),
    };
    match name.as_var() {
        Some(v) => Ok(ArgSpec {
            mode,
            name: v.to_string(),
            type_,
        }),
        None => Err(HeaderErrorReason::NonVariableArgName(name.to_string())),
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn type_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            "[a-z][a-z0-9_]{0,6}".prop_map(Term::atom),
            "[A-Z][a-z]{0,3}".prop_map(Term::var),
        ];
        leaf.prop_recursive(2, 6, 3, |inner| {
            ("[a-z]{1,5}", prop::collection::vec(inner, 1..3))
                .prop_map(|(f, a)| Term::compound(f, a))
        })
    }

    fn arg() -> impl Strategy<Value = ArgSpec> {
        (
            prop::option::of(prop::sample::select(Mode::ALL.to_vec())),
            "[A-Z_][A-Za-z0-9_]{0,6}",
            prop::option::of(type_term()),
        )
            .prop_map(|(mode, name, type_)| ArgSpec { mode, name, type_ })
    }

    fn decl() -> impl Strategy<Value = ModeDecl> {
        (
            "[a-z][a-z0-9_]{0,8}",
            prop::collection::vec(arg(), 0..4),
            any::<bool>(),
            prop::option::of(prop::sample::select(Determinism::ALL.to_vec())),
        )
            .prop_filter("not an operator", |(n, ..)| {
                !matches!(
                    n.as_str(),
                    "is" | "rem"
                        | "mod"
                        | "div"
                        | "xor"
                        | "rdiv"
                        | "divmod"
                        | "as"
                        | "dynamic"
                        | "discontiguous"
                        | "initialization"
                        | "meta_predicate"
                        | "module_transparent"
                        | "multifile"
                        | "public"
                        | "thread_local"
                        | "table"
                )
            })
            .prop_map(|(name, args, is_dcg, det)| ModeDecl {
                name,
                arity: args.len(),
                is_dcg,
                det,
                args,
                line_offset: 0,
            })
    }

    proptest! {
        #[test]
        fn printed_headers_reparse(md in decl()) {
            let text = md.to_string();
            let back = parse_formal_header(&text, &header_operator_table());
            prop_assert_eq!(back, Ok(FormalHeader::Modes(vec![md])), "{}", text);
        }
    }

    #[test]
    fn mode_chars_are_exactly_the_six() {
        for c in '!'..='~' {
            let header = format!("f({c}X) is det");
            let accepted = parse_formal_header(&header, &header_operator_table()).is_ok();
            let expected = "+-?:@!".contains(c) || c.is_ascii_uppercase() || c == '_';
            assert_eq!(accepted, expected, "{header}");
        }
    }
}
