use std::fmt;

use super::SourceSpan;

#[derive(Debug, Clone)]
pub enum TermKind {
    Atom(String),
    Var(String),
    Integer(i64),
    Float(f64),
    Str(String),
    Compound(String, Vec<Term>),
}

/// A term with its source position.
///
/// Equality is structural: spans are ignored, so a term read from two
/// differently laid out sources compares equal.
#[derive(Debug, Clone)]
pub struct Term {
    pub kind: TermKind,
    pub span: SourceSpan,
    /// Position of the principal functor's token (the name in `f(..)`, the
    /// operator in `a + b`). `None` for list cells and synthesized terms.
    pub functor_span: Option<SourceSpan>,
}

impl PartialEq for TermKind {
    fn eq(&self, other: &Self) -> bool {
        use TermKind::*;
        match (self, other) {
            (Atom(a), Atom(b)) | (Var(a), Var(b)) | (Str(a), Str(b)) => a == b,
            (Integer(a), Integer(b)) => a == b,
            (Float(a), Float(b)) => a.to_bits() == b.to_bits(),
            (Compound(f, xs), Compound(g, ys)) => f == g && xs == ys,
            _ => false,
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Term {
    pub fn new(kind: TermKind, span: SourceSpan) -> Self {
        Term {
            kind,
            span,
            functor_span: None,
        }
    }

    pub fn atom(name: impl Into<String>) -> Self {
        Term::new(TermKind::Atom(name.into()), SourceSpan::default())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::new(TermKind::Var(name.into()), SourceSpan::default())
    }

    pub fn int(v: i64) -> Self {
        Term::new(TermKind::Integer(v), SourceSpan::default())
    }

    pub fn compound(name: impl Into<String>, args: Vec<Term>) -> Self {
        assert!(
            !args.is_empty(),
            "compound terms need at least one argument"
        );
        Term::new(TermKind::Compound(name.into(), args), SourceSpan::default())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match &self.kind {
            TermKind::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match &self.kind {
            TermKind::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Name and arguments; atoms count as arity 0.
    pub fn functor(&self) -> Option<(&str, &[Term])> {
        match &self.kind {
            TermKind::Atom(a) => Some((a, &[])),
            TermKind::Compound(f, args) => Some((f, args)),
            _ => None,
        }
    }

    pub fn is_callable(&self) -> bool {
        self.functor().is_some()
    }

    /// `name(A1, .., An)` with exactly `arity` arguments.
    pub fn is_functor(&self, name: &str, arity: usize) -> bool {
        matches!(self.functor(), Some((f, args)) if f == name && args.len() == arity)
    }

    pub fn args(&self) -> &[Term] {
        match &self.kind {
            TermKind::Compound(_, args) => args,
            _ => &[],
        }
    }

    /// Elements of a proper list, `None` for partial or non-lists.
    pub fn list_items(&self) -> Option<Vec<&Term>> {
        let mut items = Vec::new();
        let mut cur = self;
        loop {
            match &cur.kind {
                TermKind::Atom(a) if a == "[]" => return Some(items),
                TermKind::Compound(f, args) if f == "." && args.len() == 2 => {
                    items.push(&args[0]);
                    cur = &args[1];
                }
                _ => return None,
            }
        }
    }

    /// Pre-order walk over this term and all subterms.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        for a in self.args() {
            a.walk(f);
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::write::write_canonical(self))
    }
}
