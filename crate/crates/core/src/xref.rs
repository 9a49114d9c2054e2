//! Cross-referencing and source colouring.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::comment::{classify_comment, CommentConfig};
use crate::reader::{SourceRead, SourceSpan, Term, TermKind, TokenKind};

const BUILTINS: &str = include_str!("../data/builtins.txt");

/// A set of predicate indicators assumed to exist without a definition.
#[derive(Debug, Clone)]
pub struct Builtins {
    set: BTreeSet<String>,
}

impl Builtins {
    /// One `name/arity` per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Self {
        let set = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect();
        Builtins { set }
    }

    pub fn contains(&self, indicator: &str) -> bool {
        self.set.contains(indicator)
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }
}

impl Default for Builtins {
    fn default() -> Self {
        Builtins::parse(BUILTINS)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct XrefReport {
    pub defined: BTreeSet<String>,
    /// Defined indicators in order of first definition.
    pub defined_order: Vec<String>,
    pub called: BTreeSet<String>,
    pub exported: BTreeSet<String>,
    /// Export list in source order.
    pub export_list: Vec<String>,
    pub dynamic_decls: BTreeSet<String>,
    pub module_name: Option<String>,
}

impl XrefReport {
    /// Whether `indicator` has a definition in this file, treating `n//a`
    /// and `n/a+2` as the same predicate.
    pub fn is_defined(&self, indicator: &str) -> bool {
        self.defined.contains(indicator)
            || self.dynamic_decls.contains(indicator)
            || alternate_form(indicator)
                .is_some_and(|alt| self.defined.contains(&alt) || self.dynamic_decls.contains(&alt))
    }
}

fn alternate_form(indicator: &str) -> Option<String> {
    let (name, arity) = split_indicator(indicator)?;
    if let Some(name) = name.strip_suffix('/') {
        Some(format!("{name}/{}", arity + 2))
    } else {
        arity.checked_sub(2).map(|a| format!("{name}//{a}"))
    }
}

/// Splits `name/arity` into `name` and arity; for `name//arity` the name
/// keeps one trailing `/`.
fn split_indicator(indicator: &str) -> Option<(&str, usize)> {
    let (name, arity) = indicator.rsplit_once('/')?;
    Some((name, arity.parse().ok()?))
}

pub fn pred_indicator(name: &str, arity: usize) -> String {
    format!("{name}/{arity}")
}

pub fn dcg_indicator(name: &str, arity: usize) -> String {
    format!("{name}//{arity}")
}

/// Indicator written as a term, e.g. `foo/2` or `foo//1`.
pub fn indicator_of_term(t: &Term) -> Option<String> {
    let (sep, args) = match t.functor()? {
        ("/", args @ [_, _]) => ("/", args),
        ("//", args @ [_, _]) => ("//", args),
        _ => return None,
    };
    let name = args[0].as_atom()?;
    let TermKind::Integer(n) = args[1].kind else {
        return None;
    };
    Some(format!("{name}{sep}{n}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColourClass {
    Comment,
    StructuredComment,
    HeadExported,
    HeadLocal,
    CallDefined,
    CallUndefined,
    Variable,
    SingletonVariable,
    QuotedAtom,
    String,
    Number,
    Operator,
    Directive,
    Plain,
}

impl ColourClass {
    /// CSS class name.
    pub fn css(self) -> &'static str {
        match self {
            ColourClass::Comment => "comment",
            ColourClass::StructuredComment => "structured_comment",
            ColourClass::HeadExported => "head_exported",
            ColourClass::HeadLocal => "head_local",
            ColourClass::CallDefined => "call_defined",
            ColourClass::CallUndefined => "call_undefined",
            ColourClass::Variable => "variable",
            ColourClass::SingletonVariable => "singleton_variable",
            ColourClass::QuotedAtom => "quoted_atom",
            ColourClass::String => "string",
            ColourClass::Number => "number",
            ColourClass::Operator => "operator",
            ColourClass::Directive => "directive",
            ColourClass::Plain => "plain",
        }
    }
}

impl fmt::Display for ColourClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.css())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ColourSpan {
    pub span: SourceSpan,
    pub class: ColourClass,
}

/// A goal or head position found while walking clauses.
#[derive(Debug, Clone)]
struct Site {
    start: usize,
    indicator: String,
    kind: SiteKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SiteKind {
    Head,
    Call,
    Directive,
}

struct Walker {
    report: XrefReport,
    sites: Vec<Site>,
}

pub fn cross_reference(read: &SourceRead) -> XrefReport {
    walk_file(read).report
}

fn walk_file(read: &SourceRead) -> Walker {
    let mut w = Walker {
        report: XrefReport::default(),
        sites: Vec::new(),
    };
    for unit in &read.units {
        if let Some(t) = &unit.term {
            w.clause(t);
        }
    }
    w
}

fn functor_start(t: &Term) -> usize {
    t.functor_span.unwrap_or(t.span).byte_start
}

impl Walker {
    fn define(&mut self, indicator: String, at: &Term) {
        self.sites.push(Site {
            start: functor_start(at),
            indicator: indicator.clone(),
            kind: SiteKind::Head,
        });
        if self.report.defined.insert(indicator.clone()) {
            self.report.defined_order.push(indicator);
        }
    }

    fn call(&mut self, indicator: String, at: &Term) {
        self.sites.push(Site {
            start: functor_start(at),
            indicator: indicator.clone(),
            kind: SiteKind::Call,
        });
        self.report.called.insert(indicator);
    }

    fn clause(&mut self, t: &Term) {
        match t.functor() {
            Some((":-", [body])) => self.directive(body),
            Some((":-", [head, body])) => {
                self.head(head, false);
                self.goal(body, 0);
            }
            Some(("-->", [head, body])) => {
                let head = match head.functor() {
                    Some((",", [h, _pushback])) => h,
                    _ => head,
                };
                self.head(head, true);
                self.dcg_body(body);
            }
            _ => self.head(t, false),
        }
    }

    fn head(&mut self, head: &Term, dcg: bool) {
        let head = match head.functor() {
            Some((":", [_, h])) => h,
            _ => head,
        };
        if let Some((name, args)) = head.functor() {
            let ind = if dcg {
                dcg_indicator(name, args.len())
            } else {
                pred_indicator(name, args.len())
            };
            self.define(ind, head);
        }
    }

    fn directive(&mut self, d: &Term) {
        if let Some((name, args)) = d.functor() {
            self.sites.push(Site {
                start: functor_start(d),
                indicator: pred_indicator(name, args.len()),
                kind: SiteKind::Directive,
            });
        }
        match d.functor() {
            Some(("module", [name, exports, ..])) => {
                self.report.module_name = name.as_atom().map(str::to_string);
                for item in exports.list_items().unwrap_or_default() {
                    if let Some(ind) = indicator_of_term(item) {
                        if self.report.exported.insert(ind.clone()) {
                            self.report.export_list.push(ind);
                        }
                    }
                }
            }
            Some(("dynamic" | "discontiguous" | "multifile" | "table", [specs])) => {
                let dynamic = d.is_functor("dynamic", 1);
                for spec in comma_list(specs) {
                    if let (true, Some(ind)) = (dynamic, indicator_of_term(spec)) {
                        self.report.dynamic_decls.insert(ind);
                    }
                }
            }
            Some(("initialization", [g, ..])) => self.goal(g, 0),
            Some(("use_module" | "ensure_loaded" | "include" | "set_prolog_flag" | "op", _)) => {}
            _ => self.goal(d, 0),
        }
    }

    /// Walks a goal; `extra` arguments are added by an enclosing `call/N`.
    fn goal(&mut self, g: &Term, extra: usize) {
        let Some((name, args)) = g.functor() else {
            return;
        };
        if extra == 0 {
            match (name, args) {
                ("," | ";" | "->" | "*->", [a, b]) => {
                    self.goal(a, 0);
                    self.goal(b, 0);
                    return;
                }
                ("\\+" | "once" | "ignore" | "not", [a]) => {
                    self.call(pred_indicator(name, 1), g);
                    self.goal(a, 0);
                    return;
                }
                (":", [_, inner]) => {
                    self.goal(inner, 0);
                    return;
                }
                ("findall", [_, inner, _])
                | ("findall", [_, inner, _, _])
                | ("aggregate_all", [_, inner, _]) => {
                    self.call(pred_indicator(name, args.len()), g);
                    self.goal(inner, 0);
                    return;
                }
                ("bagof" | "setof", [_, inner, _]) => {
                    self.call(pred_indicator(name, 3), g);
                    let mut inner = inner;
                    while let Some(("^", [_, rest])) = inner.functor() {
                        inner = rest;
                    }
                    self.goal(inner, 0);
                    return;
                }
                ("forall", [a, b]) | ("call_cleanup", [a, b]) => {
                    self.call(pred_indicator(name, 2), g);
                    self.goal(a, 0);
                    self.goal(b, 0);
                    return;
                }
                ("catch", [a, _, b]) => {
                    self.call(pred_indicator(name, 3), g);
                    self.goal(a, 0);
                    self.goal(b, 0);
                    return;
                }
                ("setup_call_cleanup", [a, b, c]) => {
                    self.call(pred_indicator(name, 3), g);
                    for x in [a, b, c] {
                        self.goal(x, 0);
                    }
                    return;
                }
                ("phrase", [body, ..]) => {
                    self.call(pred_indicator(name, args.len()), g);
                    self.dcg_body(body);
                    return;
                }
                _ => {}
            }
            let closure_extra = match (name, args.len()) {
                ("call", n) if n >= 1 => Some(n - 1),
                ("maplist", n) if n >= 2 => Some(n - 1),
                ("foldl", n) if n >= 4 => Some(n - 1),
                ("include" | "exclude", 3) => Some(1),
                ("partition", 4) => Some(1),
                _ => None,
            };
            if let Some(n) = closure_extra {
                self.call(pred_indicator(name, args.len()), g);
                self.goal(&args[0], n);
                return;
            }
        } else if let (":", [_, inner]) = (name, args) {
            self.goal(inner, extra);
            return;
        }
        self.call(pred_indicator(name, args.len() + extra), g);
    }

    fn dcg_body(&mut self, b: &Term) {
        match &b.kind {
            TermKind::Var(_) | TermKind::Str(_) => return,
            TermKind::Atom(a) if a == "[]" || a == "!" => return,
            _ => {}
        }
        if b.list_items().is_some() {
            return;
        }
        let Some((name, args)) = b.functor() else {
            return;
        };
        match (name, args) {
            ("," | ";" | "|" | "->", [x, y]) => {
                self.dcg_body(x);
                self.dcg_body(y);
            }
            ("\\+", [x]) => self.dcg_body(x),
            ("{}", [g]) => self.goal(g, 0),
            (":", [_, x]) => self.dcg_body(x),
            ("call", [g, rest @ ..]) => {
                self.call(dcg_indicator("call", args.len()), b);
                self.goal(g, rest.len() + 2);
            }
            _ => self.call(dcg_indicator(name, args.len()), b),
        }
    }
}

/// Items of a `(a, b, c)` conjunction or a list.
fn comma_list(t: &Term) -> Vec<&Term> {
    if let Some(items) = t.list_items() {
        return items;
    }
    let mut out = Vec::new();
    let mut cur = t;
    while let Some((",", [a, b])) = cur.functor() {
        out.push(a);
        cur = b;
    }
    out.push(cur);
    out
}

/// Colour classes for every token of the file. Comments are coloured per
/// comment record, so merged `%` lines form one span.
pub fn colour_source(
    read: &SourceRead,
    report: &XrefReport,
    builtins: &Builtins,
) -> Vec<ColourSpan> {
    let walker = walk_file(read);
    let mut semantic: HashMap<usize, ColourClass> = HashMap::new();
    for site in &walker.sites {
        let class = match site.kind {
            SiteKind::Head if report.exported.contains(&site.indicator) => {
                ColourClass::HeadExported
            }
            SiteKind::Head => ColourClass::HeadLocal,
            SiteKind::Directive => ColourClass::Directive,
            SiteKind::Call
                if report.is_defined(&site.indicator) || builtins.contains(&site.indicator) =>
            {
                ColourClass::CallDefined
            }
            SiteKind::Call => ColourClass::CallUndefined,
        };
        // The first site wins: a head keeps its class over a call at the
        // same position.
        semantic.entry(site.start).or_insert(class);
    }

    let mut singletons: HashMap<usize, bool> = HashMap::new();
    for unit in &read.units {
        let Some(t) = &unit.term else { continue };
        let mut vars: Vec<(&str, usize)> = Vec::new();
        t.walk(&mut |s| {
            if let TermKind::Var(v) = &s.kind {
                vars.push((v, s.span.byte_start));
            }
        });
        for &(v, start) in &vars {
            let count = vars.iter().filter(|(w, _)| *w == v).count();
            singletons.insert(start, count == 1 && !v.starts_with('_'));
        }
    }

    let cfg = CommentConfig::default();
    let mut comments: Vec<ColourSpan> = read
        .units
        .iter()
        .flat_map(|u| &u.leading_comments)
        .map(|c| ColourSpan {
            span: c.span,
            class: if classify_comment(c, &cfg).is_some() {
                ColourClass::StructuredComment
            } else {
                ColourClass::Comment
            },
        })
        .collect();
    comments.sort_by_key(|c| c.span.byte_start);

    let mut out = Vec::with_capacity(read.tokens.len());
    let mut ci = 0;
    for tok in &read.tokens {
        if tok.kind.is_comment() {
            while ci < comments.len() && comments[ci].span.byte_end <= tok.span.byte_start {
                ci += 1;
            }
            match comments.get(ci) {
                Some(c) if c.span.contains(&tok.span) => {
                    if out.last() != Some(c) {
                        out.push(*c);
                    }
                }
                _ => out.push(ColourSpan {
                    span: tok.span,
                    class: ColourClass::Comment,
                }),
            }
            continue;
        }
        let start = tok.span.byte_start;
        let class = match tok.kind {
            TokenKind::Variable => match singletons.get(&start) {
                Some(true) => ColourClass::SingletonVariable,
                _ => ColourClass::Variable,
            },
            TokenKind::Integer | TokenKind::Float => ColourClass::Number,
            TokenKind::Str => ColourClass::String,
            TokenKind::Atom | TokenKind::Punct => match semantic.get(&start) {
                Some(c) => *c,
                None if tok.text.starts_with('\'') => ColourClass::QuotedAtom,
                None if tok.kind == TokenKind::Punct => ColourClass::Operator,
                None => ColourClass::Plain,
            },
            _ => ColourClass::Plain,
        };
        out.push(ColourSpan {
            span: tok.span,
            class,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reader::read_source;

    const BASE64_SRC: &str = include_str!("../tests/corpus/base64/base64.pl");

    fn xref(src: &str) -> XrefReport {
        cross_reference(&read_source(src))
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn class_at(src: &str, needle: &str) -> ColourClass {
        let read = read_source(src);
        let report = cross_reference(&read);
        let spans = colour_source(&read, &report, &Builtins::default());
        let at = src.find(needle).unwrap();
        spans
            .iter()
            .find(|s| s.span.byte_start == at)
            .unwrap()
            .class
    }

    #[test]
    fn simple_clause() {
        let r = xref("a :- b.");
        assert_eq!(r.defined, set(&["a/0"]));
        assert_eq!(r.called, set(&["b/0"]));
    }

    #[test]
    fn base64_heads() {
        let r = xref(BASE64_SRC);
        assert!(r.defined.contains("base64/2"));
        assert!(r.defined.contains("base64//1"));
    }

    #[test]
    fn meta_calls() {
        assert!(xref("p :- call(q, X).").called.contains("q/1"));
        assert!(xref("p :- maplist(q(a), L).").called.contains("q/2"));
        assert!(xref("p :- findall(X, m:r(X), L).").called.contains("r/1"));
        assert!(xref("p :- setof(X, Y^s(X, Y), L).").called.contains("s/2"));
        assert!(xref("p :- \\+ t, ( u -> v ; w ).")
            .called
            .is_superset(&set(&["t/0", "u/0", "v/0", "w/0"])));
        assert!(xref("p :- call(G).").called.iter().all(|c| c == "call/1"));
    }

    #[test]
    fn dcg_bodies() {
        let r = xref("greeting --> [hello], name, { check }, \"x\", call(more, a).\nname --> [].");
        assert_eq!(r.defined, set(&["greeting//0", "name//0"]));
        assert!(r
            .called
            .is_superset(&set(&["name//0", "check/0", "more/3"])));
        let r = xref("p :- phrase(greeting(X), L).");
        assert!(r.called.contains("greeting//1"));
    }

    #[test]
    fn module_and_dynamic() {
        let r = xref(":- module(m, [a/1, b//2, op(700, xfx, ===)]).\n:- dynamic counter/1.\na(_).");
        assert_eq!(r.module_name.as_deref(), Some("m"));
        assert_eq!(r.export_list, vec!["a/1", "b//2"]);
        assert!(r.is_defined("counter/1"));
    }

    #[test]
    fn dcg_and_plain_forms_match() {
        let r = xref("x --> [].");
        assert!(r.is_defined("x/2"));
        let r = xref("y(_, _).");
        assert!(r.is_defined("y//0"));
    }

    #[test]
    fn classes() {
        let src = ":- module(m, [p/0]).\np :- undefinedpred, q(X, Y, Y), atom(X).\nq(_, _, _).\n";
        assert_eq!(class_at(src, "undefinedpred"), ColourClass::CallUndefined);
        assert_eq!(class_at(src, "q(X"), ColourClass::CallDefined);
        assert_eq!(class_at(src, "atom("), ColourClass::CallDefined);
        assert_eq!(class_at(src, "p :-"), ColourClass::HeadExported);
        assert_eq!(class_at(src, "q(_"), ColourClass::HeadLocal);
        assert_eq!(class_at(src, "X, Y"), ColourClass::Variable);
        assert_eq!(class_at(src, "module"), ColourClass::Directive);
        assert_eq!(class_at("a(X).", "X"), ColourClass::SingletonVariable);
        assert_eq!(
            class_at("a('q', \"s\", 1.5).", "'q'"),
            ColourClass::QuotedAtom
        );
        assert_eq!(class_at("a :- X is 1 + 2.", "+"), ColourClass::Operator);
    }

    #[test]
    fn comment_records_are_single_spans() {
        let src = "%% a is det.\n%\n% Body.\na.\n% plain\n";
        let read = read_source(src);
        let spans = colour_source(&read, &cross_reference(&read), &Builtins::default());
        assert_eq!(spans[0].class, ColourClass::StructuredComment);
        assert_eq!(spans[0].span.byte_end, src.find("\na.").unwrap());
        assert_eq!(spans.last().unwrap().class, ColourClass::Comment);
    }

    #[test]
    fn builtins_table_loads() {
        let b = Builtins::default();
        assert!(b.contains("is/2"));
        assert!(b.contains("format/2"));
        assert!(!b.contains("base64/2"));
    }
}
