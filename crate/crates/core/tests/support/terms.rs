//! Random terms for reader tests and conversion to and from library terms.

#![allow(dead_code)]

use plscribe::reader::{SourceSpan, Term, TermKind};
use rand::Rng;

use super::ref_reader::RTerm;

pub fn to_core(t: &RTerm) -> Term {
    let kind = match t {
        RTerm::Atom(a) => TermKind::Atom(a.clone()),
        RTerm::Var(v) => TermKind::Var(v.clone()),
        RTerm::Int(i) => TermKind::Integer(*i),
        RTerm::Float(f) => TermKind::Float(*f),
        RTerm::Str(s) => TermKind::Str(s.clone()),
        RTerm::Cmp(n, args) => TermKind::Compound(n.clone(), args.iter().map(to_core).collect()),
    };
    Term::new(kind, SourceSpan::default())
}

pub fn from_core(t: &Term) -> RTerm {
    match &t.kind {
        TermKind::Atom(a) => RTerm::Atom(a.clone()),
        TermKind::Var(v) => RTerm::Var(v.clone()),
        TermKind::Integer(i) => RTerm::Int(*i),
        TermKind::Float(f) => RTerm::Float(*f),
        TermKind::Str(s) => RTerm::Str(s.clone()),
        TermKind::Compound(n, args) => RTerm::Cmp(n.clone(), args.iter().map(from_core).collect()),
    }
}

const ATOMS: &[&str] = &[
    "a",
    "foo",
    "bar_baz",
    "x1",
    "hello world",
    "Abc",
    "don't",
    "[]",
    "{}",
    "+",
    "-",
    "*",
    "is",
    "mod",
    "\\+",
    ";",
    "!",
    "élan",
    "a\nb",
];
const VARS: &[&str] = &["X", "Y", "_G1", "Rest", "_"];
const FUNCTORS: &[&str] = &["f", "g", "point", "odd name", "+", "is", "-", "[]"];
const INFIX: &[&str] = &[
    "+", "-", "*", "/", "=", ":-", "->", ";", ",", "is", "^", "**", ":", "mod", "=..", "<", "//",
    "-->",
];
const PREFIX: &[&str] = &["-", "\\+", "+", "?", "@", ":-", "dynamic"];
const FLOATS: &[f64] = &[0.5, 3.25, 1.0e10, 2.5e-3, 100.0];
const STRINGS: &[&str] = &["", "hi there", "quote\"d", "back\\slash"];

fn pick<'a, R: Rng>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs[rng.gen_range(0..xs.len())]
}

fn leaf<R: Rng>(rng: &mut R) -> RTerm {
    match rng.gen_range(0..6) {
        0 | 1 => RTerm::Atom(pick(rng, ATOMS).to_string()),
        2 => RTerm::Var(pick(rng, VARS).to_string()),
        3 => RTerm::Int(rng.gen_range(-50..1000)),
        4 => RTerm::Float(FLOATS[rng.gen_range(0..FLOATS.len())]),
        _ => RTerm::Str(pick(rng, STRINGS).to_string()),
    }
}

/// A term of at most `depth` levels of nesting.
pub fn random_term<R: Rng>(rng: &mut R, depth: u32) -> RTerm {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    let d = depth - 1;
    match rng.gen_range(0..5) {
        0 => {
            let n = rng.gen_range(1..4);
            RTerm::Cmp(
                pick(rng, FUNCTORS).to_string(),
                (0..n).map(|_| random_term(rng, d)).collect(),
            )
        }
        1 => {
            let n = rng.gen_range(0..4);
            let items: Vec<RTerm> = (0..n).map(|_| random_term(rng, d)).collect();
            let tail = if n > 0 && rng.gen_bool(0.3) {
                RTerm::Var("T".into())
            } else {
                RTerm::Atom("[]".into())
            };
            items
                .into_iter()
                .rev()
                .fold(tail, |acc, x| RTerm::cmp(".", vec![x, acc]))
        }
        2 => RTerm::cmp("{}", vec![random_term(rng, d)]),
        3 => RTerm::Cmp(pick(rng, PREFIX).to_string(), vec![random_term(rng, d)]),
        _ => RTerm::Cmp(
            pick(rng, INFIX).to_string(),
            vec![random_term(rng, d), random_term(rng, d)],
        ),
    }
}
