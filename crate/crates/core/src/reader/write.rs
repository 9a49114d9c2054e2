//! Term output: canonical (operator-free) and operator-aware forms.
//!
//! Both forms read back to a structurally equal term.

use super::ops::OperatorTable;
use super::term::{Term, TermKind};
use super::token::{is_alnum, is_symbol_char};

/// Whether an atom can be written without quotes.
pub fn atom_needs_quotes(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return true;
    };
    if matches!(name, "[]" | "{}" | "!" | ";") {
        return false;
    }
    if first.is_lowercase() {
        return !name.chars().all(is_alnum);
    }
    if name.chars().all(is_symbol_char) {
        // A lone `.` is the end token; `/*` would open a comment.
        return name == "." || name.contains("/*");
    }
    true
}

pub fn quote_atom(name: &str) -> String {
    if atom_needs_quotes(name) {
        quoted(name, '\'')
    } else {
        name.to_string()
    }
}

/// An atom in functor position; `[]` and `{}` are only atoms alone.
fn quote_functor(name: &str) -> String {
    if matches!(name, "[]" | "{}") {
        quoted(name, '\'')
    } else {
        quote_atom(name)
    }
}

fn quoted(s: &str, q: char) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push(q);
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if c == q => {
                out.push('\\');
                out.push(c);
            }
            c if c.is_control() => out.push_str(&format!("\\x{:x}\\", c as u32)),
            c => out.push(c),
        }
    }
    out.push(q);
    out
}

fn float_text(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:?}");
    match s.find('e') {
        Some(i) if !s[..i].contains('.') => format!("{}.0{}", &s[..i], &s[i..]),
        _ => s,
    }
}

/// Writes `f(A, B)` style output for every compound, keeping list and
/// curly-brace syntax.
pub fn write_canonical(t: &Term) -> String {
    let mut out = String::new();
    canonical(t, &mut out);
    out
}

fn canonical(t: &Term, out: &mut String) {
    match &t.kind {
        TermKind::Atom(a) => out.push_str(&quote_atom(a)),
        TermKind::Var(v) => out.push_str(v),
        TermKind::Integer(i) => out.push_str(&i.to_string()),
        TermKind::Float(f) => out.push_str(&float_text(*f)),
        TermKind::Str(s) => out.push_str(&quoted(s, '"')),
        TermKind::Compound(f, args) if f == "." && args.len() == 2 => {
            out.push('[');
            canonical(&args[0], out);
            let mut tail = &args[1];
            loop {
                match &tail.kind {
                    TermKind::Compound(f, a) if f == "." && a.len() == 2 => {
                        out.push(',');
                        canonical(&a[0], out);
                        tail = &a[1];
                    }
                    TermKind::Atom(a) if a == "[]" => break,
                    _ => {
                        out.push('|');
                        canonical(tail, out);
                        break;
                    }
                }
            }
            out.push(']');
        }
        TermKind::Compound(f, args) if f == "{}" && args.len() == 1 => {
            out.push('{');
            canonical(&args[0], out);
            out.push('}');
        }
        TermKind::Compound(f, args) => {
            out.push_str(&quote_functor(f));
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                canonical(a, out);
            }
            out.push(')');
        }
    }
}

/// Writes using operator syntax where the table allows, adding
/// parentheses only where priorities demand.
pub fn write_term(t: &Term, ops: &OperatorTable) -> String {
    let mut w = OpWriter {
        ops,
        out: String::new(),
    };
    w.term(t, 1200);
    w.out
}

/// Like [`write_term`] with a maximum context priority.
pub fn write_term_prec(t: &Term, ops: &OperatorTable, max: u16) -> String {
    let mut w = OpWriter {
        ops,
        out: String::new(),
    };
    w.term(t, max);
    w.out
}

struct OpWriter<'a> {
    ops: &'a OperatorTable,
    out: String,
}

impl OpWriter<'_> {
    fn op_atom(&mut self, name: &str) {
        self.out.push_str(&quote_atom(name));
    }

    /// Separator that keeps two written pieces from fusing into one token.
    fn gap(&mut self, next: &str) {
        let Some(last) = self.out.chars().last() else {
            return;
        };
        let Some(first) = next.chars().next() else {
            return;
        };
        let fuse = (is_alnum(last) && is_alnum(first))
            || (is_symbol_char(last) && is_symbol_char(first))
            || (last == ',' && first == ',');
        if fuse {
            self.out.push(' ');
        }
    }

    fn push_piece(&mut self, piece: &str) {
        self.gap(piece);
        self.out.push_str(piece);
    }

    fn sub(&self, t: &Term, max: u16) -> String {
        let mut w = OpWriter {
            ops: self.ops,
            out: String::new(),
        };
        w.term(t, max);
        w.out
    }

    fn term(&mut self, t: &Term, max: u16) {
        match &t.kind {
            TermKind::Atom(a) if self.ops.is_op(a) && max < 1200 => {
                // Operators as operands are bracketed.
                let s = format!("({})", quote_atom(a));
                self.push_piece(&s);
            }
            TermKind::Integer(i) if *i < 0 => {
                let s = i.to_string();
                self.push_piece(&s);
            }
            TermKind::Compound(f, args) if args.len() == 2 && f != "." => match self.ops.infix(f) {
                Some(d) => {
                    let lhs = self.sub(&args[0], d.kind.left_max(d.priority));
                    let rhs = self.sub(&args[1], d.kind.right_max(d.priority));
                    let alpha = f.chars().next().is_some_and(char::is_alphabetic);
                    let op = if f == "," {
                        ", ".to_string()
                    } else if alpha || !matches!(f.as_str(), ":" | "/" | "//" | "^" | "**") {
                        format!(" {} ", quote_atom(f))
                    } else {
                        quote_atom(f)
                    };
                    let mut s = lhs;
                    let mut tmp = OpWriter {
                        ops: self.ops,
                        out: std::mem::take(&mut s),
                    };
                    tmp.push_piece(&op);
                    tmp.push_piece(&rhs);
                    self.bracket(tmp.out, d.priority > max);
                }
                None => self.functional(t),
            },
            TermKind::Compound(f, args) if args.len() == 1 && f != "{}" => {
                if let Some(d) = self
                    .ops
                    .prefix(f)
                    .filter(|_| !matches!(f.as_str(), "-" | "+") || !is_number(&args[0]))
                {
                    let arg = self.sub(&args[0], d.kind.right_max(d.priority));
                    let mut tmp = OpWriter {
                        ops: self.ops,
                        out: String::new(),
                    };
                    tmp.op_atom(f);
                    // A `(` touching the operator would read as functional notation.
                    // `-1` would read as a number.
                    let signed = f == "-" && arg.starts_with(|c: char| c.is_ascii_digit());
                    if signed
                        || arg.starts_with('(')
                        || f.chars().next().is_some_and(char::is_alphabetic)
                    {
                        tmp.out.push(' ');
                    }
                    tmp.push_piece(&arg);
                    self.bracket(tmp.out, d.priority > max);
                } else if let Some(d) = self.ops.postfix(f) {
                    let arg = self.sub(&args[0], d.kind.left_max(d.priority));
                    let mut tmp = OpWriter {
                        ops: self.ops,
                        out: arg,
                    };
                    let op = quote_atom(f);
                    tmp.push_piece(&op);
                    self.bracket(tmp.out, d.priority > max);
                } else {
                    self.functional(t);
                }
            }
            _ => self.functional(t),
        }
    }

    fn bracket(&mut self, s: String, needed: bool) {
        if needed {
            self.push_piece(&format!("({s})"));
        } else {
            self.push_piece(&s);
        }
    }

    fn functional(&mut self, t: &Term) {
        match &t.kind {
            TermKind::Compound(f, args) if f == "." && args.len() == 2 => {
                let mut s = String::from("[");
                s.push_str(&self.sub(&args[0], 999));
                let mut tail = &args[1];
                loop {
                    match &tail.kind {
                        TermKind::Compound(f, a) if f == "." && a.len() == 2 => {
                            s.push_str(", ");
                            s.push_str(&self.sub(&a[0], 999));
                            tail = &a[1];
                        }
                        TermKind::Atom(a) if a == "[]" => break,
                        _ => {
                            s.push('|');
                            s.push_str(&self.sub(tail, 999));
                            break;
                        }
                    }
                }
                s.push(']');
                self.push_piece(&s);
            }
            TermKind::Compound(f, args) if f == "{}" && args.len() == 1 => {
                let s = format!("{{{}}}", self.sub(&args[0], 1200));
                self.push_piece(&s);
            }
            TermKind::Compound(f, args) => {
                let mut s = quote_functor(f);
                s.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    s.push_str(&self.sub(a, 999));
                }
                s.push(')');
                self.push_piece(&s);
            }
            _ => {
                let s = write_canonical(t);
                self.push_piece(&s);
            }
        }
    }
}

fn is_number(t: &Term) -> bool {
    matches!(t.kind, TermKind::Integer(_) | TermKind::Float(_))
}
