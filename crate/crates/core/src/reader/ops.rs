//! Operator table.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpType {
    Xfx,
    Xfy,
    Yfx,
    Fy,
    Fx,
    Xf,
    Yf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixity {
    Prefix,
    Infix,
    Postfix,
}

impl OpType {
    pub fn fixity(self) -> Fixity {
        match self {
            OpType::Xfx | OpType::Xfy | OpType::Yfx => Fixity::Infix,
            OpType::Fy | OpType::Fx => Fixity::Prefix,
            OpType::Xf | OpType::Yf => Fixity::Postfix,
        }
    }

    /// Maximum priority of the left argument for an operator of `priority`.
    pub fn left_max(self, priority: u16) -> u16 {
        match self {
            OpType::Yfx | OpType::Yf => priority,
            _ => priority - 1,
        }
    }

    /// Maximum priority of the right (or only prefix) argument.
    pub fn right_max(self, priority: u16) -> u16 {
        match self {
            OpType::Xfy | OpType::Fy => priority,
            _ => priority - 1,
        }
    }
}

impl FromStr for OpType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "xfx" => OpType::Xfx,
            "xfy" => OpType::Xfy,
            "yfx" => OpType::Yfx,
            "fy" => OpType::Fy,
            "fx" => OpType::Fx,
            "xf" => OpType::Xf,
            "yf" => OpType::Yf,
            _ => return Err(format!("unknown operator type `{s}`")),
        })
    }
}

impl fmt::Display for OpType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpType::Xfx => "xfx",
            OpType::Xfy => "xfy",
            OpType::Yfx => "yfx",
            OpType::Fy => "fy",
            OpType::Fx => "fx",
            OpType::Xf => "xf",
            OpType::Yf => "yf",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpDef {
    pub priority: u16,
    pub kind: OpType,
}

/// All definitions for one operator name.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpEntries {
    pub prefix: Option<OpDef>,
    pub infix: Option<OpDef>,
    pub postfix: Option<OpDef>,
}

impl OpEntries {
    pub fn is_empty(&self) -> bool {
        self.prefix.is_none() && self.infix.is_none() && self.postfix.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OpError {
    #[error("operator priority {0} outside 1..1200")]
    Priority(u16),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OperatorTable {
    entries: HashMap<String, OpEntries>,
}

const DEFAULT_OPS: &[(u16, &str, &[&str])] = &[
    (1200, "xfx", &[":-", "-->"]),
    (1200, "fx", &[":-", "?-"]),
    (
        1150,
        "fx",
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
    (1100, "xfy", &[";"]),
    (1105, "xfy", &["|"]),
    (1050, "xfy", &["->", "*->"]),
    (1000, "xfy", &[","]),
    (990, "xfx", &[":="]),
    (900, "fy", &["\\+"]),
    (
        700,
        "xfx",
        &[
            "=", "\\=", "==", "\\==", "@<", "@>", "@=<", "@>=", "=..", "is", "=:=", "=\\=", "<",
            ">", "=<", ">=", ">:<", ":<", "as",
        ],
    ),
    (500, "yfx", &["+", "-", "/\\", "\\/", "xor"]),
    (
        400,
        "yfx",
        &[
            "*", "/", "//", "rem", "mod", "div", "<<", ">>", "divmod", "rdiv",
        ],
    ),
    (200, "xfx", &["**"]),
    (200, "xfy", &["^", ":"]),
    (200, "fy", &["-", "+", "\\", "?", ":", "@", "!"]),
];

impl OperatorTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Adds or replaces a definition. Priority 0 removes the entry for that
    /// fixity, as `op/3` does.
    pub fn add(&mut self, priority: u16, kind: OpType, name: &str) -> Result<(), OpError> {
        if priority > 1200 {
            return Err(OpError::Priority(priority));
        }
        let slot = self.entries.entry(name.to_string()).or_default();
        let def = (priority > 0).then_some(OpDef { priority, kind });
        match kind.fixity() {
            Fixity::Prefix => slot.prefix = def,
            Fixity::Infix => slot.infix = def,
            Fixity::Postfix => slot.postfix = def,
        }
        if slot.is_empty() {
            self.entries.remove(name);
        }
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<OpEntries> {
        self.entries.get(name).copied()
    }

    pub fn prefix(&self, name: &str) -> Option<OpDef> {
        self.entries.get(name).and_then(|e| e.prefix)
    }

    pub fn infix(&self, name: &str) -> Option<OpDef> {
        self.entries.get(name).and_then(|e| e.infix)
    }

    pub fn postfix(&self, name: &str) -> Option<OpDef> {
        self.entries.get(name).and_then(|e| e.postfix)
    }

    pub fn is_op(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &OpEntries)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// ISO operators plus the prefix mode markers used in documentation headers.
///
/// `:` is both the module-qualification infix (200 xfy, so `+Arg:Type`
/// groups as `+(Arg:Type)`) and a 200 fy prefix mode.
pub fn default_operator_table() -> OperatorTable {
    let mut table = OperatorTable::empty();
    for (priority, kind, names) in DEFAULT_OPS {
        let kind: OpType = kind.parse().expect("static table");
        for name in *names {
            table.add(*priority, kind, name).expect("static table");
        }
    }
    table
}

/// The default table extended with postfix `//`, for reading DCG mode
/// declarations such as `phrase_of(+X)// is det`.
pub fn header_operator_table() -> OperatorTable {
    let mut table = default_operator_table();
    table.add(200, OpType::Xf, "//").expect("static table");
    table
}
