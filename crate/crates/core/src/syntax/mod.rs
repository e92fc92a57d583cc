//! Textual front end: source units (`.ssa`, `.tso`), rewrite scripts (`.rw`)
//! and a printer whose output parses back to the same syntax tree.

mod lexer;
mod parser;
mod printer;
mod script;

use std::fmt;

use thiserror::Error;

use crate::ir::{Ctx, Effect, LabelCtx, Region, Signature, Term, Ty};
use crate::semantics::{SigImpl, Value};

pub use lexer::Pos;
pub use parser::{parse_region_in, parse_term_in, parse_unit, parse_values};
pub use printer::{print_region, print_term, print_ty, print_unit, Namer};
pub use script::{apply_script, parse_script, scope_at, Script, ScriptError, Step, StepLog};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pos}: {msg}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub msg: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> Self {
        SyntaxError { pos, msg: msg.into() }
    }
}

/// Reserved words; never valid as variable or label names.
pub const KEYWORDS: &[&str] = &[
    "let", "case", "inl", "inr", "abort", "br", "ret", "where", "if", "else", "region", "term", "thread", "effects", "base",
    "instr", "init", "any", "exists", "forall", "forbid", "true",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: Ty,
    pub eff: Effect,
}

/// A named region with its parameters (outermost first) and exit labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionDef {
    pub name: String,
    pub params: Vec<Param>,
    pub exits: Vec<(String, Ty)>,
    pub body: Region,
}

impl RegionDef {
    pub fn ctx(&self) -> Ctx {
        Ctx::from_hyps(self.params.iter().map(|p| (p.ty.clone(), p.eff)).collect())
    }

    pub fn labels(&self) -> LabelCtx {
        LabelCtx(self.exits.iter().map(|e| e.1.clone()).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermDef {
    pub name: String,
    pub params: Vec<Param>,
    pub ty: Ty,
    pub eff: Effect,
    pub body: Term,
}

impl TermDef {
    pub fn ctx(&self) -> Ctx {
        Ctx::from_hyps(self.params.iter().map(|p| (p.ty.clone(), p.eff)).collect())
    }
}

/// A closed litmus thread returning a value of `ty` through `ret`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreadDef {
    pub name: String,
    pub ty: Ty,
    pub body: Region,
}

/// A literal value in a litmus condition; base values are bare numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lit {
    Num(u64),
    Unit,
    Pair(Box<Lit>, Box<Lit>),
    Inl(Box<Lit>),
    Inr(Box<Lit>),
}

impl Lit {
    /// The value this literal denotes at `ty`, if it has that type.
    pub fn to_value(&self, sig: &Signature, ty: &Ty) -> Option<Value> {
        let v = match (self, ty) {
            (Lit::Num(n), Ty::Base(b)) => Value::base(b, *n),
            (Lit::Unit, Ty::Unit) => Value::Unit,
            (Lit::Pair(a, b), Ty::Prod(x, y)) => Value::pair(a.to_value(sig, x)?, b.to_value(sig, y)?),
            (Lit::Inl(a), Ty::Sum(x, _)) => Value::inl(a.to_value(sig, x)?),
            (Lit::Inr(a), Ty::Sum(_, y)) => Value::inr(a.to_value(sig, y)?),
            _ => return None,
        };
        v.has_type(sig, ty).then_some(v)
    }

    pub fn matches(&self, v: &Value) -> bool {
        match (self, v) {
            (Lit::Num(n), Value::Base(_, m)) => n == m,
            (Lit::Unit, Value::Unit) => true,
            (Lit::Pair(a, b), Value::Pair(x, y)) => a.matches(x) && b.matches(y),
            (Lit::Inl(a), Value::Inl(x)) | (Lit::Inr(a), Value::Inr(x)) => a.matches(x),
            _ => false,
        }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lit::Num(n) => write!(f, "{n}"),
            Lit::Unit => write!(f, "()"),
            Lit::Pair(a, b) => write!(f, "({a}, {b})"),
            Lit::Inl(a) => write!(f, "inl {}", LitArg(a)),
            Lit::Inr(a) => write!(f, "inr {}", LitArg(a)),
        }
    }
}

struct LitArg<'a>(&'a Lit);

impl fmt::Display for LitArg<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Lit::Inl(_) | Lit::Inr(_) => write!(f, "({})", self.0),
            l => write!(f, "{l}"),
        }
    }
}

/// A condition over the values returned by litmus threads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cond {
    True,
    Eq(String, Lit),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

impl Cond {
    /// Evaluates against thread names and their returned values.
    pub fn holds(&self, names: &[String], values: &[Value]) -> Result<bool, String> {
        Ok(match self {
            Cond::True => true,
            Cond::Eq(t, lit) => {
                let i = names.iter().position(|n| n == t).ok_or_else(|| format!("unknown thread `{t}`"))?;
                lit.matches(&values[i])
            }
            Cond::And(a, b) => a.holds(names, values)? && b.holds(names, values)?,
            Cond::Or(a, b) => a.holds(names, values)? || b.holds(names, values)?,
        })
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(c: &Cond, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match c {
                Cond::True => write!(f, "true"),
                Cond::Eq(t, l) => write!(f, "{t} = {l}"),
                Cond::And(a, b) => {
                    go(a, 2, f)?;
                    write!(f, " && ")?;
                    go(b, 3, f)
                }
                Cond::Or(a, b) => {
                    if prec > 1 {
                        write!(f, "(")?;
                    }
                    go(a, 1, f)?;
                    write!(f, " || ")?;
                    go(b, 2, f)?;
                    if prec > 1 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, 0, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quant {
    /// Some valid execution satisfies the condition.
    Exists,
    /// Every valid execution does.
    Forall,
    /// No valid execution does.
    Forbid,
}

impl fmt::Display for Quant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quant::Exists => "exists",
            Quant::Forall => "forall",
            Quant::Forbid => "forbid",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Post {
    pub quant: Quant,
    pub cond: Cond,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Region(RegionDef),
    Term(TermDef),
    Thread(ThreadDef),
    /// Initial memory value for litmus runs; `None` lets reads of
    /// never-written locations return any word.
    Init(Option<u64>),
    Post(Post),
}

/// A parsed file: its signature, the builtins bound to its instructions,
/// and its items in source order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceUnit {
    pub sig: Signature,
    pub imp: SigImpl,
    pub items: Vec<Item>,
}

impl SourceUnit {
    pub fn regions(&self) -> impl Iterator<Item = &RegionDef> {
        self.items.iter().filter_map(|i| match i {
            Item::Region(r) => Some(r),
            _ => None,
        })
    }

    pub fn terms(&self) -> impl Iterator<Item = &TermDef> {
        self.items.iter().filter_map(|i| match i {
            Item::Term(t) => Some(t),
            _ => None,
        })
    }

    pub fn threads(&self) -> impl Iterator<Item = &ThreadDef> {
        self.items.iter().filter_map(|i| match i {
            Item::Thread(t) => Some(t),
            _ => None,
        })
    }

    pub fn posts(&self) -> impl Iterator<Item = &Post> {
        self.items.iter().filter_map(|i| match i {
            Item::Post(p) => Some(p),
            _ => None,
        })
    }

    /// The last `init` item, defaulting to memory initialized to zero.
    pub fn init(&self) -> Option<u64> {
        self.items
            .iter()
            .rev()
            .find_map(|i| match i {
                Item::Init(v) => Some(*v),
                _ => None,
            })
            .unwrap_or(Some(0))
    }

    /// The named region, or the first one when `name` is `None`.
    pub fn region(&self, name: Option<&str>) -> Option<&RegionDef> {
        let mut rs = self.regions();
        match name {
            Some(n) => rs.find(|r| r.name == n),
            None => rs.next(),
        }
    }

    pub fn region_mut(&mut self, name: &str) -> Option<&mut RegionDef> {
        self.items.iter_mut().find_map(|i| match i {
            Item::Region(r) if r.name == name => Some(r),
            _ => None,
        })
    }
}
