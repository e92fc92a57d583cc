//! Executable denotational semantics over concrete iteration models.

mod equal;
mod interp;
mod model;
mod pomset;
mod sigimpl;
mod trace;
mod tso;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ir::{Signature, Ty};

pub use equal::{
    denotation_equal_regions, denotation_equal_terms, enumerate_envs, equiv_regions_dyn, render_env, render_outcomes,
    run_region_dyn, run_term_dyn, ModelKind, ModelParams, OutcomeRecord, Verdict,
};
pub use interp::{denote_region, denote_subst, denote_term, Interp};
pub use model::{option_dagger, powerset_dagger, DaggerExit, Elgot, Obj, OptionModel, PowersetModel, Step};
pub use pomset::{Action, Pomset};
pub use sigimpl::{Builtin, Heap, Machine, SigImpl, StdMachine};
pub use trace::{Events, Monoid, TraceModel, TraceOut};
pub use tso::{
    ide_wrap, is_valid_execution, pflush, run_litmus, tso_fence, tso_par, tso_read, tso_write, Buffer, LitmusOutcome,
    LitmusReport, TsoMachine, TsoModel, TsoSet,
};

/// A first-order runtime value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Unit,
    Pair(Box<Value>, Box<Value>),
    Inl(Box<Value>),
    Inr(Box<Value>),
    /// An element `0..carrier` of the named base type.
    Base(Arc<str>, u64),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn inl(a: Value) -> Value {
        Value::Inl(Box::new(a))
    }

    pub fn inr(a: Value) -> Value {
        Value::Inr(Box::new(a))
    }

    pub fn base(name: &str, n: u64) -> Value {
        Value::Base(Arc::from(name), n)
    }

    pub fn bool(b: bool) -> Value {
        if b {
            Value::inl(Value::Unit)
        } else {
            Value::inr(Value::Unit)
        }
    }

    /// Does this value inhabit `ty` under `sig`?
    pub fn has_type(&self, sig: &Signature, ty: &Ty) -> bool {
        match (self, ty) {
            (Value::Unit, Ty::Unit) => true,
            (Value::Pair(a, b), Ty::Prod(x, y)) => a.has_type(sig, x) && b.has_type(sig, y),
            (Value::Inl(a), Ty::Sum(x, _)) => a.has_type(sig, x),
            (Value::Inr(b), Ty::Sum(_, y)) => b.has_type(sig, y),
            (Value::Base(n, v), Ty::Base(m)) => &**n == m && sig.base(m).is_some_and(|b| *v < b.carrier),
            _ => false,
        }
    }

    pub fn as_base(&self) -> Option<u64> {
        match self {
            Value::Base(_, v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "()"),
            Value::Pair(a, b) => write!(f, "({a}, {b})"),
            Value::Inl(a) => write!(f, "inl {}", Paren(a)),
            Value::Inr(a) => write!(f, "inr {}", Paren(a)),
            Value::Base(_, v) => write!(f, "{v}"),
        }
    }
}

struct Paren<'a>(&'a Value);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Value::Inl(_) | Value::Inr(_) => write!(f, "({})", self.0),
            v => write!(f, "{v}"),
        }
    }
}

/// An exit through label `label` of the ambient label context with a value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome {
    pub label: usize,
    pub value: Value,
}

/// Runtime environment; index 0 of the context is the last element.
pub type Env = Vec<Value>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("iteration budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("loop state escaped the declared domain")]
    DomainEscape,
    #[error("`{instr}` is not supported by the {model} model")]
    Unsupported { instr: String, model: &'static str },
    #[error("no interpretation bound for instruction `{0}`")]
    Unbound(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("type `{0}` has too many values to enumerate")]
    TooLarge(String),
}

/// Upper bound on enumerated values per type.
pub const ENUM_LIMIT: u128 = 1 << 16;

fn count_values(sig: &Signature, ty: &Ty) -> Option<u128> {
    Some(match ty {
        Ty::Unit => 1,
        Ty::Empty => 0,
        Ty::Base(n) => sig.base(n)?.carrier as u128,
        Ty::Prod(a, b) => count_values(sig, a)?.checked_mul(count_values(sig, b)?)?,
        Ty::Sum(a, b) => count_values(sig, a)?.checked_add(count_values(sig, b)?)?,
    })
}

/// All values of `ty`, in a fixed order.
pub fn enumerate_values(sig: &Signature, ty: &Ty) -> Result<Vec<Value>, EvalError> {
    match count_values(sig, ty) {
        Some(n) if n <= ENUM_LIMIT => {}
        _ => return Err(EvalError::TooLarge(ty.to_string())),
    }
    Ok(enum_unchecked(sig, ty))
}

fn enum_unchecked(sig: &Signature, ty: &Ty) -> Vec<Value> {
    match ty {
        Ty::Unit => vec![Value::Unit],
        Ty::Empty => vec![],
        Ty::Base(n) => {
            let c = sig.base(n).map(|b| b.carrier).unwrap_or(0);
            let name: Arc<str> = Arc::from(n.as_str());
            (0..c).map(|v| Value::Base(name.clone(), v)).collect()
        }
        Ty::Prod(a, b) => {
            let xs = enum_unchecked(sig, a);
            let ys = enum_unchecked(sig, b);
            let mut out = Vec::with_capacity(xs.len() * ys.len());
            for x in &xs {
                for y in &ys {
                    out.push(Value::pair(x.clone(), y.clone()));
                }
            }
            out
        }
        Ty::Sum(a, b) => {
            let mut out: Vec<Value> = enum_unchecked(sig, a).into_iter().map(Value::inl).collect();
            out.extend(enum_unchecked(sig, b).into_iter().map(Value::inr));
            out
        }
    }
}
