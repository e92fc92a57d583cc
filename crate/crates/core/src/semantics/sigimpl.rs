//! Built-in interpretations for instructions and the machine state they act on.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::model::{Elgot, Obj, Res};
use super::{enumerate_values, EvalError, Value};
use crate::ir::{Instr, Signature, Ty};

/// A built-in meaning for an instruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Builtin {
    /// Constant of the codomain's base type, reduced modulo its carrier.
    Const(u64),
    Add,
    Sub,
    Mul,
    Succ,
    /// Comparisons return `1 + 1` with `inl ()` for true.
    Lt,
    Le,
    Eq,
    /// Reinterprets a base value in the codomain's base type.
    Cast,
    Id,
    /// Any value of the codomain.
    Nondet,
    /// No outcome at all.
    Fail,
    /// Emits the named event and returns unit.
    Emit(String),
    /// Emits the argument's printed form and returns unit.
    Print,
    /// Heap store: `(addr, value) -> 1`.
    Set,
    /// Heap load; an empty cell yields any value of the codomain.
    Get,
    /// Stores the argument in some empty cell and returns its address.
    Alloc,
    Free,
    /// Memory-model read of a named location.
    Read(String),
    /// Memory-model write of a named location.
    Write(String),
    Fence,
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Const(n) => write!(f, "const {n}"),
            Builtin::Add => write!(f, "add"),
            Builtin::Sub => write!(f, "sub"),
            Builtin::Mul => write!(f, "mul"),
            Builtin::Succ => write!(f, "succ"),
            Builtin::Lt => write!(f, "lt"),
            Builtin::Le => write!(f, "le"),
            Builtin::Eq => write!(f, "eq"),
            Builtin::Cast => write!(f, "cast"),
            Builtin::Id => write!(f, "id"),
            Builtin::Nondet => write!(f, "nondet"),
            Builtin::Fail => write!(f, "fail"),
            Builtin::Emit(s) => write!(f, "emit {s}"),
            Builtin::Print => write!(f, "print"),
            Builtin::Set => write!(f, "set"),
            Builtin::Get => write!(f, "get"),
            Builtin::Alloc => write!(f, "alloc"),
            Builtin::Free => write!(f, "free"),
            Builtin::Read(x) => write!(f, "read {x}"),
            Builtin::Write(x) => write!(f, "write {x}"),
            Builtin::Fence => write!(f, "fence"),
        }
    }
}

impl FromStr for Builtin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut it = s.split_whitespace();
        let head = it.next().ok_or_else(|| "empty builtin".to_string())?;
        let arg = it.next();
        if it.next().is_some() {
            return Err(format!("too many arguments in builtin `{s}`"));
        }
        let need = |what: &str| arg.map(str::to_string).ok_or_else(|| format!("builtin `{head}` needs {what}"));
        let b = match head {
            "const" => Builtin::Const(need("a number")?.parse().map_err(|e| format!("bad constant: {e}"))?),
            "add" => Builtin::Add,
            "sub" => Builtin::Sub,
            "mul" => Builtin::Mul,
            "succ" => Builtin::Succ,
            "lt" => Builtin::Lt,
            "le" => Builtin::Le,
            "eq" => Builtin::Eq,
            "cast" => Builtin::Cast,
            "id" => Builtin::Id,
            "nondet" => Builtin::Nondet,
            "fail" => Builtin::Fail,
            "emit" => Builtin::Emit(need("an event name")?),
            "print" => Builtin::Print,
            "set" => Builtin::Set,
            "get" => Builtin::Get,
            "alloc" => Builtin::Alloc,
            "free" => Builtin::Free,
            "read" => Builtin::Read(need("a location")?),
            "write" => Builtin::Write(need("a location")?),
            "fence" => Builtin::Fence,
            _ => return Err(format!("unknown builtin `{head}`")),
        };
        let takes_arg = matches!(b, Builtin::Const(_) | Builtin::Emit(_) | Builtin::Read(_) | Builtin::Write(_));
        if !takes_arg && arg.is_some() {
            return Err(format!("builtin `{head}` takes no argument"));
        }
        Ok(b)
    }
}

impl Builtin {
    /// Checks that the builtin makes sense at the instruction's type.
    pub fn check(&self, sig: &Signature, ins: &Instr) -> Result<(), String> {
        let base_of = |t: &Ty| match t {
            Ty::Base(n) => Ok(n.clone()),
            _ => Err(format!("`{}`: expected a base type, found {t}", ins.name)),
        };
        let same = |a: &Ty, b: &Ty| {
            if a == b {
                Ok(())
            } else {
                Err(format!("`{}`: {a} and {b} must agree", ins.name))
            }
        };
        let binop = |t: &Ty| match t {
            Ty::Prod(a, b) => {
                same(a, b)?;
                base_of(a)
            }
            _ => Err(format!("`{}`: expected a pair of base values", ins.name)),
        };
        match self {
            Builtin::Const(_) => base_of(&ins.cod).map(|_| ()),
            Builtin::Add | Builtin::Sub | Builtin::Mul => {
                let b = binop(&ins.dom)?;
                same(&Ty::Base(b), &ins.cod)
            }
            Builtin::Succ => {
                base_of(&ins.dom)?;
                same(&ins.dom, &ins.cod)
            }
            Builtin::Lt | Builtin::Le | Builtin::Eq => {
                binop(&ins.dom)?;
                same(&ins.cod, &Ty::bool())
            }
            Builtin::Cast => {
                base_of(&ins.dom)?;
                base_of(&ins.cod).map(|_| ())
            }
            Builtin::Id => same(&ins.dom, &ins.cod),
            Builtin::Nondet | Builtin::Fail => Ok(()),
            Builtin::Emit(_) | Builtin::Print | Builtin::Free | Builtin::Write(_) => same(&ins.cod, &Ty::Unit),
            Builtin::Set => match &ins.dom {
                Ty::Prod(a, _) => {
                    base_of(a)?;
                    same(&ins.cod, &Ty::Unit)
                }
                _ => Err(format!("`{}`: set takes (address, value)", ins.name)),
            },
            Builtin::Get => base_of(&ins.dom).map(|_| ()),
            Builtin::Alloc => base_of(&ins.cod).map(|_| ()),
            Builtin::Read(_) => same(&ins.dom, &Ty::Unit),
            Builtin::Fence => {
                same(&ins.dom, &Ty::Unit)?;
                same(&ins.cod, &Ty::Unit)
            }
        }
        .and_then(|()| sig.check_ty(&ins.dom).and(sig.check_ty(&ins.cod)).map_err(|e| e.to_string()))
    }
}

/// Binds instruction names to built-in interpretations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SigImpl {
    pub builtins: BTreeMap<String, Builtin>,
}

impl SigImpl {
    pub fn new() -> Self {
        SigImpl::default()
    }

    pub fn bind(&mut self, instr: &str, b: Builtin) -> &mut Self {
        self.builtins.insert(instr.to_string(), b);
        self
    }

    pub fn get(&self, instr: &str) -> Option<&Builtin> {
        self.builtins.get(instr)
    }

    /// Checks every binding against the signature.
    pub fn check(&self, sig: &Signature) -> Result<(), String> {
        for (name, b) in &self.builtins {
            let ins = sig.instr(name).ok_or_else(|| format!("binding for undeclared instruction `{name}`"))?;
            b.check(sig, ins)?;
        }
        Ok(())
    }
}

/// State threaded through evaluation, acted on by instructions.
pub trait Machine<M: Elgot> {
    type W: Obj;

    fn op(&self, model: &M, sig: &Signature, ins: &Instr, b: &Builtin, arg: Value, w: Self::W) -> Res<M::M<(Value, Self::W)>>;
}

/// A heap of base-typed addresses.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Heap {
    pub cells: BTreeMap<u64, Value>,
}

/// The ordinary machine: pure builtins, nondeterminism, events and a heap.
#[derive(Clone, Copy, Debug, Default)]
pub struct StdMachine;

fn carrier(sig: &Signature, t: &Ty) -> Res<(String, u64)> {
    match t {
        Ty::Base(n) => {
            let c = sig.base(n).ok_or_else(|| EvalError::Contract(format!("unknown base type {n}")))?.carrier;
            Ok((n.clone(), c))
        }
        _ => Err(EvalError::Contract(format!("expected a base type, found {t}"))),
    }
}

fn base_arg(v: &Value) -> Res<u64> {
    v.as_base().ok_or_else(|| EvalError::Contract(format!("expected a base value, found {v}")))
}

fn pair_arg(v: &Value) -> Res<(&Value, &Value)> {
    match v {
        Value::Pair(a, b) => Ok((a, b)),
        _ => Err(EvalError::Contract(format!("expected a pair, found {v}"))),
    }
}

/// Evaluates a builtin that ignores machine state. Returns `None` for
/// stateful builtins.
pub(crate) fn pure_builtin<M: Elgot>(model: &M, sig: &Signature, ins: &Instr, b: &Builtin, arg: &Value) -> Res<Option<M::M<Value>>> {
    let word = |n: u128| -> Res<Value> {
        let (name, c) = carrier(sig, &ins.cod)?;
        Ok(Value::base(&name, (n % c as u128) as u64))
    };
    let bin = || -> Res<(u128, u128)> {
        let (a, b) = pair_arg(arg)?;
        Ok((base_arg(a)? as u128, base_arg(b)? as u128))
    };
    let v = match b {
        Builtin::Const(n) => word(*n as u128)?,
        Builtin::Add => {
            let (x, y) = bin()?;
            word(x + y)?
        }
        Builtin::Sub => {
            let (x, y) = bin()?;
            let (_, c) = carrier(sig, &ins.cod)?;
            word(x + c as u128 - y % c as u128)?
        }
        Builtin::Mul => {
            let (x, y) = bin()?;
            word(x * y)?
        }
        Builtin::Succ => word(base_arg(arg)? as u128 + 1)?,
        Builtin::Lt => {
            let (x, y) = bin()?;
            Value::bool(x < y)
        }
        Builtin::Le => {
            let (x, y) = bin()?;
            Value::bool(x <= y)
        }
        Builtin::Eq => {
            let (x, y) = bin()?;
            Value::bool(x == y)
        }
        Builtin::Cast => word(base_arg(arg)? as u128)?,
        Builtin::Id => arg.clone(),
        Builtin::Nondet => return Ok(Some(model.choose(enumerate_values(sig, &ins.cod)?)?)),
        Builtin::Fail => return Ok(Some(model.choose(Vec::new())?)),
        Builtin::Emit(e) => {
            let m = model.emit(e)?;
            return Ok(Some(model.map(m, &mut |()| Value::Unit)));
        }
        Builtin::Print => {
            let m = model.emit(&arg.to_string())?;
            return Ok(Some(model.map(m, &mut |()| Value::Unit)));
        }
        _ => return Ok(None),
    };
    Ok(Some(model.pure(v)))
}

impl<M: Elgot> Machine<M> for StdMachine {
    type W = Heap;

    fn op(&self, model: &M, sig: &Signature, ins: &Instr, b: &Builtin, arg: Value, w: Heap) -> Res<M::M<(Value, Heap)>> {
        if let Some(m) = pure_builtin(model, sig, ins, b, &arg)? {
            return Ok(model.map(m, &mut |v| (v, w.clone())));
        }
        match b {
            Builtin::Set => {
                let (a, v) = pair_arg(&arg)?;
                let mut h = w;
                h.cells.insert(base_arg(a)?, v.clone());
                Ok(model.pure((Value::Unit, h)))
            }
            Builtin::Get => match w.cells.get(&base_arg(&arg)?) {
                Some(v) if v.has_type(sig, &ins.cod) => Ok(model.pure((v.clone(), w))),
                _ => {
                    let vs = enumerate_values(sig, &ins.cod)?;
                    let m = model.choose(vs)?;
                    Ok(model.map(m, &mut |v| (v, w.clone())))
                }
            },
            Builtin::Alloc => {
                let (name, c) = carrier(sig, &ins.cod)?;
                if c as u128 > super::ENUM_LIMIT {
                    return Err(EvalError::TooLarge(name));
                }
                let free: Vec<u64> = (0..c).filter(|a| !w.cells.contains_key(a)).collect();
                let m = model.choose(free)?;
                Ok(model.map(m, &mut |a| {
                    let mut h = w.clone();
                    h.cells.insert(a, arg.clone());
                    (Value::base(&name, a), h)
                }))
            }
            Builtin::Free => {
                let mut h = w;
                h.cells.remove(&base_arg(&arg)?);
                Ok(model.pure((Value::Unit, h)))
            }
            _ => Err(EvalError::Unsupported { instr: ins.name.clone(), model: model.name() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{OptionModel, PowersetModel};

    fn sig() -> Signature {
        let mut s = Signature::default();
        s.add_base("w", 1 << 32).unwrap();
        s.add_base("a", 3).unwrap();
        let ww = Ty::prod(Ty::base("w"), Ty::base("w"));
        s.add_instr("add", ww.clone(), Ty::base("w"), s.bot()).unwrap();
        s.add_instr("mul", ww.clone(), Ty::base("w"), s.bot()).unwrap();
        s.add_instr("sub", ww.clone(), Ty::base("w"), s.bot()).unwrap();
        s.add_instr("lt", ww, Ty::bool(), s.bot()).unwrap();
        s.add_instr("pick", Ty::Unit, Ty::base("a"), s.top()).unwrap();
        s.add_instr("alloc", Ty::base("a"), Ty::base("a"), s.top()).unwrap();
        s
    }

    fn w(n: u64) -> Value {
        Value::base("w", n)
    }

    fn run(b: Builtin, name: &str, arg: Value) -> Option<Value> {
        let s = sig();
        let m = OptionModel::new(10);
        pure_builtin(&m, &s, s.instr(name).unwrap(), &b, &arg).unwrap().unwrap()
    }

    #[test]
    fn arithmetic_wraps() {
        assert_eq!(run(Builtin::Add, "add", Value::pair(w(u32::MAX as u64), w(2))), Some(w(1)));
        assert_eq!(run(Builtin::Mul, "mul", Value::pair(w(1 << 31), w(2))), Some(w(0)));
        assert_eq!(run(Builtin::Sub, "sub", Value::pair(w(1), w(2))), Some(w(u32::MAX as u64)));
        assert_eq!(run(Builtin::Lt, "lt", Value::pair(w(1), w(2))), Some(Value::bool(true)));
    }

    #[test]
    fn parse_and_print() {
        for s in ["const 7", "add", "emit a", "read x", "fence", "alloc"] {
            let b: Builtin = s.parse().unwrap();
            assert_eq!(b.to_string(), s);
        }
        assert!("const".parse::<Builtin>().is_err());
        assert!("add 3".parse::<Builtin>().is_err());
        assert!("frob".parse::<Builtin>().is_err());
    }

    #[test]
    fn alloc_enumerates_empty_cells() {
        let s = sig();
        let m = PowersetModel::new(10);
        let mut h = Heap::default();
        h.cells.insert(1, Value::base("a", 0));
        let out = StdMachine.op(&m, &s, s.instr("alloc").unwrap(), &Builtin::Alloc, Value::base("a", 2), h).unwrap();
        let addrs: Vec<u64> = out.iter().map(|(v, _)| v.as_base().unwrap()).collect();
        assert_eq!(addrs, vec![0, 2]);
    }

    #[test]
    fn nondet_needs_powerset() {
        let s = sig();
        let ins = s.instr("pick").unwrap();
        assert!(pure_builtin(&OptionModel::new(1), &s, ins, &Builtin::Nondet, &Value::Unit).is_err());
        let out = pure_builtin(&PowersetModel::new(1), &s, ins, &Builtin::Nondet, &Value::Unit).unwrap().unwrap();
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn binding_checks() {
        let s = sig();
        let mut imp = SigImpl::new();
        imp.bind("add", Builtin::Add).bind("lt", Builtin::Lt);
        assert!(imp.check(&s).is_ok());
        imp.bind("pick", Builtin::Add);
        assert!(imp.check(&s).is_err());
    }
}
