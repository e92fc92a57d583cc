//! The denotation of terms, regions and substitutions in a concrete model.
//!
//! Regions are evaluated on loop states. A `where` runs its head; an exit to
//! one of its own blocks starts an iteration whose state is the pair
//! (block, argument), with the environment at the `where` captured. Each
//! step runs one block body: an exit to a sibling block continues the loop
//! and an exit past the blocks leaves it. This is the set-level reading of
//! the fixpoint `rfix` composed with the case split over the head's outcome.

use super::model::{Elgot, Res, Step};
use super::sigimpl::{Heap, Machine, SigImpl, StdMachine};
use super::{Env, EvalError, Outcome, Value};
use crate::ir::{Ctx, Region, Signature, Term};
use crate::subst::Subst;

/// An evaluator for a model, a set of builtins and a machine.
pub struct Interp<'a, M: Elgot, Mc: Machine<M>> {
    pub sig: &'a Signature,
    pub imp: &'a SigImpl,
    pub model: &'a M,
    pub machine: &'a Mc,
}

fn with(env: &Env, v: Value) -> Env {
    let mut e = env.clone();
    e.push(v);
    e
}

fn lookup(env: &Env, i: usize) -> Res<Value> {
    if i < env.len() {
        Ok(env[env.len() - 1 - i].clone())
    } else {
        Err(EvalError::Contract(format!("variable {i} out of range in an environment of {}", env.len())))
    }
}

fn split_pair(v: Value) -> Res<(Value, Value)> {
    match v {
        Value::Pair(a, b) => Ok((*a, *b)),
        v => Err(EvalError::Contract(format!("expected a pair, found {v}"))),
    }
}

impl<'a, M: Elgot, Mc: Machine<M>> Interp<'a, M, Mc> {
    pub fn term(&self, env: &Env, t: &Term, w: Mc::W) -> Res<M::M<(Value, Mc::W)>> {
        let m = self.model;
        match t {
            Term::Var(i) => Ok(m.pure((lookup(env, *i)?, w))),
            Term::Unit => Ok(m.pure((Value::Unit, w))),
            Term::Op(f, a) => {
                let ins = self.sig.instr(f).ok_or_else(|| EvalError::Contract(format!("undeclared instruction {f}")))?;
                let b = self.imp.get(f).ok_or_else(|| EvalError::Unbound(f.clone()))?;
                let ma = self.term(env, a, w)?;
                m.bind(ma, &mut |(v, w)| self.machine.op(m, self.sig, ins, b, v, w))
            }
            Term::Let1(a, b) => {
                let ma = self.term(env, a, w)?;
                m.bind(ma, &mut |(v, w)| self.term(&with(env, v), b, w))
            }
            Term::Pair(a, b) => {
                let ma = self.term(env, a, w)?;
                m.bind(ma, &mut |(x, w)| {
                    let mb = self.term(env, b, w)?;
                    Ok(m.map(mb, &mut |(y, w)| (Value::pair(x.clone(), y), w)))
                })
            }
            Term::Let2(a, b) => {
                let ma = self.term(env, a, w)?;
                m.bind(ma, &mut |(v, w)| {
                    let (x, y) = split_pair(v)?;
                    self.term(&with(&with(env, x), y), b, w)
                })
            }
            Term::Inl(a, _) => {
                let ma = self.term(env, a, w)?;
                Ok(m.map(ma, &mut |(v, w)| (Value::inl(v), w)))
            }
            Term::Inr(a, _) => {
                let ma = self.term(env, a, w)?;
                Ok(m.map(ma, &mut |(v, w)| (Value::inr(v), w)))
            }
            Term::Case(e, l, r) => {
                let me = self.term(env, e, w)?;
                m.bind(me, &mut |(v, w)| match v {
                    Value::Inl(x) => self.term(&with(env, *x), l, w),
                    Value::Inr(y) => self.term(&with(env, *y), r, w),
                    v => Err(EvalError::Contract(format!("case on non-sum {v}"))),
                })
            }
            Term::Abort(a, _) => {
                let ma = self.term(env, a, w)?;
                m.bind(ma, &mut |(v, _)| Err(EvalError::Contract(format!("abort reached with {v}"))))
            }
        }
    }

    pub fn region(&self, env: &Env, r: &Region, w: Mc::W) -> Res<M::M<(Outcome, Mc::W)>> {
        let m = self.model;
        match r {
            Region::Br(l, a) => {
                let ma = self.term(env, a, w)?;
                Ok(m.map(ma, &mut |(value, w)| (Outcome { label: *l, value }, w)))
            }
            Region::Let1(a, body) => {
                let ma = self.term(env, a, w)?;
                m.bind(ma, &mut |(v, w)| self.region(&with(env, v), body, w))
            }
            Region::Let2(a, body) => {
                let ma = self.term(env, a, w)?;
                m.bind(ma, &mut |(v, w)| {
                    let (x, y) = split_pair(v)?;
                    self.region(&with(&with(env, x), y), body, w)
                })
            }
            Region::Case(e, l, rr) => {
                let me = self.term(env, e, w)?;
                m.bind(me, &mut |(v, w)| match v {
                    Value::Inl(x) => self.region(&with(env, *x), l, w),
                    Value::Inr(y) => self.region(&with(env, *y), rr, w),
                    v => Err(EvalError::Contract(format!("case on non-sum {v}"))),
                })
            }
            Region::Where(head, blocks) => {
                let n = blocks.len();
                // label j < n names block n-1-j
                let mh = self.region(env, head, w)?;
                m.bind(mh, &mut |(o, w)| {
                    if o.label >= n {
                        return Ok(m.pure((Outcome { label: o.label - n, value: o.value }, w)));
                    }
                    m.dagger(
                        &mut |(j, v, w): (usize, Value, Mc::W)| {
                            let body = &blocks[n - 1 - j].body;
                            let mb = self.region(&with(env, v), body, w)?;
                            Ok(m.map(mb, &mut |(o, w)| {
                                if o.label >= n {
                                    Step::Exit((Outcome { label: o.label - n, value: o.value }, w))
                                } else {
                                    Step::Continue((o.label, o.value, w))
                                }
                            }))
                        },
                        (o.label, o.value, w),
                    )
                })
            }
        }
    }

    /// Evaluates `gamma : env ⇒ Δ`, leftmost entry of `Δ` first.
    pub fn subst(&self, env: &Env, gamma: &Subst, d: &Ctx, w: Mc::W) -> Res<M::M<(Env, Mc::W)>> {
        self.subst_from(env, gamma, d.len(), Vec::new(), w)
    }

    fn subst_from(&self, env: &Env, gamma: &Subst, k: usize, acc: Env, w: Mc::W) -> Res<M::M<(Env, Mc::W)>> {
        if k == 0 {
            return Ok(self.model.pure((acc, w)));
        }
        let mt = self.term(env, &gamma.get(k - 1), w)?;
        self.model.bind(mt, &mut |(v, w)| self.subst_from(env, gamma, k - 1, with(&acc, v), w))
    }
}

/// `⟦t⟧` at `env` with the standard machine and an empty heap.
pub fn denote_term<M: Elgot>(model: &M, sig: &Signature, imp: &SigImpl, env: &Env, t: &Term) -> Res<M::M<Value>> {
    let i = Interp { sig, imp, model, machine: &StdMachine };
    let r = i.term(env, t, Heap::default())?;
    Ok(model.map(r, &mut |(v, _)| v))
}

/// `⟦r⟧` at `env` with the standard machine and an empty heap.
pub fn denote_region<M: Elgot>(model: &M, sig: &Signature, imp: &SigImpl, env: &Env, r: &Region) -> Res<M::M<Outcome>> {
    let i = Interp { sig, imp, model, machine: &StdMachine };
    let out = i.region(env, r, Heap::default())?;
    Ok(model.map(out, &mut |(o, _)| o))
}

/// `⟦γ⟧` at `env` with the standard machine and an empty heap.
pub fn denote_subst<M: Elgot>(
    model: &M,
    sig: &Signature,
    imp: &SigImpl,
    env: &Env,
    gamma: &Subst,
    d: &Ctx,
) -> Res<M::M<Env>> {
    let i = Interp { sig, imp, model, machine: &StdMachine };
    let out = i.subst(env, gamma, d, Heap::default())?;
    Ok(model.map(out, &mut |(e, _)| e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{rg, tm, Ty};
    use crate::semantics::{Builtin, Events, OptionModel, PowersetModel, TraceModel, TraceOut};
    use crate::typing::infinite_loop;
    use std::collections::BTreeSet;

    fn empty() -> (Signature, SigImpl) {
        (Signature::default(), SigImpl::new())
    }

    #[test]
    fn variables_and_case() {
        let (s, i) = empty();
        let m = OptionModel::new(10);
        let v = Value::bool(true);
        assert_eq!(denote_term(&m, &s, &i, &vec![v.clone()], &tm::var(0)).unwrap(), Some(v.clone()));
        let not = tm::case(tm::var(0), tm::inr(Term::Unit, None), tm::inl(Term::Unit, None));
        assert_eq!(denote_term(&m, &s, &i, &vec![v], &not).unwrap(), Some(Value::bool(false)));
    }

    #[test]
    fn branch_and_divergence() {
        let (s, i) = empty();
        let m = OptionModel::new(1000);
        assert_eq!(
            denote_region(&m, &s, &i, &vec![], &rg::br(0, Term::Unit)).unwrap(),
            Some(Outcome { label: 0, value: Value::Unit })
        );
        assert_eq!(denote_region(&m, &s, &i, &vec![], &infinite_loop()).unwrap(), None);
        assert!(m.fuel_exhausted.get());
        let p = PowersetModel::new(1000);
        assert!(denote_region(&p, &s, &i, &vec![], &infinite_loop()).unwrap().is_empty());
    }

    #[test]
    fn printing_order_is_observable() {
        let mut s = Signature::default();
        s.add_instr("print_a", Ty::Unit, Ty::Unit, s.top()).unwrap();
        s.add_instr("print_b", Ty::Unit, Ty::Unit, s.top()).unwrap();
        let mut i = SigImpl::new();
        i.bind("print_a", Builtin::Emit("a".into())).bind("print_b", Builtin::Emit("b".into()));
        let m = TraceModel::<Events>::new(100, 8);
        let t = tm::let1(tm::op("print_a", Term::Unit), tm::op("print_b", Term::Unit));
        let r = denote_term(&m, &s, &i, &vec![], &t).unwrap();
        let ab = Events(vec!["a".into(), "b".into()]);
        assert_eq!(r, BTreeSet::from([TraceOut::Done(Value::Unit, ab)]));
    }

    #[test]
    fn where_counts_down() {
        // where br k (x) { k(y): case lt(0, y) { br k (y - 1) | br 0 () } }
        let mut s = Signature::default();
        s.add_base("w", 8).unwrap();
        let ww = Ty::prod(Ty::base("w"), Ty::base("w"));
        s.add_instr("sub", ww.clone(), Ty::base("w"), s.bot()).unwrap();
        s.add_instr("lt", ww, Ty::bool(), s.bot()).unwrap();
        s.add_instr("zero", Ty::Unit, Ty::base("w"), s.bot()).unwrap();
        s.add_instr("one", Ty::Unit, Ty::base("w"), s.bot()).unwrap();
        let mut i = SigImpl::new();
        i.bind("sub", Builtin::Sub).bind("lt", Builtin::Lt).bind("zero", Builtin::Const(0)).bind("one", Builtin::Const(1));
        let test = tm::op("lt", tm::pair(tm::op("zero", Term::Unit), tm::var(0)));
        let dec = tm::op("sub", tm::pair(tm::var(1), tm::op("one", Term::Unit)));
        let body = rg::case(test, rg::br(0, dec), rg::br(1, tm::var(1)));
        let r = rg::wh(rg::br(0, tm::var(0)), vec![rg::block(Ty::base("w"), body)]);
        let m = OptionModel::new(64);
        let out = denote_region(&m, &s, &i, &vec![Value::base("w", 5)], &r).unwrap();
        assert_eq!(out, Some(Outcome { label: 0, value: Value::base("w", 0) }));
    }

    #[test]
    fn substitution_runs_left_to_right() {
        let (s, i) = empty();
        let m = OptionModel::new(10);
        let env = vec![Value::bool(true), Value::Unit];
        let d = Ctx::new();
        assert_eq!(denote_subst(&m, &s, &i, &env, &Subst::new(vec![], 0), &d).unwrap(), Some(vec![]));
        let mut d2 = Ctx::new();
        d2.push(Ty::bool(), s.bot());
        d2.push(Ty::Unit, s.bot());
        assert_eq!(denote_subst(&m, &s, &i, &env, &Subst::identity(), &d2).unwrap(), Some(env.clone()));
        let swap = Subst::new(vec![tm::var(1), tm::var(0)], 2);
        assert_eq!(denote_subst(&m, &s, &i, &env, &swap, &d2).unwrap(), Some(vec![Value::Unit, Value::bool(true)]));
    }
}
