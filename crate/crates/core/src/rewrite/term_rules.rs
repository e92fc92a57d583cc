//! Local rewrites for the term rules.

use super::{Direction, Res, RewriteError, RuleId, RuleInstance};
use crate::ir::{tm, Ctx, Effect, Signature, Term, Ty};
use crate::subst::Subst;
use crate::typing::{check_term, infer_term};

pub(super) fn mismatch(rule: RuleId, msg: &str) -> RewriteError {
    RewriteError::Mismatch { rule, msg: msg.to_string() }
}

pub(super) fn side(rule: RuleId, msg: impl Into<String>) -> RewriteError {
    RewriteError::SideCondition { rule, msg: msg.into() }
}

pub(super) fn param<T: Clone>(rule: RuleId, v: &[T], i: usize, what: &str) -> Res<T> {
    v.get(i).cloned().ok_or_else(|| RewriteError::BadParams { rule, msg: format!("expected {what}") })
}

pub(super) fn pure_ty(sig: &Signature, ctx: &Ctx, t: &Term) -> Option<Ty> {
    infer_term(sig, ctx, sig.bot(), t)
}

fn unshift(rule: RuleId, t: &Term, cutoff: usize, n: usize, what: &str) -> Res<Term> {
    t.unshift(cutoff, n).ok_or_else(|| side(rule, format!("{what} uses a variable the other side does not bind")))
}

fn b(t: Term) -> Box<Term> {
    Box::new(t)
}

pub(super) fn apply(sig: &Signature, ctx: &Ctx, eff: Effect, t: &Term, ty: &Ty, inst: &RuleInstance) -> Res<Term> {
    use RuleId::*;
    use Term::*;
    let rule = inst.rule;
    let fwd = inst.dir == Direction::Forward;
    let p = &inst.params;
    let mm = |m: &str| mismatch(rule, m);
    Ok(match (rule, fwd) {
        (Let1Beta, true) => match t {
            Let1(a, body) => {
                pure_ty(sig, ctx, a).ok_or_else(|| side(rule, "bound term is not pure"))?;
                Subst::single((**a).clone()).term(body)
            }
            _ => return Err(mm("expected `let x = a; b`")),
        },
        (Let1Beta, false) => {
            let a = param(rule, &p.terms, 0, "the bound term")?;
            pure_ty(sig, ctx, &a).ok_or_else(|| side(rule, "bound term is not pure"))?;
            tm::let1(a, t.shift(0, 1))
        }
        (Let1Eta, true) => match t {
            Let1(a, body) if **body == Var(0) => (**a).clone(),
            _ => return Err(mm("expected `let x = a; x`")),
        },
        (Let1Eta, false) => tm::let1(t.clone(), Var(0)),
        (Let1Op, true) => match t {
            Let1(bound, c) => match &**bound {
                Op(f, a) => tm::let1((**a).clone(), tm::let1(tm::op(f, Var(0)), c.shift(1, 1))),
                _ => return Err(mm("expected `let y = f a; c`")),
            },
            _ => return Err(mm("expected `let y = f a; c`")),
        },
        (Let1Op, false) => match t {
            Let1(a, inner) => match &**inner {
                Let1(fx, c) if matches!(&**fx, Op(_, x) if **x == Var(0)) => {
                    let Op(f, _) = &**fx else { unreachable!() };
                    tm::let1(tm::op(f, (**a).clone()), unshift(rule, c, 1, 1, "the body")?)
                }
                _ => return Err(mm("expected `let x = a; let y = f x; c`")),
            },
            _ => return Err(mm("expected `let x = a; let y = f x; c`")),
        },
        (Let1Let1, true) => match t {
            Let1(bound, c) => match &**bound {
                Let1(a, bb) => tm::let1((**a).clone(), tm::let1((**bb).clone(), c.shift(1, 1))),
                _ => return Err(mm("expected `let y = (let x = a; b); c`")),
            },
            _ => return Err(mm("expected `let y = (let x = a; b); c`")),
        },
        (Let1Let1, false) => match t {
            Let1(a, inner) => match &**inner {
                Let1(bb, c) => tm::let1(tm::let1((**a).clone(), (**bb).clone()), unshift(rule, c, 1, 1, "the body")?),
                _ => return Err(mm("expected `let x = a; let y = b; c`")),
            },
            _ => return Err(mm("expected `let x = a; let y = b; c`")),
        },
        (Let1Let2, true) => match t {
            Let1(bound, d) => match &**bound {
                Let2(e, c) => tm::let2((**e).clone(), tm::let1((**c).clone(), d.shift(1, 2))),
                _ => return Err(mm("expected `let z = (let (x, y) = e; c); d`")),
            },
            _ => return Err(mm("expected `let z = (let (x, y) = e; c); d`")),
        },
        (Let1Let2, false) => match t {
            Let2(e, inner) => match &**inner {
                Let1(c, d) => tm::let1(tm::let2((**e).clone(), (**c).clone()), unshift(rule, d, 1, 2, "the body")?),
                _ => return Err(mm("expected `let (x, y) = e; let z = c; d`")),
            },
            _ => return Err(mm("expected `let (x, y) = e; let z = c; d`")),
        },
        (Let1Abort, true) => match t {
            Let1(bound, body) => match &**bound {
                Abort(a, ann) => tm::let1((**a).clone(), tm::let1(Abort(b(Var(0)), ann.clone()), body.shift(1, 1))),
                _ => return Err(mm("expected `let y = abort a; b`")),
            },
            _ => return Err(mm("expected `let y = abort a; b`")),
        },
        (Let1Abort, false) => match t {
            Let1(a, inner) => match &**inner {
                Let1(ab, body) if matches!(&**ab, Abort(x, _) if **x == Var(0)) => {
                    let Abort(_, ann) = &**ab else { unreachable!() };
                    tm::let1(Abort(a.clone(), ann.clone()), unshift(rule, body, 1, 1, "the body")?)
                }
                _ => return Err(mm("expected `let x = a; let y = abort x; b`")),
            },
            _ => return Err(mm("expected `let x = a; let y = abort x; b`")),
        },
        (Let1Case, true) => match t {
            Let1(bound, d) => match &**bound {
                Case(e, l, r) => {
                    let d = d.shift(1, 1);
                    tm::case((**e).clone(), tm::let1((**l).clone(), d.clone()), tm::let1((**r).clone(), d))
                }
                _ => return Err(mm("expected `let z = case e {..}; d`")),
            },
            _ => return Err(mm("expected `let z = case e {..}; d`")),
        },
        (Let1Case, false) => match t {
            Case(e, l, r) => match (&**l, &**r) {
                (Let1(a, d1), Let1(bb, d2)) => {
                    if d1 != d2 {
                        return Err(mm("the two continuations differ"));
                    }
                    let d = unshift(rule, d1, 1, 1, "the continuation")?;
                    tm::let1(tm::case((**e).clone(), (**a).clone(), (**bb).clone()), d)
                }
                _ => return Err(mm("expected `case e { x => let z = a; d, y => let z = b; d }`")),
            },
            _ => return Err(mm("expected a case expression")),
        },
        (Let2Pair, true) => match t {
            Let2(bound, c) => match &**bound {
                Pair(a, bb) => tm::let1((**a).clone(), tm::let1(bb.shift(0, 1), (**c).clone())),
                _ => return Err(mm("expected `let (x, y) = (a, b); c`")),
            },
            _ => return Err(mm("expected `let (x, y) = (a, b); c`")),
        },
        (Let2Pair, false) => match t {
            Let1(a, inner) => match &**inner {
                Let1(bb, c) => tm::let2(tm::pair((**a).clone(), unshift(rule, bb, 0, 1, "the second component")?), (**c).clone()),
                _ => return Err(mm("expected `let x = a; let y = b; c`")),
            },
            _ => return Err(mm("expected `let x = a; let y = b; c`")),
        },
        (Let2Eta, true) => match t {
            Let2(e, body) if **body == tm::pair(Var(1), Var(0)) => (**e).clone(),
            _ => return Err(mm("expected `let (x, y) = e; (x, y)`")),
        },
        (Let2Eta, false) => {
            if ty.as_prod().is_none() {
                return Err(mm("the subject is not of product type"));
            }
            tm::let2(t.clone(), tm::pair(Var(1), Var(0)))
        }
        (Let2Bind, true) => match t {
            Let2(e, c) => tm::let1((**e).clone(), tm::let2(Var(0), c.shift(2, 1))),
            _ => return Err(mm("expected `let (x, y) = e; c`")),
        },
        (Let2Bind, false) => match t {
            Let1(e, inner) => match &**inner {
                Let2(z, c) if **z == Var(0) => tm::let2((**e).clone(), unshift(rule, c, 2, 1, "the body")?),
                _ => return Err(mm("expected `let z = e; let (x, y) = z; c`")),
            },
            _ => return Err(mm("expected `let z = e; let (x, y) = z; c`")),
        },
        (CaseInl, true) | (CaseInr, true) => match t {
            Case(e, l, r) => match (&**e, rule) {
                (Inl(a, _), CaseInl) => tm::let1((**a).clone(), (**l).clone()),
                (Inr(a, _), CaseInr) => tm::let1((**a).clone(), (**r).clone()),
                _ => return Err(mm("the scrutinee is not the matching injection")),
            },
            _ => return Err(mm("expected a case expression")),
        },
        (CaseInl, false) | (CaseInr, false) => match t {
            Let1(a, body) => {
                let ta = infer_term(sig, ctx, eff, a).ok_or_else(|| mm("cannot type the bound term"))?;
                let other = param(rule, &p.terms, 0, "the other arm")?;
                let oty = param(rule, &p.tys, 0, "the other summand's type")?;
                if rule == CaseInl {
                    let s = Ty::sum(ta, oty);
                    tm::case(tm::inl((**a).clone(), Some(s)), (**body).clone(), other)
                } else {
                    let s = Ty::sum(oty, ta);
                    tm::case(tm::inr((**a).clone(), Some(s)), other, (**body).clone())
                }
            }
            _ => return Err(mm("expected `let x = a; c`")),
        },
        (CaseEta, true) => match t {
            Case(e, l, r) if matches!(&**l, Inl(x, _) if **x == Var(0)) && matches!(&**r, Inr(x, _) if **x == Var(0)) => {
                (**e).clone()
            }
            _ => return Err(mm("expected `case e { x => inl x, y => inr y }`")),
        },
        (CaseEta, false) => {
            if ty.as_sum().is_none() {
                return Err(mm("the subject is not of sum type"));
            }
            tm::case(t.clone(), tm::inl(Var(0), Some(ty.clone())), tm::inr(Var(0), Some(ty.clone())))
        }
        (CaseBind, true) => match t {
            Case(e, l, r) => tm::let1((**e).clone(), tm::case(Var(0), l.shift(1, 1), r.shift(1, 1))),
            _ => return Err(mm("expected a case expression")),
        },
        (CaseBind, false) => match t {
            Let1(e, inner) => match &**inner {
                Case(z, l, r) if **z == Var(0) => {
                    tm::case((**e).clone(), unshift(rule, l, 1, 1, "the left arm")?, unshift(rule, r, 1, 1, "the right arm")?)
                }
                _ => return Err(mm("expected `let z = e; case z {..}`")),
            },
            _ => return Err(mm("expected `let z = e; case z {..}`")),
        },
        (Initial, _) => {
            let has_empty = ctx.hyps().iter().any(|h| h.ty == Ty::Empty && h.eff == sig.bot());
            if !has_empty {
                return Err(side(rule, "no pure hypothesis of type 0 in the context"));
            }
            target(sig, ctx, eff, ty, rule, &p.terms, 0)?
        }
        (InitialExpr, _) => {
            let w = param(rule, &p.terms, 0, "a pure witness of type 0")?;
            if !check_term(sig, ctx, sig.bot(), &w, &Ty::Empty) {
                return Err(side(rule, "the witness is not a pure term of type 0"));
            }
            target(sig, ctx, eff, ty, rule, &p.terms, 1)?
        }
        (Terminal, _) => {
            if *ty != Ty::Unit {
                return Err(mm("the subject is not of unit type"));
            }
            if !check_term(sig, ctx, sig.bot(), t, &Ty::Unit) {
                return Err(side(rule, "the subject is not pure"));
            }
            let tgt = param(rule, &p.terms, 0, "the target term")?;
            if !check_term(sig, ctx, sig.bot(), &tgt, &Ty::Unit) {
                return Err(side(rule, "the target is not a pure unit term"));
            }
            tgt
        }
        _ => unreachable!("{rule} is not a term rule"),
    })
}

fn target(sig: &Signature, ctx: &Ctx, eff: Effect, ty: &Ty, rule: RuleId, ts: &[Term], i: usize) -> Res<Term> {
    let tgt = param(rule, ts, i, "the target term")?;
    if !check_term(sig, ctx, eff, &tgt, ty) {
        return Err(side(rule, "the target does not have the subject's type and effect"));
    }
    Ok(tgt)
}
