//! Conversion to A-normal form.

use crate::ir::{Block, Region, Term};
use crate::typing::is_atomic_shape;

/// `let x = a; r` with `a` broken into atomic bindings. `r` lives under the
/// binder for `x`.
pub fn let_anf(a: &Term, r: Region) -> Region {
    use Term::*;
    if is_atomic_shape(a) {
        return Region::Let1(a.clone(), Box::new(r));
    }
    match a {
        Op(f, e) => let_anf(e, Region::Let1(Op(f.clone(), Box::new(Var(0))), Box::new(r.shift_vars(1, 1)))),
        Let1(e, body) => let_anf(e, let_anf(body, r.shift_vars(1, 1))),
        Pair(e1, e2) => {
            let inner = Region::Let1(Pair(Box::new(Var(1)), Box::new(Var(0))), Box::new(r.shift_vars(1, 2)));
            let_anf(e1, let_anf(&e2.shift(0, 1), inner))
        }
        Let2(e, body) => {
            let inner = let_anf(&body.shift(2, 1), r.shift_vars(1, 3));
            let_anf(e, Region::Let2(Var(0), Box::new(inner)))
        }
        Inl(e, ann) => let_anf(e, Region::Let1(Inl(Box::new(Var(0)), ann.clone()), Box::new(r.shift_vars(1, 1)))),
        Inr(e, ann) => let_anf(e, Region::Let1(Inr(Box::new(Var(0)), ann.clone()), Box::new(r.shift_vars(1, 1)))),
        Abort(e, ann) => let_anf(e, Region::Let1(Abort(Box::new(Var(0)), ann.clone()), Box::new(r.shift_vars(1, 1)))),
        Case(e, x, y) => {
            let k = r.shift_vars(1, 2);
            let left = let_anf(&x.shift(1, 1), k.clone());
            let right = let_anf(&y.shift(1, 1), k);
            let_anf(e, Region::Case(Var(0), Box::new(left), Box::new(right)))
        }
        Var(_) | Unit => unreachable!("atomic"),
    }
}

/// ANF of a region: every let binds an atomic expression and every branch
/// argument and case scrutinee is a variable.
pub fn to_anf(r: &Region) -> Region {
    match r {
        Region::Br(l, a) => let_anf(a, Region::Br(*l, Term::Var(0))),
        Region::Let1(a, body) => let_anf(a, to_anf(body)),
        Region::Let2(a, body) => let_anf(a, Region::Let2(Term::Var(0), Box::new(to_anf(body).shift_vars(2, 1)))),
        Region::Case(a, s, t) => let_anf(
            a,
            Region::Case(Term::Var(0), Box::new(to_anf(s).shift_vars(1, 1)), Box::new(to_anf(t).shift_vars(1, 1))),
        ),
        Region::Where(head, bs) => Region::Where(
            Box::new(to_anf(head)),
            bs.iter().map(|b| Block { param: b.param.clone(), body: to_anf(&b.body) }).collect(),
        ),
    }
}

/// Inlines every `let x = y` whose bound term is a variable. Used to compare
/// ANF outputs modulo the copies introduced on branch arguments and case
/// scrutinees.
pub fn propagate_copies(r: &Region) -> Region {
    use crate::subst::Subst;
    match r {
        Region::Let1(Term::Var(y), body) => propagate_copies(&Subst::single(Term::Var(*y)).region(body)),
        Region::Br(..) => r.clone(),
        Region::Let1(a, body) => Region::Let1(a.clone(), Box::new(propagate_copies(body))),
        Region::Let2(a, body) => Region::Let2(a.clone(), Box::new(propagate_copies(body))),
        Region::Case(e, s, t) => Region::Case(e.clone(), Box::new(propagate_copies(s)), Box::new(propagate_copies(t))),
        Region::Where(head, bs) => Region::Where(
            Box::new(propagate_copies(head)),
            bs.iter().map(|b| Block { param: b.param.clone(), body: propagate_copies(&b.body) }).collect(),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{rg, tm};

    #[test]
    fn branch_gets_a_binding() {
        assert_eq!(to_anf(&rg::br(0, Term::Var(0))), rg::let1(Term::Var(0), rg::br(0, Term::Var(0))));
    }

    #[test]
    fn atomic_let_is_kept() {
        let r = rg::let1(tm::op("f", Term::Var(0)), rg::br(0, Term::Var(0)));
        assert_eq!(let_anf(&tm::op("f", Term::Var(0)), rg::br(0, Term::Var(0))), r);
    }

    #[test]
    fn nested_application_is_split() {
        // let x = f (g z); br x
        let a = tm::op("f", tm::op("g", Term::Var(0)));
        let out = let_anf(&a, rg::br(0, Term::Var(0)));
        let want = rg::let1(
            tm::op("g", Term::Var(0)),
            rg::let1(tm::op("f", Term::Var(0)), rg::br(0, Term::Var(0))),
        );
        assert_eq!(out, want);
    }
}
