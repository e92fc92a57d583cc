//! Conversion of arbitrary control flow to sequencing, cases and loops by
//! encoding where-block labels as tagged values dispatched inside a loop.

use super::pack::{inject, packed_labels_ty, unpack_region};
use crate::ir::{Block, Ctx, LabelCtx, Region, Signature, Term, Ty};
use crate::typing::{elaborate_region, infinite_loop, TypeError};

/// Runs `r`, which exits through label 0 with a value of type `a`, then
/// continues with `k` binding that value as variable 0.
pub fn seq(r: Region, a: Ty, k: &Region) -> Region {
    Region::Where(Box::new(r), vec![Block { param: a, body: k.shift_labels(0, 1) }])
}

/// Do-while loop with state of type `a` starting at `e`: `body` binds the
/// state and exits through label 0 with `inl` of a result of type `b` to
/// stop, or `inr` of a new state to continue.
pub fn do_loop(e: Term, a: Ty, b: Ty, body: Region) -> Region {
    let dispatch = Region::Case(
        Term::Var(0),
        Box::new(Region::Br(2, Term::Var(0))),
        Box::new(Region::Br(1, Term::Var(0))),
    );
    let inner = Region::Where(Box::new(body), vec![Block { param: Ty::sum(b, a.clone()), body: dispatch }]);
    Region::Where(Box::new(Region::Br(0, e)), vec![Block { param: a, body: inner }])
}

/// N-ary case on a value of `[arms' types]`: the last arm handles `inr`.
/// Arm `j` sees its payload as variable 0 under `arms.len() - j` binders.
pub fn case_enum(e: Term, arms: &[Region]) -> Region {
    match arms.split_last() {
        None => infinite_loop(),
        Some((last, rest)) => Region::Case(e, Box::new(case_enum(Term::Var(0), rest)), Box::new(last.clone())),
    }
}

/// Reassociation `[L, R] -> [L] + [R]`.
pub fn ua(l: &[Ty], r: &[Ty], e: Term) -> Term {
    let out = Some(Ty::sum(packed_labels_ty(l), packed_labels_ty(r)));
    let Some((a, rest)) = r.split_last() else {
        return Term::Inl(Box::new(e), out);
    };
    let inner_r = Some(Ty::sum(packed_labels_ty(rest), a.clone()));
    let left = Term::Case(
        Box::new(ua(l, rest, Term::Var(0))),
        Box::new(Term::Inl(Box::new(Term::Var(0)), out.clone())),
        Box::new(Term::Inr(Box::new(Term::Inl(Box::new(Term::Var(0)), inner_r.clone())), out.clone())),
    );
    let right = Term::Inr(Box::new(Term::Inr(Box::new(Term::Var(0)), inner_r)), out);
    Term::Case(Box::new(e), Box::new(left), Box::new(right))
}

/// `r` with every exit to `l` redirected to label 0 carrying the packed
/// label and payload. Only label 0 is free in the result.
pub fn topwhile(l: &[Ty], r: &Region) -> Region {
    match r {
        Region::Br(k, a) => Region::Br(0, inject(l, *k, a.clone())),
        Region::Let1(a, body) => Region::Let1(a.clone(), Box::new(topwhile(l, body))),
        Region::Let2(a, body) => Region::Let2(a.clone(), Box::new(topwhile(l, body))),
        Region::Case(e, s, t) => Region::Case(e.clone(), Box::new(topwhile(l, s)), Box::new(topwhile(l, t))),
        Region::Where(head, bs) => {
            let n = bs.len();
            let rs: Vec<Ty> = bs.iter().map(|b| b.param.clone()).collect();
            let mut lr = l.to_vec();
            lr.extend(rs.iter().cloned());
            let tag = packed_labels_ty(&lr);
            let (lt, rt) = (packed_labels_ty(l), packed_labels_ty(&rs));
            let arms: Vec<Region> = bs
                .iter()
                .enumerate()
                .map(|(j, b)| {
                    let t = b.body.shift_vars(1, 3 + (n - 1 - j));
                    seq(topwhile(&lr, &t), tag.clone(), &Region::Br(0, ua(l, &rs, Term::Var(0))))
                })
                .collect();
            let body = case_enum(Term::Var(0), &arms);
            let k = Region::Case(
                ua(l, &rs, Term::Var(0)),
                Box::new(Region::Br(0, Term::Var(0))),
                Box::new(do_loop(Term::Var(0), rt, lt, body)),
            );
            seq(topwhile(&lr, head), tag, &k)
        }
    }
}

/// Structured region denotationally equal to `r`.
pub fn towhile(l: &LabelCtx, r: &Region) -> Region {
    seq(topwhile(&l.0, r), packed_labels_ty(&l.0), &unpack_region(&l.0, Term::Var(0)))
}

/// Elaborates `r` and converts it to structured form.
pub fn to_structured(sig: &Signature, ctx: &Ctx, r: &Region, l: &LabelCtx) -> Result<Region, TypeError> {
    Ok(towhile(l, &elaborate_region(sig, ctx, r, l)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{rg, tm, EffectLattice};
    use crate::typing::{check_region, check_structured, check_term};

    fn sig() -> Signature {
        let mut s = Signature::new(EffectLattice::two_point());
        s.add_base("a", 2).unwrap();
        s
    }

    #[test]
    fn ua_is_typed() {
        let s = sig();
        let l = [Ty::base("a"), Ty::Unit];
        for n in 0..3 {
            let r: Vec<Ty> = [Ty::bool(), Ty::Unit, Ty::base("a")][..n].to_vec();
            let mut lr = l.to_vec();
            lr.extend(r.iter().cloned());
            let c = Ctx::from_hyps(vec![(packed_labels_ty(&lr), s.bot())]);
            let want = Ty::sum(packed_labels_ty(&l), packed_labels_ty(&r));
            assert!(check_term(&s, &c, s.bot(), &ua(&l, &r, tm::var(0)), &want));
        }
    }

    #[test]
    fn loop_and_seq_are_recognized() {
        let s = sig();
        let a = Ty::base("a");
        let c = Ctx::from_hyps(vec![(a.clone(), s.bot())]);
        let l = LabelCtx(vec![a.clone()]);
        let body = rg::br(0, tm::inl(tm::var(0), Some(Ty::sum(a.clone(), a.clone()))));
        let r = do_loop(tm::var(0), a.clone(), a.clone(), body);
        assert!(check_structured(&s, &c, &r, &l));
        let q = seq(rg::br(0, tm::var(0)), a.clone(), &rg::br(0, tm::var(0)));
        assert!(check_structured(&s, &c, &q, &l));
    }

    #[test]
    fn irreducible_loop_becomes_structured() {
        let s = sig();
        let b = Ty::bool();
        let c = Ctx::from_hyps(vec![(b.clone(), s.bot())]);
        let l = LabelCtx(vec![Ty::Unit]);
        let body = |other: usize| rg::case(tm::var(0), rg::br(other, tm::var(1)), rg::br(2, Term::Unit));
        let r = rg::wh(
            rg::case(tm::var(0), rg::br(1, tm::var(1)), rg::br(0, tm::var(1))),
            vec![rg::block(b.clone(), body(0)), rg::block(b, body(1))],
        );
        assert!(check_region(&s, &c, &r, &l));
        let out = to_structured(&s, &c, &r, &l).unwrap();
        assert!(check_structured(&s, &c, &out, &l), "{out:?}");
    }

    #[test]
    fn branch_is_packed() {
        let s = sig();
        let l = LabelCtx(vec![Ty::Unit, Ty::Unit]);
        assert_eq!(topwhile(&l.0, &rg::br(1, Term::Unit)), rg::br(0, inject(&l.0, 1, Term::Unit)));
        let out = to_structured(&s, &Ctx::new(), &rg::br(1, Term::Unit), &l).unwrap();
        assert!(check_structured(&s, &Ctx::new(), &out, &l));
    }
}
