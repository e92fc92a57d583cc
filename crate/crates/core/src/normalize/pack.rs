//! Records of variables and enums of labels: packing a context into one
//! product-typed variable and a label context into one sum-typed label.

use crate::ir::{Ctx, LabelCtx, Region, Term, Ty};
use crate::subst::{LabelSubst, Subst};
use crate::typing::infinite_loop;

/// `[Γ]`: the left-nested product of the context's types, `1` when empty.
pub fn packed_ctx_ty(ctx: &Ctx) -> Ty {
    ctx.hyps().iter().fold(Ty::Unit, |acc, h| Ty::prod(acc, h.ty.clone()))
}

/// `[L]`: the left-nested sum of the label types, `0` when empty.
pub fn packed_labels_ty(l: &[Ty]) -> Ty {
    l.iter().fold(Ty::Empty, |acc, t| Ty::sum(acc, t.clone()))
}

/// The record of every variable in a context of length `n`.
pub fn packed(n: usize) -> Term {
    (0..n).rev().fold(Term::Unit, |acc, i| Term::Pair(Box::new(acc), Box::new(Term::Var(i))))
}

fn let2(e: Term, body: Term) -> Term {
    Term::Let2(Box::new(e), Box::new(body))
}

/// Projection of variable `i` (de Bruijn) out of a record of the context.
pub fn project(i: usize, e: Term) -> Term {
    if i == 0 {
        let2(e, Term::Var(0))
    } else {
        project(i - 1, let2(e, Term::Var(1)))
    }
}

/// Injection of `e` at label `k` (de Bruijn) into `[l]`.
pub fn inject(l: &[Ty], k: usize, e: Term) -> Term {
    let n = l.len();
    let ty = Some(packed_labels_ty(l));
    if k == 0 {
        Term::Inr(Box::new(e), ty)
    } else {
        Term::Inl(Box::new(inject(&l[..n - 1], k - 1, e)), ty)
    }
}

/// Substitution sending the record variable to the packed context.
pub fn pack_ctx(ctx: &Ctx) -> Subst {
    Subst::new(vec![packed(ctx.len())], ctx.len())
}

/// Substitution sending each variable of `ctx` to its projection from the
/// record variable.
pub fn unpack_ctx(ctx: &Ctx) -> Subst {
    Subst::new((0..ctx.len()).map(|i| project(i, Term::Var(0))).collect(), 1)
}

/// Branches to each label of `l` become branches to label 0 with the
/// corresponding injection.
pub fn pack_labels(l: &LabelCtx) -> LabelSubst {
    LabelSubst::new((0..l.len()).map(|k| Region::Br(0, inject(&l.0, k, Term::Var(0)))).collect(), 1)
}

/// Dispatch on a value of `[l]` to the matching label of `l`.
pub fn unpack_region(l: &[Ty], e: Term) -> Region {
    match l.split_last() {
        None => infinite_loop(),
        Some((_, rest)) => Region::Case(
            e,
            Box::new(unpack_region(rest, Term::Var(0)).shift_labels(0, 1)),
            Box::new(Region::Br(0, Term::Var(0))),
        ),
    }
}

/// Inverse of [`pack_labels`]: the packed label dispatches back to `l`.
pub fn unpack_labels(l: &LabelCtx) -> LabelSubst {
    LabelSubst::new(vec![unpack_region(&l.0, Term::Var(0))], l.len())
}

/// `r` over a single record variable and a single packed exit label.
pub fn pack_region(ctx: &Ctx, r: &Region, l: &LabelCtx) -> Region {
    unpack_ctx(ctx).region(&pack_labels(l).region(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{rg, tm, EffectLattice, Signature};
    use crate::typing::{check_label_subst, check_region, check_subst, check_term};

    fn sig() -> Signature {
        let mut s = Signature::new(EffectLattice::two_point());
        s.add_base("a", 2).unwrap();
        s
    }

    fn ctx3(s: &Signature) -> Ctx {
        Ctx::from_hyps(vec![(Ty::base("a"), s.bot()), (Ty::Unit, s.bot()), (Ty::bool(), s.bot())])
    }

    #[test]
    fn packed_record_types() {
        let s = sig();
        let c = ctx3(&s);
        let t = packed_ctx_ty(&c);
        assert!(check_term(&s, &c, s.bot(), &packed(3), &t));
        let rec = Ctx::from_hyps(vec![(t, s.bot())]);
        for (i, h) in c.hyps().iter().rev().enumerate() {
            assert!(check_term(&s, &rec, s.bot(), &project(i, tm::var(0)), &h.ty));
        }
        assert_eq!(packed(0), Term::Unit);
    }

    #[test]
    fn substitutions_are_typed() {
        let s = sig();
        let c = ctx3(&s);
        let rec = Ctx::from_hyps(vec![(packed_ctx_ty(&c), s.bot())]);
        assert!(check_subst(&s, &c, &pack_ctx(&c), &rec));
        assert!(check_subst(&s, &rec, &unpack_ctx(&c), &c));
        let l = LabelCtx(vec![Ty::base("a"), Ty::Unit, Ty::bool()]);
        let k = LabelCtx(vec![packed_labels_ty(&l.0)]);
        assert!(check_label_subst(&s, &Ctx::new(), &pack_labels(&l), &l, &k));
        assert!(check_label_subst(&s, &Ctx::new(), &unpack_labels(&l), &k, &l));
    }

    #[test]
    fn injections_are_typed() {
        let s = sig();
        let l = vec![Ty::base("a"), Ty::Unit, Ty::bool()];
        let c = Ctx::from_hyps(l.iter().map(|t| (t.clone(), s.bot())).collect());
        for k in 0..3 {
            assert!(check_term(&s, &c, s.bot(), &inject(&l, k, tm::var(k)), &packed_labels_ty(&l)));
        }
    }

    #[test]
    fn empty_unpack_diverges() {
        assert_eq!(unpack_region(&[], Term::Unit), infinite_loop());
    }

    #[test]
    fn pack_region_is_typed() {
        let s = sig();
        let c = ctx3(&s);
        let l = LabelCtx(vec![Ty::base("a"), Ty::bool()]);
        let r = rg::case(tm::var(0), rg::br(1, tm::var(3)), rg::br(0, tm::var(1)));
        assert!(check_region(&s, &c, &r, &l));
        let rec = Ctx::from_hyps(vec![(packed_ctx_ty(&c), s.bot())]);
        let k = LabelCtx(vec![packed_labels_ty(&l.0)]);
        assert!(check_region(&s, &rec, &pack_region(&c, &r, &l), &k));
    }
}
