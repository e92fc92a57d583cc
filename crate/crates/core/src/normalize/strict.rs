//! Conversion to strict SSA: basic blocks whose where-blocks hold exactly
//! their dominance-tree children.

use thiserror::Error;

use super::anf::to_anf;
use crate::ir::{Block, Ctx, LabelCtx, Region, Signature, Term};
use crate::typing::{elaborate_region, infer_term, is_strict_shape, is_terminator_shape, TypeError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("region is not strict")]
pub struct NotStrict;

/// Strict SSA form of a well-typed region.
pub fn to_strict(sig: &Signature, ctx: &Ctx, r: &Region, l: &LabelCtx) -> Result<Region, TypeError> {
    let r = elaborate_region(sig, ctx, r, l)?;
    Ok(ssa_where(sig, ctx, &to_anf(&r), Vec::new()))
}

/// Strict form of the ANF region `r` placed in front of the blocks `g`,
/// whose labels are the innermost ones `r` may target.
pub fn ssa_where(sig: &Signature, ctx: &Ctx, r: &Region, g: Vec<Block>) -> Region {
    if is_terminator_shape(r) {
        return Region::Where(Box::new(r.clone()), g);
    }
    let (bot, top) = (sig.bot(), sig.top());
    let ty_of = |a: &Term| infer_term(sig, ctx, top, a).expect("well-typed ANF");
    match r {
        Region::Let1(a, body) => {
            let c = ctx.with(ty_of(a), bot);
            Region::Let1(a.clone(), Box::new(ssa_where(sig, &c, body, shift_vars(g, 1))))
        }
        Region::Let2(a, body) => {
            let p = ty_of(a);
            let (x, y) = p.as_prod().expect("product");
            let c = ctx.with(x.clone(), bot).with(y.clone(), bot);
            Region::Let2(a.clone(), Box::new(ssa_where(sig, &c, body, shift_vars(g, 2))))
        }
        Region::Case(a, s, t) => {
            let st = ty_of(a);
            let (x, y) = st.as_sum().expect("sum");
            let mut g = shift_labels(g, 2);
            g.push(Block { param: x.clone(), body: ssa_where(sig, &ctx.with(x.clone(), bot), &s.shift_labels(0, 2), Vec::new()) });
            g.push(Block { param: y.clone(), body: ssa_where(sig, &ctx.with(y.clone(), bot), &t.shift_labels(0, 2), Vec::new()) });
            let head = Region::Case(a.clone(), Box::new(Region::Br(1, Term::Var(0))), Box::new(Region::Br(0, Term::Var(0))));
            Region::Where(Box::new(head), g)
        }
        Region::Where(head, bs) => {
            let mut g = shift_labels(g, bs.len());
            g.extend(bs.iter().map(|b| Block {
                param: b.param.clone(),
                body: ssa_where(sig, &ctx.with(b.param.clone(), bot), &b.body, Vec::new()),
            }));
            ssa_where(sig, ctx, head, g)
        }
        Region::Br(..) => unreachable!("ANF branches are terminators"),
    }
}

fn shift_vars(g: Vec<Block>, n: usize) -> Vec<Block> {
    g.into_iter().map(|b| Block { param: b.param, body: b.body.shift_vars(1, n) }).collect()
}

fn shift_labels(g: Vec<Block>, n: usize) -> Vec<Block> {
    g.into_iter().map(|b| Block { param: b.param, body: b.body.shift_labels(0, n) }).collect()
}

/// A strict region's entry block (its lets and terminator) and the blocks
/// it immediately dominates. The children live under the entry's lets.
pub fn split_entry(r: &Region) -> Result<(Region, Vec<Block>), NotStrict> {
    if !is_strict_shape(r) {
        return Err(NotStrict);
    }
    fn go(r: &Region) -> (Region, Vec<Block>) {
        match r {
            Region::Let1(a, body) => {
                let (e, g) = go(body);
                (Region::Let1(a.clone(), Box::new(e)), g)
            }
            Region::Let2(a, body) => {
                let (e, g) = go(body);
                (Region::Let2(a.clone(), Box::new(e)), g)
            }
            Region::Where(t, bs) => ((**t).clone(), bs.clone()),
            _ => unreachable!("strict shape"),
        }
    }
    Ok(go(r))
}

/// Inverse of [`split_entry`]: wraps the entry's terminator in a where
/// holding `children`.
pub fn add_dom(entry: &Region, children: Vec<Block>) -> Region {
    match entry {
        Region::Let1(a, body) => Region::Let1(a.clone(), Box::new(add_dom(body, children))),
        Region::Let2(a, body) => Region::Let2(a.clone(), Box::new(add_dom(body, children))),
        t => Region::Where(Box::new(t.clone()), children),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{rg, EffectLattice, Ty};
    use crate::typing::check_strict;

    fn sig() -> Signature {
        let mut s = Signature::new(EffectLattice::two_point());
        s.add_base("a", 2).unwrap();
        s
    }

    #[test]
    fn terminator_gets_an_empty_where() {
        let s = sig();
        let l = LabelCtx(vec![Ty::Unit]);
        let ctx = Ctx::from_hyps(vec![(Ty::Unit, s.bot())]);
        let out = to_strict(&s, &ctx, &rg::br(0, Term::Var(0)), &l).unwrap();
        assert_eq!(out, rg::let1(Term::Var(0), rg::wh(rg::br(0, Term::Var(0)), vec![])));
        assert!(check_strict(&s, &ctx, &out, &l));
        let (e, g) = split_entry(&out).unwrap();
        assert_eq!(e, rg::let1(Term::Var(0), rg::br(0, Term::Var(0))));
        assert!(g.is_empty());
        assert_eq!(add_dom(&e, g), out);
    }

    #[test]
    fn case_with_lets_in_arms_gets_two_blocks() {
        let s = sig();
        let bool_ty = Ty::bool();
        let ctx = Ctx::from_hyps(vec![(bool_ty.clone(), s.bot())]);
        let l = LabelCtx(vec![Ty::Unit]);
        let arm = rg::let1(Term::Unit, rg::br(0, Term::Var(0)));
        let r = rg::case(Term::Var(0), arm.clone(), arm);
        let out = to_strict(&s, &ctx, &r, &l).unwrap();
        assert!(check_strict(&s, &ctx, &out, &l));
        let (_, g) = split_entry(&out).unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn split_rejects_non_strict() {
        assert_eq!(split_entry(&rg::br(0, Term::Unit)), Err(NotStrict));
    }
}
