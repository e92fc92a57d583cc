//! Descends along a path, tracking the typing judgment at each position,
//! and rebuilds the syntax around the rewritten node.

use super::{Res, RewriteError};
use crate::ir::{Block, Ctx, Effect, LabelCtx, Region, Signature, Term, Ty};
use crate::typing::infer_term;

pub(crate) enum Site<'a> {
    Term { ctx: &'a Ctx, eff: Effect, t: &'a Term, ty: &'a Ty },
    Region { ctx: &'a Ctx, r: &'a Region, l: &'a LabelCtx },
}

pub(crate) enum Node {
    Term(Term),
    Region(Region),
}

type Visit<'f> = dyn FnMut(Site<'_>) -> Res<Node> + 'f;

fn bad(path: &[usize], depth: usize, msg: impl Into<String>) -> RewriteError {
    RewriteError::Position { path: path[..=depth.min(path.len().saturating_sub(1))].to_vec(), msg: msg.into() }
}

fn infer(sig: &Signature, ctx: &Ctx, eff: Effect, t: &Term, path: &[usize], depth: usize) -> Res<Ty> {
    infer_term(sig, ctx, eff, t).ok_or_else(|| bad(path, depth, "cannot infer the type of a bound term"))
}

pub(crate) fn at_term(
    sig: &Signature,
    ctx: &Ctx,
    eff: Effect,
    t: &Term,
    ty: &Ty,
    path: &[usize],
    depth: usize,
    f: &mut Visit<'_>,
) -> Res<Term> {
    if depth == path.len() {
        return match f(Site::Term { ctx, eff, t, ty })? {
            Node::Term(t) => Ok(t),
            Node::Region(_) => unreachable!("term site rewritten to a region"),
        };
    }
    let i = path[depth];
    let bot = sig.bot();
    let (cctx, cty): (Ctx, Ty) = match (t, i) {
        (Term::Op(g, _), 0) => {
            let ins = sig.instr(g).ok_or_else(|| bad(path, depth, format!("unknown instruction `{g}`")))?;
            (ctx.clone(), ins.dom.clone())
        }
        (Term::Let1(a, _), 0) | (Term::Let2(a, _), 0) | (Term::Case(a, _, _), 0) => (ctx.clone(), infer(sig, ctx, eff, a, path, depth)?),
        (Term::Let1(a, _), 1) => (ctx.with(infer(sig, ctx, eff, a, path, depth)?, bot), ty.clone()),
        (Term::Let2(a, _), 1) => {
            let ta = infer(sig, ctx, eff, a, path, depth)?;
            let (x, y) = ta.as_prod().ok_or_else(|| bad(path, depth, "let2 of a non-product"))?;
            (ctx.with(x.clone(), bot).with(y.clone(), bot), ty.clone())
        }
        (Term::Pair(..), 0 | 1) => {
            let (x, y) = ty.as_prod().ok_or_else(|| bad(path, depth, "pair at a non-product type"))?;
            (ctx.clone(), if i == 0 { x.clone() } else { y.clone() })
        }
        (Term::Inl(..), 0) | (Term::Inr(..), 0) => {
            let (x, y) = ty.as_sum().ok_or_else(|| bad(path, depth, "injection at a non-sum type"))?;
            (ctx.clone(), if matches!(t, Term::Inl(..)) { x.clone() } else { y.clone() })
        }
        (Term::Abort(..), 0) => (ctx.clone(), Ty::Empty),
        (Term::Case(e, _, _), 1 | 2) => {
            let te = infer(sig, ctx, eff, e, path, depth)?;
            let (x, y) = te.as_sum().ok_or_else(|| bad(path, depth, "case on a non-sum"))?;
            (ctx.with(if i == 1 { x.clone() } else { y.clone() }, bot), ty.clone())
        }
        _ => return Err(bad(path, depth, format!("no child {i}"))),
    };
    let mut out = t.clone();
    let child = out.child_mut(i).expect("child exists");
    *child = at_term(sig, &cctx, eff, child, &cty, path, depth + 1, f)?;
    Ok(out)
}

pub(crate) fn at_region(
    sig: &Signature,
    ctx: &Ctx,
    r: &Region,
    l: &LabelCtx,
    path: &[usize],
    depth: usize,
    f: &mut Visit<'_>,
) -> Res<Region> {
    if depth == path.len() {
        return match f(Site::Region { ctx, r, l })? {
            Node::Region(r) => Ok(r),
            Node::Term(_) => unreachable!("region site rewritten to a term"),
        };
    }
    let i = path[depth];
    let (bot, top) = (sig.bot(), sig.top());
    let term_at = |a: &Term, eff: Effect, ty: &Ty, f: &mut Visit<'_>| at_term(sig, ctx, eff, a, ty, path, depth + 1, f);
    Ok(match (r, i) {
        (Region::Br(k, a), 0) => {
            let ty = l.get(*k).ok_or_else(|| bad(path, depth, "branch to an unbound label"))?;
            Region::Br(*k, term_at(a, bot, ty, f)?)
        }
        (Region::Let1(a, body), _) | (Region::Let2(a, body), _) if i < 2 => {
            let ta = infer(sig, ctx, top, a, path, depth)?;
            let two = matches!(r, Region::Let2(..));
            if i == 0 {
                let a = term_at(a, top, &ta, f)?;
                if two {
                    Region::Let2(a, body.clone())
                } else {
                    Region::Let1(a, body.clone())
                }
            } else if two {
                let (x, y) = ta.as_prod().ok_or_else(|| bad(path, depth, "let2 of a non-product"))?;
                let c = ctx.with(x.clone(), bot).with(y.clone(), bot);
                Region::Let2(a.clone(), Box::new(at_region(sig, &c, body, l, path, depth + 1, f)?))
            } else {
                let c = ctx.with(ta, bot);
                Region::Let1(a.clone(), Box::new(at_region(sig, &c, body, l, path, depth + 1, f)?))
            }
        }
        (Region::Case(e, s, t), 0..=2) => {
            let te = infer(sig, ctx, top, e, path, depth)?;
            let (x, y) = te.as_sum().ok_or_else(|| bad(path, depth, "case on a non-sum"))?;
            match i {
                0 => Region::Case(term_at(e, top, &te, f)?, s.clone(), t.clone()),
                1 => {
                    let c = ctx.with(x.clone(), bot);
                    Region::Case(e.clone(), Box::new(at_region(sig, &c, s, l, path, depth + 1, f)?), t.clone())
                }
                _ => {
                    let c = ctx.with(y.clone(), bot);
                    Region::Case(e.clone(), s.clone(), Box::new(at_region(sig, &c, t, l, path, depth + 1, f)?))
                }
            }
        }
        (Region::Where(head, bs), _) if i <= bs.len() => {
            let l2 = l.with_blocks(bs);
            if i == 0 {
                Region::Where(Box::new(at_region(sig, ctx, head, &l2, path, depth + 1, f)?), bs.clone())
            } else {
                let b = &bs[i - 1];
                let c = ctx.with(b.param.clone(), bot);
                let body = at_region(sig, &c, &b.body, &l2, path, depth + 1, f)?;
                let mut bs = bs.clone();
                bs[i - 1] = Block { param: b.param.clone(), body };
                Region::Where(head.clone(), bs)
            }
        }
        _ => return Err(bad(path, depth, format!("no child {i}"))),
    })
}
