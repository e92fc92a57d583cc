//! Local rewrites for the region rules and the derived where-block rules.

use super::term_rules::{mismatch, param, pure_ty, side};
use super::{Direction, Options, Res, RewriteError, RuleId, RuleInstance};
use crate::ir::{rg, tm, Block, Ctx, LabelCtx, Region, Signature, Term, Ty};
use crate::semantics::{denotation_equal_regions, PowersetModel, Verdict};
use crate::subst::{LabelSubst, Subst};
use crate::typing::{check_region, elaborate_region, infer_term};

fn unshift_v(rule: RuleId, r: &Region, cutoff: usize, n: usize, what: &str) -> Res<Region> {
    r.unshift_vars(cutoff, n).ok_or_else(|| side(rule, format!("{what} uses a variable the other side does not bind")))
}

fn unshift_l(rule: RuleId, r: &Region, cutoff: usize, n: usize, what: &str) -> Res<Region> {
    r.unshift_labels(cutoff, n).ok_or_else(|| side(rule, format!("{what} branches to a label the other side does not bind")))
}

/// Weakens the bodies of a label substitution by one variable, for use under
/// a binder that the substitution's bodies do not see.
fn weaken_entries(rs: &[Region]) -> Vec<Region> {
    rs.iter().map(|r| r.shift_vars(1, 1)).collect()
}

/// The substitution sending label `l < bs.len()` to `where (br l x) bs` and
/// lowering the remaining labels past the block group.
pub(crate) fn cfg_subst(bs: &[Block]) -> LabelSubst {
    let inner: Vec<Block> = bs.iter().map(|b| Block { param: b.param.clone(), body: b.body.shift_vars(1, 1) }).collect();
    LabelSubst::new((0..bs.len()).map(|l| rg::wh(rg::br(l, Term::Var(0)), inner.clone())).collect(), 0)
}

/// Reorders the blocks of a where so that new block `i` is old block
/// `perm[i]`, relabelling branches to match.
pub(crate) fn permute_where(head: &Region, bs: &[Block], perm: &[usize]) -> Region {
    let n = bs.len();
    let mut inv = vec![0; n];
    for (i, &k) in perm.iter().enumerate() {
        inv[k] = i;
    }
    let f = |j: usize| if j < n { n - 1 - inv[n - 1 - j] } else { j };
    let head = head.rename_labels(&f);
    let bs = perm.iter().map(|&k| Block { param: bs[k].param.clone(), body: bs[k].body.rename_labels(&f) }).collect();
    rg::wh(head, bs)
}

fn is_perm(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n && p.iter().all(|&k| k < n && !std::mem::replace(&mut seen[k], true))
}

pub(super) fn apply(
    sig: &Signature,
    ctx: &Ctx,
    r: &Region,
    l: &LabelCtx,
    inst: &RuleInstance,
    opts: &Options<'_>,
    log: &mut Vec<String>,
) -> Res<Region> {
    use Region::*;
    use RuleId::*;
    let rule = inst.rule;
    let fwd = inst.dir == Direction::Forward;
    let p = &inst.params;
    let mm = |m: &str| mismatch(rule, m);
    let top = sig.top();
    Ok(match (rule, fwd) {
        (Let1BetaR, true) => match r {
            Let1(a, body) => {
                pure_ty(sig, ctx, a).ok_or_else(|| side(rule, "bound term is not pure"))?;
                Subst::single(a.clone()).region(body)
            }
            _ => return Err(mm("expected `let x = a; r`")),
        },
        (Let1BetaR, false) => {
            let a = param(rule, &p.terms, 0, "the bound term")?;
            pure_ty(sig, ctx, &a).ok_or_else(|| side(rule, "bound term is not pure"))?;
            rg::let1(a, r.shift_vars(0, 1))
        }
        (Let1OpR, true) => match r {
            Let1(Term::Op(f, a), body) => rg::let1((**a).clone(), rg::let1(tm::op(f, Term::Var(0)), body.shift_vars(1, 1))),
            _ => return Err(mm("expected `let y = f a; r`")),
        },
        (Let1OpR, false) => match r {
            Let1(a, inner) => match &**inner {
                Let1(Term::Op(f, x), body) if **x == Term::Var(0) => {
                    rg::let1(tm::op(f, a.clone()), unshift_v(rule, body, 1, 1, "the body")?)
                }
                _ => return Err(mm("expected `let x = a; let y = f x; r`")),
            },
            _ => return Err(mm("expected `let x = a; let y = f x; r`")),
        },
        (Let1Let1R, true) => match r {
            Let1(Term::Let1(a, b), body) => rg::let1((**a).clone(), rg::let1((**b).clone(), body.shift_vars(1, 1))),
            _ => return Err(mm("expected `let y = (let x = a; b); r`")),
        },
        (Let1Let1R, false) => match r {
            Let1(a, inner) => match &**inner {
                Let1(b, body) => rg::let1(tm::let1(a.clone(), b.clone()), unshift_v(rule, body, 1, 1, "the body")?),
                _ => return Err(mm("expected `let x = a; let y = b; r`")),
            },
            _ => return Err(mm("expected `let x = a; let y = b; r`")),
        },
        (Let1Let2R, true) => match r {
            Let1(Term::Let2(e, c), body) => rg::let2((**e).clone(), rg::let1((**c).clone(), body.shift_vars(1, 2))),
            _ => return Err(mm("expected `let z = (let (x, y) = e; c); r`")),
        },
        (Let1Let2R, false) => match r {
            Let2(e, inner) => match &**inner {
                Let1(c, body) => rg::let1(tm::let2(e.clone(), c.clone()), unshift_v(rule, body, 1, 2, "the body")?),
                _ => return Err(mm("expected `let (x, y) = e; let z = c; r`")),
            },
            _ => return Err(mm("expected `let (x, y) = e; let z = c; r`")),
        },
        (Let1CaseR, true) => match r {
            Let1(Term::Case(e, a, b), body) => {
                let body = body.shift_vars(1, 1);
                rg::case((**e).clone(), rg::let1((**a).clone(), body.clone()), rg::let1((**b).clone(), body))
            }
            _ => return Err(mm("expected `let z = case e {..}; r`")),
        },
        (Let1CaseR, false) => match r {
            Case(e, s, t) => match (&**s, &**t) {
                (Let1(a, r1), Let1(b, r2)) => {
                    if r1 != r2 {
                        return Err(mm("the two continuations differ"));
                    }
                    rg::let1(tm::case(e.clone(), a.clone(), b.clone()), unshift_v(rule, r1, 1, 1, "the continuation")?)
                }
                _ => return Err(mm("expected `case e { x => let z = a; r, y => let z = b; r }`")),
            },
            _ => return Err(mm("expected a case statement")),
        },
        (Let1AbortR, true) => match r {
            Let1(Term::Abort(a, ann), body) => {
                rg::let1((**a).clone(), rg::let1(Term::Abort(Box::new(Term::Var(0)), ann.clone()), body.shift_vars(1, 1)))
            }
            _ => return Err(mm("expected `let y = abort a; r`")),
        },
        (Let1AbortR, false) => match r {
            Let1(a, inner) => match &**inner {
                Let1(Term::Abort(x, ann), body) if **x == Term::Var(0) => {
                    rg::let1(Term::Abort(Box::new(a.clone()), ann.clone()), unshift_v(rule, body, 1, 1, "the body")?)
                }
                _ => return Err(mm("expected `let x = a; let y = abort x; r`")),
            },
            _ => return Err(mm("expected `let x = a; let y = abort x; r`")),
        },
        (Let2PairR, true) => match r {
            Let2(Term::Pair(a, b), body) => rg::let1((**a).clone(), rg::let1(b.shift(0, 1), (**body).clone())),
            _ => return Err(mm("expected `let (x, y) = (a, b); r`")),
        },
        (Let2PairR, false) => match r {
            Let1(a, inner) => match &**inner {
                Let1(b, body) => {
                    let b = b.unshift(0, 1).ok_or_else(|| side(rule, "the second component uses the first binder"))?;
                    rg::let2(tm::pair(a.clone(), b), (**body).clone())
                }
                _ => return Err(mm("expected `let x = a; let y = b; r`")),
            },
            _ => return Err(mm("expected `let x = a; let y = b; r`")),
        },
        (Let2BindR, true) => match r {
            Let2(e, body) => rg::let1(e.clone(), rg::let2(Term::Var(0), body.shift_vars(2, 1))),
            _ => return Err(mm("expected `let (x, y) = e; r`")),
        },
        (Let2BindR, false) => match r {
            Let1(e, inner) => match &**inner {
                Let2(Term::Var(0), body) => rg::let2(e.clone(), unshift_v(rule, body, 2, 1, "the body")?),
                _ => return Err(mm("expected `let z = e; let (x, y) = z; r`")),
            },
            _ => return Err(mm("expected `let z = e; let (x, y) = z; r`")),
        },
        (CaseInlR, true) => match r {
            Case(Term::Inl(a, _), s, _) => rg::let1((**a).clone(), (**s).clone()),
            _ => return Err(mm("expected `case inl a {..}`")),
        },
        (CaseInrR, true) => match r {
            Case(Term::Inr(b, _), _, t) => rg::let1((**b).clone(), (**t).clone()),
            _ => return Err(mm("expected `case inr b {..}`")),
        },
        (CaseInlR, false) | (CaseInrR, false) => match r {
            Let1(a, body) => {
                let ta = infer_term(sig, ctx, top, a).ok_or_else(|| mm("cannot type the bound term"))?;
                let other = param(rule, &p.regions, 0, "the other arm")?;
                let oty = param(rule, &p.tys, 0, "the other summand's type")?;
                if rule == CaseInlR {
                    rg::case(tm::inl(a.clone(), Some(Ty::sum(ta, oty))), (**body).clone(), other)
                } else {
                    rg::case(tm::inr(a.clone(), Some(Ty::sum(oty, ta))), other, (**body).clone())
                }
            }
            _ => return Err(mm("expected `let x = a; r`")),
        },
        (CaseBindR, true) => match r {
            Case(e, s, t) => rg::let1(e.clone(), rg::case(Term::Var(0), s.shift_vars(1, 1), t.shift_vars(1, 1))),
            _ => return Err(mm("expected a case statement")),
        },
        (CaseBindR, false) => match r {
            Let1(e, inner) => match &**inner {
                Case(Term::Var(0), s, t) => {
                    rg::case(e.clone(), unshift_v(rule, s, 1, 1, "the left arm")?, unshift_v(rule, t, 1, 1, "the right arm")?)
                }
                _ => return Err(mm("expected `let z = e; case z {..}`")),
            },
            _ => return Err(mm("expected `let z = e; case z {..}`")),
        },
        (CfgBeta1, true) => match r {
            Where(head, bs) => match &**head {
                Br(k, a) if *k < bs.len() => rg::wh(rg::let1(a.clone(), bs[bs.len() - 1 - k].body.clone()), bs.clone()),
                _ => return Err(mm("expected a where whose head branches to one of its blocks")),
            },
            _ => return Err(mm("expected a where-block")),
        },
        (CfgBeta1, false) => match r {
            Where(head, bs) => match &**head {
                Let1(a, body) => {
                    pure_ty(sig, ctx, a).ok_or_else(|| side(rule, "bound term is not pure"))?;
                    let i = match p.count {
                        Some(i) if i < bs.len() && bs[i].body == **body => i,
                        Some(_) => return Err(mm("the selected block's body is not the continuation")),
                        None => bs.iter().position(|b| b.body == **body).ok_or_else(|| mm("no block has the continuation as its body"))?,
                    };
                    rg::wh(rg::br(bs.len() - 1 - i, a.clone()), bs.clone())
                }
                _ => return Err(mm("expected `where (let x = a; t) {..}`")),
            },
            _ => return Err(mm("expected a where-block")),
        },
        (CfgBeta2, true) => match r {
            Where(head, bs) => match &**head {
                Br(k, a) if *k >= bs.len() => rg::br(k - bs.len(), a.clone()),
                _ => return Err(mm("expected a where whose head branches past its blocks")),
            },
            _ => return Err(mm("expected a where-block")),
        },
        (CfgBeta2, false) => match r {
            Br(k, a) => rg::wh(rg::br(k + p.blocks.len(), a.clone()), p.blocks.clone()),
            _ => return Err(mm("expected a branch")),
        },
        (CfgEta, true) => match r {
            Where(head, bs) => cfg_subst(bs).region(head),
            _ => return Err(mm("expected a where-block")),
        },
        (CfgEta, false) => {
            let bs = p.blocks.clone();
            let head = match p.regions.first() {
                Some(h) => {
                    let l2 = l.with_blocks(&bs);
                    if !check_region(sig, ctx, h, &l2) {
                        return Err(RewriteError::BadParams { rule, msg: "the head is ill-typed".into() });
                    }
                    let img = elaborate_region(sig, ctx, &cfg_subst(&bs).region(h), l)
                        .map_err(|e| RewriteError::BadParams { rule, msg: format!("substituted head is ill-typed: {e}") })?;
                    if img != *r {
                        return Err(mm("the substituted head is not the subject"));
                    }
                    h.clone()
                }
                None => r.shift_labels(0, bs.len()),
            };
            rg::wh(head, bs)
        }
        (Codiag, true) => match r {
            Where(head, bs) if bs.len() == 1 => match &bs[0].body {
                Where(ih, ibs) if ibs.len() == 1 && **ih == rg::br(0, Term::Var(0)) && ibs[0].param == bs[0].param => {
                    let s = unshift_v(rule, &ibs[0].body, 1, 1, "the inner body")?;
                    let s = s.rename_labels(&|k| k.saturating_sub(1));
                    rg::wh((**head).clone(), vec![rg::block(bs[0].param.clone(), s)])
                }
                _ => return Err(mm("expected a block of the form `where (br k x) { k(y): s }`")),
            },
            _ => return Err(mm("expected a where with a single block")),
        },
        (Codiag, false) => match r {
            Where(head, bs) if bs.len() == 1 => {
                let a = bs[0].param.clone();
                let inner = bs[0].body.shift_vars(1, 1).shift_labels(0, 1);
                rg::wh((**head).clone(), vec![rg::block(a.clone(), rg::wh(rg::br(0, Term::Var(0)), vec![rg::block(a, inner)]))])
            }
            _ => return Err(mm("expected a where with a single block")),
        },
        (Uni, _) => return uni(sig, ctx, r, l, inst, opts, log),
        (Dinat, _) => return dinat(sig, ctx, r, l, inst),
        (InitialR, _) => {
            if !ctx.hyps().iter().any(|h| h.ty == Ty::Empty) {
                return Err(side(rule, "no hypothesis of type 0 in the context"));
            }
            let tgt = param(rule, &p.regions, 0, "the target region")?;
            if !check_region(sig, ctx, &tgt, l) {
                return Err(side(rule, "the target does not have the subject's judgment"));
            }
            tgt
        }
        (Case2Cfg, true) => match r {
            Case(a, s, t) => {
                let ta = infer_term(sig, ctx, top, a).ok_or_else(|| mm("cannot type the scrutinee"))?;
                let (x, y) = ta.as_sum().ok_or_else(|| mm("scrutinee is not a sum"))?;
                rg::wh(
                    rg::case(a.clone(), rg::br(1, Term::Var(0)), rg::br(0, Term::Var(0))),
                    vec![rg::block(x.clone(), s.shift_labels(0, 2)), rg::block(y.clone(), t.shift_labels(0, 2))],
                )
            }
            _ => return Err(mm("expected a case statement")),
        },
        (Case2Cfg, false) => match r {
            Where(head, bs) if bs.len() == 2 => match &**head {
                Case(a, s, t) if **s == rg::br(1, Term::Var(0)) && **t == rg::br(0, Term::Var(0)) => rg::case(
                    a.clone(),
                    unshift_l(rule, &bs[0].body, 0, 2, "the left block")?,
                    unshift_l(rule, &bs[1].body, 0, 2, "the right block")?,
                ),
                _ => return Err(mm("expected a head `case a { x => br l x, y => br l' y }`")),
            },
            _ => return Err(mm("expected a where with two blocks")),
        },
        (CfgFuse1, true) => match r {
            Where(outer_head, ts) => match &**outer_head {
                Where(head, ss) => {
                    let k = ss.len();
                    let mut bs: Vec<Block> =
                        ts.iter().map(|b| Block { param: b.param.clone(), body: b.body.shift_labels(0, k) }).collect();
                    bs.extend(ss.iter().cloned());
                    rg::wh((**head).clone(), bs)
                }
                _ => return Err(mm("expected a where whose head is a where")),
            },
            _ => return Err(mm("expected a where-block")),
        },
        (CfgFuse1, false) => match r {
            Where(head, bs) => {
                let k = p.count.ok_or_else(|| RewriteError::BadParams { rule, msg: "expected the inner block count".into() })?;
                if k > bs.len() {
                    return Err(mm("fewer blocks than the inner block count"));
                }
                let split = bs.len() - k;
                let ts = bs[..split]
                    .iter()
                    .map(|b| Ok(Block { param: b.param.clone(), body: unshift_l(rule, &b.body, 0, k, "an outer block")? }))
                    .collect::<Res<Vec<_>>>()?;
                rg::wh(rg::wh((**head).clone(), bs[split..].to_vec()), ts)
            }
            _ => return Err(mm("expected a where-block")),
        },
        (CfgFuse2, true) => match r {
            Where(head, bs) if !bs.is_empty() => {
                let last = bs.last().expect("non-empty");
                let (s, inner) = match &last.body {
                    Where(s, inner) => (s, inner),
                    _ => return Err(mm("the last block's body is not a where")),
                };
                let m = inner.len();
                let mut out: Vec<Block> = bs[..bs.len() - 1]
                    .iter()
                    .map(|b| Block { param: b.param.clone(), body: b.body.shift_labels(0, m) })
                    .collect();
                out.push(Block { param: last.param.clone(), body: (**s).clone() });
                for b in inner {
                    out.push(Block { param: b.param.clone(), body: unshift_v(rule, &b.body, 1, 1, "a nested block")? });
                }
                rg::wh(head.shift_labels(0, m), out)
            }
            _ => return Err(mm("expected a where with at least one block")),
        },
        (CfgFuse2, false) => match r {
            Where(head, bs) => {
                let m = p.count.ok_or_else(|| RewriteError::BadParams { rule, msg: "expected the nested block count".into() })?;
                if m + 1 > bs.len() {
                    return Err(mm("not enough blocks for the nested block count"));
                }
                let kappa = bs.len() - m - 1;
                let mut out = bs[..kappa]
                    .iter()
                    .map(|b| Ok(Block { param: b.param.clone(), body: unshift_l(rule, &b.body, 0, m, "an outer block")? }))
                    .collect::<Res<Vec<_>>>()?;
                let inner: Vec<Block> =
                    bs[kappa + 1..].iter().map(|b| Block { param: b.param.clone(), body: b.body.shift_vars(1, 1) }).collect();
                out.push(Block { param: bs[kappa].param.clone(), body: rg::wh(bs[kappa].body.clone(), inner) });
                rg::wh(unshift_l(rule, head, 0, m, "the head")?, out)
            }
            _ => return Err(mm("expected a where-block")),
        },
        (PermCfg, _) => match r {
            Where(head, bs) => {
                if !is_perm(&p.perm, bs.len()) {
                    return Err(RewriteError::BadParams { rule, msg: format!("expected a permutation of 0..{}", bs.len()) });
                }
                let perm = if fwd {
                    p.perm.clone()
                } else {
                    let mut inv = vec![0; bs.len()];
                    for (i, &k) in p.perm.iter().enumerate() {
                        inv[k] = i;
                    }
                    inv
                };
                permute_where(head, bs, &perm)
            }
            _ => return Err(mm("expected a where-block")),
        },
        _ => unreachable!("{rule} is not a region rule"),
    })
}

/// Both sides of `uni` for head `r`, loop bodies `t` (over `A`) and `s`
/// (over `B`) and mediator `e`.
fn uni_sides(r: &Region, a: &Ty, t: &Region, b: &Ty, s: &Region, e: &Term) -> (Region, Region) {
    let lhs = rg::wh(rg::wh(r.shift_labels(1, 1), vec![rg::block(a.clone(), rg::br(1, e.clone()))]), vec![rg::block(b.clone(), s.clone())]);
    let rhs = rg::wh(r.clone(), vec![rg::block(a.clone(), t.clone())]);
    (lhs, rhs)
}

/// The premise of `uni`, as two regions in `Γ, x : A` targeting `L, κ(B)`.
pub(crate) fn uni_premise(a: &Ty, t: &Region, s: &Region, e: &Term) -> (Region, Region) {
    let lhs = rg::let1(e.clone(), s.shift_vars(1, 1));
    let rhs = rg::wh(t.shift_labels(1, 1), vec![rg::block(a.clone(), rg::br(1, e.shift(1, 1)))]);
    (lhs, rhs)
}

fn uni(
    sig: &Signature,
    ctx: &Ctx,
    r: &Region,
    l: &LabelCtx,
    inst: &RuleInstance,
    opts: &Options<'_>,
    log: &mut Vec<String>,
) -> Res<Region> {
    let rule = inst.rule;
    let p = &inst.params;
    let mm = |m: &str| mismatch(rule, m);
    let (a, t, b, s, e, out) = if inst.dir == Direction::Forward {
        let (inner, b, s) = match r {
            Region::Where(inner, bs) if bs.len() == 1 => (inner, bs[0].param.clone(), bs[0].body.clone()),
            _ => return Err(mm("expected a where with a single block")),
        };
        let (h, a, e) = match &**inner {
            Region::Where(h, bs) if bs.len() == 1 => match &bs[0].body {
                Region::Br(1, e) => (h, bs[0].param.clone(), e.clone()),
                _ => return Err(mm("the inner block is not a branch to the outer label")),
            },
            _ => return Err(mm("the head is not a where with a single block")),
        };
        let head = unshift_l(rule, h, 1, 1, "the inner head")?;
        let t = param(rule, &p.regions, 0, "the fused loop body")?;
        let (_, rhs) = uni_sides(&head, &a, &t, &b, &s, &e);
        (a, t, b, s, e, rhs)
    } else {
        let (head, a, t) = match r {
            Region::Where(h, bs) if bs.len() == 1 => ((**h).clone(), bs[0].param.clone(), bs[0].body.clone()),
            _ => return Err(mm("expected a where with a single block")),
        };
        let e = param(rule, &p.terms, 0, "the mediating term")?;
        let s = param(rule, &p.regions, 0, "the outer loop body")?;
        let b = param(rule, &p.tys, 0, "the mediator's type")?;
        let (lhs, _) = uni_sides(&head, &a, &t, &b, &s, &e);
        (a, t, b, s, e, lhs)
    };
    let cx = ctx.with(a.clone(), sig.bot());
    let lk = l.extended(&[b.clone()]);
    let (pl, pr) = uni_premise(&a, &t, &s, &e);
    if !check_region(sig, &cx, &pl, &lk) || !check_region(sig, &cx, &pr, &lk) {
        return Err(side(rule, "the premise is ill-typed"));
    }
    match opts.verify {
        Some((imp, fuel)) => match denotation_equal_regions(&PowersetModel::new(fuel), sig, imp, &cx, &pl, &pr) {
            Ok(Verdict::Equal) => {}
            Ok(Verdict::Differ { env, .. }) => {
                return Err(RewriteError::Premise { rule, msg: format!("the two sides differ on environment {env:?}") })
            }
            Err(err) => return Err(RewriteError::Premise { rule, msg: format!("could not evaluate: {err}") }),
        },
        None => log.push(format!("uni at {:?}: premise assumed", inst.path)),
    }
    Ok(out)
}

fn dinat(sig: &Signature, ctx: &Ctx, r: &Region, l: &LabelCtx, inst: &RuleInstance) -> Res<Region> {
    let rule = inst.rule;
    let p = &inst.params;
    let bad = |m: &str| RewriteError::BadParams { rule, msg: m.to_string() };
    let head = p.regions.first().ok_or_else(|| bad("expected the head region and the substitution bodies"))?;
    let sigma = &p.regions[1..];
    let a_tys = &p.tys;
    if sigma.len() != a_tys.len() {
        return Err(bad("one substitution body is needed per parameter type"));
    }
    let (lhs, rhs) = dinat_sides(head, a_tys, sigma, &p.blocks);
    let el = |x: &Region| elaborate_region(sig, ctx, x, l).map_err(|e| bad(&format!("the parameters do not build a well-typed side: {e}")));
    let (lhs, rhs) = (el(&lhs)?, el(&rhs)?);
    let (from, to) = if inst.dir == Direction::Forward { (lhs, rhs) } else { (rhs, lhs) };
    if from != *r {
        return Err(mismatch(rule, "the subject is not the side built from the parameters"));
    }
    Ok(to)
}

/// The sides of `dinat` for the given parameters, unelaborated.
pub(crate) fn dinat_sides(head: &Region, a_tys: &[Ty], sigma: &[Region], blocks: &[Block]) -> (Region, Region) {
    let (n, m) = (a_tys.len(), blocks.len());
    let by_label = |v: &[Region]| -> Vec<Region> { v.iter().rev().cloned().collect() };
    let sig_up = LabelSubst::new(by_label(sigma), m);
    let sig_up_w = LabelSubst::new(weaken_entries(&by_label(sigma)), m);
    let t_bodies: Vec<Region> = blocks.iter().map(|b| b.body.clone()).collect();
    let tau_w = LabelSubst::new(weaken_entries(&by_label(&t_bodies)), n);
    let lhs = rg::wh(
        sig_up.region(head),
        blocks.iter().map(|b| Block { param: b.param.clone(), body: sig_up_w.region(&b.body) }).collect(),
    );
    let rhs = rg::wh(head.clone(), a_tys.iter().zip(sigma).map(|(a, s)| Block { param: a.clone(), body: tau_w.region(s) }).collect());
    (lhs, rhs)
}
