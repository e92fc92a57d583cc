//! Random instances of each rule, embedded at random positions of larger
//! well-typed programs.

use rand::seq::SliceRandom;
use thiserror::Error;

use super::region_rules::dinat_sides;
use super::{apply_region_rule, apply_term_rule, Params, RuleId, RuleInstance};
use crate::gen::{Gen, GenConfig};
use crate::ir::{rg, tm, Block, Ctx, Effect, LabelCtx, Region, Signature, Term, Ty};
use crate::semantics::{Builtin, SigImpl};
use crate::typing::{elaborate_region, elaborate_term, Judgment};

/// A subject with a rule instance that applies to it, and the instance that
/// undoes it on the result.
#[derive(Clone, Debug)]
pub struct FuzzInstance {
    pub judgment: Judgment,
    pub inst: RuleInstance,
    pub inverse: RuleInstance,
}

#[derive(Clone, Debug, Error)]
pub enum FuzzError {
    #[error("{rule}: only {made} of {wanted} instances could be generated")]
    Exhausted { rule: RuleId, made: usize, wanted: usize },
    #[error("{rule}: generated instance does not round-trip: {msg}\nsubject: {subject}")]
    Broken { rule: RuleId, msg: String, subject: String },
}

/// Two base types with two-element carriers, pure arithmetic on them and
/// three impure instructions.
pub fn fuzz_signature() -> (Signature, SigImpl) {
    let mut sig = Signature::default();
    sig.add_base("a", 2).expect("fresh");
    sig.add_base("b", 2).expect("fresh");
    let (bot, top) = (sig.bot(), sig.top());
    let (a, b) = (Ty::base("a"), Ty::base("b"));
    let mut imp = SigImpl::new();
    let rows = [
        ("succ", a.clone(), a.clone(), bot, Builtin::Succ),
        ("ab", a.clone(), b.clone(), bot, Builtin::Cast),
        ("ba", b.clone(), a.clone(), bot, Builtin::Cast),
        ("add", Ty::prod(a.clone(), a.clone()), a.clone(), bot, Builtin::Add),
        ("lta", Ty::prod(a.clone(), a.clone()), Ty::bool(), bot, Builtin::Lt),
        ("c0", Ty::Unit, a.clone(), bot, Builtin::Const(0)),
        ("c1b", Ty::Unit, b.clone(), bot, Builtin::Const(1)),
        ("choose", Ty::Unit, a.clone(), top, Builtin::Nondet),
        ("pick", b.clone(), b.clone(), top, Builtin::Nondet),
        ("halt", Ty::Unit, Ty::Empty, top, Builtin::Fail),
    ];
    for (name, dom, cod, eff, bi) in rows {
        sig.add_instr(name, dom, cod, eff).expect("fresh");
        imp.bind(name, bi);
    }
    (sig, imp)
}

/// `n` instances of `rule`. Every instance applies forward, its result
/// re-typechecks, and applying the inverse to the result restores the
/// subject exactly when the rule is invertible (otherwise it only has to
/// apply).
pub fn fuzz_rule_instances(sig: &Signature, rule: RuleId, seed: u64, n: usize) -> Result<Vec<FuzzInstance>, FuzzError> {
    let cfg = GenConfig { term_depth: 1, max_blocks: 6, max_lets: 10, ..GenConfig::default() };
    let mut g = Gen::new(sig, seed, cfg);
    let invertible = super::rule_catalog().iter().find(|r| r.id == rule).map(|r| r.invertible).unwrap_or(false);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n {
        attempts += 1;
        if attempts > 50 * n + 100 {
            return Err(FuzzError::Exhausted { rule, made: out.len(), wanted: n });
        }
        g.reset();
        let Some(fi) = (if rule.is_term_rule() { term_instance(&mut g, rule) } else { region_instance(&mut g, rule) }) else {
            continue;
        };
        round_trip(sig, &fi, invertible)?;
        out.push(fi);
    }
    Ok(out)
}

fn round_trip(sig: &Signature, fi: &FuzzInstance, invertible: bool) -> Result<(), FuzzError> {
    let rule = fi.inst.rule;
    let broken = |msg: String, subject: String| FuzzError::Broken { rule, msg, subject };
    match &fi.judgment {
        Judgment::TermAt(ctx, eff, t, ty) => {
            let fwd = apply_term_rule(sig, ctx, *eff, t, ty, &fi.inst).map_err(|e| broken(format!("forward: {e}"), format!("{t:?}")))?;
            let back = apply_term_rule(sig, ctx, *eff, &fwd, ty, &fi.inverse)
                .map_err(|e| broken(format!("backward: {e}; forward gave {fwd:?}"), format!("{t:?}")))?;
            if invertible && back != *t {
                return Err(broken(format!("backward gave {back:?}"), format!("{t:?}")));
            }
        }
        Judgment::RegionAt(ctx, r, l) => {
            let fwd = apply_region_rule(sig, ctx, r, l, &fi.inst).map_err(|e| broken(format!("forward: {e}"), format!("{r:?}")))?;
            let back = apply_region_rule(sig, ctx, &fwd, l, &fi.inverse)
                .map_err(|e| broken(format!("backward: {e}; forward gave {fwd:?}"), format!("{r:?}")))?;
            if invertible && back != *r {
                return Err(broken(format!("backward gave {back:?}"), format!("{r:?}")));
            }
        }
    }
    Ok(())
}

fn needs_empty_hyp(rule: RuleId) -> bool {
    matches!(rule, RuleId::Initial | RuleId::InitialExpr | RuleId::InitialR)
}

fn base_ctx(g: &mut Gen<'_>, rule: RuleId) -> Ctx {
    let n = g.below(3);
    let mut ctx = g.ctx(n);
    let bot = g.sig.bot();
    if needs_empty_hyp(rule) || (matches!(rule, RuleId::Let1Abort | RuleId::Let1AbortR) && g.chance(0.3)) {
        let mut hyps: Vec<(Ty, Effect)> = ctx.hyps().iter().map(|h| (h.ty.clone(), h.eff)).collect();
        let at = g.below(hyps.len() + 1);
        hyps.insert(at, (Ty::Empty, bot));
        ctx = Ctx::from_hyps(hyps);
    }
    ctx
}

fn instance(rule: RuleId, path: Vec<usize>, fwd: Params, back: Params) -> (RuleInstance, RuleInstance) {
    (RuleInstance::new(rule).at(path.clone()).with(fwd), RuleInstance::new(rule).at(path).backward().with(back))
}

enum TFrame {
    Let1Body(Term),
    Let1Bound,
    PairL,
    PairR,
    CaseL(Term, Ty),
    CaseR(Term, Ty),
    Inl,
    Inr,
}

fn term_instance(g: &mut Gen<'_>, rule: RuleId) -> Option<FuzzInstance> {
    let sig = g.sig;
    let bot = sig.bot();
    let eff = if g.chance(0.5) { bot } else { sig.top() };
    let mut ctx = base_ctx(g, rule);
    let mut frames: Vec<(TFrame, Ctx)> = Vec::new();
    let mut path = Vec::new();
    for _ in 0..g.below(3) {
        let outer = ctx.clone();
        let (f, i) = match g.below(8) {
            0 => {
                let a_ty = g.ty();
                let a = g.try_term(&ctx, eff, &a_ty, 1)?;
                ctx = ctx.with(a_ty, bot);
                (TFrame::Let1Body(a), 1)
            }
            1 => (TFrame::Let1Bound, 0),
            2 => (TFrame::PairL, 0),
            3 => (TFrame::PairR, 1),
            k @ (4 | 5) => {
                let s = g.sum_ty();
                let e = g.try_term(&ctx, eff, &s, 1)?;
                let (x, y) = s.as_sum().map(|(x, y)| (x.clone(), y.clone()))?;
                if k == 4 {
                    ctx = ctx.with(x, bot);
                    (TFrame::CaseL(e, s), 1)
                } else {
                    ctx = ctx.with(y, bot);
                    (TFrame::CaseR(e, s), 2)
                }
            }
            6 => (TFrame::Inl, 0),
            _ => (TFrame::Inr, 0),
        };
        frames.push((f, outer));
        path.push(i);
    }
    let (mut t, mut ty, fwd, back) = local_term(g, rule, &ctx, eff)?;
    for (f, outer) in frames.into_iter().rev() {
        (t, ty) = match f {
            TFrame::Let1Body(a) => (tm::let1(a, t), ty),
            TFrame::Let1Bound => {
                let b_ty = g.ty();
                let b = g.try_term(&outer.with(ty, bot), eff, &b_ty, 1)?;
                (tm::let1(t, b), b_ty)
            }
            TFrame::PairL | TFrame::PairR => {
                let b_ty = g.ty();
                let b = g.try_term(&outer, eff, &b_ty, 1)?;
                if matches!(f, TFrame::PairL) {
                    (tm::pair(t, b), Ty::prod(ty, b_ty))
                } else {
                    (tm::pair(b, t), Ty::prod(b_ty, ty))
                }
            }
            TFrame::CaseL(e, s) => {
                let (_, y) = s.as_sum()?;
                let other = g.try_term(&outer.with(y.clone(), bot), eff, &ty, 1)?;
                (tm::case(e, t, other), ty)
            }
            TFrame::CaseR(e, s) => {
                let (x, _) = s.as_sum()?;
                let other = g.try_term(&outer.with(x.clone(), bot), eff, &ty, 1)?;
                (tm::case(e, other, t), ty)
            }
            TFrame::Inl => {
                let s = Ty::sum(ty, g.ty());
                (tm::inl(t, Some(s.clone())), s)
            }
            TFrame::Inr => {
                let s = Ty::sum(g.ty(), ty);
                (tm::inr(t, Some(s.clone())), s)
            }
        };
        ctx = outer;
    }
    let t = elaborate_term(sig, &ctx, eff, &t, &ty).ok()?;
    let (inst, inverse) = instance(rule, path, fwd, back);
    Some(FuzzInstance { judgment: Judgment::TermAt(ctx, eff, t, ty), inst, inverse })
}

fn terms(ts: Vec<Term>) -> Params {
    Params { terms: ts, ..Params::default() }
}

fn local_term(g: &mut Gen<'_>, rule: RuleId, ctx: &Ctx, eff: Effect) -> Option<(Term, Ty, Params, Params)> {
    use RuleId::*;
    let sig = g.sig;
    let bot = sig.bot();
    let none = Params::default;
    let ext = |c: &Ctx, t: &Ty| c.with(t.clone(), bot);
    let ext2 = |c: &Ctx, p: &Ty| {
        let (x, y) = p.as_prod().expect("product");
        c.with(x.clone(), bot).with(y.clone(), bot)
    };
    let d = 1;
    Some(match rule {
        Let1Beta => {
            let (a_ty, b_ty) = (g.ty(), g.ty());
            let a = g.try_term(ctx, bot, &a_ty, d)?;
            let b = g.try_term(&ext(ctx, &a_ty), eff, &b_ty, d)?;
            (tm::let1(a.clone(), b), b_ty, none(), terms(vec![a]))
        }
        Let1Eta => {
            let a_ty = g.ty();
            let a = g.try_term(ctx, eff, &a_ty, d)?;
            (tm::let1(a, Term::Var(0)), a_ty, none(), none())
        }
        Let1Op => {
            let ops: Vec<_> = sig.instrs.values().filter(|i| sig.effects.leq(i.eff, eff) && i.cod != Ty::Empty).cloned().collect();
            let f = ops.choose(&mut g.rng)?.clone();
            let a = g.try_term(ctx, eff, &f.dom, d)?;
            let c_ty = g.ty();
            let c = g.try_term(&ext(ctx, &f.cod), eff, &c_ty, d)?;
            (tm::let1(tm::op(&f.name, a), c), c_ty, none(), none())
        }
        Let1Let1 => {
            let (a_ty, b_ty, c_ty) = (g.ty(), g.ty(), g.ty());
            let a = g.try_term(ctx, eff, &a_ty, d)?;
            let b = g.try_term(&ext(ctx, &a_ty), eff, &b_ty, d)?;
            let c = g.try_term(&ext(ctx, &b_ty), eff, &c_ty, d)?;
            (tm::let1(tm::let1(a, b), c), c_ty, none(), none())
        }
        Let1Let2 => {
            let (p, c_ty, d_ty) = (g.prod_ty(), g.ty(), g.ty());
            let e = g.try_term(ctx, eff, &p, d)?;
            let c = g.try_term(&ext2(ctx, &p), eff, &c_ty, d)?;
            let dd = g.try_term(&ext(ctx, &c_ty), eff, &d_ty, d)?;
            (tm::let1(tm::let2(e, c), dd), d_ty, none(), none())
        }
        Let1Abort => {
            let a = g.try_term(ctx, eff, &Ty::Empty, d)?;
            let (a_ty, b_ty) = (g.ty(), g.ty());
            let b = g.try_term(&ext(ctx, &a_ty), eff, &b_ty, d)?;
            (tm::let1(tm::abort(a, Some(a_ty)), b), b_ty, none(), none())
        }
        Let1Case => {
            let (s, c_ty, d_ty) = (g.sum_ty(), g.ty(), g.ty());
            let (x, y) = s.as_sum()?;
            let e = g.try_term(ctx, eff, &s, d)?;
            let a = g.try_term(&ext(ctx, x), eff, &c_ty, d)?;
            let b = g.try_term(&ext(ctx, y), eff, &c_ty, d)?;
            let dd = g.try_term(&ext(ctx, &c_ty), eff, &d_ty, d)?;
            (tm::let1(tm::case(e, a, b), dd), d_ty, none(), none())
        }
        Let2Pair => {
            let (a_ty, b_ty, c_ty) = (g.ty(), g.ty(), g.ty());
            let a = g.try_term(ctx, eff, &a_ty, d)?;
            let b = g.try_term(ctx, eff, &b_ty, d)?;
            let c = g.try_term(&ext2(ctx, &Ty::prod(a_ty, b_ty)), eff, &c_ty, d)?;
            (tm::let2(tm::pair(a, b), c), c_ty, none(), none())
        }
        Let2Eta => {
            let p = g.prod_ty();
            let e = g.try_term(ctx, eff, &p, d)?;
            (tm::let2(e, tm::pair(Term::Var(1), Term::Var(0))), p, none(), none())
        }
        Let2Bind => {
            let (p, c_ty) = (g.prod_ty(), g.ty());
            let e = g.try_term(ctx, eff, &p, d)?;
            let c = g.try_term(&ext2(ctx, &p), eff, &c_ty, d)?;
            (tm::let2(e, c), c_ty, none(), none())
        }
        CaseInl | CaseInr => {
            let (a_ty, b_ty, c_ty) = (g.ty(), g.ty(), g.ty());
            let s = Ty::sum(a_ty.clone(), b_ty.clone());
            let c = g.try_term(&ext(ctx, &a_ty), eff, &c_ty, d)?;
            let dd = g.try_term(&ext(ctx, &b_ty), eff, &c_ty, d)?;
            let (t, other, oty) = if rule == CaseInl {
                let a = g.try_term(ctx, eff, &a_ty, d)?;
                (tm::case(tm::inl(a, Some(s)), c, dd.clone()), dd, b_ty)
            } else {
                let b = g.try_term(ctx, eff, &b_ty, d)?;
                (tm::case(tm::inr(b, Some(s)), c.clone(), dd), c, a_ty)
            };
            (t, c_ty, none(), Params { terms: vec![other], tys: vec![oty], ..Params::default() })
        }
        CaseEta => {
            let s = g.sum_ty();
            let e = g.try_term(ctx, eff, &s, d)?;
            (tm::case(e, tm::inl(Term::Var(0), Some(s.clone())), tm::inr(Term::Var(0), Some(s.clone()))), s, none(), none())
        }
        CaseBind => {
            let (s, c_ty) = (g.sum_ty(), g.ty());
            let (x, y) = s.as_sum()?;
            let e = g.try_term(ctx, eff, &s, d)?;
            let c = g.try_term(&ext(ctx, x), eff, &c_ty, d)?;
            let dd = g.try_term(&ext(ctx, y), eff, &c_ty, d)?;
            (tm::case(e, c, dd), c_ty, none(), none())
        }
        Initial => {
            let a_ty = g.ty();
            let t = g.try_term(ctx, eff, &a_ty, d)?;
            let tgt = g.try_term(ctx, eff, &a_ty, d)?;
            (t.clone(), a_ty, terms(vec![tgt]), terms(vec![t]))
        }
        Terminal => {
            let t = g.try_term(ctx, bot, &Ty::Unit, d)?;
            let tgt = g.try_term(ctx, bot, &Ty::Unit, d)?;
            (t.clone(), Ty::Unit, terms(vec![tgt]), terms(vec![t]))
        }
        InitialExpr => {
            let w = g.try_term(ctx, bot, &Ty::Empty, d)?;
            let a_ty = g.ty();
            let t = g.try_term(ctx, eff, &a_ty, d)?;
            let tgt = g.try_term(ctx, eff, &a_ty, d)?;
            (t.clone(), a_ty, terms(vec![w.clone(), tgt]), terms(vec![w, t]))
        }
        _ => return None,
    })
}

enum RFrame {
    Let1(Term),
    CaseL(Term, Ty),
    CaseR(Term, Ty),
    Head(Vec<Ty>),
    Body(usize, Vec<Ty>),
}

fn region_instance(g: &mut Gen<'_>, rule: RuleId) -> Option<FuzzInstance> {
    let sig = g.sig;
    let (bot, top) = (sig.bot(), sig.top());
    let mut ctx = base_ctx(g, rule);
    let n_labels = 1 + g.below(2);
    let mut l = g.label_ctx(n_labels);
    let mut frames: Vec<(RFrame, Ctx, LabelCtx)> = Vec::new();
    let mut path = Vec::new();
    for _ in 0..g.below(3) {
        let (outer, outer_l) = (ctx.clone(), l.clone());
        let (f, i) = match g.below(5) {
            0 => {
                let a_ty = g.ty();
                let a = g.try_term(&ctx, top, &a_ty, 1)?;
                ctx = ctx.with(a_ty, bot);
                (RFrame::Let1(a), 1)
            }
            k @ (1 | 2) => {
                let s = g.sum_ty();
                let e = g.try_term(&ctx, top, &s, 1)?;
                let (x, y) = s.as_sum().map(|(x, y)| (x.clone(), y.clone()))?;
                if k == 1 {
                    ctx = ctx.with(x, bot);
                    (RFrame::CaseL(e, s), 1)
                } else {
                    ctx = ctx.with(y, bot);
                    (RFrame::CaseR(e, s), 2)
                }
            }
            3 => {
                let params: Vec<Ty> = (0..1 + g.below(2)).map(|_| g.ty()).collect();
                l = l.extended(&params);
                (RFrame::Head(params), 0)
            }
            _ => {
                let params: Vec<Ty> = (0..1 + g.below(2)).map(|_| g.ty()).collect();
                let i = g.below(params.len());
                l = l.extended(&params);
                ctx = ctx.with(params[i].clone(), bot);
                (RFrame::Body(i, params), 1 + i)
            }
        };
        frames.push((f, outer, outer_l));
        path.push(i);
    }
    let (mut r, fwd, back) = local_region(g, rule, &ctx, &l)?;
    for (f, outer, outer_l) in frames.into_iter().rev() {
        r = match f {
            RFrame::Let1(a) => rg::let1(a, r),
            RFrame::CaseL(e, s) => {
                let (_, y) = s.as_sum()?;
                let other = g.try_region(&outer.with(y.clone(), bot), &outer_l, 1)?;
                rg::case(e, r, other)
            }
            RFrame::CaseR(e, s) => {
                let (x, _) = s.as_sum()?;
                let other = g.try_region(&outer.with(x.clone(), bot), &outer_l, 1)?;
                rg::case(e, other, r)
            }
            RFrame::Head(params) => {
                let bs = g.blocks_for(&outer, &l, &params, 1)?;
                rg::wh(r, bs)
            }
            RFrame::Body(i, params) => {
                let head = g.try_region(&outer, &l, 1)?;
                let mut bs = g.blocks_for(&outer, &l, &params, 1)?;
                bs[i].body = r;
                rg::wh(head, bs)
            }
        };
        ctx = outer;
        l = outer_l;
    }
    let r = elaborate_region(sig, &ctx, &r, &l).ok()?;
    let (inst, inverse) = instance(rule, path, fwd, back);
    Some(FuzzInstance { judgment: Judgment::RegionAt(ctx, r, l), inst, inverse })
}

fn local_region(g: &mut Gen<'_>, rule: RuleId, ctx: &Ctx, l: &LabelCtx) -> Option<(Region, Params, Params)> {
    use RuleId::*;
    let sig = g.sig;
    let (bot, top) = (sig.bot(), sig.top());
    let none = Params::default;
    let ext = |c: &Ctx, t: &Ty| c.with(t.clone(), bot);
    let ext2 = |c: &Ctx, p: &Ty| {
        let (x, y) = p.as_prod().expect("product");
        c.with(x.clone(), bot).with(y.clone(), bot)
    };
    let d = 1;
    let params = |g: &mut Gen<'_>, lo: usize, hi: usize| -> Vec<Ty> { (0..lo + g.below(hi - lo + 1)).map(|_| g.ty()).collect() };
    Some(match rule {
        Let1BetaR => {
            let a_ty = g.ty();
            let a = g.try_term(ctx, bot, &a_ty, d)?;
            let r = g.try_region(&ext(ctx, &a_ty), l, d)?;
            (rg::let1(a.clone(), r), none(), terms(vec![a]))
        }
        Let1OpR => {
            let ops: Vec<_> = sig.instrs.values().filter(|i| i.cod != Ty::Empty).cloned().collect();
            let f = ops.choose(&mut g.rng)?.clone();
            let a = g.try_term(ctx, top, &f.dom, d)?;
            let r = g.try_region(&ext(ctx, &f.cod), l, d)?;
            (rg::let1(tm::op(&f.name, a), r), none(), none())
        }
        Let1Let1R => {
            let (a_ty, b_ty) = (g.ty(), g.ty());
            let a = g.try_term(ctx, top, &a_ty, d)?;
            let b = g.try_term(&ext(ctx, &a_ty), top, &b_ty, d)?;
            let r = g.try_region(&ext(ctx, &b_ty), l, d)?;
            (rg::let1(tm::let1(a, b), r), none(), none())
        }
        Let1Let2R => {
            let (p, c_ty) = (g.prod_ty(), g.ty());
            let e = g.try_term(ctx, top, &p, d)?;
            let c = g.try_term(&ext2(ctx, &p), top, &c_ty, d)?;
            let r = g.try_region(&ext(ctx, &c_ty), l, d)?;
            (rg::let1(tm::let2(e, c), r), none(), none())
        }
        Let1CaseR => {
            let (s, c_ty) = (g.sum_ty(), g.ty());
            let (x, y) = s.as_sum()?;
            let e = g.try_term(ctx, top, &s, d)?;
            let a = g.try_term(&ext(ctx, x), top, &c_ty, d)?;
            let b = g.try_term(&ext(ctx, y), top, &c_ty, d)?;
            let r = g.try_region(&ext(ctx, &c_ty), l, d)?;
            (rg::let1(tm::case(e, a, b), r), none(), none())
        }
        Let1AbortR => {
            let a = g.try_term(ctx, top, &Ty::Empty, d)?;
            let a_ty = g.ty();
            let r = g.try_region(&ext(ctx, &a_ty), l, d)?;
            (rg::let1(tm::abort(a, Some(a_ty)), r), none(), none())
        }
        Let2PairR => {
            let (a_ty, b_ty) = (g.ty(), g.ty());
            let a = g.try_term(ctx, top, &a_ty, d)?;
            let b = g.try_term(ctx, top, &b_ty, d)?;
            let r = g.try_region(&ext2(ctx, &Ty::prod(a_ty, b_ty)), l, d)?;
            (rg::let2(tm::pair(a, b), r), none(), none())
        }
        Let2BindR => {
            let p = g.prod_ty();
            let e = g.try_term(ctx, top, &p, d)?;
            let r = g.try_region(&ext2(ctx, &p), l, d)?;
            (rg::let2(e, r), none(), none())
        }
        CaseInlR | CaseInrR => {
            let (a_ty, b_ty) = (g.ty(), g.ty());
            let s = Ty::sum(a_ty.clone(), b_ty.clone());
            let left = g.try_region(&ext(ctx, &a_ty), l, d)?;
            let right = g.try_region(&ext(ctx, &b_ty), l, d)?;
            let (r, other, oty) = if rule == CaseInlR {
                let a = g.try_term(ctx, top, &a_ty, d)?;
                (rg::case(tm::inl(a, Some(s)), left, right.clone()), right, b_ty)
            } else {
                let b = g.try_term(ctx, top, &b_ty, d)?;
                (rg::case(tm::inr(b, Some(s)), left.clone(), right), left, a_ty)
            };
            (r, none(), Params { regions: vec![other], tys: vec![oty], ..Params::default() })
        }
        CaseBindR | Case2Cfg => {
            let s = g.sum_ty();
            let (x, y) = s.as_sum()?;
            let e = g.try_term(ctx, top, &s, d)?;
            let left = g.try_region(&ext(ctx, x), l, d)?;
            let right = g.try_region(&ext(ctx, y), l, d)?;
            (rg::case(e, left, right), none(), none())
        }
        CfgBeta1 | CfgBeta2 => {
            let ps = params(g, 1, 2);
            let l2 = l.extended(&ps);
            let bs = g.blocks_for(ctx, &l2, &ps, d)?;
            let k = if rule == CfgBeta1 { g.below(ps.len()) } else { ps.len() + g.below(l.len()) };
            let a = g.try_term(ctx, bot, l2.get(k)?, d)?;
            let back = if rule == CfgBeta1 {
                Params { count: Some(ps.len() - 1 - k), ..Params::default() }
            } else {
                Params { blocks: bs.clone(), ..Params::default() }
            };
            (rg::wh(rg::br(k, a), bs), none(), back)
        }
        CfgEta => {
            let ps = params(g, 1, 2);
            let l2 = l.extended(&ps);
            let head = g.try_region(ctx, &l2, d)?;
            let bs = g.blocks_for(ctx, &l2, &ps, d)?;
            (rg::wh(head.clone(), bs.clone()), none(), Params { blocks: bs, regions: vec![head], ..Params::default() })
        }
        Codiag => {
            let a_ty = g.ty();
            let la = l.extended(&[a_ty.clone()]);
            let r = g.try_region(ctx, &la, d)?;
            let s = g.try_region(&ext(ctx, &a_ty), &la.extended(&[a_ty.clone()]), d)?;
            let inner = rg::wh(rg::br(0, Term::Var(0)), vec![rg::block(a_ty.clone(), s.shift_vars(1, 1))]);
            (rg::wh(r, vec![rg::block(a_ty, inner)]), none(), none())
        }
        Uni => {
            let a_ty = g.ty();
            let la = l.extended(&[a_ty.clone()]);
            let r = g.try_region(ctx, &la, d)?;
            let (b_ty, t, s, e) = if g.chance(0.5) {
                let s = g.try_region(&ext(ctx, &a_ty), &la, d)?;
                (a_ty.clone(), s.clone(), s, Term::Var(0))
            } else {
                let b_ty = g.ty();
                let t = g.try_region(ctx, &la, d)?.shift_vars(0, 1);
                let e = g.try_term(&ext(ctx, &a_ty), bot, &b_ty, d)?;
                let s = rg::wh(t.shift_labels(1, 1), vec![rg::block(a_ty.clone(), rg::br(1, e.shift(1, 1)))]);
                (b_ty, t, s, e)
            };
            let lhs = rg::wh(
                rg::wh(r.shift_labels(1, 1), vec![rg::block(a_ty, rg::br(1, e.clone()))]),
                vec![rg::block(b_ty.clone(), s.clone())],
            );
            (
                lhs,
                Params { regions: vec![t], ..Params::default() },
                Params { terms: vec![e], regions: vec![s], tys: vec![b_ty], ..Params::default() },
            )
        }
        Dinat => {
            let a_tys = params(g, 1, 2);
            let b_tys = params(g, 1, 2);
            let (la, lb) = (l.extended(&a_tys), l.extended(&b_tys));
            let sigma = a_tys.iter().map(|a| g.try_region(&ext(ctx, a), &lb, 0)).collect::<Option<Vec<_>>>()?;
            let head = g.try_region(ctx, &la, d)?;
            let blocks = g.blocks_for(ctx, &la, &b_tys, d)?;
            let (lhs, _) = dinat_sides(&head, &a_tys, &sigma, &blocks);
            let lhs = elaborate_region(sig, ctx, &lhs, l).ok()?;
            let mut regions = vec![head];
            regions.extend(sigma);
            let p = Params { regions, tys: a_tys, blocks, ..Params::default() };
            (lhs, p.clone(), p)
        }
        InitialR => {
            let r = g.try_region(ctx, l, d)?;
            let tgt = g.try_region(ctx, l, d)?;
            (r.clone(), Params { regions: vec![tgt], ..Params::default() }, Params { regions: vec![r], ..Params::default() })
        }
        CfgFuse1 => {
            let ts = params(g, 1, 2);
            let ss = params(g, 1, 2);
            let lt = l.extended(&ts);
            let lts = lt.extended(&ss);
            let head = g.try_region(ctx, &lts, d)?;
            let sb = g.blocks_for(ctx, &lts, &ss, d)?;
            let tb = g.blocks_for(ctx, &lt, &ts, d)?;
            (rg::wh(rg::wh(head, sb), tb), none(), Params { count: Some(ss.len()), ..Params::default() })
        }
        CfgFuse2 => {
            let mut ts = params(g, 0, 1);
            let b_ty = g.ty();
            let n_ts = ts.len();
            ts.push(b_ty.clone());
            let l1 = l.extended(&ts);
            let inner = params(g, 1, 2);
            let l2 = l1.extended(&inner);
            let head = g.try_region(ctx, &l1, d)?;
            let mut bs = g.blocks_for(ctx, &l1, &ts[..n_ts], d)?;
            let s = g.try_region(&ext(ctx, &b_ty), &l2, d)?;
            let ib: Vec<Block> = g
                .blocks_for(ctx, &l2, &inner, d)?
                .into_iter()
                .map(|b| Block { param: b.param, body: b.body.shift_vars(1, 1) })
                .collect();
            bs.push(rg::block(b_ty, rg::wh(s, ib)));
            (rg::wh(head, bs), none(), Params { count: Some(inner.len()), ..Params::default() })
        }
        PermCfg => {
            let ps = params(g, 2, 3);
            let r = g.where_with(ctx, l, &ps, d)?;
            let mut perm: Vec<usize> = (0..ps.len()).collect();
            perm.shuffle(&mut g.rng);
            let p = Params { perm, ..Params::default() };
            (r, p.clone(), p)
        }
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_rule_has_instances() {
        let (sig, imp) = fuzz_signature();
        imp.check(&sig).unwrap();
        for &rule in RuleId::ALL {
            let xs = fuzz_rule_instances(&sig, rule, 11, 10).unwrap_or_else(|e| panic!("{e}"));
            assert_eq!(xs.len(), 10);
            assert!(xs.iter().all(|x| x.judgment.holds(&sig)));
        }
    }
}
