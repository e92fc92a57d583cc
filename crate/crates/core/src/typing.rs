//! Type checking for terms, regions and substitutions, plus recognizers for
//! the syntactic sub-classes (atomic, ANF, strict, structured).
//!
//! Checking is bidirectional. Injections and `abort` may omit their type
//! annotation when checked against a known type; the elaborating entry
//! points return a copy with every annotation filled in.

use std::fmt;

use crate::ir::{Block, Ctx, Effect, LabelCtx, Region, Signature, Term, Ty};
use crate::subst::{LabelSubst, Subst};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeError {
    /// Name of the typing rule that failed.
    pub rule: &'static str,
    /// Child-index path from the root to the failing node.
    pub path: Vec<usize>,
    pub msg: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] at ", self.rule)?;
        if self.path.is_empty() {
            write!(f, "root")?;
        } else {
            let p: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
            write!(f, "{}", p.join("."))?;
        }
        write!(f, ": {}", self.msg)
    }
}

impl std::error::Error for TypeError {}

/// A typing judgment, used by callers that carry judgments around as data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Judgment {
    TermAt(Ctx, Effect, Term, Ty),
    RegionAt(Ctx, Region, LabelCtx),
}

impl Judgment {
    pub fn holds(&self, sig: &Signature) -> bool {
        match self {
            Judgment::TermAt(c, e, t, ty) => check_term(sig, c, *e, t, ty),
            Judgment::RegionAt(c, r, l) => check_region(sig, c, r, l),
        }
    }
}

struct Tc<'a> {
    sig: &'a Signature,
    ctx: Ctx,
    path: Vec<usize>,
}

type Res<T> = Result<T, TypeError>;

impl<'a> Tc<'a> {
    fn new(sig: &'a Signature, ctx: &Ctx) -> Self {
        Tc { sig, ctx: ctx.clone(), path: Vec::new() }
    }

    fn err<T>(&self, rule: &'static str, msg: String) -> Res<T> {
        Err(TypeError { rule, path: self.path.clone(), msg })
    }

    fn at<R>(&mut self, i: usize, f: impl FnOnce(&mut Self) -> R) -> R {
        self.path.push(i);
        let r = f(self);
        self.path.pop();
        r
    }

    /// Runs `f` with pure hypotheses for `tys` pushed in order (last is index 0).
    fn bind<R>(&mut self, tys: &[Ty], f: impl FnOnce(&mut Self) -> R) -> R {
        let bot = self.sig.bot();
        for t in tys {
            self.ctx.push(t.clone(), bot);
        }
        let r = f(self);
        for _ in tys {
            self.ctx.0.pop();
        }
        r
    }

    fn wf_ty(&self, t: &Ty) -> Res<()> {
        match self.sig.check_ty(t) {
            Ok(()) => Ok(()),
            Err(e) => self.err("wf-type", e.to_string()),
        }
    }

    fn var(&self, i: usize, eff: Effect) -> Res<Ty> {
        let h = match self.ctx.lookup(i) {
            Ok(h) => h,
            Err(e) => return self.err("var", e.to_string()),
        };
        if !self.sig.effects.leq(h.eff, eff) {
            return self.err(
                "var",
                format!(
                    "variable {i} has effect {} which exceeds {}",
                    self.sig.effects.name(h.eff),
                    self.sig.effects.name(eff)
                ),
            );
        }
        Ok(h.ty.clone())
    }

    fn infer(&mut self, eff: Effect, t: &Term) -> Res<(Term, Ty)> {
        match t {
            Term::Var(i) => Ok((t.clone(), self.var(*i, eff)?)),
            Term::Op(f, a) => {
                let ins = match self.sig.instr(f) {
                    Some(i) => i.clone(),
                    None => return self.err("op", format!("unknown instruction `{f}`")),
                };
                if !self.sig.effects.leq(ins.eff, eff) {
                    return self.err(
                        "op",
                        format!(
                            "instruction `{f}` has effect {} which exceeds {}",
                            self.sig.effects.name(ins.eff),
                            self.sig.effects.name(eff)
                        ),
                    );
                }
                let a = self.at(0, |s| s.check(eff, a, &ins.dom))?;
                Ok((Term::Op(f.clone(), Box::new(a)), ins.cod))
            }
            Term::Let1(a, b) => {
                let (a, ta) = self.at(0, |s| s.infer(eff, a))?;
                let (b, tb) = self.at(1, |s| s.bind(&[ta], |s| s.infer(eff, b)))?;
                Ok((Term::Let1(Box::new(a), Box::new(b)), tb))
            }
            Term::Unit => Ok((Term::Unit, Ty::Unit)),
            Term::Pair(a, b) => {
                let (a, ta) = self.at(0, |s| s.infer(eff, a))?;
                let (b, tb) = self.at(1, |s| s.infer(eff, b))?;
                Ok((Term::Pair(Box::new(a), Box::new(b)), Ty::prod(ta, tb)))
            }
            Term::Let2(a, b) => {
                let (a, ta) = self.at(0, |s| s.infer(eff, a))?;
                let (x, y) = match ta.as_prod() {
                    Some((x, y)) => (x.clone(), y.clone()),
                    None => return self.at(0, |s| s.err("let2", format!("expected a product, found {ta}"))),
                };
                let (b, tb) = self.at(1, |s| s.bind(&[x, y], |s| s.infer(eff, b)))?;
                Ok((Term::Let2(Box::new(a), Box::new(b)), tb))
            }
            Term::Inl(_, Some(ty)) | Term::Inr(_, Some(ty)) | Term::Abort(_, Some(ty)) => {
                self.wf_ty(ty)?;
                let t = self.check(eff, t, ty)?;
                Ok((t, ty.clone()))
            }
            Term::Inl(_, None) => self.err("inl", "cannot infer the type of an unannotated injection".into()),
            Term::Inr(_, None) => self.err("inr", "cannot infer the type of an unannotated injection".into()),
            Term::Abort(_, None) => self.err("abort", "cannot infer the type of an unannotated abort".into()),
            Term::Case(e, a, b) => {
                let (e, te) = self.at(0, |s| s.infer(eff, e))?;
                let (x, y) = match te.as_sum() {
                    Some((x, y)) => (x.clone(), y.clone()),
                    None => return self.at(0, |s| s.err("case", format!("expected a sum, found {te}"))),
                };
                match self.at(1, |s| s.bind(&[x.clone()], |s| s.infer(eff, a))) {
                    Ok((a, ta)) => {
                        let b = self.at(2, |s| s.bind(&[y], |s| s.check(eff, b, &ta)))?;
                        Ok((Term::Case(Box::new(e), Box::new(a), Box::new(b)), ta))
                    }
                    Err(left_err) => {
                        let (b, tb) = match self.at(2, |s| s.bind(&[y], |s| s.infer(eff, b))) {
                            Ok(v) => v,
                            Err(_) => return Err(left_err),
                        };
                        let a = self.at(1, |s| s.bind(&[x], |s| s.check(eff, a, &tb)))?;
                        Ok((Term::Case(Box::new(e), Box::new(a), Box::new(b)), tb))
                    }
                }
            }
        }
    }

    fn check(&mut self, eff: Effect, t: &Term, ty: &Ty) -> Res<Term> {
        match t {
            Term::Inl(a, ann) | Term::Inr(a, ann) => {
                let left = matches!(t, Term::Inl(..));
                let rule = if left { "inl" } else { "inr" };
                if let Some(ann) = ann {
                    if ann != ty {
                        return self.err(rule, format!("annotation {ann} does not match expected {ty}"));
                    }
                }
                let (x, y) = match ty.as_sum() {
                    Some(p) => p,
                    None => return self.err(rule, format!("injection checked against non-sum type {ty}")),
                };
                let part = if left { x } else { y };
                let a = self.at(0, |s| s.check(eff, a, part))?;
                Ok(if left { Term::Inl(Box::new(a), Some(ty.clone())) } else { Term::Inr(Box::new(a), Some(ty.clone())) })
            }
            Term::Abort(a, ann) => {
                if let Some(ann) = ann {
                    if ann != ty {
                        return self.err("abort", format!("annotation {ann} does not match expected {ty}"));
                    }
                }
                let a = self.at(0, |s| s.check(eff, a, &Ty::Empty))?;
                Ok(Term::Abort(Box::new(a), Some(ty.clone())))
            }
            Term::Let1(a, b) => {
                let (a, ta) = self.at(0, |s| s.infer(eff, a))?;
                let b = self.at(1, |s| s.bind(&[ta], |s| s.check(eff, b, ty)))?;
                Ok(Term::Let1(Box::new(a), Box::new(b)))
            }
            Term::Let2(a, b) => {
                let (a, ta) = self.at(0, |s| s.infer(eff, a))?;
                let (x, y) = match ta.as_prod() {
                    Some((x, y)) => (x.clone(), y.clone()),
                    None => return self.at(0, |s| s.err("let2", format!("expected a product, found {ta}"))),
                };
                let b = self.at(1, |s| s.bind(&[x, y], |s| s.check(eff, b, ty)))?;
                Ok(Term::Let2(Box::new(a), Box::new(b)))
            }
            Term::Pair(a, b) => {
                let (x, y) = match ty.as_prod() {
                    Some(p) => p,
                    None => return self.err("pair", format!("pair checked against non-product type {ty}")),
                };
                let a = self.at(0, |s| s.check(eff, a, x))?;
                let b = self.at(1, |s| s.check(eff, b, y))?;
                Ok(Term::Pair(Box::new(a), Box::new(b)))
            }
            Term::Case(e, a, b) => {
                let (e, te) = self.at(0, |s| s.infer(eff, e))?;
                let (x, y) = match te.as_sum() {
                    Some((x, y)) => (x.clone(), y.clone()),
                    None => return self.at(0, |s| s.err("case", format!("expected a sum, found {te}"))),
                };
                let a = self.at(1, |s| s.bind(&[x], |s| s.check(eff, a, ty)))?;
                let b = self.at(2, |s| s.bind(&[y], |s| s.check(eff, b, ty)))?;
                Ok(Term::Case(Box::new(e), Box::new(a), Box::new(b)))
            }
            _ => {
                let (t, got) = self.infer(eff, t)?;
                if &got != ty {
                    let rule = match t {
                        Term::Var(_) => "var",
                        Term::Op(..) => "op",
                        Term::Unit => "unit",
                        _ => "conv",
                    };
                    return self.err(rule, format!("expected {ty}, found {got}"));
                }
                Ok(t)
            }
        }
    }

    fn region(&mut self, r: &Region, l: &LabelCtx) -> Res<Region> {
        let top = self.sig.top();
        match r {
            Region::Br(k, a) => {
                let ty = match l.get(*k) {
                    Some(t) => t.clone(),
                    None => return self.err("br", format!("label {k} out of range for {} labels", l.len())),
                };
                let a = self.at(0, |s| s.check(self_bot(s), a, &ty))?;
                Ok(Region::Br(*k, a))
            }
            Region::Let1(a, body) => {
                let (a, ta) = self.at(0, |s| s.infer(top, a))?;
                let body = self.at(1, |s| s.bind(&[ta], |s| s.region(body, l)))?;
                Ok(Region::Let1(a, Box::new(body)))
            }
            Region::Let2(a, body) => {
                let (a, ta) = self.at(0, |s| s.infer(top, a))?;
                let (x, y) = match ta.as_prod() {
                    Some((x, y)) => (x.clone(), y.clone()),
                    None => return self.at(0, |s| s.err("let2-r", format!("expected a product, found {ta}"))),
                };
                let body = self.at(1, |s| s.bind(&[x, y], |s| s.region(body, l)))?;
                Ok(Region::Let2(a, Box::new(body)))
            }
            Region::Case(e, r1, r2) => {
                let (e, te) = self.at(0, |s| s.infer(top, e))?;
                let (x, y) = match te.as_sum() {
                    Some((x, y)) => (x.clone(), y.clone()),
                    None => return self.at(0, |s| s.err("case-r", format!("expected a sum, found {te}"))),
                };
                let r1 = self.at(1, |s| s.bind(&[x], |s| s.region(r1, l)))?;
                let r2 = self.at(2, |s| s.bind(&[y], |s| s.region(r2, l)))?;
                Ok(Region::Case(e, Box::new(r1), Box::new(r2)))
            }
            Region::Where(head, bs) => {
                for (i, b) in bs.iter().enumerate() {
                    self.at(i + 1, |s| s.wf_ty(&b.param))?;
                }
                let l2 = l.with_blocks(bs);
                let head = self.at(0, |s| s.region(head, &l2))?;
                let mut out = Vec::with_capacity(bs.len());
                for (i, b) in bs.iter().enumerate() {
                    let body = self.at(i + 1, |s| s.bind(&[b.param.clone()], |s| s.region(&b.body, &l2)))?;
                    out.push(Block { param: b.param.clone(), body });
                }
                Ok(Region::Where(Box::new(head), out))
            }
        }
    }
}

fn self_bot(s: &Tc<'_>) -> Effect {
    s.sig.bot()
}

/// `Γ ⊢_ε t : A`, with a diagnostic on failure; returns the elaborated term.
pub fn elaborate_term(sig: &Signature, ctx: &Ctx, eff: Effect, t: &Term, ty: &Ty) -> Result<Term, TypeError> {
    let mut tc = Tc::new(sig, ctx);
    tc.wf_ty(ty)?;
    tc.check(eff, t, ty)
}

pub fn check_term_diag(sig: &Signature, ctx: &Ctx, eff: Effect, t: &Term, ty: &Ty) -> Result<(), TypeError> {
    elaborate_term(sig, ctx, eff, t, ty).map(|_| ())
}

pub fn check_term(sig: &Signature, ctx: &Ctx, eff: Effect, t: &Term, ty: &Ty) -> bool {
    check_term_diag(sig, ctx, eff, t, ty).is_ok()
}

pub fn infer_term_diag(sig: &Signature, ctx: &Ctx, eff: Effect, t: &Term) -> Result<(Term, Ty), TypeError> {
    Tc::new(sig, ctx).infer(eff, t)
}

pub fn infer_term(sig: &Signature, ctx: &Ctx, eff: Effect, t: &Term) -> Option<Ty> {
    infer_term_diag(sig, ctx, eff, t).ok().map(|(_, ty)| ty)
}

/// `Γ ⊢ r ▷ L`, with a diagnostic on failure; returns the elaborated region.
pub fn elaborate_region(sig: &Signature, ctx: &Ctx, r: &Region, l: &LabelCtx) -> Result<Region, TypeError> {
    let tc = Tc::new(sig, ctx);
    for t in &l.0 {
        tc.wf_ty(t)?;
    }
    let mut tc = tc;
    tc.region(r, l)
}

pub fn check_region_diag(sig: &Signature, ctx: &Ctx, r: &Region, l: &LabelCtx) -> Result<(), TypeError> {
    elaborate_region(sig, ctx, r, l).map(|_| ())
}

pub fn check_region(sig: &Signature, ctx: &Ctx, r: &Region, l: &LabelCtx) -> bool {
    check_region_diag(sig, ctx, r, l).is_ok()
}

/// `Γ ⊢ γ : Δ`. Entries beyond the explicit prefix are the tail variables.
pub fn check_subst_diag(sig: &Signature, g: &Ctx, gamma: &Subst, d: &Ctx) -> Result<(), TypeError> {
    if gamma.len() > d.len() {
        return Err(TypeError {
            rule: "sb-len",
            path: vec![],
            msg: format!("substitution has {} entries for a context of length {}", gamma.len(), d.len()),
        });
    }
    for i in 0..d.len() {
        let h = d.lookup(i).expect("in range");
        let t = gamma.get(i);
        check_term_diag(sig, g, h.eff, &t, &h.ty).map_err(|mut e| {
            e.path.insert(0, i);
            e
        })?;
    }
    Ok(())
}

pub fn check_subst(sig: &Signature, g: &Ctx, gamma: &Subst, d: &Ctx) -> bool {
    check_subst_diag(sig, g, gamma, d).is_ok()
}

/// `σ : L ⇝ K` under `Γ`: every body types against `K` with its parameter bound.
pub fn check_label_subst_diag(
    sig: &Signature,
    g: &Ctx,
    sigma: &LabelSubst,
    l: &LabelCtx,
    k: &LabelCtx,
) -> Result<(), TypeError> {
    if sigma.len() > l.len() {
        return Err(TypeError {
            rule: "ls-len",
            path: vec![],
            msg: format!("label substitution has {} entries for {} labels", sigma.len(), l.len()),
        });
    }
    for i in 0..l.len() {
        let a = l.get(i).expect("in range");
        let body = sigma.get(i);
        check_region_diag(sig, &g.with(a.clone(), sig.bot()), &body, k).map_err(|mut e| {
            e.path.insert(0, i);
            e
        })?;
    }
    Ok(())
}

pub fn check_label_subst(sig: &Signature, g: &Ctx, sigma: &LabelSubst, l: &LabelCtx, k: &LabelCtx) -> bool {
    check_label_subst_diag(sig, g, sigma, l, k).is_ok()
}

/// Join of the effects of all hypotheses.
pub fn ctx_effect(sig: &Signature, ctx: &Ctx) -> Effect {
    ctx.hyps().iter().fold(sig.bot(), |e, h| sig.effects.join(e, h.eff))
}

/// Syntactic shape of an atomic expression.
pub fn is_atomic_shape(t: &Term) -> bool {
    use Term::*;
    match t {
        Var(_) | Unit => true,
        Op(_, a) | Inl(a, _) | Inr(a, _) | Abort(a, _) => a.is_var(),
        Pair(a, b) => a.is_var() && b.is_var(),
        _ => false,
    }
}

pub fn is_atomic(sig: &Signature, ctx: &Ctx, eff: Effect, t: &Term, ty: &Ty) -> bool {
    is_atomic_shape(t) && check_term(sig, ctx, eff, t, ty)
}

fn anf_shape(r: &Region) -> bool {
    match r {
        Region::Br(_, a) => a.is_var(),
        Region::Let1(a, r) | Region::Let2(a, r) => is_atomic_shape(a) && anf_shape(r),
        Region::Case(e, r, s) => e.is_var() && anf_shape(r) && anf_shape(s),
        Region::Where(r, bs) => anf_shape(r) && bs.iter().all(|b| anf_shape(&b.body)),
    }
}

/// ANF: lets bind atomic expressions, branches and case scrutinees are variables.
pub fn check_anf(sig: &Signature, ctx: &Ctx, r: &Region, l: &LabelCtx) -> bool {
    anf_shape(r) && check_region(sig, ctx, r, l)
}

fn is_terminator(r: &Region) -> bool {
    match r {
        Region::Br(_, a) => a.is_var(),
        Region::Case(e, r, s) => e.is_var() && is_terminator(r) && is_terminator(s),
        _ => false,
    }
}

fn strict_block(r: &Region) -> bool {
    match r {
        Region::Let1(a, r) | Region::Let2(a, r) => is_atomic_shape(a) && strict_block(r),
        Region::Where(t, bs) => is_terminator(t) && bs.iter().all(|b| strict_block(&b.body)),
        _ => false,
    }
}

/// Is `r` a terminator: a tree of cases on variables with branches on variables at the leaves.
pub fn is_terminator_shape(r: &Region) -> bool {
    is_terminator(r)
}

/// Strict SSA: a basic block of atomic lets ending in a where-wrapped
/// terminator whose blocks are themselves strict.
pub fn check_strict(sig: &Signature, ctx: &Ctx, r: &Region, l: &LabelCtx) -> bool {
    strict_block(r) && check_region(sig, ctx, r, l)
}

pub fn is_strict_shape(r: &Region) -> bool {
    strict_block(r)
}

/// The diverging region with no exits used for empty label contexts.
pub fn infinite_loop() -> Region {
    Region::Where(
        Box::new(Region::Br(0, Term::Unit)),
        vec![Block { param: Ty::Unit, body: Region::Br(0, Term::Var(0)) }],
    )
}

fn only_label0(r: &Region) -> bool {
    r.free_labels().iter().all(|&l| l == 0)
}

fn structured(r: &Region, l: &LabelCtx) -> bool {
    match r {
        Region::Br(..) => true,
        Region::Let1(_, r) | Region::Let2(_, r) => structured(r, l),
        Region::Case(_, r, s) => structured(r, l) && structured(s, l),
        Region::Where(head, bs) => {
            if r == &infinite_loop() {
                return true;
            }
            if bs.len() != 1 {
                return false;
            }
            let a = &bs[0].param;
            let body = &bs[0].body;
            // loop(e, r')
            if l.len() == 1 {
                if let (Region::Br(0, _), Region::Where(inner, ibs)) = (head.as_ref(), body) {
                    let b = l.get(0).expect("one label");
                    let cont = Region::Case(
                        Term::Var(0),
                        Box::new(Region::Br(2, Term::Var(0))),
                        Box::new(Region::Br(1, Term::Var(0))),
                    );
                    if ibs.len() == 1
                        && ibs[0].param == Ty::sum(b.clone(), a.clone())
                        && ibs[0].body == cont
                        && only_label0(inner)
                        && structured(inner, &LabelCtx(vec![ibs[0].param.clone()]))
                    {
                        return true;
                    }
                }
            }
            // seq(r, s)
            if only_label0(head) && structured(head, &LabelCtx(vec![a.clone()])) && !body.uses_label(0) {
                if let Some(s) = body.unshift_labels(0, 1) {
                    return structured(&s, l);
                }
            }
            false
        }
    }
}

/// Structured control flow: branches, lets, cases, sequencing and loops only.
pub fn check_structured(sig: &Signature, ctx: &Ctx, r: &Region, l: &LabelCtx) -> bool {
    check_region(sig, ctx, r, l) && structured(r, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{rg, tm, EffectLattice};

    fn sig() -> Signature {
        let mut s = Signature::new(EffectLattice::two_point());
        s.add_base("a", 2).unwrap();
        let bot = s.bot();
        let top = s.top();
        s.add_instr("f", Ty::base("a"), Ty::base("a"), bot).unwrap();
        s.add_instr("g", Ty::base("a"), Ty::base("a"), top).unwrap();
        s
    }

    #[test]
    fn term_examples() {
        let s = sig();
        let (bot, top) = (s.bot(), s.top());
        assert!(check_term(&s, &Ctx::new(), bot, &Term::Unit, &Ty::Unit));
        let c = Ctx::from_hyps(vec![(Ty::base("a"), top)]);
        assert!(!check_term(&s, &c, bot, &tm::var(0), &Ty::base("a")));
        assert!(check_term(&s, &c, top, &tm::var(0), &Ty::base("a")));
        let t = tm::case(tm::inl(Term::Unit, Some(Ty::bool())), tm::inr(Term::Unit, None), tm::inl(Term::Unit, None));
        assert!(check_term(&s, &Ctx::new(), bot, &t, &Ty::bool()));
    }

    #[test]
    fn effects_of_instructions() {
        let s = sig();
        let c = Ctx::from_hyps(vec![(Ty::base("a"), s.bot())]);
        assert!(check_term(&s, &c, s.bot(), &tm::op("f", tm::var(0)), &Ty::base("a")));
        assert!(!check_term(&s, &c, s.bot(), &tm::op("g", tm::var(0)), &Ty::base("a")));
        assert!(check_term(&s, &c, s.top(), &tm::op("g", tm::var(0)), &Ty::base("a")));
    }

    #[test]
    fn inference() {
        let s = sig();
        let c = Ctx::new();
        assert_eq!(infer_term(&s, &c, s.bot(), &Term::Unit), Some(Ty::Unit));
        assert_eq!(
            infer_term(&s, &c, s.bot(), &tm::pair(Term::Unit, Term::Unit)),
            Some(Ty::prod(Ty::Unit, Ty::Unit))
        );
        let ann = Ty::sum(Ty::Unit, Ty::base("a"));
        assert_eq!(infer_term(&s, &c, s.bot(), &tm::inl(Term::Unit, Some(ann.clone()))), Some(ann));
        assert_eq!(infer_term(&s, &c, s.bot(), &tm::inl(Term::Unit, None)), None);
    }

    #[test]
    fn region_examples() {
        let s = sig();
        let a = Ty::base("a");
        let pure = Ctx::from_hyps(vec![(a.clone(), s.bot())]);
        let imp = Ctx::from_hyps(vec![(a.clone(), s.top())]);
        let l = LabelCtx(vec![a.clone()]);
        assert!(check_region(&s, &pure, &rg::br(0, tm::var(0)), &l));
        assert!(!check_region(&s, &imp, &rg::br(0, tm::var(0)), &l));
        for lc in [LabelCtx::new(), l.clone(), LabelCtx(vec![Ty::Empty, a])] {
            assert!(check_region(&s, &Ctx::new(), &infinite_loop(), &lc));
            assert!(check_structured(&s, &Ctx::new(), &infinite_loop(), &lc));
        }
    }

    #[test]
    fn diagnostics_report_path() {
        let s = sig();
        let r = rg::let1(Term::Unit, rg::br(0, tm::op("f", tm::var(0))));
        let e = check_region_diag(&s, &Ctx::new(), &r, &LabelCtx(vec![Ty::base("a")])).unwrap_err();
        assert_eq!(e.rule, "var");
        assert_eq!(e.path, vec![1, 0, 0]);
    }

    #[test]
    fn substitution_checks() {
        let s = sig();
        assert!(check_subst(&s, &Ctx::new(), &Subst::identity(), &Ctx::new()));
        let g = Ctx::from_hyps(vec![(Ty::base("a"), s.top()), (Ty::Unit, s.bot())]);
        assert!(check_subst(&s, &g, &Subst::identity(), &g));
        let d = Ctx::from_hyps(vec![(Ty::bool(), s.bot())]);
        assert!(!check_subst(&s, &Ctx::new(), &Subst::single(Term::Unit), &d));
    }

    #[test]
    fn label_substitution_checks() {
        let s = sig();
        let a = Ty::base("a");
        let l = LabelCtx(vec![a.clone(), Ty::Unit]);
        assert!(check_label_subst(&s, &Ctx::new(), &LabelSubst::identity(), &LabelCtx::new(), &l));
        assert!(check_label_subst(&s, &Ctx::new(), &LabelSubst::identity(), &l, &l));
        let bad = LabelSubst::new(vec![rg::br(0, tm::var(0))], 0);
        assert!(!check_label_subst(&s, &Ctx::new(), &bad, &LabelCtx(vec![a]), &LabelCtx(vec![Ty::Unit])));
    }

    #[test]
    fn atomic_and_anf() {
        let s = sig();
        let a = Ty::base("a");
        let c = Ctx::from_hyps(vec![(a.clone(), s.bot()), (a.clone(), s.bot())]);
        assert!(is_atomic(&s, &c, s.bot(), &tm::var(0), &a));
        assert!(is_atomic(&s, &c, s.bot(), &tm::op("f", tm::var(0)), &a));
        assert!(!is_atomic_shape(&tm::op("f", tm::pair(tm::var(0), tm::var(1)))));
        let l = LabelCtx(vec![a.clone()]);
        assert!(check_anf(&s, &c, &rg::br(0, tm::var(0)), &l));
        assert!(check_anf(&s, &c, &rg::let1(tm::op("f", tm::var(0)), rg::br(0, tm::var(0))), &l));
        let nested = rg::let1(tm::let1(Term::Unit, tm::var(0)), rg::br(0, tm::var(1)));
        assert!(!check_anf(&s, &c, &nested, &l));
    }

    #[test]
    fn strict_examples() {
        let s = sig();
        let a = Ty::base("a");
        let c = Ctx::from_hyps(vec![(a.clone(), s.bot())]);
        let l = LabelCtx(vec![a]);
        assert!(check_strict(&s, &c, &rg::wh(rg::br(0, tm::var(0)), vec![]), &l));
        assert!(!check_strict(&s, &c, &rg::br(0, tm::var(0)), &l));
    }

    #[test]
    fn irreducible_cfg_is_not_structured() {
        let s = sig();
        let b = Ty::bool();
        let c = Ctx::from_hyps(vec![(b.clone(), s.bot())]);
        let l = LabelCtx(vec![Ty::Unit]);
        // entry branches into either of two blocks that jump to each other
        let body = |other: usize| rg::case(tm::var(0), rg::br(other, tm::var(1)), rg::br(2, Term::Unit));
        let r = rg::wh(
            rg::case(tm::var(0), rg::br(1, tm::var(1)), rg::br(0, tm::var(1))),
            vec![rg::block(b.clone(), body(0)), rg::block(b, body(1))],
        );
        assert!(check_region(&s, &c, &r, &l));
        assert!(!check_structured(&s, &c, &r, &l));
    }

    #[test]
    fn ctx_effect_examples() {
        let s = sig();
        let a = Ty::base("a");
        assert_eq!(ctx_effect(&s, &Ctx::new()), s.bot());
        assert_eq!(ctx_effect(&s, &Ctx::from_hyps(vec![(a.clone(), s.bot()), (a.clone(), s.top())])), s.top());
        assert_eq!(ctx_effect(&s, &Ctx::from_hyps(vec![(a.clone(), s.bot()), (a, s.bot())])), s.bot());
    }
}
