//! Random well-typed terms and regions over a signature.
//!
//! Generation is type-directed and never produces an ill-typed result.
//! Every injection and abort carries its type annotation, so generated
//! syntax is already in elaborated form.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ir::{rg, tm, Block, Ctx, Effect, LabelCtx, Region, Signature, Term, Ty};
use crate::semantics::Value;

#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Nesting depth of terms inside regions.
    pub term_depth: usize,
    /// Nesting depth of types.
    pub ty_depth: usize,
    /// Upper bound on where-blocks per generated region.
    pub max_blocks: usize,
    /// Upper bound on region-level lets per generated region.
    pub max_lets: usize,
    /// Probability that a type position picks a compound type.
    pub compound: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { term_depth: 2, ty_depth: 1, max_blocks: 6, max_lets: 10, compound: 0.35 }
    }
}

pub struct Gen<'s> {
    pub sig: &'s Signature,
    pub rng: ChaCha8Rng,
    pub cfg: GenConfig,
    blocks: usize,
    lets: usize,
}

impl<'s> Gen<'s> {
    pub fn new(sig: &'s Signature, seed: u64, cfg: GenConfig) -> Self {
        Gen { sig, rng: ChaCha8Rng::seed_from_u64(seed), cfg, blocks: 0, lets: 0 }
    }

    /// Resets the per-region block and let budgets.
    pub fn reset(&mut self) {
        self.blocks = 0;
        self.lets = 0;
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p.clamp(0.0, 1.0))
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n.max(1))
    }

    /// A uniformly chosen constructor at each level; `None` for empty types.
    pub fn value(&mut self, ty: &Ty) -> Option<Value> {
        Some(match ty {
            Ty::Unit => Value::Unit,
            Ty::Empty => return None,
            Ty::Base(n) => Value::base(n, self.rng.gen_range(0..self.sig.base(n)?.carrier.max(1))),
            Ty::Prod(a, b) => Value::pair(self.value(a)?, self.value(b)?),
            Ty::Sum(a, b) => {
                if self.chance(0.5) {
                    self.value(a).map(Value::inl).or_else(|| self.value(b).map(Value::inr))?
                } else {
                    self.value(b).map(Value::inr).or_else(|| self.value(a).map(Value::inl))?
                }
            }
        })
    }

    /// A random inhabited type (never mentions `0`).
    pub fn ty(&mut self) -> Ty {
        let d = self.cfg.ty_depth;
        self.ty_at(d)
    }

    fn ty_at(&mut self, depth: usize) -> Ty {
        if depth > 0 && self.chance(self.cfg.compound) {
            let a = self.ty_at(depth - 1);
            let b = self.ty_at(depth - 1);
            return if self.chance(0.5) { Ty::prod(a, b) } else { Ty::sum(a, b) };
        }
        let n = self.sig.bases.len();
        let k = self.below(n + 1);
        if k < n {
            Ty::Base(self.sig.bases[k].name.clone())
        } else {
            Ty::Unit
        }
    }

    pub fn sum_ty(&mut self) -> Ty {
        let a = self.ty_at(0);
        let b = self.ty_at(0);
        Ty::sum(a, b)
    }

    pub fn prod_ty(&mut self) -> Ty {
        let a = self.ty_at(0);
        let b = self.ty_at(0);
        Ty::prod(a, b)
    }

    /// A context of `n` pure hypotheses.
    pub fn ctx(&mut self, n: usize) -> Ctx {
        let bot = self.sig.bot();
        Ctx::from_hyps((0..n).map(|_| (self.ty(), bot)).collect())
    }

    pub fn label_ctx(&mut self, n: usize) -> LabelCtx {
        LabelCtx((0..n).map(|_| self.ty()).collect())
    }

    fn vars_of(&self, ctx: &Ctx, eff: Effect, ty: &Ty) -> Vec<usize> {
        (0..ctx.len())
            .filter(|&i| {
                let h = ctx.lookup(i).expect("in range");
                h.ty == *ty && self.sig.effects.leq(h.eff, eff)
            })
            .collect()
    }

    fn instrs_to(&self, eff: Effect, ty: &Ty) -> Vec<(String, Ty)> {
        self.sig
            .instrs
            .values()
            .filter(|i| i.cod == *ty && self.sig.effects.leq(i.eff, eff))
            .map(|i| (i.name.clone(), i.dom.clone()))
            .collect()
    }

    /// A term of type `ty`, or `None` when the generator cannot inhabit it.
    pub fn try_term(&mut self, ctx: &Ctx, eff: Effect, ty: &Ty, depth: usize) -> Option<Term> {
        if depth == 0 {
            return self.leaf(ctx, eff, ty, 2);
        }
        let mut kinds = vec![0u8, 1, 2, 3, 4, 5, 6];
        kinds.shuffle(&mut self.rng);
        for k in kinds {
            let t = match k {
                0 => self.leaf(ctx, eff, ty, 2),
                1 => {
                    let ops = self.instrs_to(eff, ty);
                    match ops.choose(&mut self.rng).cloned() {
                        Some((f, dom)) => self.try_term(ctx, eff, &dom, depth - 1).map(|a| tm::op(&f, a)),
                        None => None,
                    }
                }
                2 => {
                    let a_ty = self.ty();
                    let a = self.try_term(ctx, eff, &a_ty, depth - 1);
                    let c = ctx.with(a_ty, self.sig.bot());
                    a.and_then(|a| self.try_term(&c, eff, ty, depth - 1).map(|b| tm::let1(a, b)))
                }
                3 => {
                    let p = self.prod_ty();
                    let (x, y) = p.as_prod().map(|(x, y)| (x.clone(), y.clone())).expect("product");
                    let a = self.try_term(ctx, eff, &p, depth - 1);
                    let bot = self.sig.bot();
                    let c = ctx.with(x, bot).with(y, bot);
                    a.and_then(|a| self.try_term(&c, eff, ty, depth - 1).map(|b| tm::let2(a, b)))
                }
                4 => {
                    let s = self.sum_ty();
                    let (x, y) = s.as_sum().map(|(x, y)| (x.clone(), y.clone())).expect("sum");
                    let bot = self.sig.bot();
                    let e = self.try_term(ctx, eff, &s, depth - 1)?;
                    let l = self.try_term(&ctx.with(x, bot), eff, ty, depth - 1)?;
                    let r = self.try_term(&ctx.with(y, bot), eff, ty, depth - 1)?;
                    Some(tm::case(e, l, r))
                }
                5 => match ty {
                    Ty::Prod(x, y) => {
                        let a = self.try_term(ctx, eff, x, depth - 1)?;
                        let b = self.try_term(ctx, eff, y, depth - 1)?;
                        Some(tm::pair(a, b))
                    }
                    Ty::Sum(x, y) => {
                        if self.chance(0.5) {
                            self.try_term(ctx, eff, x, depth - 1).map(|a| tm::inl(a, Some(ty.clone())))
                        } else {
                            self.try_term(ctx, eff, y, depth - 1).map(|b| tm::inr(b, Some(ty.clone())))
                        }
                    }
                    _ => None,
                },
                _ => {
                    let zs = self.vars_of(ctx, eff, &Ty::Empty);
                    zs.choose(&mut self.rng).map(|&z| tm::abort(Term::Var(z), Some(ty.clone())))
                }
            };
            if t.is_some() {
                return t;
            }
        }
        None
    }

    fn leaf(&mut self, ctx: &Ctx, eff: Effect, ty: &Ty, fuel: usize) -> Option<Term> {
        let vars = self.vars_of(ctx, eff, ty);
        if !vars.is_empty() && self.chance(0.6) {
            return vars.choose(&mut self.rng).map(|&i| Term::Var(i));
        }
        let structural = match ty {
            Ty::Unit => Some(Term::Unit),
            Ty::Prod(x, y) if fuel > 0 => {
                let a = self.leaf(ctx, eff, x, fuel - 1);
                let b = self.leaf(ctx, eff, y, fuel - 1);
                a.zip(b).map(|(a, b)| tm::pair(a, b))
            }
            Ty::Sum(x, y) if fuel > 0 => {
                let left = self.chance(0.5);
                let first = if left { x } else { y };
                let second = if left { y } else { x };
                match self.leaf(ctx, eff, first, fuel - 1) {
                    Some(a) => Some(if left { tm::inl(a, Some(ty.clone())) } else { tm::inr(a, Some(ty.clone())) }),
                    None => self
                        .leaf(ctx, eff, second, fuel - 1)
                        .map(|a| if left { tm::inr(a, Some(ty.clone())) } else { tm::inl(a, Some(ty.clone())) }),
                }
            }
            _ => None,
        };
        if structural.is_some() && self.chance(0.7) {
            return structural;
        }
        let consts: Vec<String> = self.instrs_to(eff, ty).into_iter().filter(|(_, d)| *d == Ty::Unit).map(|(f, _)| f).collect();
        if let Some(f) = consts.choose(&mut self.rng) {
            return Some(tm::op(f, Term::Unit));
        }
        if structural.is_some() {
            return structural;
        }
        if let Some(&i) = vars.choose(&mut self.rng) {
            return Some(Term::Var(i));
        }
        let zs = self.vars_of(ctx, eff, &Ty::Empty);
        zs.choose(&mut self.rng).map(|&z| tm::abort(Term::Var(z), Some(ty.clone())))
    }

    pub fn term(&mut self, ctx: &Ctx, eff: Effect, ty: &Ty, depth: usize) -> Term {
        self.try_term(ctx, eff, ty, depth).unwrap_or_else(|| panic!("cannot generate a term of type {ty}"))
    }

    /// A region in `ctx` targeting `l` (which must be non-empty).
    pub fn try_region(&mut self, ctx: &Ctx, l: &LabelCtx, depth: usize) -> Option<Region> {
        assert!(!l.is_empty(), "regions need a label to exit through");
        let (bot, top) = (self.sig.bot(), self.sig.top());
        let td = self.cfg.term_depth;
        if depth > 0 {
            let mut kinds = vec![0u8, 1, 1, 2, 3, 3, 4, 4];
            kinds.shuffle(&mut self.rng);
            for k in kinds {
                let r = match k {
                    1 if self.lets < self.cfg.max_lets => {
                        self.lets += 1;
                        let a_ty = self.ty();
                        let a = self.try_term(ctx, top, &a_ty, td);
                        a.and_then(|a| self.try_region(&ctx.with(a_ty, bot), l, depth - 1).map(|r| rg::let1(a, r)))
                    }
                    2 if self.lets < self.cfg.max_lets => {
                        self.lets += 1;
                        let p = self.prod_ty();
                        let (x, y) = p.as_prod().map(|(x, y)| (x.clone(), y.clone())).expect("product");
                        let a = self.try_term(ctx, top, &p, td);
                        a.and_then(|a| self.try_region(&ctx.with(x, bot).with(y, bot), l, depth - 1).map(|r| rg::let2(a, r)))
                    }
                    3 => {
                        let s = self.sum_ty();
                        let (x, y) = s.as_sum().map(|(x, y)| (x.clone(), y.clone())).expect("sum");
                        let e = self.try_term(ctx, top, &s, td)?;
                        let r1 = self.try_region(&ctx.with(x, bot), l, depth - 1)?;
                        let r2 = self.try_region(&ctx.with(y, bot), l, depth - 1)?;
                        Some(rg::case(e, r1, r2))
                    }
                    4 if self.blocks < self.cfg.max_blocks => {
                        let room = self.cfg.max_blocks - self.blocks;
                        let n = 1 + self.below(room.min(2));
                        self.blocks += n;
                        let params: Vec<Ty> = (0..n).map(|_| self.ty()).collect();
                        self.where_with(ctx, l, &params, depth - 1)
                    }
                    _ => None,
                };
                if r.is_some() {
                    return r;
                }
            }
        }
        self.branch(ctx, l)
    }

    /// A where-block with the given parameter types and random head and bodies.
    pub fn where_with(&mut self, ctx: &Ctx, l: &LabelCtx, params: &[Ty], depth: usize) -> Option<Region> {
        let l2 = l.extended(params);
        let head = self.try_region(ctx, &l2, depth)?;
        let bs = self.blocks_for(ctx, &l2, params, depth)?;
        Some(rg::wh(head, bs))
    }

    /// Blocks with the given parameters whose bodies target `l`.
    pub fn blocks_for(&mut self, ctx: &Ctx, l: &LabelCtx, params: &[Ty], depth: usize) -> Option<Vec<Block>> {
        let bot = self.sig.bot();
        params
            .iter()
            .map(|p| self.try_region(&ctx.with(p.clone(), bot), l, depth).map(|body| rg::block(p.clone(), body)))
            .collect()
    }

    /// A branch to a random label with a pure argument.
    pub fn branch(&mut self, ctx: &Ctx, l: &LabelCtx) -> Option<Region> {
        let mut ks: Vec<usize> = (0..l.len()).collect();
        ks.shuffle(&mut self.rng);
        let bot = self.sig.bot();
        for k in ks {
            let ty = l.get(k).expect("in range").clone();
            if let Some(a) = self.try_term(ctx, bot, &ty, 1) {
                return Some(rg::br(k, a));
            }
        }
        None
    }

    pub fn region(&mut self, ctx: &Ctx, l: &LabelCtx, depth: usize) -> Region {
        self.try_region(ctx, l, depth).expect("cannot generate a region")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::fuzz_signature;
    use crate::typing::{check_region, check_term};

    #[test]
    fn generated_syntax_is_well_typed() {
        let (sig, _) = fuzz_signature();
        let mut g = Gen::new(&sig, 7, GenConfig::default());
        for _ in 0..300 {
            g.reset();
            let ctx = g.ctx(2);
            let l = g.label_ctx(2);
            let ty = g.ty();
            let eff = if g.chance(0.5) { sig.bot() } else { sig.top() };
            let t = g.term(&ctx, eff, &ty, 3);
            assert!(check_term(&sig, &ctx, eff, &t, &ty), "{t:?} : {ty}");
            let r = g.region(&ctx, &l, 3);
            assert!(check_region(&sig, &ctx, &r, &l), "{r:?}");
            assert!(r.block_count() <= 6 && r.let_count() <= 10);
        }
    }
}
