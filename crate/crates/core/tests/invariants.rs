use std::collections::BTreeSet;

use lambda_ssa::gen::{Gen, GenConfig};
use lambda_ssa::ir::{ctx_weakens, lctx_weakens, EffectLattice};
use lambda_ssa::normalize::cfg::{BasicBlock, CfgBlock, Terminator};
use lambda_ssa::normalize::{dominance_tree, Cfg};
use lambda_ssa::rewrite::fuzz_signature;
use lambda_ssa::subst::{lsubst_compose, subst_compose};
use lambda_ssa::typing::{check_region, check_term};
use lambda_ssa::{Ctx, LabelCtx, LabelSubst, Subst, Term, Ty};
use proptest::prelude::*;

fn lattices() -> Vec<EffectLattice> {
    vec![
        EffectLattice::two_point(),
        EffectLattice::from_order(&["pure", "io", "top"], &[(0, 1), (1, 2)]).unwrap(),
        EffectLattice::from_order(&["bot", "rd", "wr", "rw"], &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap(),
        EffectLattice::from_order(&["b", "x", "y", "z", "t"], &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]).unwrap(),
    ]
}

proptest! {
    #[test]
    fn join_is_a_semilattice(k in 0usize..4, a in 0usize..5, b in 0usize..5, c in 0usize..5) {
        let lat = &lattices()[k];
        let el: Vec<_> = lat.elements().collect();
        let (a, b, c) = (el[a % el.len()], el[b % el.len()], el[c % el.len()]);
        prop_assert_eq!(lat.join(a, a), a);
        prop_assert_eq!(lat.join(a, b), lat.join(b, a));
        prop_assert_eq!(lat.join(lat.join(a, b), c), lat.join(a, lat.join(b, c)));
        prop_assert_eq!(lat.join(lat.bot(), a), a);
        prop_assert_eq!(lat.join(lat.top(), a), lat.top());
        prop_assert!(lat.leq(a, lat.join(a, b)));
        prop_assert_eq!(lat.leq(a, b) && lat.leq(b, a), a == b);
    }

    #[test]
    fn weakening_witnesses_compose(seed in any::<u64>()) {
        let (sig, _) = fuzz_signature();
        let mut g = Gen::new(&sig, seed, GenConfig::default());
        let k = g.below(3);
        let d = g.ctx(k);
        let ty = g.ty();
        let t = g.term(&d, sig.top(), &ty, 3);
        // Γ ≤ Γ′ ≤ Δ by inserting fresh hypotheses twice
        let mut mid = Ctx::new();
        for h in d.hyps() {
            if g.chance(0.5) {
                mid.push(g.ty(), sig.top());
            }
            mid.push(h.ty.clone(), h.eff);
        }
        let mut big = Ctx::new();
        for h in mid.hyps() {
            big.push(h.ty.clone(), h.eff);
            if g.chance(0.5) {
                big.push(Ty::Unit, sig.top());
            }
        }
        let lat = &sig.effects;
        let inner = ctx_weakens(lat, &mid, &d).unwrap();
        let outer = ctx_weakens(lat, &big, &mid).unwrap();
        let both = outer.compose(&inner);
        let step = outer.apply_term(&inner.apply_term(&t).unwrap()).unwrap();
        prop_assert_eq!(both.apply_term(&t).unwrap(), step.clone());
        prop_assert!(check_term(&sig, &big, sig.top(), &step, &ty));
        let direct = ctx_weakens(lat, &big, &d).unwrap();
        prop_assert!(check_term(&sig, &big, sig.top(), &direct.apply_term(&t).unwrap(), &ty));
    }

    #[test]
    fn label_weakening_composes(seed in any::<u64>()) {
        let (sig, _) = fuzz_signature();
        let mut g = Gen::new(&sig, seed, GenConfig::default());
        let k = g.below(3);
        let ctx = g.ctx(k);
        let m = 1 + g.below(3);
        let l = g.label_ctx(m);
        let r = g.region(&ctx, &l, 3);
        let mut mid = LabelCtx::new();
        for t in &l.0 {
            mid.push(t.clone());
            if g.chance(0.5) {
                mid.push(Ty::Unit);
            }
        }
        let mut big = LabelCtx::new();
        for t in &mid.0 {
            if g.chance(0.5) {
                big.push(g.ty());
            }
            big.push(t.clone());
        }
        let a = lctx_weakens(&l, &mid).unwrap();
        let b = lctx_weakens(&mid, &big).unwrap();
        let step = b.apply(&a.apply(&r).unwrap()).unwrap();
        prop_assert_eq!(a.compose(&b).apply(&r).unwrap(), step.clone());
        prop_assert!(check_region(&sig, &ctx, &step, &big));
    }

    #[test]
    fn substitution_composition_is_sequential(seed in any::<u64>()) {
        let (sig, _) = fuzz_signature();
        let mut g = Gen::new(&sig, seed, GenConfig::default());
        // Θ ⊢ γ1 : Γ, Γ ⊢ γ2 : Δ, Δ ⊢ t
        let sizes = [g.below(3), g.below(3), g.below(3)];
        let theta = g.ctx(sizes[0]);
        let gam = g.ctx(sizes[1]);
        let d = g.ctx(sizes[2]);
        let mut subst = |from: &Ctx, to: &Ctx| {
            let terms = (0..to.len()).map(|i| g.term(from, sig.bot(), &to.lookup(i).unwrap().ty, 2)).collect();
            Subst::new(terms, from.len())
        };
        let g1 = subst(&theta, &gam);
        let g2 = subst(&gam, &d);
        let ty = g.ty();
        let t = g.term(&d, sig.top(), &ty, 3);
        let l = g.label_ctx(1);
        let r = g.region(&d, &l, 3);
        let c = subst_compose(&g1, &g2);
        prop_assert_eq!(c.term(&t), g1.term(&g2.term(&t)));
        prop_assert_eq!(c.region(&r), g1.region(&g2.region(&r)));
        prop_assert!(check_term(&sig, &theta, sig.top(), &c.term(&t), &ty));
        // identity laws
        prop_assert_eq!(Subst::identity().term(&t), t.clone());
        prop_assert!(subst_compose(&Subst::identity(), &g2).equiv(&g2));
        prop_assert!(subst_compose(&g2, &Subst::identity_n(d.len())).equiv(&g2));
    }

    #[test]
    fn label_substitution_composition_is_sequential(seed in any::<u64>()) {
        let (sig, _) = fuzz_signature();
        let mut g = Gen::new(&sig, seed, GenConfig::default());
        let k = g.below(2);
        let ctx = g.ctx(k);
        let (n1, n2) = (1 + g.below(2), 1 + g.below(2));
        let (l1, l2) = (g.label_ctx(n1), g.label_ctx(n2));
        let l3 = g.label_ctx(1);
        let mut sigma = |from: &LabelCtx, to: &LabelCtx| {
            let regions = (0..from.len())
                .map(|i| {
                    g.reset();
                    g.region(&ctx.with(from.get(i).unwrap().clone(), sig.bot()), to, 2)
                })
                .collect();
            LabelSubst::new(regions, to.len())
        };
        // L1 ⇝ L2 ⇝ L3
        let s1 = sigma(&l1, &l2);
        let s2 = sigma(&l2, &l3);
        g.reset();
        let r = g.region(&ctx, &l1, 3);
        let c = lsubst_compose(&s2, &s1);
        let step = s2.region(&s1.region(&r));
        prop_assert_eq!(c.region(&r), step.clone());
        prop_assert!(check_region(&sig, &ctx, &step, &l3));
    }

    #[test]
    fn dominators_match_path_oracle(n in 1usize..8, edges in prop::collection::vec((0usize..9, 0usize..9, any::<bool>()), 8)) {
        let g = graph(n, &edges);
        let succ = successors(&g);
        let tree = dominance_tree(&g).unwrap();
        let nodes = succ.len();
        for a in 0..nodes {
            for b in 0..nodes {
                // a dominates b iff b is unreachable once a is removed
                let want = a == b || !reachable(&succ, Some(a)).contains(&b);
                prop_assert_eq!(tree.dominates(a, b), want, "{} {} {}", a, b, g);
            }
        }
        for v in 1..nodes {
            let p = tree.parent[v].unwrap();
            for d in (0..nodes).filter(|&d| d != v && tree.dominates(d, v)) {
                prop_assert!(tree.dominates(d, p));
            }
        }
    }
}

/// A graph of unit-parameter blocks branching on a boolean input. Node 0 is
/// the entry; target `n` and above leaves through the exit label.
fn graph(n: usize, edges: &[(usize, usize, bool)]) -> Cfg {
    let exit = 100;
    let label = |t: usize| if t < n { 10 + t } else { exit };
    let mut fresh = 1000;
    let mut term = |&(s, t, two): &(usize, usize, bool)| {
        if two {
            fresh += 2;
            Terminator::Case(0, fresh - 2, Box::new(Terminator::Br(label(s), 1)), fresh - 1, Box::new(Terminator::Br(label(t), 1)))
        } else {
            Terminator::Br(label(s), 1)
        }
    };
    let entry = BasicBlock { insts: Vec::new(), term: Terminator::Br(10, 1) };
    let blocks: Vec<CfgBlock> = (0..n)
        .map(|i| CfgBlock { label: 10 + i, param: 2 + i, ty: Ty::Unit, body: BasicBlock { insts: Vec::new(), term: term(&edges[i]) } })
        .collect();
    let mut g = Cfg { inputs: vec![(0, Ty::bool(), EffectLattice::two_point().bot()), (1, Ty::Unit, EffectLattice::two_point().bot())], exits: vec![(exit, Ty::Unit)], entry, blocks };
    let reach = reachable(&successors(&g), None);
    g.blocks = g.blocks.into_iter().enumerate().filter(|(i, _)| reach.contains(&(i + 1))).map(|(_, b)| b).collect();
    g
}

fn successors(g: &Cfg) -> Vec<Vec<usize>> {
    let node = |l: usize| g.blocks.iter().position(|b| b.label == l).map(|i| i + 1);
    let body = |v: usize| if v == 0 { &g.entry } else { &g.blocks[v - 1].body };
    (0..=g.blocks.len())
        .map(|v| {
            let mut ts = Vec::new();
            body(v).term.targets(&mut ts);
            ts.into_iter().filter_map(node).collect()
        })
        .collect()
}

fn reachable(succ: &[Vec<usize>], without: Option<usize>) -> BTreeSet<usize> {
    let mut seen = BTreeSet::new();
    if without == Some(0) {
        return seen;
    }
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        if Some(v) != without && seen.insert(v) {
            stack.extend(succ[v].iter().copied());
        }
    }
    seen
}

#[test]
fn weakening_rejects_missing_hypotheses() {
    let (sig, _) = fuzz_signature();
    let a = Ty::base("a");
    let d = Ctx::from_hyps(vec![(a.clone(), sig.bot())]);
    assert!(ctx_weakens(&sig.effects, &Ctx::new(), &d).is_none());
    // an impure hypothesis cannot stand in for a pure one
    assert!(ctx_weakens(&sig.effects, &Ctx::from_hyps(vec![(a.clone(), sig.top())]), &d).is_none());
    let w = ctx_weakens(&sig.effects, &Ctx::from_hyps(vec![(a.clone(), sig.bot()), (Ty::Unit, sig.bot())]), &d).unwrap();
    assert_eq!(w.apply_term(&Term::Var(0)), Some(Term::Var(1)));
}
