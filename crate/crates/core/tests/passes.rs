use lambda_ssa::gen::{Gen, GenConfig};
use lambda_ssa::normalize::{
    from_cfg, is_permutation_of, prune_unreachable, pack_ctx, pack_region, packed_ctx_ty, packed_labels_ty, propagate_copies, split_entry,
    add_dom, to_anf, to_cfg, to_strict, to_structured, unpack_labels,
};
use lambda_ssa::rewrite::fuzz_signature;
use lambda_ssa::semantics::{denotation_equal_regions, PowersetModel, SigImpl, Verdict};
use lambda_ssa::typing::{check_anf, check_region, check_strict, check_structured};
use lambda_ssa::{Ctx, LabelCtx, Region, Signature};

struct Case {
    ctx: Ctx,
    l: LabelCtx,
    r: Region,
}

fn corpus(sig: &Signature, seed: u64, n: usize) -> Vec<Case> {
    let mut g = Gen::new(sig, seed, GenConfig::default());
    (0..n)
        .map(|_| {
            g.reset();
            let k = g.below(3);
            let ctx = g.ctx(k);
            let m = 1 + g.below(2);
            let l = g.label_ctx(m);
            let r = g.region(&ctx, &l, 4);
            Case { ctx, l, r }
        })
        .collect()
}

fn same(sig: &Signature, imp: &SigImpl, ctx: &Ctx, a: &Region, b: &Region) {
    let v = denotation_equal_regions(&PowersetModel::new(50), sig, imp, ctx, a, b).unwrap();
    assert_eq!(v, Verdict::Equal, "\n{a:?}\n{b:?}");
}

#[test]
fn anf_preserves_meaning() {
    let (sig, imp) = fuzz_signature();
    for c in corpus(&sig, 1, 200) {
        let out = to_anf(&c.r);
        assert!(check_anf(&sig, &c.ctx, &out, &c.l), "{out:?}");
        same(&sig, &imp, &c.ctx, &c.r, &out);
        assert_eq!(propagate_copies(&to_anf(&out)), propagate_copies(&out));
    }
}

#[test]
fn strict_preserves_meaning() {
    let (sig, imp) = fuzz_signature();
    for c in corpus(&sig, 2, 200) {
        let out = to_strict(&sig, &c.ctx, &c.r, &c.l).unwrap();
        assert!(check_strict(&sig, &c.ctx, &out, &c.l), "{out:?}");
        same(&sig, &imp, &c.ctx, &c.r, &out);
        let (e, g) = split_entry(&out).unwrap();
        assert_eq!(add_dom(&e, g), out);
    }
}

#[test]
fn cfg_round_trips() {
    let (sig, imp) = fuzz_signature();
    for c in corpus(&sig, 3, 200) {
        let s = to_strict(&sig, &c.ctx, &c.r, &c.l).unwrap();
        let g = to_cfg(&c.ctx, &s, &c.l).unwrap();
        let back = from_cfg(&sig, &g).unwrap_or_else(|e| panic!("{e}\n{g}"));
        assert!(check_strict(&sig, &c.ctx, &back, &c.l));
        same(&sig, &imp, &c.ctx, &s, &back);
        let g = prune_unreachable(&g).unwrap();
        let again = to_cfg(&c.ctx, &from_cfg(&sig, &g).unwrap(), &c.l).unwrap();
        assert!(is_permutation_of(&g, &again), "{g}\n{again}");
    }
}

#[test]
fn structured_preserves_meaning() {
    let (sig, imp) = fuzz_signature();
    for c in corpus(&sig, 4, 200) {
        let out = to_structured(&sig, &c.ctx, &c.r, &c.l).unwrap();
        assert!(check_structured(&sig, &c.ctx, &out, &c.l), "{out:?}");
        same(&sig, &imp, &c.ctx, &c.r, &out);
    }
}

#[test]
fn packing_preserves_meaning() {
    let (sig, imp) = fuzz_signature();
    for c in corpus(&sig, 5, 200) {
        let p = pack_region(&c.ctx, &c.r, &c.l);
        let rec = Ctx::from_hyps(vec![(packed_ctx_ty(&c.ctx), sig.bot())]);
        let k = LabelCtx(vec![packed_labels_ty(&c.l.0)]);
        assert!(check_region(&sig, &rec, &p, &k));
        let back = pack_ctx(&c.ctx).region(&unpack_labels(&c.l).region(&p));
        assert!(check_region(&sig, &c.ctx, &back, &c.l));
        same(&sig, &imp, &c.ctx, &c.r, &back);
    }
}
