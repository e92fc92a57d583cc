use lambda_ssa::gen::{Gen, GenConfig};
use lambda_ssa::rewrite::fuzz_signature;
use lambda_ssa::semantics::Builtin;
use lambda_ssa::syntax::{
    apply_script, parse_region_in, parse_script, parse_term_in, parse_unit, print_region, print_term, print_unit, scope_at, Item, Param,
    RegionDef, SourceUnit, TermDef,
};
use lambda_ssa::typing::check_region;
use lambda_ssa::{rg, tm, Region, Term, Ty};
use proptest::prelude::*;

const FACT: &str = "
-- running product
base word 4294967296;
instr one : 1 -> word = const 1;
instr add : word * word -> word = add;
instr mul : word * word -> word = mul;
instr lt : word * word -> 1 + 1 = lt;

region fact(n: word) -> ret(word) {
  br loop (one (), one ())
  where {
    loop(s: word * word) {
      let (i, acc) = s;
      if lt (n, i) { ret acc } else {
        br loop (add (i, one ()), mul (acc, i))
      }
    }
  }
}
";

fn names(k: usize) -> Vec<String> {
    // `x1` collides with the printer's positional names on purpose
    ["p", "x1", "r"].iter().take(k).map(|s| s.to_string()).collect()
}

fn random_unit(seed: u64) -> SourceUnit {
    let (sig, imp) = fuzz_signature();
    let mut g = Gen::new(&sig, seed, GenConfig::default());
    let k = g.below(4);
    let ctx = g.ctx(k);
    let m = 1 + g.below(2);
    let l = g.label_ctx(m);
    let body = g.region(&ctx, &l, 4);
    let params: Vec<Param> =
        names(k).into_iter().zip(&ctx.0).map(|(name, h)| Param { name, ty: h.ty.clone(), eff: h.eff }).collect();
    let exits = ["ret", "err"].iter().zip(&l.0).map(|(n, t)| (n.to_string(), t.clone())).collect();
    let ty = g.ty();
    let t = g.term(&ctx, sig.top(), &ty, 3);
    let region = RegionDef { name: "main".into(), params: params.clone(), exits, body };
    let term = TermDef { name: "aux".into(), params, ty, eff: sig.top(), body: t };
    SourceUnit { sig, imp, items: vec![Item::Region(region), Item::Term(term), Item::Init(None)] }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let u = random_unit(seed);
        let text = print_unit(&u);
        let back = parse_unit(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, u, "{}", text);
    }
}

#[test]
fn parses_a_loop() {
    let u = parse_unit(FACT).unwrap();
    let f = u.region(Some("fact")).unwrap();
    assert!(check_region(&u.sig, &f.ctx(), &f.body, &f.labels()));
    assert_eq!(u.imp.get("mul"), Some(&Builtin::Mul));
    assert_eq!(u.sig.base("word").unwrap().carrier, 1 << 32);
    let again = parse_unit(&print_unit(&u)).unwrap();
    assert_eq!(again, u);
}

#[test]
fn where_head_sees_later_labels() {
    let (sig, _) = fuzz_signature();
    let r = parse_region_in(&sig, "br k () where { j(x: 1) { br k x } k(y: 1) { br out y } }", &[], &["out".into()]).unwrap();
    let want = rg::wh(
        rg::br(0, Term::Unit),
        vec![rg::block(Ty::Unit, rg::br(0, tm::var(0))), rg::block(Ty::Unit, rg::br(2, tm::var(0)))],
    );
    assert_eq!(r, want);
}

#[test]
fn errors_carry_positions() {
    let e = parse_unit("base a 2;\nregion f(x: a) -> a {\n  br nowhere x\n}").unwrap_err();
    assert_eq!((e.pos.line, e.pos.col), (3, 6));
    assert!(e.msg.contains("unbound label"), "{e}");
    let e = parse_unit("base a 2;\nregion f(x: a) -> a { ret y }").unwrap_err();
    assert_eq!((e.pos.line, e.pos.col), (2, 27));
    assert!(e.msg.contains("unbound variable"), "{e}");
    let e = parse_unit("region f() -> q { ret () }").unwrap_err();
    assert!(e.msg.contains("unknown base type"), "{e}");
    let e = parse_unit("region f() -> 1 { ret () } region f() -> 1 { ret () }").unwrap_err();
    assert!(e.msg.contains("duplicate"), "{e}");
    let e = parse_unit("base a 2; effects x < y;").unwrap_err();
    assert!(e.msg.contains("effects"), "{e}");
}

#[test]
fn effects_and_litmus_items() {
    let src = "effects pure < rd < io, pure < wr < io;
base word 4;
instr w : word -> 1 @ wr = write x;
thread t0 -> 1 { ret w 0 }
init any;
exists t0 = () && (t0 = () || true);";
    let e = parse_unit(src);
    // integer literals are not terms
    assert!(e.is_err());
    let src = src.replace("w 0", "w z").replace("thread t0 -> 1 {", "instr z : 1 -> word = const 0;\nthread t0 -> 1 {").replace("ret w z", "ret w z ()");
    let u = parse_unit(&src).unwrap();
    assert_eq!(u.sig.effects.len(), 4);
    assert_eq!(u.init(), None);
    assert_eq!(u.threads().count(), 1);
    assert_eq!(u.posts().count(), 1);
    assert_eq!(parse_unit(&print_unit(&u)).unwrap(), u);
}

#[test]
fn terms_print_with_given_names() {
    let (sig, _) = fuzz_signature();
    let vars = vec!["u".to_string(), "v".to_string()];
    let t = parse_term_in(&sig, "let (x, y) = (u, v); case inl[a + 1] x { inl z => add (z, y), inr w => c0 w }", &vars).unwrap();
    let s = print_term(&sig, &vars, &t);
    assert_eq!(s, "let (x2, x3) = (u, v); case inl[a + 1] x2 { inl x4 => add (x4, x3), inr x4 => c0 x4 }");
    assert_eq!(parse_term_in(&sig, &s, &vars).unwrap(), t);
}

#[test]
fn let_heads_of_where_are_braced() {
    let (sig, _) = fuzz_signature();
    let r = rg::wh(rg::let1(Term::Unit, rg::br(0, tm::var(0))), vec![rg::block(Ty::Unit, rg::br(1, tm::var(0)))]);
    let s = print_region(&sig, &[], &["ret".into()], &r);
    assert!(s.starts_with("{\n"), "{s}");
    assert_eq!(parse_region_in(&sig, &s, &[], &["ret".into()]).unwrap(), r);
}

#[test]
fn script_rewrites_and_names_follow_the_printer() {
    let u = parse_unit(
        "base a 2;
instr c : 1 -> a = const 1;
region main() -> a { let x = c (); ret x }",
    )
    .unwrap();
    let def = u.region(None).unwrap();
    assert_eq!(scope_at(&u.sig, def, &[1]).unwrap(), (vec!["x0".to_string()], vec!["ret".to_string()]));
    let s = parse_script(&u.sig, "program main\nlet1-beta-r @ . backward term ()\nprint\n").unwrap_or_else(|e| panic!("{e}"));
    let res = apply_script(&u, &s, None);
    // the backward direction needs a pure bound term; a unit binder is added
    let (out, log) = res.unwrap();
    assert_eq!(log.len(), 2);
    assert!(log[1].print);
    assert!(matches!(out.body, Region::Let1(..)));
    let bad = parse_script(&u.sig, "nonsense @ 0").unwrap_err();
    assert!(bad.msg.contains("nonsense"), "{bad}");
}
