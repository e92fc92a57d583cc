//! Named, capture-avoiding substitution with fresh-name generation, checked
//! against the de Bruijn implementation.

use std::collections::{BTreeMap, BTreeSet};

use lambda_ssa::gen::{Gen, GenConfig};
use lambda_ssa::rewrite::fuzz_signature;
use lambda_ssa::{Ctx, Region, Subst, Term, Ty};
use proptest::prelude::*;

#[derive(Clone, Debug)]
enum N {
    Var(String),
    Unit,
    Op(String, Box<N>),
    Pair(Box<N>, Box<N>),
    Inl(Box<N>, Option<Ty>),
    Inr(Box<N>, Option<Ty>),
    Abort(Box<N>, Option<Ty>),
    Let1(String, Box<N>, Box<N>),
    Let2(String, String, Box<N>, Box<N>),
    Case(Box<N>, String, Box<N>, String, Box<N>),
}

#[derive(Clone, Debug)]
enum NR {
    Br(usize, N),
    Let1(String, N, Box<NR>),
    Let2(String, String, N, Box<NR>),
    Case(N, String, Box<NR>, String, Box<NR>),
    Where(Box<NR>, Vec<(String, Ty, NR)>),
}

/// Hands out `v0, v1, ...`, the same stem as the free names of substituted
/// terms, so capture happens unless it is avoided.
struct Fresh(usize);

impl Fresh {
    fn next(&mut self) -> String {
        self.0 += 1;
        format!("v{}", self.0 - 1)
    }
}

fn name_of(env: &[String], i: usize) -> String {
    env[env.len() - 1 - i].clone()
}

fn named(t: &Term, env: &mut Vec<String>, f: &mut Fresh) -> N {
    let b = Box::new;
    match t {
        Term::Var(i) => N::Var(name_of(env, *i)),
        Term::Unit => N::Unit,
        Term::Op(o, a) => N::Op(o.clone(), b(named(a, env, f))),
        Term::Pair(x, y) => N::Pair(b(named(x, env, f)), b(named(y, env, f))),
        Term::Inl(a, ty) => N::Inl(b(named(a, env, f)), ty.clone()),
        Term::Inr(a, ty) => N::Inr(b(named(a, env, f)), ty.clone()),
        Term::Abort(a, ty) => N::Abort(b(named(a, env, f)), ty.clone()),
        Term::Let1(a, body) => {
            let a = named(a, env, f);
            let x = f.next();
            env.push(x.clone());
            let body = named(body, env, f);
            env.pop();
            N::Let1(x, b(a), b(body))
        }
        Term::Let2(a, body) => {
            let a = named(a, env, f);
            let (x, y) = (f.next(), f.next());
            env.extend([x.clone(), y.clone()]);
            let body = named(body, env, f);
            env.truncate(env.len() - 2);
            N::Let2(x, y, b(a), b(body))
        }
        Term::Case(e, l, r) => {
            let e = named(e, env, f);
            let x = f.next();
            env.push(x.clone());
            let l = named(l, env, f);
            env.pop();
            let y = f.next();
            env.push(y.clone());
            let r = named(r, env, f);
            env.pop();
            N::Case(b(e), x, b(l), y, b(r))
        }
    }
}

fn named_region(r: &Region, env: &mut Vec<String>, f: &mut Fresh) -> NR {
    match r {
        Region::Br(k, a) => NR::Br(*k, named(a, env, f)),
        Region::Let1(a, body) => {
            let a = named(a, env, f);
            let x = f.next();
            env.push(x.clone());
            let body = named_region(body, env, f);
            env.pop();
            NR::Let1(x, a, Box::new(body))
        }
        Region::Let2(a, body) => {
            let a = named(a, env, f);
            let (x, y) = (f.next(), f.next());
            env.extend([x.clone(), y.clone()]);
            let body = named_region(body, env, f);
            env.truncate(env.len() - 2);
            NR::Let2(x, y, a, Box::new(body))
        }
        Region::Case(e, l, r) => {
            let e = named(e, env, f);
            let x = f.next();
            env.push(x.clone());
            let l = named_region(l, env, f);
            env.pop();
            let y = f.next();
            env.push(y.clone());
            let r = named_region(r, env, f);
            env.pop();
            NR::Case(e, x, Box::new(l), y, Box::new(r))
        }
        Region::Where(head, bs) => {
            let head = named_region(head, env, f);
            let bs = bs
                .iter()
                .map(|bl| {
                    let x = f.next();
                    env.push(x.clone());
                    let body = named_region(&bl.body, env, f);
                    env.pop();
                    (x, bl.param.clone(), body)
                })
                .collect();
            NR::Where(Box::new(head), bs)
        }
    }
}

fn index_of(env: &[String], x: &str) -> usize {
    env.iter().rev().position(|n| n == x).unwrap_or_else(|| panic!("unbound {x}"))
}

fn debruijn(t: &N, env: &mut Vec<String>) -> Term {
    let b = Box::new;
    match t {
        N::Var(x) => Term::Var(index_of(env, x)),
        N::Unit => Term::Unit,
        N::Op(o, a) => Term::Op(o.clone(), b(debruijn(a, env))),
        N::Pair(x, y) => Term::Pair(b(debruijn(x, env)), b(debruijn(y, env))),
        N::Inl(a, ty) => Term::Inl(b(debruijn(a, env)), ty.clone()),
        N::Inr(a, ty) => Term::Inr(b(debruijn(a, env)), ty.clone()),
        N::Abort(a, ty) => Term::Abort(b(debruijn(a, env)), ty.clone()),
        N::Let1(x, a, body) => {
            let a = debruijn(a, env);
            env.push(x.clone());
            let body = debruijn(body, env);
            env.pop();
            Term::Let1(b(a), b(body))
        }
        N::Let2(x, y, a, body) => {
            let a = debruijn(a, env);
            env.extend([x.clone(), y.clone()]);
            let body = debruijn(body, env);
            env.truncate(env.len() - 2);
            Term::Let2(b(a), b(body))
        }
        N::Case(e, x, l, y, r) => {
            let e = debruijn(e, env);
            env.push(x.clone());
            let l = debruijn(l, env);
            env.pop();
            env.push(y.clone());
            let r = debruijn(r, env);
            env.pop();
            Term::Case(b(e), b(l), b(r))
        }
    }
}

fn debruijn_region(r: &NR, env: &mut Vec<String>) -> Region {
    match r {
        NR::Br(k, a) => Region::Br(*k, debruijn(a, env)),
        NR::Let1(x, a, body) => {
            let a = debruijn(a, env);
            env.push(x.clone());
            let body = debruijn_region(body, env);
            env.pop();
            Region::Let1(a, Box::new(body))
        }
        NR::Let2(x, y, a, body) => {
            let a = debruijn(a, env);
            env.extend([x.clone(), y.clone()]);
            let body = debruijn_region(body, env);
            env.truncate(env.len() - 2);
            Region::Let2(a, Box::new(body))
        }
        NR::Case(e, x, l, y, r) => {
            let e = debruijn(e, env);
            env.push(x.clone());
            let l = debruijn_region(l, env);
            env.pop();
            env.push(y.clone());
            let r = debruijn_region(r, env);
            env.pop();
            Region::Case(e, Box::new(l), Box::new(r))
        }
        NR::Where(head, bs) => {
            let head = debruijn_region(head, env);
            let bs = bs
                .iter()
                .map(|(x, ty, body)| {
                    env.push(x.clone());
                    let body = debruijn_region(body, env);
                    env.pop();
                    lambda_ssa::Block { param: ty.clone(), body }
                })
                .collect();
            Region::Where(Box::new(head), bs)
        }
    }
}

fn free(t: &N, out: &mut BTreeSet<String>) {
    let under = |body: &N, bound: &[&String], out: &mut BTreeSet<String>| {
        let mut inner = BTreeSet::new();
        free(body, &mut inner);
        out.extend(inner.into_iter().filter(|v| !bound.contains(&v)));
    };
    match t {
        N::Var(x) => {
            out.insert(x.clone());
        }
        N::Unit => {}
        N::Op(_, a) | N::Inl(a, _) | N::Inr(a, _) | N::Abort(a, _) => free(a, out),
        N::Pair(x, y) => {
            free(x, out);
            free(y, out);
        }
        N::Let1(x, a, body) => {
            free(a, out);
            under(body, &[x], out);
        }
        N::Let2(x, y, a, body) => {
            free(a, out);
            under(body, &[x, y], out);
        }
        N::Case(e, x, l, y, r) => {
            free(e, out);
            under(l, &[x], out);
            under(r, &[y], out);
        }
    }
}

type Map = BTreeMap<String, N>;

struct Sub<'a> {
    fresh: &'a mut usize,
    /// Names that a renamed binder must avoid.
    avoid: BTreeSet<String>,
}

impl Sub<'_> {
    /// Enters binder `x`: renames it when it would capture a free name of
    /// the substitution, and stops substituting for it otherwise.
    fn bind(&mut self, map: &Map, x: &str) -> (String, Map) {
        let mut m = map.clone();
        let captures = map.values().any(|t| {
            let mut fv = BTreeSet::new();
            free(t, &mut fv);
            fv.contains(x)
        });
        if captures {
            let z = loop {
                *self.fresh += 1;
                let z = format!("z{}", *self.fresh);
                if !self.avoid.contains(&z) {
                    break z;
                }
            };
            m.insert(x.to_string(), N::Var(z.clone()));
            (z, m)
        } else {
            m.remove(x);
            (x.to_string(), m)
        }
    }

    fn term(&mut self, map: &Map, t: &N) -> N {
        let b = Box::new;
        match t {
            N::Var(x) => map.get(x).cloned().unwrap_or_else(|| t.clone()),
            N::Unit => N::Unit,
            N::Op(o, a) => N::Op(o.clone(), b(self.term(map, a))),
            N::Pair(x, y) => N::Pair(b(self.term(map, x)), b(self.term(map, y))),
            N::Inl(a, ty) => N::Inl(b(self.term(map, a)), ty.clone()),
            N::Inr(a, ty) => N::Inr(b(self.term(map, a)), ty.clone()),
            N::Abort(a, ty) => N::Abort(b(self.term(map, a)), ty.clone()),
            N::Let1(x, a, body) => {
                let a = self.term(map, a);
                let (x, m) = self.bind(map, x);
                N::Let1(x, b(a), b(self.term(&m, body)))
            }
            N::Let2(x, y, a, body) => {
                let a = self.term(map, a);
                let (x, m) = self.bind(map, x);
                let (y, m) = self.bind(&m, y);
                N::Let2(x, y, b(a), b(self.term(&m, body)))
            }
            N::Case(e, x, l, y, r) => {
                let e = self.term(map, e);
                let (x, ml) = self.bind(map, x);
                let l = self.term(&ml, l);
                let (y, mr) = self.bind(map, y);
                N::Case(b(e), x, b(l), y, b(self.term(&mr, r)))
            }
        }
    }

    fn region(&mut self, map: &Map, r: &NR) -> NR {
        match r {
            NR::Br(k, a) => NR::Br(*k, self.term(map, a)),
            NR::Let1(x, a, body) => {
                let a = self.term(map, a);
                let (x, m) = self.bind(map, x);
                NR::Let1(x, a, Box::new(self.region(&m, body)))
            }
            NR::Let2(x, y, a, body) => {
                let a = self.term(map, a);
                let (x, m) = self.bind(map, x);
                let (y, m) = self.bind(&m, y);
                NR::Let2(x, y, a, Box::new(self.region(&m, body)))
            }
            NR::Case(e, x, l, y, r) => {
                let e = self.term(map, e);
                let (x, ml) = self.bind(map, x);
                let l = self.region(&ml, l);
                let (y, mr) = self.bind(map, y);
                NR::Case(e, x, Box::new(l), y, Box::new(self.region(&mr, r)))
            }
            NR::Where(head, bs) => {
                let head = self.region(map, head);
                let bs = bs
                    .iter()
                    .map(|(x, ty, body)| {
                        let (x, m) = self.bind(map, x);
                        (x, ty.clone(), self.region(&m, body))
                    })
                    .collect();
                NR::Where(Box::new(head), bs)
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn named_substitution_agrees(seed in any::<u64>()) {
        let (sig, _) = fuzz_signature();
        let mut g = Gen::new(&sig, seed, GenConfig::default());
        let (kd, kg) = (1 + g.below(3), g.below(4));
        let d = g.ctx(kd);
        let gam: Ctx = g.ctx(kg);
        let ty = g.ty();
        let t = g.term(&d, sig.top(), &ty, 3);
        let l = g.label_ctx(1);
        let r = g.region(&d, &l, 3);
        let terms: Vec<Term> = (0..d.len()).map(|i| g.term(&gam, sig.bot(), &d.lookup(i).unwrap().ty, 2)).collect();
        let gamma = Subst::new(terms, gam.len());

        // Γ's names share the binder stem, so naive substitution would capture
        let gnames: Vec<String> = (0..gam.len()).map(|i| format!("v{i}")).collect();
        let dnames: Vec<String> = (0..d.len()).map(|i| format!("d{i}")).collect();
        let map: Map = (0..d.len())
            .map(|i| (name_of(&dnames, i), named(&gamma.get(i), &mut gnames.clone(), &mut Fresh(1000))))
            .collect();
        let nt = named(&t, &mut dnames.clone(), &mut Fresh(0));
        let nr = named_region(&r, &mut dnames.clone(), &mut Fresh(0));
        let avoid: BTreeSet<String> = (0..2000).map(|i| format!("v{i}")).collect();
        let mut fresh = 0;
        let mut sub = Sub { fresh: &mut fresh, avoid };
        let st = sub.term(&map, &nt);
        let sr = sub.region(&map, &nr);
        prop_assert_eq!(debruijn(&st, &mut gnames.clone()), gamma.term(&t));
        prop_assert_eq!(debruijn_region(&sr, &mut gnames.clone()), gamma.region(&r));
    }
}

#[test]
fn capture_is_avoided() {
    // [v0 / d0] (let v0 = (); d0) must not become let v0 = (); v0
    let t = Term::Let1(Box::new(Term::Unit), Box::new(Term::Var(1)));
    let gamma = Subst::new(vec![Term::Var(0)], 1);
    let nt = named(&t, &mut vec!["d0".into()], &mut Fresh(0));
    let map: Map = [("d0".to_string(), N::Var("v0".into()))].into();
    let mut fresh = 0;
    let st = Sub { fresh: &mut fresh, avoid: BTreeSet::new() }.term(&map, &nt);
    let N::Let1(x, _, body) = &st else { panic!() };
    assert_ne!(x, "v0");
    assert!(matches!(&**body, N::Var(v) if v == "v0"));
    assert_eq!(debruijn(&st, &mut vec!["v0".into()]), gamma.term(&t));
}
