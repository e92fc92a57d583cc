//! Simultaneous substitution of terms for variables and of regions for labels.
//!
//! A substitution is an explicit prefix plus a shifting tail: variable `i`
//! is sent to `terms[i]` when `i < terms.len()` and to
//! `Var(i - terms.len() + shift)` otherwise. The tail plays the role of the
//! identity fall-through for variables not mentioned explicitly, so every
//! variable is covered.

use crate::ir::{Block, Region, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subst {
    pub terms: Vec<Term>,
    pub shift: usize,
}

impl Subst {
    pub fn identity() -> Self {
        Subst { terms: Vec::new(), shift: 0 }
    }

    /// Identity with `n` explicit entries; equal to `identity()` after `canonical`.
    pub fn identity_n(n: usize) -> Self {
        Subst { terms: (0..n).map(Term::Var).collect(), shift: n }
    }

    /// Weakening by `k` fresh innermost variables.
    pub fn weaken(k: usize) -> Self {
        Subst { terms: Vec::new(), shift: k }
    }

    /// `[a/x]`: replaces variable 0 and lowers the rest.
    pub fn single(a: Term) -> Self {
        Subst { terms: vec![a], shift: 0 }
    }

    pub fn new(terms: Vec<Term>, shift: usize) -> Self {
        Subst { terms, shift }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Image of variable `i`.
    pub fn get(&self, i: usize) -> Term {
        if i < self.terms.len() {
            self.terms[i].clone()
        } else {
            Term::Var(i - self.terms.len() + self.shift)
        }
    }

    /// Drops explicit trailing entries that agree with the tail.
    pub fn canonical(&self) -> Subst {
        let mut s = self.clone();
        while s.shift > 0 && s.terms.last() == Some(&Term::Var(s.shift - 1)) {
            s.terms.pop();
            s.shift -= 1;
        }
        s
    }

    /// Same action on every variable.
    pub fn equiv(&self, other: &Subst) -> bool {
        self.canonical() == other.canonical()
    }

    /// Adds `n` identity entries at the low-index (innermost) end, lifting
    /// the existing entries past them. This is the operation used under binders.
    pub fn extend_left(&self, n: usize) -> Subst {
        if n == 0 {
            return self.clone();
        }
        let mut terms: Vec<Term> = (0..n).map(Term::Var).collect();
        terms.extend(self.terms.iter().map(|t| t.shift(0, n)));
        Subst { terms, shift: self.shift + n }
    }

    /// Adds `n` identity entries at the high-index (outermost) end.
    pub fn extend_right(&self, n: usize) -> Subst {
        let mut terms = self.terms.clone();
        terms.extend((0..n).map(|j| Term::Var(self.shift + j)));
        Subst { terms, shift: self.shift + n }
    }

    pub fn lift(&self, n: usize) -> Subst {
        self.extend_left(n)
    }

    pub fn term(&self, t: &Term) -> Term {
        subst_term_at(self, t, 0)
    }

    pub fn region(&self, r: &Region) -> Region {
        subst_region_at(self, r, 0)
    }
}

fn subst_term_at(g: &Subst, t: &Term, d: usize) -> Term {
    use Term::*;
    match t {
        Var(i) => {
            if *i < d {
                Var(*i)
            } else {
                g.get(*i - d).shift(0, d)
            }
        }
        Op(n, a) => Op(n.clone(), Box::new(subst_term_at(g, a, d))),
        Let1(a, b) => Let1(Box::new(subst_term_at(g, a, d)), Box::new(subst_term_at(g, b, d + 1))),
        Unit => Unit,
        Pair(a, b) => Pair(Box::new(subst_term_at(g, a, d)), Box::new(subst_term_at(g, b, d))),
        Let2(a, b) => Let2(Box::new(subst_term_at(g, a, d)), Box::new(subst_term_at(g, b, d + 2))),
        Inl(a, ty) => Inl(Box::new(subst_term_at(g, a, d)), ty.clone()),
        Inr(a, ty) => Inr(Box::new(subst_term_at(g, a, d)), ty.clone()),
        Case(e, a, b) => Case(
            Box::new(subst_term_at(g, e, d)),
            Box::new(subst_term_at(g, a, d + 1)),
            Box::new(subst_term_at(g, b, d + 1)),
        ),
        Abort(a, ty) => Abort(Box::new(subst_term_at(g, a, d)), ty.clone()),
    }
}

fn subst_region_at(g: &Subst, r: &Region, d: usize) -> Region {
    use Region::*;
    match r {
        Br(l, a) => Br(*l, subst_term_at(g, a, d)),
        Let1(a, r) => Let1(subst_term_at(g, a, d), Box::new(subst_region_at(g, r, d + 1))),
        Let2(a, r) => Let2(subst_term_at(g, a, d), Box::new(subst_region_at(g, r, d + 2))),
        Case(e, r, s) => Case(
            subst_term_at(g, e, d),
            Box::new(subst_region_at(g, r, d + 1)),
            Box::new(subst_region_at(g, s, d + 1)),
        ),
        Where(r, bs) => Where(
            Box::new(subst_region_at(g, r, d)),
            bs.iter()
                .map(|b| Block { param: b.param.clone(), body: subst_region_at(g, &b.body, d + 1) })
                .collect(),
        ),
    }
}

pub fn subst_term(gamma: &Subst, t: &Term) -> Term {
    gamma.term(t)
}

pub fn subst_region(gamma: &Subst, r: &Region) -> Region {
    gamma.region(r)
}

/// `[g1]g2`: first `g2`, then `g1`.
pub fn subst_compose(g1: &Subst, g2: &Subst) -> Subst {
    let (l1, k1) = (g1.terms.len(), g1.shift);
    let k2 = g2.shift;
    let mut terms: Vec<Term> = g2.terms.iter().map(|t| g1.term(t)).collect();
    let extra = l1.saturating_sub(k2);
    terms.extend((0..extra).map(|j| g1.terms[k2 + j].clone()));
    Subst { terms, shift: k1 + k2.saturating_sub(l1) }
}

pub fn subst_extend_left(gamma: &Subst, n: usize) -> Subst {
    gamma.extend_left(n)
}

pub fn subst_extend_right(gamma: &Subst, n: usize) -> Subst {
    gamma.extend_right(n)
}

/// Label substitution: label `i` is sent to `regions[i]` (a region binding
/// its parameter as variable 0) when covered, and otherwise to
/// `br (i - regions.len() + shift) x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSubst {
    pub regions: Vec<Region>,
    pub shift: usize,
}

impl LabelSubst {
    pub fn identity() -> Self {
        LabelSubst { regions: Vec::new(), shift: 0 }
    }

    pub fn new(regions: Vec<Region>, shift: usize) -> Self {
        LabelSubst { regions, shift }
    }

    /// Pure relabelling `i ↦ br map[i] x`, identity-shifted beyond `map`.
    pub fn renaming(map: &[usize], shift: usize) -> Self {
        LabelSubst { regions: map.iter().map(|&j| Region::Br(j, Term::Var(0))).collect(), shift }
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn get(&self, i: usize) -> Region {
        if i < self.regions.len() {
            self.regions[i].clone()
        } else {
            Region::Br(i - self.regions.len() + self.shift, Term::Var(0))
        }
    }

    pub fn canonical(&self) -> LabelSubst {
        let mut s = self.clone();
        while s.shift > 0 && s.regions.last() == Some(&Region::Br(s.shift - 1, Term::Var(0))) {
            s.regions.pop();
            s.shift -= 1;
        }
        s
    }

    pub fn equiv(&self, other: &LabelSubst) -> bool {
        self.canonical() == other.canonical()
    }

    /// Identity entries at the low-index end, lifting existing bodies past them.
    pub fn extend_left(&self, n: usize) -> LabelSubst {
        if n == 0 {
            return self.clone();
        }
        let mut regions: Vec<Region> = (0..n).map(|j| Region::Br(j, Term::Var(0))).collect();
        regions.extend(self.regions.iter().map(|r| r.shift_labels(0, n)));
        LabelSubst { regions, shift: self.shift + n }
    }

    pub fn extend_right(&self, n: usize) -> LabelSubst {
        let mut regions = self.regions.clone();
        regions.extend((0..n).map(|j| Region::Br(self.shift + j, Term::Var(0))));
        LabelSubst { regions, shift: self.shift + n }
    }

    pub fn region(&self, r: &Region) -> Region {
        lsubst_at(self, r, 0, 0)
    }

    /// `[γ]σ`: substitutes into every body, lifting `γ` over the parameter.
    pub fn vsubst(&self, gamma: &Subst) -> LabelSubst {
        let g = gamma.extend_left(1);
        LabelSubst { regions: self.regions.iter().map(|r| g.region(r)).collect(), shift: self.shift }
    }
}

fn lsubst_at(s: &LabelSubst, r: &Region, dv: usize, dl: usize) -> Region {
    use Region::*;
    match r {
        Br(l, a) => {
            if *l < dl {
                Br(*l, a.clone())
            } else {
                let body = s.get(*l - dl).shift_vars(1, dv).shift_labels(0, dl);
                Subst::single(a.clone()).region(&body)
            }
        }
        Let1(a, r) => Let1(a.clone(), Box::new(lsubst_at(s, r, dv + 1, dl))),
        Let2(a, r) => Let2(a.clone(), Box::new(lsubst_at(s, r, dv + 2, dl))),
        Case(e, r, t) => Case(e.clone(), Box::new(lsubst_at(s, r, dv + 1, dl)), Box::new(lsubst_at(s, t, dv + 1, dl))),
        Where(r, bs) => {
            let dl2 = dl + bs.len();
            Where(
                Box::new(lsubst_at(s, r, dv, dl2)),
                bs.iter()
                    .map(|b| Block { param: b.param.clone(), body: lsubst_at(s, &b.body, dv + 1, dl2) })
                    .collect(),
            )
        }
    }
}

pub fn lsubst_region(sigma: &LabelSubst, r: &Region) -> Region {
    sigma.region(r)
}

/// `[s1]s2`, pointwise.
pub fn lsubst_compose(s1: &LabelSubst, s2: &LabelSubst) -> LabelSubst {
    let (l1, k1) = (s1.regions.len(), s1.shift);
    let k2 = s2.shift;
    let mut regions: Vec<Region> = s2.regions.iter().map(|r| lsubst_at(s1, r, 1, 0)).collect();
    let extra = l1.saturating_sub(k2);
    regions.extend((0..extra).map(|j| s1.regions[k2 + j].clone()));
    LabelSubst { regions, shift: k1 + k2.saturating_sub(l1) }
}

pub fn lsubst_extend_left(sigma: &LabelSubst, n: usize) -> LabelSubst {
    sigma.extend_left(n)
}

pub fn lsubst_extend_right(sigma: &LabelSubst, n: usize) -> LabelSubst {
    sigma.extend_right(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{rg, tm, Ty};

    #[test]
    fn identity_and_single() {
        let t = tm::let1(tm::var(0), tm::pair(tm::var(1), tm::var(3)));
        assert_eq!(Subst::identity().term(&t), t);
        assert_eq!(Subst::single(Term::Unit).term(&tm::var(0)), Term::Unit);
        assert_eq!(Subst::single(Term::Unit).region(&rg::br(0, tm::var(0))), rg::br(0, Term::Unit));
    }

    #[test]
    fn single_under_binder() {
        let a = tm::op("f", tm::var(0));
        let t = tm::let1(tm::var(0), tm::var(1));
        assert_eq!(Subst::single(a.clone()).term(&t), tm::let1(a.clone(), a.shift(0, 1)));
    }

    #[test]
    fn extensions() {
        assert!(Subst::identity().extend_right(1).equiv(&Subst::identity()));
        assert!(Subst::identity_n(3).equiv(&Subst::identity()));
        let g = Subst::single(Term::Unit).extend_left(1);
        assert_eq!(g.term(&tm::var(0)), tm::var(0));
        assert_eq!(g.term(&tm::var(1)), Term::Unit);
        assert_eq!(g.term(&tm::var(2)), tm::var(1));
    }

    #[test]
    fn compose_identity_laws() {
        let g = Subst::new(vec![tm::pair(tm::var(1), tm::var(0)), Term::Unit], 3);
        assert!(subst_compose(&Subst::identity(), &g).equiv(&g));
        assert!(subst_compose(&g, &Subst::identity()).equiv(&g));
    }

    #[test]
    fn compose_matches_sequential_application() {
        let g1 = Subst::new(vec![tm::var(2), Term::Unit], 1);
        let g2 = Subst::weaken(1);
        let t = tm::pair(tm::var(0), tm::pair(tm::var(1), tm::var(2)));
        assert_eq!(subst_compose(&g1, &g2).term(&t), g1.term(&g2.term(&t)));
    }

    #[test]
    fn label_renaming() {
        let s = LabelSubst::renaming(&[1], 2);
        assert_eq!(s.region(&rg::br(0, Term::Unit)), rg::br(1, Term::Unit));
        let id = LabelSubst::identity();
        let r = rg::wh(rg::br(1, tm::var(0)), vec![rg::block(Ty::Unit, rg::br(0, tm::var(0)))]);
        assert_eq!(id.region(&r), r);
    }

    #[test]
    fn label_subst_under_where_and_let() {
        // σ = { 0 ↦ let y = x; br 0 (x, y) }
        let body = rg::let1(tm::var(0), rg::br(0, tm::pair(tm::var(1), tm::var(0))));
        let s = LabelSubst::new(vec![body], 0);
        let r = rg::let1(Term::Unit, rg::wh(rg::br(1, tm::var(0)), vec![rg::block(Ty::Unit, rg::br(0, tm::var(0)))]));
        let got = s.region(&r);
        let want = rg::let1(
            Term::Unit,
            rg::wh(
                rg::let1(tm::var(0), rg::br(1, tm::pair(tm::var(1), tm::var(0)))),
                vec![rg::block(Ty::Unit, rg::br(0, tm::var(0)))],
            ),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn lsubst_compose_identity() {
        let s = LabelSubst::new(vec![rg::let1(tm::var(0), rg::br(2, tm::var(0)))], 1);
        assert!(lsubst_compose(&LabelSubst::identity(), &s).equiv(&s));
        assert!(lsubst_compose(&s, &LabelSubst::identity()).equiv(&s));
    }
}
