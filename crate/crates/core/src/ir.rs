//! Abstract syntax, signatures, contexts and weakening.
//!
//! Variables and labels are de Bruijn indices. Index 0 is the most recently
//! bound entry; contexts grow at the high-index end, so `Ctx::push` makes the
//! new hypothesis index 0 and shifts every other entry up by one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// An element of the signature's effect lattice, stored as an index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Effect(pub u8);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SigError {
    #[error("effect order has a cycle through `{0}`")]
    Cyclic(String),
    #[error("effect lattice has no least element")]
    NoBottom,
    #[error("effects `{0}` and `{1}` have no least upper bound")]
    NoJoin(String, String),
    #[error("unknown effect `{0}`")]
    UnknownEffect(String),
    #[error("duplicate declaration `{0}`")]
    Duplicate(String),
    #[error("type mentions undeclared base type `{0}`")]
    UnknownBase(String),
    #[error("too many effects (at most 255)")]
    TooLarge,
}

/// A finite join-semilattice with a least element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectLattice {
    names: Vec<String>,
    join: Vec<Vec<u8>>,
    bot: u8,
    top: u8,
}

impl EffectLattice {
    /// The two-point lattice `pure < impure`.
    pub fn two_point() -> Self {
        Self::from_order(&["pure", "impure"], &[(0, 1)]).expect("two-point lattice")
    }

    /// Builds a lattice from names and a generating relation `a < b`.
    pub fn from_order<S: AsRef<str>>(names: &[S], less: &[(usize, usize)]) -> Result<Self, SigError> {
        let n = names.len();
        if n == 0 {
            return Err(SigError::NoBottom);
        }
        if n > 255 {
            return Err(SigError::TooLarge);
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = BTreeSet::new();
        for s in &names {
            if !seen.insert(s.clone()) {
                return Err(SigError::Duplicate(s.clone()));
            }
        }
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in less {
            le[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i][k] {
                    for j in 0..n {
                        if le[k][j] {
                            le[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i][j] && le[j][i] {
                    return Err(SigError::Cyclic(names[i].clone()));
                }
            }
        }
        let bot = (0..n).find(|&b| (0..n).all(|j| le[b][j])).ok_or(SigError::NoBottom)?;
        let mut join = vec![vec![0u8; n]; n];
        for a in 0..n {
            for b in 0..n {
                let ubs: Vec<usize> = (0..n).filter(|&u| le[a][u] && le[b][u]).collect();
                let least = ubs.iter().copied().find(|&u| ubs.iter().all(|&v| le[u][v]));
                match least {
                    Some(u) => join[a][b] = u as u8,
                    None => return Err(SigError::NoJoin(names[a].clone(), names[b].clone())),
                }
            }
        }
        let mut top = bot;
        for e in 0..n {
            top = join[top][e] as usize;
        }
        Ok(EffectLattice { names, join, bot: bot as u8, top: top as u8 })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn bot(&self) -> Effect {
        Effect(self.bot)
    }

    pub fn top(&self) -> Effect {
        Effect(self.top)
    }

    pub fn join(&self, a: Effect, b: Effect) -> Effect {
        Effect(self.join[a.0 as usize][b.0 as usize])
    }

    pub fn leq(&self, a: Effect, b: Effect) -> bool {
        self.join(a, b) == b
    }

    pub fn name(&self, e: Effect) -> &str {
        &self.names[e.0 as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<Effect> {
        self.names.iter().position(|n| n == name).map(|i| Effect(i as u8))
    }

    pub fn elements(&self) -> impl Iterator<Item = Effect> {
        (0..self.names.len() as u8).map(Effect)
    }

    /// Generating pairs `a < b` of the order (its strict part), for printing.
    pub fn order_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.join[a][b] as usize == b {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Join of two effects in the given lattice.
pub fn effect_join(lat: &EffectLattice, a: Effect, b: Effect) -> Effect {
    lat.join(a, b)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ty {
    Base(String),
    Unit,
    Empty,
    Prod(Box<Ty>, Box<Ty>),
    Sum(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn base(name: &str) -> Ty {
        Ty::Base(name.to_string())
    }

    pub fn prod(a: Ty, b: Ty) -> Ty {
        Ty::Prod(Box::new(a), Box::new(b))
    }

    pub fn sum(a: Ty, b: Ty) -> Ty {
        Ty::Sum(Box::new(a), Box::new(b))
    }

    pub fn bool() -> Ty {
        Ty::sum(Ty::Unit, Ty::Unit)
    }

    pub fn as_prod(&self) -> Option<(&Ty, &Ty)> {
        match self {
            Ty::Prod(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_sum(&self) -> Option<(&Ty, &Ty)> {
        match self {
            Ty::Sum(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Ty::Base(_) | Ty::Unit | Ty::Empty => 1,
            Ty::Prod(a, b) | Ty::Sum(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn bases(&self, out: &mut BTreeSet<String>) {
        match self {
            Ty::Base(n) => {
                out.insert(n.clone());
            }
            Ty::Unit | Ty::Empty => {}
            Ty::Prod(a, b) | Ty::Sum(a, b) => {
                a.bases(out);
                b.bases(out);
            }
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Ty, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                Ty::Base(n) => write!(f, "{n}"),
                Ty::Unit => write!(f, "1"),
                Ty::Empty => write!(f, "0"),
                Ty::Sum(a, b) => {
                    if prec > 1 {
                        write!(f, "(")?;
                    }
                    go(a, 1, f)?;
                    write!(f, " + ")?;
                    go(b, 2, f)?;
                    if prec > 1 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                Ty::Prod(a, b) => {
                    if prec > 2 {
                        write!(f, "(")?;
                    }
                    go(a, 2, f)?;
                    write!(f, " * ")?;
                    go(b, 3, f)?;
                    if prec > 2 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, 0, f)
    }
}

/// A base type together with the size of its interpretation carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseType {
    pub name: String,
    /// Values are `0..carrier`.
    pub carrier: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instr {
    pub name: String,
    pub dom: Ty,
    pub cod: Ty,
    /// Least effect at which the instruction may be used.
    pub eff: Effect,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub effects: EffectLattice,
    pub bases: Vec<BaseType>,
    pub instrs: BTreeMap<String, Instr>,
}

impl Default for Signature {
    fn default() -> Self {
        Signature { effects: EffectLattice::two_point(), bases: Vec::new(), instrs: BTreeMap::new() }
    }
}

impl Signature {
    pub fn new(effects: EffectLattice) -> Self {
        Signature { effects, bases: Vec::new(), instrs: BTreeMap::new() }
    }

    pub fn add_base(&mut self, name: &str, carrier: u64) -> Result<(), SigError> {
        if self.base(name).is_some() {
            return Err(SigError::Duplicate(name.to_string()));
        }
        self.bases.push(BaseType { name: name.to_string(), carrier });
        Ok(())
    }

    pub fn add_instr(&mut self, name: &str, dom: Ty, cod: Ty, eff: Effect) -> Result<(), SigError> {
        if self.instrs.contains_key(name) {
            return Err(SigError::Duplicate(name.to_string()));
        }
        self.check_ty(&dom)?;
        self.check_ty(&cod)?;
        self.instrs.insert(name.to_string(), Instr { name: name.to_string(), dom, cod, eff });
        Ok(())
    }

    pub fn base(&self, name: &str) -> Option<&BaseType> {
        self.bases.iter().find(|b| b.name == name)
    }

    pub fn instr(&self, name: &str) -> Option<&Instr> {
        self.instrs.get(name)
    }

    pub fn check_ty(&self, t: &Ty) -> Result<(), SigError> {
        let mut names = BTreeSet::new();
        t.bases(&mut names);
        for n in names {
            if self.base(&n).is_none() {
                return Err(SigError::UnknownBase(n));
            }
        }
        Ok(())
    }

    pub fn bot(&self) -> Effect {
        self.effects.bot()
    }

    pub fn top(&self) -> Effect {
        self.effects.top()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(usize),
    Op(String, Box<Term>),
    /// `let x = a; b`; the body binds one variable.
    Let1(Box<Term>, Box<Term>),
    Unit,
    Pair(Box<Term>, Box<Term>),
    /// `let (x, y) = a; b`; in the body `y` is index 0 and `x` index 1.
    Let2(Box<Term>, Box<Term>),
    /// Left injection, optionally annotated with the full sum type.
    Inl(Box<Term>, Option<Ty>),
    Inr(Box<Term>, Option<Ty>),
    /// `case e { inl x => a, inr y => b }`; each arm binds one variable.
    Case(Box<Term>, Box<Term>, Box<Term>),
    /// Elimination of the empty type, optionally annotated with its result type.
    Abort(Box<Term>, Option<Ty>),
}

/// A where-block: parameter type and body (the body binds the parameter).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block {
    pub param: Ty,
    pub body: Region,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    Br(usize, Term),
    Let1(Term, Box<Region>),
    Let2(Term, Box<Region>),
    Case(Term, Box<Region>, Box<Region>),
    /// `where r { l_1(x): t_1 ... l_n(x): t_n }`. The blocks extend the label
    /// context in order, so block `i` is label index `n - 1 - i` inside the
    /// head and every body.
    Where(Box<Region>, Vec<Block>),
}

/// Term constructors.
pub mod tm {
    use super::{Term, Ty};

    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }
    pub fn op(f: &str, a: Term) -> Term {
        Term::Op(f.to_string(), Box::new(a))
    }
    pub fn let1(a: Term, b: Term) -> Term {
        Term::Let1(Box::new(a), Box::new(b))
    }
    pub fn let2(a: Term, b: Term) -> Term {
        Term::Let2(Box::new(a), Box::new(b))
    }
    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }
    pub fn inl(a: Term, ty: Option<Ty>) -> Term {
        Term::Inl(Box::new(a), ty)
    }
    pub fn inr(a: Term, ty: Option<Ty>) -> Term {
        Term::Inr(Box::new(a), ty)
    }
    pub fn case(e: Term, a: Term, b: Term) -> Term {
        Term::Case(Box::new(e), Box::new(a), Box::new(b))
    }
    pub fn abort(a: Term, ty: Option<Ty>) -> Term {
        Term::Abort(Box::new(a), ty)
    }
}

/// Region constructors.
pub mod rg {
    use super::{Block, Region, Term, Ty};

    pub fn br(l: usize, a: Term) -> Region {
        Region::Br(l, a)
    }
    pub fn let1(a: Term, r: Region) -> Region {
        Region::Let1(a, Box::new(r))
    }
    pub fn let2(a: Term, r: Region) -> Region {
        Region::Let2(a, Box::new(r))
    }
    pub fn case(e: Term, r: Region, s: Region) -> Region {
        Region::Case(e, Box::new(r), Box::new(s))
    }
    pub fn wh(r: Region, blocks: Vec<Block>) -> Region {
        Region::Where(Box::new(r), blocks)
    }
    pub fn block(param: Ty, body: Region) -> Block {
        Block { param, body }
    }
}

impl Term {
    /// Renames free variables; `f` receives and returns indices relative to
    /// the root of `self`. Returns `None` if `f` rejects a variable.
    pub fn try_rename(&self, f: &dyn Fn(usize) -> Option<usize>) -> Option<Term> {
        self.rn(0, f)
    }

    pub fn rename(&self, f: &dyn Fn(usize) -> usize) -> Term {
        self.rn(0, &|i| Some(f(i))).expect("total renaming")
    }

    pub(crate) fn rn(&self, d: usize, f: &dyn Fn(usize) -> Option<usize>) -> Option<Term> {
        use Term::*;
        Some(match self {
            Var(i) => {
                if *i < d {
                    Var(*i)
                } else {
                    Var(f(*i - d)? + d)
                }
            }
            Op(n, a) => Op(n.clone(), Box::new(a.rn(d, f)?)),
            Let1(a, b) => Let1(Box::new(a.rn(d, f)?), Box::new(b.rn(d + 1, f)?)),
            Unit => Unit,
            Pair(a, b) => Pair(Box::new(a.rn(d, f)?), Box::new(b.rn(d, f)?)),
            Let2(a, b) => Let2(Box::new(a.rn(d, f)?), Box::new(b.rn(d + 2, f)?)),
            Inl(a, t) => Inl(Box::new(a.rn(d, f)?), t.clone()),
            Inr(a, t) => Inr(Box::new(a.rn(d, f)?), t.clone()),
            Case(e, a, b) => Case(Box::new(e.rn(d, f)?), Box::new(a.rn(d + 1, f)?), Box::new(b.rn(d + 1, f)?)),
            Abort(a, t) => Abort(Box::new(a.rn(d, f)?), t.clone()),
        })
    }

    /// Inserts `n` fresh variables at position `cutoff`: indices `>= cutoff` move up by `n`.
    pub fn shift(&self, cutoff: usize, n: usize) -> Term {
        if n == 0 {
            return self.clone();
        }
        self.rename(&|i| if i >= cutoff { i + n } else { i })
    }

    /// Removes the `n` variables at `cutoff..cutoff+n`; fails if any is used.
    pub fn unshift(&self, cutoff: usize, n: usize) -> Option<Term> {
        self.try_rename(&|i| {
            if i < cutoff {
                Some(i)
            } else if i < cutoff + n {
                None
            } else {
                Some(i - n)
            }
        })
    }

    pub fn free_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.fv(0, &mut out);
        out
    }

    pub(crate) fn fv(&self, d: usize, out: &mut BTreeSet<usize>) {
        use Term::*;
        match self {
            Var(i) => {
                if *i >= d {
                    out.insert(*i - d);
                }
            }
            Unit => {}
            Op(_, a) | Inl(a, _) | Inr(a, _) | Abort(a, _) => a.fv(d, out),
            Let1(a, b) => {
                a.fv(d, out);
                b.fv(d + 1, out);
            }
            Pair(a, b) => {
                a.fv(d, out);
                b.fv(d, out);
            }
            Let2(a, b) => {
                a.fv(d, out);
                b.fv(d + 2, out);
            }
            Case(e, a, b) => {
                e.fv(d, out);
                a.fv(d + 1, out);
                b.fv(d + 1, out);
            }
        }
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.free_vars().contains(&i)
    }

    pub fn size(&self) -> usize {
        use Term::*;
        match self {
            Var(_) | Unit => 1,
            Op(_, a) | Inl(a, _) | Inr(a, _) | Abort(a, _) => 1 + a.size(),
            Let1(a, b) | Pair(a, b) | Let2(a, b) => 1 + a.size() + b.size(),
            Case(e, a, b) => 1 + e.size() + a.size() + b.size(),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Immediate subterms in path order.
    pub fn children(&self) -> Vec<&Term> {
        use Term::*;
        match self {
            Var(_) | Unit => vec![],
            Op(_, a) | Inl(a, _) | Inr(a, _) | Abort(a, _) => vec![a],
            Let1(a, b) | Pair(a, b) | Let2(a, b) => vec![a, b],
            Case(e, a, b) => vec![e, a, b],
        }
    }

    pub(crate) fn child_mut(&mut self, i: usize) -> Option<&mut Term> {
        use Term::*;
        match (self, i) {
            (Op(_, a) | Inl(a, _) | Inr(a, _) | Abort(a, _), 0) => Some(a),
            (Let1(a, _) | Pair(a, _) | Let2(a, _), 0) => Some(a),
            (Let1(_, b) | Pair(_, b) | Let2(_, b), 1) => Some(b),
            (Case(e, _, _), 0) => Some(e),
            (Case(_, a, _), 1) => Some(a),
            (Case(_, _, b), 2) => Some(b),
            _ => None,
        }
    }
}

impl Region {
    pub fn try_rename_vars(&self, f: &dyn Fn(usize) -> Option<usize>) -> Option<Region> {
        self.rnv(0, f)
    }

    pub fn rename_vars(&self, f: &dyn Fn(usize) -> usize) -> Region {
        self.rnv(0, &|i| Some(f(i))).expect("total renaming")
    }

    fn rnv(&self, d: usize, f: &dyn Fn(usize) -> Option<usize>) -> Option<Region> {
        use Region::*;
        Some(match self {
            Br(l, a) => Br(*l, a.rn(d, f)?),
            Let1(a, r) => Let1(a.rn(d, f)?, Box::new(r.rnv(d + 1, f)?)),
            Let2(a, r) => Let2(a.rn(d, f)?, Box::new(r.rnv(d + 2, f)?)),
            Case(e, r, s) => Case(e.rn(d, f)?, Box::new(r.rnv(d + 1, f)?), Box::new(s.rnv(d + 1, f)?)),
            Where(r, bs) => Where(
                Box::new(r.rnv(d, f)?),
                bs.iter()
                    .map(|b| Some(Block { param: b.param.clone(), body: b.body.rnv(d + 1, f)? }))
                    .collect::<Option<Vec<_>>>()?,
            ),
        })
    }

    pub fn shift_vars(&self, cutoff: usize, n: usize) -> Region {
        if n == 0 {
            return self.clone();
        }
        self.rename_vars(&|i| if i >= cutoff { i + n } else { i })
    }

    pub fn unshift_vars(&self, cutoff: usize, n: usize) -> Option<Region> {
        self.try_rename_vars(&|i| {
            if i < cutoff {
                Some(i)
            } else if i < cutoff + n {
                None
            } else {
                Some(i - n)
            }
        })
    }

    /// Renames free labels; indices are relative to the root of `self`.
    pub fn try_rename_labels(&self, f: &dyn Fn(usize) -> Option<usize>) -> Option<Region> {
        self.rnl(0, f)
    }

    pub fn rename_labels(&self, f: &dyn Fn(usize) -> usize) -> Region {
        self.rnl(0, &|i| Some(f(i))).expect("total renaming")
    }

    fn rnl(&self, d: usize, f: &dyn Fn(usize) -> Option<usize>) -> Option<Region> {
        use Region::*;
        Some(match self {
            Br(l, a) => {
                let l = if *l < d { *l } else { f(*l - d)? + d };
                Br(l, a.clone())
            }
            Let1(a, r) => Let1(a.clone(), Box::new(r.rnl(d, f)?)),
            Let2(a, r) => Let2(a.clone(), Box::new(r.rnl(d, f)?)),
            Case(e, r, s) => Case(e.clone(), Box::new(r.rnl(d, f)?), Box::new(s.rnl(d, f)?)),
            Where(r, bs) => {
                let d2 = d + bs.len();
                Where(
                    Box::new(r.rnl(d2, f)?),
                    bs.iter()
                        .map(|b| Some(Block { param: b.param.clone(), body: b.body.rnl(d2, f)? }))
                        .collect::<Option<Vec<_>>>()?,
                )
            }
        })
    }

    pub fn shift_labels(&self, cutoff: usize, n: usize) -> Region {
        if n == 0 {
            return self.clone();
        }
        self.rename_labels(&|i| if i >= cutoff { i + n } else { i })
    }

    pub fn unshift_labels(&self, cutoff: usize, n: usize) -> Option<Region> {
        self.try_rename_labels(&|i| {
            if i < cutoff {
                Some(i)
            } else if i < cutoff + n {
                None
            } else {
                Some(i - n)
            }
        })
    }

    pub fn free_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.fv(0, &mut out);
        out
    }

    fn fv(&self, d: usize, out: &mut BTreeSet<usize>) {
        use Region::*;
        match self {
            Br(_, a) => a.fv(d, out),
            Let1(a, r) => {
                a.fv(d, out);
                r.fv(d + 1, out);
            }
            Let2(a, r) => {
                a.fv(d, out);
                r.fv(d + 2, out);
            }
            Case(e, r, s) => {
                e.fv(d, out);
                r.fv(d + 1, out);
                s.fv(d + 1, out);
            }
            Where(r, bs) => {
                r.fv(d, out);
                for b in bs {
                    b.body.fv(d + 1, out);
                }
            }
        }
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.free_vars().contains(&i)
    }

    pub fn free_labels(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.fl(0, &mut out);
        out
    }

    fn fl(&self, d: usize, out: &mut BTreeSet<usize>) {
        use Region::*;
        match self {
            Br(l, _) => {
                if *l >= d {
                    out.insert(*l - d);
                }
            }
            Let1(_, r) | Let2(_, r) => r.fl(d, out),
            Case(_, r, s) => {
                r.fl(d, out);
                s.fl(d, out);
            }
            Where(r, bs) => {
                let d2 = d + bs.len();
                r.fl(d2, out);
                for b in bs {
                    b.body.fl(d2, out);
                }
            }
        }
    }

    pub fn uses_label(&self, l: usize) -> bool {
        self.free_labels().contains(&l)
    }

    pub fn size(&self) -> usize {
        use Region::*;
        match self {
            Br(_, a) => 1 + a.size(),
            Let1(a, r) | Let2(a, r) => 1 + a.size() + r.size(),
            Case(e, r, s) => 1 + e.size() + r.size() + s.size(),
            Where(r, bs) => 1 + r.size() + bs.iter().map(|b| b.body.size()).sum::<usize>(),
        }
    }

    /// Number of where-blocks anywhere in the region.
    pub fn block_count(&self) -> usize {
        use Region::*;
        match self {
            Br(..) => 0,
            Let1(_, r) | Let2(_, r) => r.block_count(),
            Case(_, r, s) => r.block_count() + s.block_count(),
            Where(r, bs) => bs.len() + r.block_count() + bs.iter().map(|b| b.body.block_count()).sum::<usize>(),
        }
    }

    /// Number of region-level let bindings.
    pub fn let_count(&self) -> usize {
        use Region::*;
        match self {
            Br(..) => 0,
            Let1(_, r) | Let2(_, r) => 1 + r.let_count(),
            Case(_, r, s) => r.let_count() + s.let_count(),
            Where(r, bs) => r.let_count() + bs.iter().map(|b| b.body.let_count()).sum::<usize>(),
        }
    }
}

/// A typing hypothesis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hyp {
    pub ty: Ty,
    pub eff: Effect,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("index {index} out of range for context of length {len}")]
pub struct LookupError {
    pub index: usize,
    pub len: usize,
}

/// Variable context, stored outermost first.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ctx(pub Vec<Hyp>);

impl Ctx {
    pub fn new() -> Self {
        Ctx(Vec::new())
    }

    pub fn from_hyps(h: Vec<(Ty, Effect)>) -> Self {
        Ctx(h.into_iter().map(|(ty, eff)| Hyp { ty, eff }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lookup(&self, i: usize) -> Result<&Hyp, LookupError> {
        let n = self.0.len();
        if i < n {
            Ok(&self.0[n - 1 - i])
        } else {
            Err(LookupError { index: i, len: n })
        }
    }

    pub fn get(&self, i: usize) -> Option<&Hyp> {
        self.lookup(i).ok()
    }

    pub fn push(&mut self, ty: Ty, eff: Effect) {
        self.0.push(Hyp { ty, eff });
    }

    /// A copy extended with one hypothesis (index 0 in the result).
    pub fn with(&self, ty: Ty, eff: Effect) -> Ctx {
        let mut c = self.clone();
        c.push(ty, eff);
        c
    }

    pub fn hyps(&self) -> &[Hyp] {
        &self.0
    }
}

/// Looks up hypothesis `i` counting from the binding end.
pub fn ctx_lookup(ctx: &Ctx, i: usize) -> Result<(Ty, Effect), LookupError> {
    ctx.lookup(i).map(|h| (h.ty.clone(), h.eff))
}

/// Label context, stored outermost first.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelCtx(pub Vec<Ty>);

impl LabelCtx {
    pub fn new() -> Self {
        LabelCtx(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Ty> {
        let n = self.0.len();
        if i < n {
            Some(&self.0[n - 1 - i])
        } else {
            None
        }
    }

    pub fn push(&mut self, t: Ty) {
        self.0.push(t);
    }

    pub fn with_blocks(&self, bs: &[Block]) -> LabelCtx {
        let mut l = self.clone();
        l.0.extend(bs.iter().map(|b| b.param.clone()));
        l
    }

    pub fn extended(&self, tys: &[Ty]) -> LabelCtx {
        let mut l = self.clone();
        l.0.extend(tys.iter().cloned());
        l
    }
}

/// Witness of `Γ ≤ Δ`: for every index of `Δ` the index of `Γ` it is sent to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WkWitness {
    pub map: Vec<usize>,
    /// Per `Δ` index, the effects `(ε, ε′)` of the coercion `ε ≤ ε′`.
    pub coercions: Vec<(Effect, Effect)>,
}

impl WkWitness {
    pub fn compose(&self, inner: &WkWitness) -> WkWitness {
        // self : Γ ≤ Γ′, inner : Γ′ ≤ Δ.
        WkWitness {
            map: inner.map.iter().map(|&j| self.map[j]).collect(),
            coercions: inner
                .map
                .iter()
                .zip(&inner.coercions)
                .map(|(&j, &(_, e2))| (self.coercions[j].0, e2))
                .collect(),
        }
    }

    pub fn apply_term(&self, t: &Term) -> Option<Term> {
        t.try_rename(&|i| self.map.get(i).copied())
    }

    pub fn apply_region(&self, r: &Region) -> Option<Region> {
        r.try_rename_vars(&|i| self.map.get(i).copied())
    }
}

/// Decides `Γ ≤ Δ` (rules wk-nil, wk-skip, wk-cons), preferring to match
/// the innermost entries first.
pub fn ctx_weakens(lat: &EffectLattice, g: &Ctx, d: &Ctx) -> Option<WkWitness> {
    let mut map = Vec::with_capacity(d.len());
    let mut coercions = Vec::with_capacity(d.len());
    let mut j = 0;
    for i in 0..d.len() {
        let want = d.lookup(i).ok()?;
        loop {
            let have = g.lookup(j).ok()?;
            j += 1;
            if have.ty == want.ty && lat.leq(have.eff, want.eff) {
                map.push(j - 1);
                coercions.push((have.eff, want.eff));
                break;
            }
        }
    }
    Some(WkWitness { map, coercions })
}

/// Witness of `L ≤ K` (K has at least the labels of L): label-index injection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LWkWitness {
    pub map: Vec<usize>,
}

impl LWkWitness {
    pub fn compose(&self, outer: &LWkWitness) -> LWkWitness {
        // self : L ≤ K, outer : K ≤ M.
        LWkWitness { map: self.map.iter().map(|&j| outer.map[j]).collect() }
    }

    pub fn apply(&self, r: &Region) -> Option<Region> {
        r.try_rename_labels(&|i| self.map.get(i).copied())
    }
}

/// Decides `L ≤ K` (rules lwk-nil, lwk-skip, lwk-cons).
pub fn lctx_weakens(l: &LabelCtx, k: &LabelCtx) -> Option<LWkWitness> {
    let mut map = Vec::with_capacity(l.len());
    let mut j = 0;
    for i in 0..l.len() {
        let want = l.get(i)?;
        loop {
            let have = k.get(j)?;
            j += 1;
            if have == want {
                map.push(j - 1);
                break;
            }
        }
    }
    Some(LWkWitness { map })
}

/// Free variables of a term.
pub fn free_vars_term(t: &Term) -> BTreeSet<usize> {
    t.free_vars()
}

/// Free variables of a region.
pub fn free_vars_region(r: &Region) -> BTreeSet<usize> {
    r.free_vars()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_basics() {
        let l = EffectLattice::two_point();
        assert_eq!(l.join(l.bot(), l.bot()), l.bot());
        assert_eq!(l.join(l.bot(), l.top()), l.top());
        let three = EffectLattice::from_order(&["pure", "io", "top"], &[(0, 1), (1, 2)]).unwrap();
        let io = three.lookup("io").unwrap();
        assert_eq!(three.join(io, io), io);
    }

    #[test]
    fn diamond_lattice_and_bad_orders() {
        let d = EffectLattice::from_order(&["bot", "rd", "wr", "rw"], &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(d.join(Effect(1), Effect(2)), Effect(3));
        assert_eq!(d.top(), Effect(3));
        assert!(EffectLattice::from_order(&["a", "b"], &[]).is_err());
        assert!(EffectLattice::from_order(&["a", "b"], &[(0, 1), (1, 0)]).is_err());
        // two incomparable upper bounds
        let bad = EffectLattice::from_order(&["b", "x", "y", "u", "v"], &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (2, 4)]);
        assert!(matches!(bad, Err(SigError::NoJoin(..))));
    }

    #[test]
    fn lookup_order() {
        let l = EffectLattice::two_point();
        let c = Ctx::from_hyps(vec![(Ty::Unit, l.bot()), (Ty::bool(), l.top())]);
        assert_eq!(ctx_lookup(&c, 1).unwrap(), (Ty::Unit, l.bot()));
        assert_eq!(ctx_lookup(&c, 0).unwrap(), (Ty::bool(), l.top()));
        assert!(ctx_lookup(&Ctx::new(), 0).is_err());
    }

    #[test]
    fn weakening_examples() {
        let l = EffectLattice::two_point();
        let a = Ty::base("a");
        let b = Ty::base("b");
        assert_eq!(ctx_weakens(&l, &Ctx::new(), &Ctx::new()).unwrap().map, Vec::<usize>::new());
        let g = Ctx::from_hyps(vec![(a.clone(), l.bot()), (b.clone(), l.bot())]);
        let d = Ctx::from_hyps(vec![(a.clone(), l.bot())]);
        assert_eq!(ctx_weakens(&l, &g, &d).unwrap().map, vec![1]);
        let g = Ctx::from_hyps(vec![(a.clone(), l.bot())]);
        let d = Ctx::from_hyps(vec![(a.clone(), l.top())]);
        let w = ctx_weakens(&l, &g, &d).unwrap();
        assert_eq!(w.coercions, vec![(l.bot(), l.top())]);
        assert!(ctx_weakens(&l, &d, &g).is_none());
    }

    #[test]
    fn label_weakening_examples() {
        let a = Ty::base("a");
        let b = Ty::base("b");
        assert!(lctx_weakens(&LabelCtx::new(), &LabelCtx::new()).is_some());
        let w = lctx_weakens(&LabelCtx(vec![a.clone()]), &LabelCtx(vec![a.clone(), b.clone()])).unwrap();
        assert_eq!(w.map, vec![1]);
        assert!(lctx_weakens(&LabelCtx(vec![a]), &LabelCtx(vec![b])).is_none());
    }

    #[test]
    fn free_vars_examples() {
        use tm::*;
        assert_eq!(var(0).free_vars(), BTreeSet::from([0]));
        assert_eq!(let1(var(0), var(0)).free_vars(), BTreeSet::from([0]));
        assert_eq!(let1(var(1), var(2)).free_vars(), BTreeSet::from([1]));
    }

    #[test]
    fn label_shifting_respects_where_binders() {
        use rg::*;
        let r = wh(br(1, Term::Unit), vec![block(Ty::Unit, br(0, Term::Var(0)))]);
        assert_eq!(r.free_labels(), BTreeSet::from([0]));
        let s = r.shift_labels(0, 2);
        assert_eq!(s, wh(br(3, Term::Unit), vec![block(Ty::Unit, br(0, Term::Var(0)))]));
    }
}
