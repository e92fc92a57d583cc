//! The iteration interface and the option and powerset models.

use std::cell::Cell;
use std::collections::BTreeSet;
use std::fmt;

use super::EvalError;

/// Bound for carrier elements.
pub trait Obj: Clone + Ord + fmt::Debug {}
impl<T: Clone + Ord + fmt::Debug> Obj for T {}

/// Result of one loop step: leave with a `B`, or go round again with an `A`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step<B, A> {
    Exit(B),
    Continue(A),
}

pub type Res<T> = Result<T, EvalError>;

/// A strong monad with an iteration operator, specialised to sets.
pub trait Elgot {
    type M<T: Obj>: Clone + fmt::Debug + Eq;

    fn name(&self) -> &'static str;

    fn pure<T: Obj>(&self, t: T) -> Self::M<T>;

    fn bind<T: Obj, U: Obj>(&self, m: Self::M<T>, k: &mut dyn FnMut(T) -> Res<Self::M<U>>) -> Res<Self::M<U>>;

    /// `f†` applied to `a`.
    fn dagger<A: Obj, B: Obj>(&self, f: &mut dyn FnMut(A) -> Res<Self::M<Step<B, A>>>, a: A) -> Res<Self::M<B>>;

    /// Nondeterministic choice among `xs` (the empty choice is failure).
    fn choose<T: Obj>(&self, xs: Vec<T>) -> Res<Self::M<T>>;

    /// Emits a named event.
    fn emit(&self, event: &str) -> Res<Self::M<()>> {
        Err(EvalError::Unsupported { instr: format!("emit {event}"), model: self.name() })
    }

    fn map<T: Obj, U: Obj>(&self, m: Self::M<T>, f: &mut dyn FnMut(T) -> U) -> Self::M<U> {
        self.bind(m, &mut |t| Ok(self.pure(f(t)))).expect("map cannot fail")
    }
}

/// Why an option iteration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DaggerExit {
    /// Left the loop after this many steps.
    Exited(usize),
    /// A step itself produced `none`.
    Diverged,
    /// Ran out of fuel.
    FuelExhausted,
}

/// Iterates `f` from `a` for at most `fuel` steps.
pub fn option_dagger<A, B>(mut f: impl FnMut(A) -> Option<Step<B, A>>, fuel: usize, a: A) -> (Option<B>, DaggerExit) {
    let mut cur = a;
    for step in 1..=fuel {
        match f(cur) {
            None => return (None, DaggerExit::Diverged),
            Some(Step::Exit(b)) => return (Some(b), DaggerExit::Exited(step)),
            Some(Step::Continue(a2)) => cur = a2,
        }
    }
    (None, DaggerExit::FuelExhausted)
}

/// All exits reachable from `a`; every continuation must stay in `domain`.
pub fn powerset_dagger<A: Ord + Clone, B: Ord>(
    mut f: impl FnMut(&A) -> BTreeSet<Step<B, A>>,
    domain: &BTreeSet<A>,
    a: A,
) -> Result<BTreeSet<B>, EvalError> {
    if !domain.contains(&a) {
        return Err(EvalError::DomainEscape);
    }
    let mut seen = BTreeSet::new();
    let mut work = vec![a.clone()];
    seen.insert(a);
    let mut out = BTreeSet::new();
    while let Some(x) = work.pop() {
        for s in f(&x) {
            match s {
                Step::Exit(b) => {
                    out.insert(b);
                }
                Step::Continue(y) => {
                    if !domain.contains(&y) {
                        return Err(EvalError::DomainEscape);
                    }
                    if seen.insert(y.clone()) {
                        work.push(y);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Deterministic, possibly diverging computations; iteration is bounded by `fuel`.
#[derive(Debug)]
pub struct OptionModel {
    pub fuel: usize,
    /// Set when an iteration ran out of fuel (as opposed to a step diverging).
    pub fuel_exhausted: Cell<bool>,
}

impl OptionModel {
    pub fn new(fuel: usize) -> Self {
        OptionModel { fuel, fuel_exhausted: Cell::new(false) }
    }
}

impl Elgot for OptionModel {
    type M<T: Obj> = Option<T>;

    fn name(&self) -> &'static str {
        "option"
    }

    fn pure<T: Obj>(&self, t: T) -> Option<T> {
        Some(t)
    }

    fn bind<T: Obj, U: Obj>(&self, m: Option<T>, k: &mut dyn FnMut(T) -> Res<Option<U>>) -> Res<Option<U>> {
        match m {
            Some(t) => k(t),
            None => Ok(None),
        }
    }

    fn dagger<A: Obj, B: Obj>(&self, f: &mut dyn FnMut(A) -> Res<Option<Step<B, A>>>, a: A) -> Res<Option<B>> {
        let mut cur = a;
        for _ in 0..self.fuel {
            match f(cur)? {
                None => return Ok(None),
                Some(Step::Exit(b)) => return Ok(Some(b)),
                Some(Step::Continue(a2)) => cur = a2,
            }
        }
        self.fuel_exhausted.set(true);
        Ok(None)
    }

    fn choose<T: Obj>(&self, mut xs: Vec<T>) -> Res<Option<T>> {
        match xs.len() {
            0 => Ok(None),
            1 => Ok(xs.pop()),
            _ => Err(EvalError::Unsupported { instr: "nondeterministic choice".into(), model: "option" }),
        }
    }
}

/// Nondeterministic computations as finite sets of results.
#[derive(Clone, Debug)]
pub struct PowersetModel {
    /// Maximum number of breadth-first rounds in one iteration.
    pub fuel: usize,
}

impl PowersetModel {
    pub fn new(fuel: usize) -> Self {
        PowersetModel { fuel }
    }
}

impl Elgot for PowersetModel {
    type M<T: Obj> = BTreeSet<T>;

    fn name(&self) -> &'static str {
        "powerset"
    }

    fn pure<T: Obj>(&self, t: T) -> BTreeSet<T> {
        BTreeSet::from([t])
    }

    fn bind<T: Obj, U: Obj>(&self, m: BTreeSet<T>, k: &mut dyn FnMut(T) -> Res<BTreeSet<U>>) -> Res<BTreeSet<U>> {
        let mut out = BTreeSet::new();
        for t in m {
            out.extend(k(t)?);
        }
        Ok(out)
    }

    fn dagger<A: Obj, B: Obj>(&self, f: &mut dyn FnMut(A) -> Res<BTreeSet<Step<B, A>>>, a: A) -> Res<BTreeSet<B>> {
        let mut seen = BTreeSet::from([a.clone()]);
        let mut frontier = vec![a];
        let mut out = BTreeSet::new();
        let mut rounds = 0;
        while !frontier.is_empty() {
            if rounds == self.fuel {
                return Err(EvalError::BudgetExhausted(self.fuel));
            }
            rounds += 1;
            let mut next = Vec::new();
            for x in frontier {
                for s in f(x)? {
                    match s {
                        Step::Exit(b) => {
                            out.insert(b);
                        }
                        Step::Continue(y) => {
                            if seen.insert(y.clone()) {
                                next.push(y);
                            }
                        }
                    }
                }
            }
            frontier = next;
        }
        Ok(out)
    }

    fn choose<T: Obj>(&self, xs: Vec<T>) -> Res<BTreeSet<T>> {
        Ok(xs.into_iter().collect())
    }
}
