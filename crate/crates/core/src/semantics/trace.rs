//! Trace models: nondeterministic computations that emit a monoid of effects
//! and may diverge with an infinite (here: bounded-prefix) trace.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::model::{Elgot, Obj, Res, Step};
use super::EvalError;

/// Finite effects that traces accumulate.
pub trait Monoid: Clone + Ord + fmt::Debug {
    fn unit() -> Self;
    fn combine(&self, other: &Self) -> Self;
    /// Number of events, used for prefix bounds.
    fn size(&self) -> usize;
    /// Keeps the first `n` events.
    fn truncate(&self, n: usize) -> Self;
    /// The single-event trace for a named event, when the monoid has one.
    fn event(_name: &str) -> Option<Self> {
        None
    }
}

/// The free monoid over named events.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Events(pub Vec<String>);

impl Monoid for Events {
    fn unit() -> Self {
        Events(Vec::new())
    }

    fn combine(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Events(v)
    }

    fn size(&self) -> usize {
        self.0.len()
    }

    fn truncate(&self, n: usize) -> Self {
        Events(self.0.iter().take(n).cloned().collect())
    }

    fn event(name: &str) -> Option<Self> {
        Some(Events(vec![name.to_string()]))
    }
}

impl fmt::Display for Events {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.join(", "))
    }
}

/// One member of a trace-model result set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TraceOut<T, Mo> {
    /// Finished with a value and a finite trace.
    Done(T, Mo),
    /// Diverged. The trace is exact when `truncated` is false; otherwise it
    /// is a prefix of the infinite trace (or of an unexplored continuation).
    Div(Mo, bool),
}

/// Nondeterministic trace model over the monoid `Mo`.
#[derive(Debug)]
pub struct TraceModel<Mo> {
    /// Maximum loop depth explored before a path is reported as truncated divergence.
    pub fuel: usize,
    /// Maximum trace length kept in a divergent prefix.
    pub prefix: usize,
    _m: std::marker::PhantomData<Mo>,
}

impl<Mo> TraceModel<Mo> {
    pub fn new(fuel: usize, prefix: usize) -> Self {
        TraceModel { fuel, prefix, _m: std::marker::PhantomData }
    }
}

impl<Mo: Monoid> TraceModel<Mo> {
    /// Prefixes every member of `m` with `pre`.
    pub fn act<T: Obj>(&self, pre: &Mo, m: BTreeSet<TraceOut<T, Mo>>) -> BTreeSet<TraceOut<T, Mo>> {
        if pre.size() == 0 {
            return m;
        }
        m.into_iter()
            .map(|o| match o {
                TraceOut::Done(t, w) => TraceOut::Done(t, pre.combine(&w)),
                TraceOut::Div(w, tr) => self.div_prefix(pre.combine(&w), tr),
            })
            .collect()
    }

    /// A divergent outcome, cut to the prefix bound.
    pub fn div_prefix<T>(&self, w: Mo, truncated: bool) -> TraceOut<T, Mo> {
        if w.size() > self.prefix {
            TraceOut::Div(w.truncate(self.prefix), true)
        } else {
            TraceOut::Div(w, truncated)
        }
    }

    pub fn emit_trace(&self, w: Mo) -> BTreeSet<TraceOut<(), Mo>> {
        BTreeSet::from([TraceOut::Done((), w)])
    }
}

struct Search<'f, A, B, Mo> {
    f: &'f mut dyn FnMut(A) -> Res<BTreeSet<TraceOut<Step<B, A>, Mo>>>,
    cache: BTreeMap<A, BTreeSet<TraceOut<Step<B, A>, Mo>>>,
    seen: BTreeSet<(A, Mo)>,
    on_path: BTreeSet<(A, Mo)>,
    out: BTreeSet<TraceOut<B, Mo>>,
}

impl<Mo: Monoid> TraceModel<Mo> {
    fn step<A: Obj, B: Obj>(&self, s: &mut Search<'_, A, B, Mo>, a: &A) -> Res<BTreeSet<TraceOut<Step<B, A>, Mo>>> {
        if let Some(r) = s.cache.get(a) {
            return Ok(r.clone());
        }
        let r = (s.f)(a.clone())?;
        s.cache.insert(a.clone(), r.clone());
        Ok(r)
    }

    /// Depth-first exploration of the loop from state `a` with accumulated trace `m`.
    /// `chain` records the deterministic steps leading here: (state, trace of its step).
    fn explore<A: Obj, B: Obj>(
        &self,
        s: &mut Search<'_, A, B, Mo>,
        a: A,
        m: Mo,
        depth: usize,
        chain: &mut Vec<(A, Mo)>,
    ) -> Res<()> {
        if m.size() > self.prefix || depth > self.fuel {
            s.out.insert(self.div_prefix(m, true));
            return Ok(());
        }
        let key = (a.clone(), m.clone());
        if s.on_path.contains(&key) {
            // a cycle that emits nothing: diverges with exactly this trace
            s.out.insert(TraceOut::Div(m, false));
            return Ok(());
        }
        if !s.seen.insert(key.clone()) {
            return Ok(());
        }
        s.on_path.insert(key.clone());
        let outs = self.step(s, &a)?;
        let deterministic = outs.len() == 1;
        for o in outs {
            match o {
                TraceOut::Done(Step::Exit(b), w) => {
                    s.out.insert(TraceOut::Done(b, m.combine(&w)));
                }
                TraceOut::Div(w, tr) => {
                    s.out.insert(self.div_prefix(m.combine(&w), tr));
                }
                TraceOut::Done(Step::Continue(a2), w) => {
                    let m2 = m.combine(&w);
                    if deterministic {
                        chain.push((a.clone(), w.clone()));
                        if let Some(j) = chain.iter().position(|(x, _)| *x == a2) {
                            let cyc = chain[j..].iter().fold(Mo::unit(), |acc, (_, t)| acc.combine(t));
                            chain.pop();
                            if cyc.size() == 0 {
                                s.out.insert(TraceOut::Div(m2, false));
                            } else {
                                let mut t = m2;
                                while t.size() <= self.prefix {
                                    t = t.combine(&cyc);
                                }
                                s.out.insert(self.div_prefix(t, true));
                            }
                            continue;
                        }
                        self.explore(s, a2, m2, depth + 1, chain)?;
                        chain.pop();
                    } else {
                        let mut fresh = Vec::new();
                        self.explore(s, a2, m2, depth + 1, &mut fresh)?;
                    }
                }
            }
        }
        s.on_path.remove(&key);
        Ok(())
    }
}

impl<Mo: Monoid> Elgot for TraceModel<Mo> {
    type M<T: Obj> = BTreeSet<TraceOut<T, Mo>>;

    fn name(&self) -> &'static str {
        "trace"
    }

    fn pure<T: Obj>(&self, t: T) -> Self::M<T> {
        BTreeSet::from([TraceOut::Done(t, Mo::unit())])
    }

    fn bind<T: Obj, U: Obj>(&self, m: Self::M<T>, k: &mut dyn FnMut(T) -> Res<Self::M<U>>) -> Res<Self::M<U>> {
        let mut out = BTreeSet::new();
        for o in m {
            match o {
                TraceOut::Done(t, w) => out.extend(self.act(&w, k(t)?)),
                TraceOut::Div(w, tr) => {
                    out.insert(TraceOut::Div(w, tr));
                }
            }
        }
        Ok(out)
    }

    fn dagger<A: Obj, B: Obj>(&self, f: &mut dyn FnMut(A) -> Res<Self::M<Step<B, A>>>, a: A) -> Res<Self::M<B>> {
        let mut s = Search { f, cache: BTreeMap::new(), seen: BTreeSet::new(), on_path: BTreeSet::new(), out: BTreeSet::new() };
        self.explore(&mut s, a, Mo::unit(), 0, &mut Vec::new())?;
        Ok(s.out)
    }

    fn choose<T: Obj>(&self, xs: Vec<T>) -> Res<Self::M<T>> {
        Ok(xs.into_iter().map(|x| TraceOut::Done(x, Mo::unit())).collect())
    }

    fn emit(&self, event: &str) -> Res<Self::M<()>> {
        match Mo::event(event) {
            Some(w) => Ok(self.emit_trace(w)),
            None => Err(EvalError::Unsupported { instr: format!("emit {event}"), model: "trace" }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type T = TraceModel<Events>;

    fn ev(xs: &[&str]) -> Events {
        Events(xs.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn pure_and_emit() {
        let m = T::new(100, 8);
        assert_eq!(m.pure(1u8), BTreeSet::from([TraceOut::Done(1u8, Events::unit())]));
        let r = m.bind(m.emit("a").unwrap(), &mut |()| Ok(m.pure(3u8))).unwrap();
        assert_eq!(r, BTreeSet::from([TraceOut::Done(3u8, ev(&["a"]))]));
    }

    #[test]
    fn emit_forever_is_a_bounded_prefix() {
        let m = T::new(100, 4);
        let r = m
            .dagger(
                &mut |a: u8| {
                    let e = m.emit("a")?;
                    m.bind(e, &mut |()| Ok(m.pure(Step::<u8, u8>::Continue(a))))
                },
                0,
            )
            .unwrap();
        assert_eq!(r, BTreeSet::from([TraceOut::Div(ev(&["a", "a", "a", "a"]), true)]));
    }

    #[test]
    fn silent_divergence_is_exact() {
        let m = T::new(100, 4);
        let r = m.dagger(&mut |a: u8| Ok(m.pure(Step::<u8, u8>::Continue(1 - a))), 0).unwrap();
        assert_eq!(r, BTreeSet::from([TraceOut::Div(Events::unit(), false)]));
    }

    #[test]
    fn nondeterministic_loop_collects_exits_and_divergence() {
        let m = T::new(100, 4);
        // from 0: either exit 5 or loop back to 0, silently
        let r = m
            .dagger(&mut |_a: u8| m.choose(vec![Step::Exit(5u8), Step::Continue(0u8)]), 0)
            .unwrap();
        assert_eq!(r, BTreeSet::from([TraceOut::Done(5u8, Events::unit()), TraceOut::Div(Events::unit(), false)]));
    }

    #[test]
    fn nondeterministic_emitting_loop_hits_depth_cutoff() {
        let m = T::new(10, 64);
        let r = m
            .dagger(
                &mut |_a: u8| {
                    let e = m.emit("t")?;
                    m.bind(e, &mut |()| m.choose(vec![Step::Exit(1u8), Step::Continue(0u8)]))
                },
                0,
            )
            .unwrap();
        assert!(r.iter().any(|o| matches!(o, TraceOut::Div(_, true))));
        assert!(r.contains(&TraceOut::Done(1u8, ev(&["t"]))));
        assert!(r.contains(&TraceOut::Done(1u8, ev(&["t", "t", "t"]))));
    }
}
