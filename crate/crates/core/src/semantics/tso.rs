//! Total store order: per-thread write buffers over the pomset trace model.
//!
//! A write emits `x:=v` and appends `x:=v` to the thread's buffer; a flush
//! moves a prefix of the buffer into the trace as commit events `↓x:=v`.
//! Reads consult the buffer (newest entry first) and otherwise return any
//! word. Executions are then filtered for consistency with a single memory.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use super::interp::Interp;
use super::model::{Elgot, Obj, Res};
use super::pomset::{Action, Pomset};
use super::sigimpl::{pure_builtin, Builtin, Machine, SigImpl};
use super::trace::{TraceModel, TraceOut};
use super::{EvalError, Value, ENUM_LIMIT};
use crate::ir::{Instr, Region, Signature, Ty};

pub type TsoModel = TraceModel<Pomset>;

/// Outcome sets of the TSO monad: a value, the final buffer, and a pomset.
pub type TsoSet<T> = BTreeSet<TraceOut<(T, Buffer), Pomset>>;

/// A thread's store buffer, oldest entry first.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Buffer(pub Vec<(String, u64)>);

impl Buffer {
    /// The newest buffered value for `x`.
    pub fn lookup(&self, x: &str) -> Option<u64> {
        self.0.iter().rev().find(|(y, _)| y == x).map(|(_, v)| *v)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn commits(entries: &[(String, u64)]) -> Pomset {
        Pomset::chain(entries.iter().map(|(x, v)| Action::Commit(x.clone(), *v)).collect())
    }
}

impl fmt::Display for Buffer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let es: Vec<String> = self.0.iter().map(|(x, v)| format!("{x}:={v}")).collect();
        write!(f, "[{}]", es.join(", "))
    }
}

/// Splits the buffer at every point: the prefix is committed, the suffix kept.
pub fn pflush<T: Obj>(a: T, buf: &Buffer) -> TsoSet<T> {
    (0..=buf.0.len())
        .map(|k| TraceOut::Done((a.clone(), Buffer(buf.0[k..].to_vec())), Buffer::commits(&buf.0[..k])))
        .collect()
}

/// `pflush ; f ; pflush`.
pub fn ide_wrap<T: Obj, U: Obj>(
    model: &TsoModel,
    a: T,
    buf: &Buffer,
    f: &mut dyn FnMut(T, Buffer) -> Res<TsoSet<U>>,
) -> Res<TsoSet<U>> {
    let m = model.bind(pflush(a, buf), &mut |(t, b)| f(t, b))?;
    model.bind(m, &mut |(u, b)| Ok(pflush(u, &b)))
}

/// Reads `x`, returning a value from `0..domain` when the buffer has none.
pub fn tso_read(model: &TsoModel, x: &str, buf: &Buffer, domain: u64) -> Res<TsoSet<u64>> {
    ide_wrap(model, (), buf, &mut |(), b| {
        let vs: Vec<u64> = match b.lookup(x) {
            Some(v) => vec![v],
            None => (0..domain).collect(),
        };
        Ok(vs.into_iter().map(|v| TraceOut::Done((v, b.clone()), Pomset::single(Action::Read(x.to_string(), v)))).collect())
    })
}

pub fn tso_write(model: &TsoModel, x: &str, v: u64, buf: &Buffer) -> Res<TsoSet<()>> {
    ide_wrap(model, (), buf, &mut |(), mut b| {
        b.0.push((x.to_string(), v));
        Ok(BTreeSet::from([TraceOut::Done(((), b), Pomset::single(Action::Write(x.to_string(), v)))]))
    })
}

/// Commits the whole buffer.
pub fn tso_fence(buf: &Buffer) -> TsoSet<()> {
    BTreeSet::from([TraceOut::Done(((), Buffer::default()), Buffer::commits(&buf.0))])
}

/// Fork-join parallel composition: flush the caller's buffer, run both
/// sides on empty buffers, keep only runs that end fully flushed.
pub fn tso_par<A: Obj, B: Obj>(
    model: &TsoModel,
    buf: &Buffer,
    f: impl FnOnce(Buffer) -> Res<TsoSet<A>>,
    g: impl FnOnce(Buffer) -> Res<TsoSet<B>>,
) -> Res<TsoSet<(A, B)>> {
    let pre = Buffer::commits(&buf.0);
    let r0 = f(Buffer::default())?;
    let r1 = g(Buffer::default())?;
    Ok(model.act(&pre, par_sets(model, r0, r1)))
}

fn par_sets<A: Obj, B: Obj>(model: &TsoModel, r0: TsoSet<A>, r1: TsoSet<B>) -> TsoSet<(A, B)> {
    enum Side<T> {
        Done(T, Pomset),
        Div(Pomset, bool),
    }
    fn keep<T: Obj>(r: TsoSet<T>) -> Vec<Side<T>> {
        r.into_iter()
            .filter_map(|o| match o {
                TraceOut::Done((t, b), p) if b.is_empty() => Some(Side::Done(t, p)),
                TraceOut::Done(..) => None,
                TraceOut::Div(p, tr) => Some(Side::Div(p, tr)),
            })
            .collect()
    }
    let (l, r) = (keep(r0), keep(r1));
    let mut out = BTreeSet::new();
    for x in &l {
        for y in &r {
            out.insert(match (x, y) {
                (Side::Done(a, p), Side::Done(b, q)) => TraceOut::Done(((a.clone(), b.clone()), Buffer::default()), p.par(q)),
                (Side::Done(_, p), Side::Div(q, t)) | (Side::Div(p, t), Side::Done(_, q)) => model.div_prefix(p.par(q), *t),
                (Side::Div(p, s), Side::Div(q, t)) => model.div_prefix(p.par(q), *s || *t),
            });
        }
    }
    out
}

/// The TSO machine: its state is the thread's store buffer.
#[derive(Clone, Copy, Debug, Default)]
pub struct TsoMachine;

fn word_domain(sig: &Signature, t: &Ty) -> Res<(String, u64)> {
    match t {
        Ty::Base(n) => {
            let c = sig.base(n).map(|b| b.carrier).unwrap_or(0);
            if c as u128 > ENUM_LIMIT {
                return Err(EvalError::TooLarge(n.clone()));
            }
            Ok((n.clone(), c))
        }
        _ => Err(EvalError::Contract(format!("memory words must have a base type, found {t}"))),
    }
}

impl Machine<TsoModel> for TsoMachine {
    type W = Buffer;

    fn op(&self, model: &TsoModel, sig: &Signature, ins: &Instr, b: &Builtin, arg: Value, w: Buffer) -> Res<TsoSet<Value>> {
        match b {
            Builtin::Read(x) => {
                let (name, c) = word_domain(sig, &ins.cod)?;
                let m = tso_read(model, x, &w, c)?;
                Ok(model.map(m, &mut |(v, b)| (Value::base(&name, v), b)))
            }
            Builtin::Write(x) => {
                let v = arg.as_base().ok_or_else(|| EvalError::Contract(format!("write of non-word {arg}")))?;
                let m = tso_write(model, x, v, &w)?;
                Ok(model.map(m, &mut |((), b)| (Value::Unit, b)))
            }
            Builtin::Fence => Ok(model.map(tso_fence(&w), &mut |((), b)| (Value::Unit, b))),
            _ => match pure_builtin(model, sig, ins, b, &arg)? {
                Some(m) => Ok(model.map(m, &mut |v| (v, w.clone()))),
                None => Err(EvalError::Unsupported { instr: ins.name.clone(), model: "tso" }),
            },
        }
    }
}

/// Is there a single-memory interleaving explaining every read?
///
/// A read is forwarded from its own buffer when more writes than commits to
/// its location precede it; such reads are already explained. Every other
/// read `x=v` needs a linear extension in which the latest preceding commit
/// to `x` stores `v`. With no preceding commit the read is explained by
/// `init`: `None` accepts any value, `Some(v0)` only `v0`.
pub fn is_valid_execution(p: &Pomset, init: Option<u64>) -> bool {
    let acts = p.actions();
    let n = acts.len();
    let constrained: Vec<bool> = (0..n)
        .map(|j| match &acts[j] {
            Action::Read(x, _) => {
                let count = |pick: fn(&Action) -> Option<&String>| {
                    p.predecessors(j).iter().filter(|&&i| pick(&acts[i as usize]) == Some(x)).count()
                };
                let writes = count(|a| if let Action::Write(y, _) = a { Some(y) } else { None });
                let commits = count(|a| if let Action::Commit(y, _) = a { Some(y) } else { None });
                writes <= commits
            }
            _ => false,
        })
        .collect();
    let mut search = Linearize { p, init, constrained, failed: HashSet::new() };
    search.run(&mut vec![false; n], &mut BTreeMap::new())
}

struct Linearize<'a> {
    p: &'a Pomset,
    init: Option<u64>,
    constrained: Vec<bool>,
    failed: HashSet<(Vec<bool>, BTreeMap<String, u64>)>,
}

impl Linearize<'_> {
    fn ready(&self, placed: &[bool], j: usize) -> bool {
        !placed[j] && self.p.predecessors(j).iter().all(|&i| placed[i as usize])
    }

    fn satisfied(&self, mem: &BTreeMap<String, u64>, j: usize) -> bool {
        match &self.p.actions()[j] {
            Action::Read(x, v) if self.constrained[j] => match mem.get(x) {
                Some(m) => m == v,
                None => self.init.map_or(true, |i| i == *v),
            },
            _ => true,
        }
    }

    fn run(&mut self, placed: &mut Vec<bool>, mem: &mut BTreeMap<String, u64>) -> bool {
        let n = placed.len();
        // Nodes other than commits never change memory; placing them as soon as
        // they are enabled and satisfied loses no extensions.
        let mut forced = Vec::new();
        loop {
            let next = (0..n).find(|&j| {
                self.ready(placed, j) && !matches!(self.p.actions()[j], Action::Commit(..)) && self.satisfied(mem, j)
            });
            match next {
                Some(j) => {
                    placed[j] = true;
                    forced.push(j);
                }
                None => break,
            }
        }
        let ok = if placed.iter().all(|&b| b) {
            true
        } else if self.failed.contains(&(placed.clone(), mem.clone())) {
            false
        } else {
            let mut ok = false;
            for j in 0..n {
                if let (true, Action::Commit(x, v)) = (self.ready(placed, j), &self.p.actions()[j]) {
                    let old = mem.insert(x.clone(), *v);
                    placed[j] = true;
                    ok = self.run(placed, mem);
                    placed[j] = false;
                    match old {
                        Some(o) => mem.insert(x.clone(), o),
                        None => mem.remove(x),
                    };
                    if ok {
                        break;
                    }
                }
            }
            if !ok {
                self.failed.insert((placed.clone(), mem.clone()));
            }
            ok
        };
        for j in forced {
            placed[j] = false;
        }
        ok
    }
}

/// One valid execution of a litmus test.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LitmusOutcome {
    /// The value each thread returned, in thread order.
    pub values: Vec<Value>,
    pub pomset: Pomset,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LitmusReport {
    pub valid: Vec<LitmusOutcome>,
    /// Executions removed by the validity filter.
    pub rejected: usize,
    /// Divergent runs, as pomset prefixes with a truncation flag.
    pub diverged: Vec<(Pomset, bool)>,
}

impl LitmusReport {
    /// The distinct value tuples of valid executions.
    pub fn allowed(&self) -> BTreeSet<Vec<Value>> {
        self.valid.iter().map(|o| o.values.clone()).collect()
    }
}

/// Runs closed threads in parallel from an empty buffer and filters the
/// executions. Each thread is a region with one exit label.
pub fn run_litmus(
    sig: &Signature,
    imp: &SigImpl,
    threads: &[Region],
    model: &TsoModel,
    init: Option<u64>,
) -> Res<LitmusReport> {
    let interp = Interp { sig, imp, model, machine: &TsoMachine };
    let mut acc: TsoSet<Vec<Value>> = BTreeSet::from([TraceOut::Done((Vec::new(), Buffer::default()), Pomset::empty())]);
    for r in threads {
        let res = interp.region(&Vec::new(), r, Buffer::default())?;
        let res: TsoSet<Value> = model.map(res, &mut |(o, b)| (o.value, b));
        let joined = tso_par(model, &Buffer::default(), |_| Ok(acc), |_| Ok(res))?;
        acc = model.map(joined, &mut |((mut vs, v), b)| {
            vs.push(v);
            (vs, b)
        });
    }
    let mut report = LitmusReport::default();
    for o in acc {
        match o {
            TraceOut::Done((values, _), pomset) => {
                if is_valid_execution(&pomset, init) {
                    report.valid.push(LitmusOutcome { values, pomset });
                } else {
                    report.rejected += 1;
                }
            }
            TraceOut::Div(p, t) => report.diverged.push((p, t)),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> TsoModel {
        TsoModel::new(100, 64)
    }

    fn done_buffers<T: Obj>(s: &TsoSet<T>) -> Vec<Buffer> {
        s.iter()
            .filter_map(|o| match o {
                TraceOut::Done((_, b), _) => Some(b.clone()),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn pflush_splits() {
        assert_eq!(pflush((), &Buffer::default()).len(), 1);
        let b = Buffer(vec![("x".into(), 1)]);
        assert_eq!(pflush((), &b).len(), 2);
        let b = Buffer(vec![("x".into(), 1), ("y".into(), 0), ("x".into(), 0)]);
        let once = pflush((), &b);
        let twice = m().bind(once.clone(), &mut |((), b)| Ok(pflush((), &b))).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn read_on_empty_buffer_is_any_word() {
        let r = tso_read(&m(), "x", &Buffer::default(), 2).unwrap();
        let vals: BTreeSet<u64> = r
            .iter()
            .filter_map(|o| match o {
                TraceOut::Done((v, _), _) => Some(*v),
                _ => None,
            })
            .collect();
        assert_eq!(vals, BTreeSet::from([0, 1]));
    }

    #[test]
    fn write_then_read_sees_the_buffer() {
        let model = m();
        let w = tso_write(&model, "x", 1, &Buffer::default()).unwrap();
        let r = model.bind(w, &mut |((), b)| tso_read(&model, "x", &b, 2)).unwrap();
        for o in &r {
            if let TraceOut::Done((v, b), p) = o {
                if !b.is_empty() || p.actions().iter().all(|a| !matches!(a, Action::Commit(..))) {
                    assert_eq!(*v, 1, "buffered write must be visible");
                }
            }
        }
    }

    #[test]
    fn fence_empties_the_buffer() {
        let b = Buffer(vec![("x".into(), 1), ("y".into(), 1)]);
        assert!(done_buffers(&tso_fence(&b)).iter().all(Buffer::is_empty));
    }

    #[test]
    fn ide_wrap_of_pure_is_pflush() {
        let b = Buffer(vec![("x".into(), 1), ("y".into(), 0)]);
        let model = m();
        let w = ide_wrap(&model, 5u8, &b, &mut |a, b| Ok(BTreeSet::from([TraceOut::Done((a, b), Pomset::empty())]))).unwrap();
        assert_eq!(w, pflush(5u8, &b));
    }

    #[test]
    fn par_of_pure_is_pure_pair() {
        let model = m();
        let pure = |v: u8| move |b: Buffer| -> Res<TsoSet<u8>> { Ok(BTreeSet::from([TraceOut::Done((v, b), Pomset::empty())])) };
        let r = tso_par(&model, &Buffer::default(), pure(1), pure(2)).unwrap();
        assert_eq!(r, BTreeSet::from([TraceOut::Done(((1, 2), Buffer::default()), Pomset::empty())]));
    }

    #[test]
    fn validity_filter() {
        let w = |x: &str, v| Action::Write(x.into(), v);
        let c = |x: &str, v| Action::Commit(x.into(), v);
        let r = |x: &str, v| Action::Read(x.into(), v);
        // forwarded read
        assert!(is_valid_execution(&Pomset::chain(vec![w("x", 1), r("x", 1), c("x", 1)]), Some(0)));
        // read after own commit must see it
        assert!(is_valid_execution(&Pomset::chain(vec![w("x", 1), c("x", 1), r("x", 1)]), Some(0)));
        assert!(!is_valid_execution(&Pomset::chain(vec![w("x", 1), c("x", 1), r("x", 0)]), Some(0)));
        // initial value policy
        assert!(!is_valid_execution(&Pomset::single(r("x", 1)), Some(0)));
        assert!(is_valid_execution(&Pomset::single(r("x", 1)), None));
        // a racing commit can be ordered either side of the read
        let t0 = Pomset::chain(vec![w("x", 1), c("x", 1)]);
        assert!(is_valid_execution(&t0.par(&Pomset::single(r("x", 0))), Some(0)));
        assert!(is_valid_execution(&t0.par(&Pomset::single(r("x", 1))), Some(0)));
    }
}
