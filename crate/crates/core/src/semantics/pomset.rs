//! Finite pomsets of memory actions, kept in a canonical form so that
//! structural equality is isomorphism.

use std::cmp::Ordering;
use std::fmt;

use super::trace::Monoid;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    /// `x = v`: a read observed value `v`.
    Read(String, u64),
    /// `x := v`: a write was issued (into the thread's buffer).
    Write(String, u64),
    /// `↓x := v`: a buffered write reached memory.
    Commit(String, u64),
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Read(x, v) => write!(f, "{x}={v}"),
            Action::Write(x, v) => write!(f, "{x}:={v}"),
            Action::Commit(x, v) => write!(f, "↓{x}:={v}"),
        }
    }
}

/// A finite pomset. Nodes are stored in a canonical linear extension and
/// `preds[i]` lists every (transitive) predecessor of node `i`, so two
/// isomorphic pomsets are structurally equal. Ticks are never stored: the
/// empty pomset stands for `{δ}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pomset {
    acts: Vec<Action>,
    preds: Vec<Vec<u32>>,
}

impl Pomset {
    pub fn empty() -> Self {
        Pomset::default()
    }

    pub fn single(a: Action) -> Self {
        Pomset { acts: vec![a], preds: vec![vec![]] }
    }

    /// A totally ordered pomset.
    pub fn chain(acts: Vec<Action>) -> Self {
        let preds = (0..acts.len()).map(|i| (0..i as u32).collect()).collect();
        Pomset { acts, preds }
    }

    pub fn len(&self) -> usize {
        self.acts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.acts.is_empty()
    }

    pub fn actions(&self) -> &[Action] {
        &self.acts
    }

    /// Strict order: is `i` before `j`?
    pub fn before(&self, i: usize, j: usize) -> bool {
        self.preds[j].binary_search(&(i as u32)).is_ok()
    }

    pub fn predecessors(&self, j: usize) -> &[u32] {
        &self.preds[j]
    }

    /// Builds a pomset from actions and a relation, closing it transitively.
    pub fn from_relation(acts: Vec<Action>, less: &[(usize, usize)]) -> Self {
        let n = acts.len();
        let mut m = vec![vec![false; n]; n];
        for &(a, b) in less {
            m[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if m[i][k] {
                    for j in 0..n {
                        if m[k][j] {
                            m[i][j] = true;
                        }
                    }
                }
            }
        }
        let preds = (0..n).map(|j| (0..n).filter(|&i| m[i][j]).map(|i| i as u32).collect()).collect();
        canonicalize(acts, preds)
    }

    /// Sequential composition: every node of `self` precedes every node of `q`.
    pub fn seq(&self, q: &Pomset) -> Pomset {
        if q.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return q.clone();
        }
        let n = self.len() as u32;
        let mut acts = self.acts.clone();
        acts.extend(q.acts.iter().cloned());
        let mut preds = self.preds.clone();
        for p in &q.preds {
            let mut v: Vec<u32> = (0..n).collect();
            v.extend(p.iter().map(|i| i + n));
            preds.push(v);
        }
        // already canonical when both halves are: the halves cannot interleave
        Pomset { acts, preds }
    }

    /// Parallel composition: disjoint union with no order across.
    pub fn par(&self, q: &Pomset) -> Pomset {
        if q.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return q.clone();
        }
        let n = self.len() as u32;
        let mut acts = self.acts.clone();
        acts.extend(q.acts.iter().cloned());
        let mut preds = self.preds.clone();
        preds.extend(q.preds.iter().map(|p| p.iter().map(|i| i + n).collect()));
        canonicalize(acts, preds)
    }

    /// Immediate-predecessor edges (the Hasse diagram).
    pub fn hasse(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.len() {
            for &i in &self.preds[j] {
                let i = i as usize;
                let covered = self.preds[j].iter().any(|&k| k as usize != i && self.before(i, k as usize));
                if !covered {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Canonical form: the lexicographically least encoding over all linear
/// extensions, where node `k` of an extension is encoded as its action and
/// the positions of its predecessors.
fn canonicalize(acts: Vec<Action>, preds: Vec<Vec<u32>>) -> Pomset {
    let n = acts.len();
    let mut best: Option<Vec<(Action, Vec<u32>)>> = None;
    let mut cur: Vec<(Action, Vec<u32>)> = Vec::with_capacity(n);
    let mut pos = vec![u32::MAX; n];
    let mut order = Vec::with_capacity(n);
    search(&acts, &preds, &mut pos, &mut order, &mut cur, &mut best, false);
    let enc = best.unwrap_or_default();
    let (acts, preds) = enc.into_iter().unzip();
    Pomset { acts, preds }
}

fn search(
    acts: &[Action],
    preds: &[Vec<u32>],
    pos: &mut Vec<u32>,
    order: &mut Vec<usize>,
    cur: &mut Vec<(Action, Vec<u32>)>,
    best: &mut Option<Vec<(Action, Vec<u32>)>>,
    strictly_less: bool,
) {
    let n = acts.len();
    if order.len() == n {
        *best = Some(cur.clone());
        return;
    }
    let k = order.len();
    let mut cands: Vec<(Action, Vec<u32>, usize)> = (0..n)
        .filter(|&i| pos[i] == u32::MAX && preds[i].iter().all(|&p| pos[p as usize] != u32::MAX))
        .map(|i| {
            let mut ps: Vec<u32> = preds[i].iter().map(|&p| pos[p as usize]).collect();
            ps.sort_unstable();
            (acts[i].clone(), ps, i)
        })
        .collect();
    cands.sort();
    let least = (cands[0].0.clone(), cands[0].1.clone());
    for (a, ps, i) in cands {
        if (a.clone(), ps.clone()) != least {
            break;
        }
        let mut less = strictly_less;
        if !less {
            if let Some(b) = best.as_ref() {
                match (&a, &ps).cmp(&(&b[k].0, &b[k].1)) {
                    Ordering::Greater => return,
                    Ordering::Less => less = true,
                    Ordering::Equal => {}
                }
            }
        }
        pos[i] = k as u32;
        order.push(i);
        cur.push((a, ps));
        search(acts, preds, pos, order, cur, best, less);
        cur.pop();
        order.pop();
        pos[i] = u32::MAX;
    }
}

impl Monoid for Pomset {
    fn unit() -> Self {
        Pomset::empty()
    }

    fn combine(&self, other: &Self) -> Self {
        self.seq(other)
    }

    fn size(&self) -> usize {
        self.len()
    }

    fn truncate(&self, n: usize) -> Self {
        // a prefix of the canonical extension is down-closed
        let k = n.min(self.len());
        Pomset { acts: self.acts[..k].to_vec(), preds: self.preds[..k].to_vec() }
    }
}

impl fmt::Display for Pomset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{δ}}");
        }
        let edges = self.hasse();
        write!(f, "{{")?;
        for (j, a) in self.acts.iter().enumerate() {
            if j > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{j}:{a}")?;
            let ps: Vec<String> = edges.iter().filter(|e| e.1 == j).map(|e| e.0.to_string()).collect();
            if !ps.is_empty() {
                write!(f, " after {}", ps.join(","))?;
            }
        }
        write!(f, "}}")
    }
}
