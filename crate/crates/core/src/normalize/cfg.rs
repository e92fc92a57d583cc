//! Flat control-flow graphs with dominance-based scoping, and conversion to
//! and from strict regions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::strict::{add_dom, NotStrict};
use crate::ir::{Block, Ctx, Effect, LabelCtx, Region, Signature, Term, Ty};
use crate::typing::is_strict_shape;

pub type VarId = usize;
pub type LabelId = usize;

/// Right-hand side of a let in a basic block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Var(VarId),
    Unit,
    Op(String, VarId),
    Pair(VarId, VarId),
    Inl(VarId, Option<Ty>),
    Inr(VarId, Option<Ty>),
    Abort(VarId, Option<Ty>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inst {
    Let1(VarId, Atom),
    Let2(VarId, VarId, Atom),
}

/// A tree of cases on variables with branches at the leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Terminator {
    Br(LabelId, VarId),
    Case(VarId, VarId, Box<Terminator>, VarId, Box<Terminator>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicBlock {
    pub insts: Vec<Inst>,
    pub term: Terminator,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfgBlock {
    pub label: LabelId,
    pub param: VarId,
    pub ty: Ty,
    pub body: BasicBlock,
}

/// An entry block followed by labeled blocks. Inputs and exits are the
/// variables and labels bound outside the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    pub inputs: Vec<(VarId, Ty, Effect)>,
    pub exits: Vec<(LabelId, Ty)>,
    pub entry: BasicBlock,
    pub blocks: Vec<CfgBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CfgError {
    #[error("label {0} is defined twice")]
    DuplicateLabel(LabelId),
    #[error("variable {0} is defined twice")]
    DuplicateVar(VarId),
    #[error("branch to unknown label {0}")]
    UnknownLabel(LabelId),
    #[error("block {0} is unreachable from the entry")]
    Unreachable(LabelId),
    #[error("variable {var} is not in scope in {block}")]
    OutOfScope { var: VarId, block: String },
    #[error("ill-typed {what} in {block}")]
    IllTyped { what: String, block: String },
    #[error(transparent)]
    NotStrict(#[from] NotStrict),
}

/// Immediate-dominator tree. Node 0 is the entry, node `i + 1` is `blocks[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomTree {
    pub parent: Vec<Option<usize>>,
    /// Children of each node, in block order.
    pub children: Vec<Vec<usize>>,
}

impl DomTree {
    /// Does `a` dominate `b` (reflexively)?
    pub fn dominates(&self, a: usize, b: usize) -> bool {
        let mut cur = Some(b);
        while let Some(c) = cur {
            if c == a {
                return true;
            }
            cur = self.parent[c];
        }
        false
    }
}

impl Terminator {
    /// Branch targets in left-to-right order.
    pub fn targets(&self, out: &mut Vec<LabelId>) {
        match self {
            Terminator::Br(l, _) => out.push(*l),
            Terminator::Case(_, _, s, _, t) => {
                s.targets(out);
                t.targets(out);
            }
        }
    }
}

impl Cfg {
    /// Blocks by label: node index for each block label.
    fn nodes(&self) -> Result<BTreeMap<LabelId, usize>, CfgError> {
        let mut m = BTreeMap::new();
        let exits: BTreeSet<LabelId> = self.exits.iter().map(|e| e.0).collect();
        if exits.len() != self.exits.len() {
            let mut seen = BTreeSet::new();
            let dup = self.exits.iter().find(|e| !seen.insert(e.0)).expect("a duplicate");
            return Err(CfgError::DuplicateLabel(dup.0));
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if exits.contains(&b.label) || m.insert(b.label, i + 1).is_some() {
                return Err(CfgError::DuplicateLabel(b.label));
            }
        }
        Ok(m)
    }

    fn body(&self, node: usize) -> &BasicBlock {
        if node == 0 {
            &self.entry
        } else {
            &self.blocks[node - 1].body
        }
    }

    fn node_name(&self, node: usize) -> String {
        if node == 0 {
            "entry".into()
        } else {
            format!("l{}", self.blocks[node - 1].label)
        }
    }

    /// Successor nodes of every node; exits are dropped.
    fn successors(&self) -> Result<Vec<Vec<usize>>, CfgError> {
        let nodes = self.nodes()?;
        let exits: BTreeSet<LabelId> = self.exits.iter().map(|e| e.0).collect();
        (0..=self.blocks.len())
            .map(|n| {
                let mut ts = Vec::new();
                self.body(n).term.targets(&mut ts);
                ts.into_iter()
                    .filter(|t| !exits.contains(t))
                    .map(|t| nodes.get(&t).copied().ok_or(CfgError::UnknownLabel(t)))
                    .collect()
            })
            .collect()
    }
}

/// Dominators by iterating the intersection of predecessors' sets to a
/// fixpoint; the parent of each node is its immediate dominator.
pub fn dominance_tree(g: &Cfg) -> Result<DomTree, CfgError> {
    let succ = g.successors()?;
    let n = succ.len();
    let mut reach = vec![false; n];
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        if !std::mem::replace(&mut reach[v], true) {
            stack.extend(succ[v].iter().copied());
        }
    }
    if let Some(u) = (1..n).find(|&v| !reach[v]) {
        return Err(CfgError::Unreachable(g.blocks[u - 1].label));
    }
    let mut preds = vec![Vec::new(); n];
    for (v, ss) in succ.iter().enumerate() {
        for &s in ss {
            preds[s].push(v);
        }
    }
    let all: BTreeSet<usize> = (0..n).collect();
    let mut dom: Vec<BTreeSet<usize>> = (0..n).map(|v| if v == 0 { BTreeSet::from([0]) } else { all.clone() }).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for v in 1..n {
            let mut d = preds[v].iter().map(|&p| dom[p].clone()).reduce(|a, b| &a & &b).unwrap_or_default();
            d.insert(v);
            if d != dom[v] {
                dom[v] = d;
                changed = true;
            }
        }
    }
    // The immediate dominator is the strict dominator with the most dominators.
    let parent: Vec<Option<usize>> =
        (0..n).map(|v| dom[v].iter().copied().filter(|&d| d != v).max_by_key(|&d| dom[d].len())).collect();
    let mut children = vec![Vec::new(); n];
    for v in 1..n {
        children[parent[v].expect("reachable non-entry node")].push(v);
    }
    Ok(DomTree { parent, children })
}

/// Checks uniqueness of definitions, reachability, typing, and that every
/// use is dominated by its definition.
pub fn check_cfg(sig: &Signature, g: &Cfg) -> Result<DomTree, CfgError> {
    let nodes = g.nodes()?;
    let tree = dominance_tree(g)?;
    let mut defined = BTreeSet::new();
    let mut def = |v: VarId| if defined.insert(v) { Ok(()) } else { Err(CfgError::DuplicateVar(v)) };
    for (v, _, _) in &g.inputs {
        def(*v)?;
    }
    for n in 0..=g.blocks.len() {
        if n > 0 {
            def(g.blocks[n - 1].param)?;
        }
        let b = g.body(n);
        for i in &b.insts {
            match i {
                Inst::Let1(x, _) => def(*x)?,
                Inst::Let2(x, y, _) => {
                    def(*x)?;
                    def(*y)?;
                }
            }
        }
        fn binders(t: &Terminator, out: &mut Vec<VarId>) {
            if let Terminator::Case(_, y, s, z, t) = t {
                out.push(*y);
                out.push(*z);
                binders(s, out);
                binders(t, out);
            }
        }
        let mut bs = Vec::new();
        binders(&b.term, &mut bs);
        for v in bs {
            def(v)?;
        }
    }
    let mut labels: BTreeMap<LabelId, Ty> = g.exits.iter().cloned().collect();
    for b in &g.blocks {
        labels.insert(b.label, b.ty.clone());
    }
    let _ = nodes;
    let bot = sig.bot();
    let mut scope: BTreeMap<VarId, (Ty, Effect)> = g.inputs.iter().map(|(v, t, e)| (*v, (t.clone(), *e))).collect();
    check_node(sig, g, &tree, 0, &mut scope, &labels, bot)?;
    Ok(tree)
}

type Scope = BTreeMap<VarId, (Ty, Effect)>;

fn check_node(
    sig: &Signature,
    g: &Cfg,
    tree: &DomTree,
    n: usize,
    scope: &mut Scope,
    labels: &BTreeMap<LabelId, Ty>,
    bot: Effect,
) -> Result<(), CfgError> {
    let name = g.node_name(n);
    let mut added = Vec::new();
    if n > 0 {
        let b = &g.blocks[n - 1];
        scope.insert(b.param, (b.ty.clone(), bot));
        added.push(b.param);
    }
    let ill = |what: String| CfgError::IllTyped { what, block: name.clone() };
    let look = |scope: &Scope, v: VarId| scope.get(&v).cloned().ok_or(CfgError::OutOfScope { var: v, block: name.clone() });
    for i in &g.body(n).insts {
        let (a, dsts) = match i {
            Inst::Let1(x, a) => (a, vec![*x]),
            Inst::Let2(x, y, a) => (a, vec![*x, *y]),
        };
        let (ty, _) = atom_type(sig, a, &|v| look(scope, v)).map_err(|e| match e {
            AtomErr::Scope(e) => e,
            AtomErr::Type(m) => ill(m),
        })?;
        let tys = if dsts.len() == 1 {
            vec![ty]
        } else {
            let (x, y) = ty.as_prod().ok_or_else(|| ill("destructuring of a non-product".into()))?;
            vec![x.clone(), y.clone()]
        };
        for (d, t) in dsts.into_iter().zip(tys) {
            scope.insert(d, (t, bot));
            added.push(d);
        }
    }
    check_term(sig, &g.body(n).term, scope, labels, &name)?;
    for &c in &tree.children[n] {
        check_node(sig, g, tree, c, scope, labels, bot)?;
    }
    for v in added {
        scope.remove(&v);
    }
    Ok(())
}

fn check_term(sig: &Signature, t: &Terminator, scope: &mut Scope, labels: &BTreeMap<LabelId, Ty>, name: &str) -> Result<(), CfgError> {
    let ill = |what: String| CfgError::IllTyped { what, block: name.to_string() };
    let look = |scope: &Scope, v: VarId| scope.get(&v).cloned().ok_or(CfgError::OutOfScope { var: v, block: name.to_string() });
    match t {
        Terminator::Br(l, x) => {
            let want = labels.get(l).ok_or(CfgError::UnknownLabel(*l))?;
            let (ty, eff) = look(scope, *x)?;
            if ty != *want || eff != sig.bot() {
                return Err(ill(format!("branch to l{l}")));
            }
        }
        Terminator::Case(x, y, s, z, u) => {
            let (ty, _) = look(scope, *x)?;
            let (a, b) = ty.as_sum().ok_or_else(|| ill(format!("case on v{x}")))?;
            scope.insert(*y, (a.clone(), sig.bot()));
            check_term(sig, s, scope, labels, name)?;
            scope.remove(y);
            scope.insert(*z, (b.clone(), sig.bot()));
            check_term(sig, u, scope, labels, name)?;
            scope.remove(z);
        }
    }
    Ok(())
}

enum AtomErr {
    Scope(CfgError),
    Type(String),
}

fn atom_type(sig: &Signature, a: &Atom, look: &dyn Fn(VarId) -> Result<(Ty, Effect), CfgError>) -> Result<(Ty, Effect), AtomErr> {
    let get = |v: VarId| look(v).map_err(AtomErr::Scope);
    let bad = |m: &str| AtomErr::Type(m.to_string());
    Ok(match a {
        Atom::Var(v) => get(*v)?,
        Atom::Unit => (Ty::Unit, sig.bot()),
        Atom::Op(f, v) => {
            let ins = sig.instr(f).ok_or_else(|| bad(&format!("unknown instruction `{f}`")))?;
            let (t, e) = get(*v)?;
            if t != ins.dom {
                return Err(bad(&format!("argument of `{f}`")));
            }
            (ins.cod.clone(), sig.effects.join(e, ins.eff))
        }
        Atom::Pair(x, y) => {
            let ((a, e1), (b, e2)) = (get(*x)?, get(*y)?);
            (Ty::prod(a, b), sig.effects.join(e1, e2))
        }
        Atom::Inl(x, ann) | Atom::Inr(x, ann) => {
            let (t, e) = get(*x)?;
            let s = ann.clone().ok_or_else(|| bad("unannotated injection"))?;
            let (l, r) = s.as_sum().ok_or_else(|| bad("injection into a non-sum"))?;
            let want = if matches!(a, Atom::Inl(..)) { l } else { r };
            if *want != t {
                return Err(bad("injection argument"));
            }
            (s, e)
        }
        Atom::Abort(x, ann) => {
            let (t, e) = get(*x)?;
            if t != Ty::Empty {
                return Err(bad("abort of a non-empty value"));
            }
            (ann.clone().ok_or_else(|| bad("unannotated abort"))?, e)
        }
    })
}

/// Erases the where-blocks of a strict region. Inputs are numbered
/// `0..ctx.len()` and exits `0..l.len()`, outermost first; blocks appear in
/// lexical pre-order and fresh names are allocated in the same order.
pub fn to_cfg(ctx: &Ctx, r: &Region, l: &LabelCtx) -> Result<Cfg, CfgError> {
    if !is_strict_shape(r) {
        return Err(NotStrict.into());
    }
    let mut st = Erase { next_var: ctx.len(), next_label: l.len(), blocks: Vec::new() };
    let vars: Vec<VarId> = (0..ctx.len()).collect();
    let labels: Vec<LabelId> = (0..l.len()).collect();
    let entry = st.block(r, vars, &labels);
    Ok(Cfg {
        inputs: ctx.hyps().iter().enumerate().map(|(i, h)| (i, h.ty.clone(), h.eff)).collect(),
        exits: l.0.iter().cloned().enumerate().collect(),
        entry,
        blocks: st.blocks,
    })
}

struct Erase {
    next_var: VarId,
    next_label: LabelId,
    blocks: Vec<CfgBlock>,
}

fn lookup<T: Copy>(stack: &[T], i: usize) -> T {
    stack[stack.len() - 1 - i]
}

impl Erase {
    fn var(&mut self) -> VarId {
        self.next_var += 1;
        self.next_var - 1
    }

    fn block(&mut self, r: &Region, mut vars: Vec<VarId>, labels: &[LabelId]) -> BasicBlock {
        let mut insts = Vec::new();
        let mut cur = r;
        loop {
            match cur {
                Region::Let1(a, body) => {
                    let at = atom(a, &vars);
                    let x = self.var();
                    insts.push(Inst::Let1(x, at));
                    vars.push(x);
                    cur = body;
                }
                Region::Let2(a, body) => {
                    let at = atom(a, &vars);
                    let (x, y) = (self.var(), self.var());
                    insts.push(Inst::Let2(x, y, at));
                    vars.push(x);
                    vars.push(y);
                    cur = body;
                }
                Region::Where(t, bs) => {
                    let mut inner = labels.to_vec();
                    let ls: Vec<LabelId> = bs
                        .iter()
                        .map(|_| {
                            self.next_label += 1;
                            self.next_label - 1
                        })
                        .collect();
                    inner.extend(&ls);
                    let term = self.term(t, &mut vars.clone(), &inner);
                    for (b, lab) in bs.iter().zip(ls) {
                        let param = self.var();
                        let at = self.blocks.len();
                        self.blocks.push(CfgBlock {
                            label: lab,
                            param,
                            ty: b.param.clone(),
                            body: BasicBlock { insts: Vec::new(), term: Terminator::Br(0, 0) },
                        });
                        let mut v2 = vars.clone();
                        v2.push(param);
                        self.blocks[at].body = self.block(&b.body, v2, &inner);
                    }
                    return BasicBlock { insts, term };
                }
                _ => unreachable!("strict shape"),
            }
        }
    }

    fn term(&mut self, t: &Region, vars: &mut Vec<VarId>, labels: &[LabelId]) -> Terminator {
        match t {
            Region::Br(k, Term::Var(i)) => Terminator::Br(lookup(labels, *k), lookup(vars, *i)),
            Region::Case(Term::Var(i), s, u) => {
                let x = lookup(vars, *i);
                let y = self.var();
                vars.push(y);
                let s = self.term(s, vars, labels);
                vars.pop();
                let z = self.var();
                vars.push(z);
                let u = self.term(u, vars, labels);
                vars.pop();
                Terminator::Case(x, y, Box::new(s), z, Box::new(u))
            }
            _ => unreachable!("strict shape"),
        }
    }
}

fn atom(a: &Term, vars: &[VarId]) -> Atom {
    let v = |t: &Term| match t {
        Term::Var(i) => lookup(vars, *i),
        _ => unreachable!("atomic"),
    };
    match a {
        Term::Var(i) => Atom::Var(lookup(vars, *i)),
        Term::Unit => Atom::Unit,
        Term::Op(f, x) => Atom::Op(f.clone(), v(x)),
        Term::Pair(x, y) => Atom::Pair(v(x), v(y)),
        Term::Inl(x, ann) => Atom::Inl(v(x), ann.clone()),
        Term::Inr(x, ann) => Atom::Inr(v(x), ann.clone()),
        Term::Abort(x, ann) => Atom::Abort(v(x), ann.clone()),
        _ => unreachable!("atomic"),
    }
}

/// Drops blocks not reachable from the entry.
pub fn prune_unreachable(g: &Cfg) -> Result<Cfg, CfgError> {
    let succ = g.successors()?;
    let mut reach = vec![false; succ.len()];
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        if !std::mem::replace(&mut reach[v], true) {
            stack.extend(succ[v].iter().copied());
        }
    }
    let blocks = g.blocks.iter().zip(&reach[1..]).filter(|(_, r)| **r).map(|(b, _)| b.clone()).collect();
    Ok(Cfg { blocks, ..g.clone() })
}

/// Rebuilds a strict region from a graph: unreachable blocks are dropped,
/// then each block's where-block holds its dominance-tree children, in
/// graph order.
pub fn from_cfg(sig: &Signature, g: &Cfg) -> Result<Region, CfgError> {
    let g = &prune_unreachable(g)?;
    let tree = check_cfg(sig, g)?;
    let vars: Vec<VarId> = g.inputs.iter().map(|i| i.0).collect();
    let labels: Vec<LabelId> = g.exits.iter().map(|e| e.0).collect();
    Ok(rebuild(g, &tree, 0, vars, &labels))
}

fn index_of<T: PartialEq>(stack: &[T], x: &T) -> usize {
    stack.len() - 1 - stack.iter().rposition(|y| y == x).expect("checked scope")
}

fn rebuild(g: &Cfg, tree: &DomTree, n: usize, mut vars: Vec<VarId>, labels: &[LabelId]) -> Region {
    let b = g.body(n);
    let kids = &tree.children[n];
    let mut inner = labels.to_vec();
    inner.extend(kids.iter().map(|&c| g.blocks[c - 1].label));
    let mut lets = Vec::new();
    for i in &b.insts {
        match i {
            Inst::Let1(x, a) => {
                lets.push((false, unatom(a, &vars)));
                vars.push(*x);
            }
            Inst::Let2(x, y, a) => {
                lets.push((true, unatom(a, &vars)));
                vars.push(*x);
                vars.push(*y);
            }
        }
    }
    let mut entry = unterm(&b.term, &mut vars.clone(), &inner);
    for (two, a) in lets.into_iter().rev() {
        entry = if two { Region::Let2(a, Box::new(entry)) } else { Region::Let1(a, Box::new(entry)) };
    }
    let children: Vec<Block> = kids
        .iter()
        .map(|&c| {
            let blk = &g.blocks[c - 1];
            let mut v2 = vars.clone();
            v2.push(blk.param);
            Block { param: blk.ty.clone(), body: rebuild(g, tree, c, v2, &inner) }
        })
        .collect();
    add_dom(&entry, children)
}

fn unatom(a: &Atom, vars: &[VarId]) -> Term {
    let v = |x: &VarId| Box::new(Term::Var(index_of(vars, x)));
    match a {
        Atom::Var(x) => Term::Var(index_of(vars, x)),
        Atom::Unit => Term::Unit,
        Atom::Op(f, x) => Term::Op(f.clone(), v(x)),
        Atom::Pair(x, y) => Term::Pair(v(x), v(y)),
        Atom::Inl(x, ann) => Term::Inl(v(x), ann.clone()),
        Atom::Inr(x, ann) => Term::Inr(v(x), ann.clone()),
        Atom::Abort(x, ann) => Term::Abort(v(x), ann.clone()),
    }
}

fn unterm(t: &Terminator, vars: &mut Vec<VarId>, labels: &[LabelId]) -> Region {
    match t {
        Terminator::Br(l, x) => Region::Br(index_of(labels, l), Term::Var(index_of(vars, x))),
        Terminator::Case(x, y, s, z, u) => {
            let e = Term::Var(index_of(vars, x));
            vars.push(*y);
            let s = unterm(s, vars, labels);
            vars.pop();
            vars.push(*z);
            let u = unterm(u, vars, labels);
            vars.pop();
            Region::Case(e, Box::new(s), Box::new(u))
        }
    }
}

/// Renames labels and variables in order of a depth-first walk from the
/// entry and sorts blocks by their new labels. Two graphs are permutations
/// of each other up to renaming iff their canonical forms are equal.
pub fn canonical(g: &Cfg) -> Result<Cfg, CfgError> {
    let nodes = g.nodes()?;
    let exits: BTreeSet<LabelId> = g.exits.iter().map(|e| e.0).collect();
    let mut lmap: BTreeMap<LabelId, LabelId> = g.exits.iter().map(|e| (e.0, e.0)).collect();
    let mut next_label = g.exits.iter().map(|e| e.0 + 1).max().unwrap_or(0);
    let mut order = Vec::new();
    let mut seen = BTreeSet::new();
    let mut stack = vec![0usize];
    while let Some(n) = stack.pop() {
        if !seen.insert(n) {
            continue;
        }
        order.push(n);
        let mut ts = Vec::new();
        g.body(n).term.targets(&mut ts);
        for t in ts.into_iter().rev() {
            if !exits.contains(&t) {
                stack.push(*nodes.get(&t).ok_or(CfgError::UnknownLabel(t))?);
            }
        }
    }
    for &n in &order {
        if n > 0 {
            lmap.insert(g.blocks[n - 1].label, next_label);
            next_label += 1;
        }
    }
    let mut vmap: BTreeMap<VarId, VarId> = g.inputs.iter().map(|i| (i.0, i.0)).collect();
    let mut next_var = g.inputs.iter().map(|i| i.0 + 1).max().unwrap_or(0);
    let mut fresh = |v: VarId, vmap: &mut BTreeMap<VarId, VarId>| {
        vmap.insert(v, next_var);
        next_var += 1;
    };
    for &n in &order {
        if n > 0 {
            fresh(g.blocks[n - 1].param, &mut vmap);
        }
        for i in &g.body(n).insts {
            match i {
                Inst::Let1(x, _) => fresh(*x, &mut vmap),
                Inst::Let2(x, y, _) => {
                    fresh(*x, &mut vmap);
                    fresh(*y, &mut vmap);
                }
            }
        }
        fn binders(t: &Terminator, out: &mut Vec<VarId>) {
            if let Terminator::Case(_, y, s, z, u) = t {
                out.push(*y);
                binders(s, out);
                out.push(*z);
                binders(u, out);
            }
        }
        let mut bs = Vec::new();
        binders(&g.body(n).term, &mut bs);
        for b in bs {
            fresh(b, &mut vmap);
        }
    }
    let rv = |v: &VarId| *vmap.get(v).unwrap_or(v);
    let rl = |l: &LabelId| *lmap.get(l).unwrap_or(l);
    let ratom = |a: &Atom| match a {
        Atom::Var(x) => Atom::Var(rv(x)),
        Atom::Unit => Atom::Unit,
        Atom::Op(f, x) => Atom::Op(f.clone(), rv(x)),
        Atom::Pair(x, y) => Atom::Pair(rv(x), rv(y)),
        Atom::Inl(x, t) => Atom::Inl(rv(x), t.clone()),
        Atom::Inr(x, t) => Atom::Inr(rv(x), t.clone()),
        Atom::Abort(x, t) => Atom::Abort(rv(x), t.clone()),
    };
    fn rterm(t: &Terminator, rv: &dyn Fn(&VarId) -> VarId, rl: &dyn Fn(&LabelId) -> LabelId) -> Terminator {
        match t {
            Terminator::Br(l, x) => Terminator::Br(rl(l), rv(x)),
            Terminator::Case(x, y, s, z, u) => {
                Terminator::Case(rv(x), rv(y), Box::new(rterm(s, rv, rl)), rv(z), Box::new(rterm(u, rv, rl)))
            }
        }
    }
    let rblock = |b: &BasicBlock| BasicBlock {
        insts: b
            .insts
            .iter()
            .map(|i| match i {
                Inst::Let1(x, a) => Inst::Let1(rv(x), ratom(a)),
                Inst::Let2(x, y, a) => Inst::Let2(rv(x), rv(y), ratom(a)),
            })
            .collect(),
        term: rterm(&b.term, &rv, &rl),
    };
    let mut blocks: Vec<CfgBlock> = g
        .blocks
        .iter()
        .map(|b| CfgBlock { label: rl(&b.label), param: rv(&b.param), ty: b.ty.clone(), body: rblock(&b.body) })
        .collect();
    blocks.sort_by_key(|b| b.label);
    Ok(Cfg { inputs: g.inputs.clone(), exits: g.exits.clone(), entry: rblock(&g.entry), blocks })
}

/// Same entry and the same blocks in some order, up to renaming.
pub fn is_permutation_of(a: &Cfg, b: &Cfg) -> bool {
    matches!((canonical(a), canonical(b)), (Ok(x), Ok(y)) if x == y)
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(x) => write!(f, "v{x}"),
            Atom::Unit => write!(f, "()"),
            Atom::Op(g, x) => write!(f, "{g} v{x}"),
            Atom::Pair(x, y) => write!(f, "(v{x}, v{y})"),
            Atom::Inl(x, Some(t)) => write!(f, "inl v{x} : {t}"),
            Atom::Inr(x, Some(t)) => write!(f, "inr v{x} : {t}"),
            Atom::Abort(x, Some(t)) => write!(f, "abort v{x} : {t}"),
            Atom::Inl(x, None) => write!(f, "inl v{x}"),
            Atom::Inr(x, None) => write!(f, "inr v{x}"),
            Atom::Abort(x, None) => write!(f, "abort v{x}"),
        }
    }
}

fn fmt_term(t: &Terminator, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Terminator::Br(l, x) => write!(f, "br l{l} v{x}"),
        Terminator::Case(x, y, s, z, u) => {
            write!(f, "case v{x} {{ inl v{y} => ")?;
            fmt_term(s, f)?;
            write!(f, "; inr v{z} => ")?;
            fmt_term(u, f)?;
            write!(f, " }}")
        }
    }
}

fn fmt_block(b: &BasicBlock, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for i in &b.insts {
        match i {
            Inst::Let1(x, a) => writeln!(f, "  let v{x} = {a};")?,
            Inst::Let2(x, y, a) => writeln!(f, "  let (v{x}, v{y}) = {a};")?,
        }
    }
    write!(f, "  ")?;
    fmt_term(&b.term, f)?;
    writeln!(f)
}

impl fmt::Display for Cfg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins: Vec<String> = self.inputs.iter().map(|(v, t, _)| format!("v{v}: {t}")).collect();
        let outs: Vec<String> = self.exits.iter().map(|(l, t)| format!("l{l}({t})")).collect();
        writeln!(f, "entry({}) -> [{}]:", ins.join(", "), outs.join(", "))?;
        fmt_block(&self.entry, f)?;
        for b in &self.blocks {
            writeln!(f, "l{}(v{}: {}):", b.label, b.param, b.ty)?;
            fmt_block(&b.body, f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn br(l: LabelId, v: VarId) -> BasicBlock {
        BasicBlock { insts: vec![], term: Terminator::Br(l, v) }
    }

    fn blk(label: LabelId, param: VarId, body: BasicBlock) -> CfgBlock {
        CfgBlock { label, param, ty: Ty::Unit, body }
    }

    fn cfg(entry: BasicBlock, blocks: Vec<CfgBlock>) -> Cfg {
        Cfg { inputs: vec![(0, Ty::Unit, Effect(0))], exits: vec![(0, Ty::Unit)], entry, blocks }
    }

    #[test]
    fn chain() {
        let g = cfg(br(1, 0), vec![blk(1, 1, br(2, 1)), blk(2, 2, br(0, 2))]);
        let t = dominance_tree(&g).unwrap();
        assert_eq!(t.parent, vec![None, Some(0), Some(1)]);
    }

    #[test]
    fn diamond() {
        let split = BasicBlock {
            insts: vec![Inst::Let1(5, Atom::Inl(0, Some(Ty::sum(Ty::Unit, Ty::Unit))))],
            term: Terminator::Case(5, 6, Box::new(Terminator::Br(1, 6)), 7, Box::new(Terminator::Br(2, 7))),
        };
        let g = cfg(split, vec![blk(1, 1, br(3, 1)), blk(2, 2, br(3, 2)), blk(3, 3, br(0, 3))]);
        let t = dominance_tree(&g).unwrap();
        assert_eq!(t.parent[3], Some(0));
        assert_eq!(t.children[0], vec![1, 2, 3]);
    }

    #[test]
    fn unreachable_is_rejected() {
        let g = cfg(br(0, 0), vec![blk(1, 1, br(0, 1))]);
        assert_eq!(dominance_tree(&g), Err(CfgError::Unreachable(1)));
    }

    #[test]
    fn canonical_forgets_order() {
        let g = cfg(br(1, 0), vec![blk(1, 1, br(2, 1)), blk(2, 2, br(0, 2))]);
        let mut h = g.clone();
        h.blocks.reverse();
        assert!(is_permutation_of(&g, &h));
        let mut k = g.clone();
        k.entry = br(2, 0);
        assert!(!is_permutation_of(&g, &k));
    }
}
