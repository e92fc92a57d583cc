//! Pretty printer. Bound names are positional (`x{depth}`, `l{depth}`), so
//! the output of a well-scoped tree parses back to the same tree.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::{Item, RegionDef, SourceUnit, TermDef, ThreadDef, KEYWORDS};
use crate::ir::{Region, Signature, Term, Ty};

/// Names for the variables and labels in scope, outermost first.
#[derive(Clone, Debug)]
pub struct Namer {
    reserved: BTreeSet<String>,
    pub vars: Vec<String>,
    pub labels: Vec<String>,
}

impl Namer {
    /// A scope of the given names. Fresh names avoid keywords, instruction
    /// names and the given names.
    pub fn new(sig: &Signature, vars: &[String], labels: &[String]) -> Self {
        let mut reserved: BTreeSet<String> = KEYWORDS.iter().map(|s| s.to_string()).collect();
        reserved.extend(sig.instrs.keys().cloned());
        reserved.extend(vars.iter().cloned());
        reserved.extend(labels.iter().cloned());
        Namer { reserved, vars: vars.to_vec(), labels: labels.to_vec() }
    }

    fn fresh(&self, stem: char, depth: usize) -> String {
        let mut s = format!("{stem}{depth}");
        while self.reserved.contains(&s) {
            s.push('_');
        }
        s
    }

    /// The name the next bound variable receives.
    pub fn next_var(&self) -> String {
        self.fresh('x', self.vars.len())
    }

    pub fn bind_var(&mut self) -> String {
        let s = self.next_var();
        self.vars.push(s.clone());
        s
    }

    pub fn bind_label(&mut self) -> String {
        let s = self.fresh('l', self.labels.len());
        self.labels.push(s.clone());
        s
    }

    pub fn unbind_vars(&mut self, n: usize) {
        self.vars.truncate(self.vars.len() - n);
    }

    pub fn unbind_labels(&mut self, n: usize) {
        self.labels.truncate(self.labels.len() - n);
    }

    pub fn var(&self, i: usize) -> String {
        match self.vars.len().checked_sub(i + 1) {
            Some(k) => self.vars[k].clone(),
            None => format!("?{i}"),
        }
    }

    pub fn label(&self, k: usize) -> String {
        match self.labels.len().checked_sub(k + 1) {
            Some(j) => self.labels[j].clone(),
            None => format!("?{k}"),
        }
    }
}

pub fn print_ty(t: &Ty) -> String {
    t.to_string()
}

/// Prints `t` with free variables named by `vars` (outermost first).
pub fn print_term(sig: &Signature, vars: &[String], t: &Term) -> String {
    let mut p = Printer { out: String::new(), n: Namer::new(sig, vars, &[]) };
    p.term(t, true);
    p.out
}

/// Prints `r` with free variables and labels named by `vars` and `labels`.
pub fn print_region(sig: &Signature, vars: &[String], labels: &[String], r: &Region) -> String {
    let mut p = Printer { out: String::new(), n: Namer::new(sig, vars, labels) };
    p.region(r, 0);
    p.out
}

struct Printer {
    out: String,
    n: Namer,
}

impl Printer {
    fn ann(&mut self, kw: &str, t: &Option<Ty>) {
        self.out.push_str(kw);
        if let Some(t) = t {
            write!(self.out, "[{t}]").unwrap();
        }
        self.out.push(' ');
    }

    /// `full` allows `let` and `case` without parentheses.
    fn term(&mut self, t: &Term, full: bool) {
        let wrap = !full && matches!(t, Term::Let1(..) | Term::Let2(..) | Term::Case(..));
        if wrap {
            self.out.push('(');
        }
        match t {
            Term::Var(i) => self.out.push_str(&self.n.var(*i)),
            Term::Unit => self.out.push_str("()"),
            Term::Op(f, a) => {
                write!(self.out, "{f} ").unwrap();
                self.term(a, false);
            }
            Term::Pair(a, b) => {
                self.out.push('(');
                self.term(a, true);
                self.out.push_str(", ");
                self.term(b, true);
                self.out.push(')');
            }
            Term::Inl(a, ty) | Term::Inr(a, ty) | Term::Abort(a, ty) => {
                let kw = match t {
                    Term::Inl(..) => "inl",
                    Term::Inr(..) => "inr",
                    _ => "abort",
                };
                self.ann(kw, ty);
                self.term(a, false);
            }
            Term::Let1(a, b) => {
                write!(self.out, "let {} = ", self.n.next_var()).unwrap();
                self.term(a, true);
                self.out.push_str("; ");
                self.n.bind_var();
                self.term(b, true);
                self.n.unbind_vars(1);
            }
            Term::Let2(a, b) => {
                self.out.push_str("let (");
                let x = self.n.next_var();
                self.out.push_str(&x);
                self.n.vars.push(x);
                let y = self.n.next_var();
                self.n.unbind_vars(1);
                write!(self.out, ", {y}) = ").unwrap();
                self.term(a, true);
                self.out.push_str("; ");
                self.n.bind_var();
                self.n.bind_var();
                self.term(b, true);
                self.n.unbind_vars(2);
            }
            Term::Case(e, l, r) => {
                self.out.push_str("case ");
                self.term(e, false);
                let x = self.n.bind_var();
                write!(self.out, " {{ inl {x} => ").unwrap();
                self.term(l, true);
                self.n.unbind_vars(1);
                let y = self.n.bind_var();
                write!(self.out, ", inr {y} => ").unwrap();
                self.term(r, true);
                self.n.unbind_vars(1);
                self.out.push_str(" }");
            }
        }
        if wrap {
            self.out.push(')');
        }
    }

    fn indent(&mut self, ind: usize) {
        for _ in 0..ind {
            self.out.push_str("  ");
        }
    }

    /// Prints `r` starting on the current line; continuation lines are
    /// indented by `ind`. Leaves the cursor at the end of the last line.
    fn region(&mut self, r: &Region, ind: usize) {
        match r {
            Region::Br(k, a) => {
                let l = self.n.label(*k);
                if l == "ret" {
                    self.out.push_str("ret ");
                } else {
                    write!(self.out, "br {l} ").unwrap();
                }
                self.term(a, false);
            }
            Region::Let1(a, body) => {
                write!(self.out, "let {} = ", self.n.next_var()).unwrap();
                self.term(a, true);
                self.out.push_str(";\n");
                self.n.bind_var();
                self.indent(ind);
                self.region(body, ind);
                self.n.unbind_vars(1);
            }
            Region::Let2(a, body) => {
                self.out.push_str("let (");
                let x = self.n.bind_var();
                let y = self.n.next_var();
                self.n.unbind_vars(1);
                write!(self.out, "{x}, {y}) = ").unwrap();
                self.term(a, true);
                self.out.push_str(";\n");
                self.n.bind_var();
                self.n.bind_var();
                self.indent(ind);
                self.region(body, ind);
                self.n.unbind_vars(2);
            }
            Region::Case(e, s, t) => {
                self.out.push_str("case ");
                self.term(e, false);
                self.out.push_str(" {\n");
                for (kw, arm, last) in [("inl", s, false), ("inr", t, true)] {
                    let x = self.n.bind_var();
                    self.indent(ind + 1);
                    write!(self.out, "{kw} {x} => {{\n").unwrap();
                    self.indent(ind + 2);
                    self.region(arm, ind + 2);
                    self.out.push('\n');
                    self.indent(ind + 1);
                    self.out.push_str(if last { "}\n" } else { "},\n" });
                    self.n.unbind_vars(1);
                }
                self.indent(ind);
                self.out.push('}');
            }
            Region::Where(head, bs) => {
                let names: Vec<String> = bs.iter().map(|_| self.n.bind_label()).collect();
                if matches!(**head, Region::Let1(..) | Region::Let2(..)) {
                    self.out.push_str("{\n");
                    self.indent(ind + 1);
                    self.region(head, ind + 1);
                    self.out.push('\n');
                    self.indent(ind);
                    self.out.push('}');
                } else {
                    self.region(head, ind);
                }
                self.out.push('\n');
                self.indent(ind);
                if bs.is_empty() {
                    self.out.push_str("where {}");
                } else {
                    self.out.push_str("where {\n");
                    for (b, l) in bs.iter().zip(&names) {
                        let x = self.n.bind_var();
                        self.indent(ind + 1);
                        write!(self.out, "{l}({x}: {}) {{\n", b.param).unwrap();
                        self.indent(ind + 2);
                        self.region(&b.body, ind + 2);
                        self.out.push('\n');
                        self.indent(ind + 1);
                        self.out.push_str("}\n");
                        self.n.unbind_vars(1);
                    }
                    self.indent(ind);
                    self.out.push('}');
                }
                self.n.unbind_labels(bs.len());
            }
        }
    }
}

fn params(sig: &Signature, ps: &[super::Param]) -> String {
    let items: Vec<String> = ps.iter().map(|p| format!("{}: {} @ {}", p.name, p.ty, sig.effects.name(p.eff))).collect();
    items.join(", ")
}

fn region_def(sig: &Signature, d: &RegionDef) -> String {
    let vars: Vec<String> = d.params.iter().map(|p| p.name.clone()).collect();
    let labels: Vec<String> = d.exits.iter().map(|e| e.0.clone()).collect();
    let exits: Vec<String> = d.exits.iter().map(|(n, t)| format!("{n}({t})")).collect();
    let mut p = Printer { out: String::new(), n: Namer::new(sig, &vars, &labels) };
    p.indent(1);
    p.region(&d.body, 1);
    format!("region {}({}) -> {} {{\n{}\n}}\n", d.name, params(sig, &d.params), exits.join(", "), p.out)
}

fn term_def(sig: &Signature, d: &TermDef) -> String {
    let vars: Vec<String> = d.params.iter().map(|p| p.name.clone()).collect();
    let body = print_term(sig, &vars, &d.body);
    format!("term {}({}) : {} @ {} =\n  {};\n", d.name, params(sig, &d.params), d.ty, sig.effects.name(d.eff), body)
}

fn thread_def(sig: &Signature, d: &ThreadDef) -> String {
    let mut p = Printer { out: String::new(), n: Namer::new(sig, &[], &["ret".to_string()]) };
    p.indent(1);
    p.region(&d.body, 1);
    format!("thread {} -> {} {{\n{}\n}}\n", d.name, d.ty, p.out)
}

/// Prints a whole unit, signature first.
pub fn print_unit(u: &SourceUnit) -> String {
    let sig = &u.sig;
    let mut out = String::new();
    let lat = &sig.effects;
    let names: Vec<String> = lat.elements().map(|e| lat.name(e).to_string()).collect();
    let mut chains = names.clone();
    chains.extend(lat.order_pairs().iter().map(|&(a, b)| format!("{} < {}", names[a], names[b])));
    writeln!(out, "effects {};", chains.join(", ")).unwrap();
    for b in &sig.bases {
        writeln!(out, "base {} {};", b.name, b.carrier).unwrap();
    }
    for ins in sig.instrs.values() {
        write!(out, "instr {} : {} -> {} @ {}", ins.name, ins.dom, ins.cod, lat.name(ins.eff)).unwrap();
        if let Some(b) = u.imp.get(&ins.name) {
            write!(out, " = {b}").unwrap();
        }
        out.push_str(";\n");
    }
    for item in &u.items {
        out.push('\n');
        match item {
            Item::Region(d) => out.push_str(&region_def(sig, d)),
            Item::Term(d) => out.push_str(&term_def(sig, d)),
            Item::Thread(d) => out.push_str(&thread_def(sig, d)),
            Item::Init(Some(v)) => writeln!(out, "init {v};").unwrap(),
            Item::Init(None) => out.push_str("init any;\n"),
            Item::Post(p) => writeln!(out, "{} {};", p.quant, p.cond).unwrap(),
        }
    }
    out
}
