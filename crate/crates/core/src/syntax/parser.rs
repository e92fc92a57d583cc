//! Recursive-descent parser. Syntax is first read with names, then resolved
//! to de Bruijn indices, so a where-head may mention labels declared after it.

use std::collections::BTreeSet;

use super::lexer::{lex, Pos, Tok, Token};
use super::{Cond, Item, Lit, Param, Post, Quant, RegionDef, SourceUnit, SyntaxError, TermDef, ThreadDef, KEYWORDS};
use crate::ir::{Block, Effect, EffectLattice, Region, Signature, Term, Ty};
use crate::semantics::{Builtin, SigImpl, Value};

type Res<T> = Result<T, SyntaxError>;

#[derive(Clone, Debug)]
pub(crate) struct Name {
    pub text: String,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub(crate) enum STerm {
    Var(Name),
    Unit,
    Op(String, Box<STerm>),
    Let1(Name, Box<STerm>, Box<STerm>),
    Let2(Name, Name, Box<STerm>, Box<STerm>),
    Pair(Box<STerm>, Box<STerm>),
    Inl(Box<STerm>, Option<Ty>),
    Inr(Box<STerm>, Option<Ty>),
    Abort(Box<STerm>, Option<Ty>),
    Case(Box<STerm>, Name, Box<STerm>, Name, Box<STerm>),
}

#[derive(Clone, Debug)]
pub(crate) enum SRegion {
    Br(Name, STerm),
    Let1(Name, STerm, Box<SRegion>),
    Let2(Name, Name, STerm, Box<SRegion>),
    Case(STerm, Name, Box<SRegion>, Name, Box<SRegion>),
    Where(Box<SRegion>, Vec<SBlock>),
}

#[derive(Clone, Debug)]
pub(crate) struct SBlock {
    pub label: Name,
    pub param: Name,
    pub ty: Ty,
    pub body: SRegion,
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    i: usize,
    pub sig: Signature,
    pub imp: SigImpl,
    sig_started: bool,
}

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

impl Parser {
    pub fn new(src: &str, sig: Signature) -> Res<Self> {
        Ok(Parser { toks: lex(src)?, i: 0, sig, imp: SigImpl::new(), sig_started: false })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    /// Line of the previously consumed token.
    pub fn prev_line(&self) -> usize {
        self.toks[self.i.saturating_sub(1)].pos.line
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Res<T> {
        Err(SyntaxError::new(self.pos(), msg))
    }

    pub fn unexpected<T>(&self, what: &str) -> Res<T> {
        self.err(format!("expected {what}, found {}", self.peek()))
    }

    pub fn peek_word(&self) -> Option<String> {
        match self.peek() {
            Tok::Ident(s) => Some(s.clone()),
            _ => None,
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == s)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Res<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn expect_kw(&mut self, s: &str) -> Res<()> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    /// Any identifier, keywords included.
    pub fn word(&mut self) -> Res<Name> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let pos = self.bump().pos;
                Ok(Name { text: s, pos })
            }
            _ => self.unexpected("an identifier"),
        }
    }

    /// A non-keyword identifier.
    pub fn ident(&mut self) -> Res<Name> {
        if let Tok::Ident(s) = self.peek() {
            if is_keyword(s) {
                return self.err(format!("`{s}` is a reserved word"));
            }
        }
        self.word()
    }

    /// A binder: a fresh variable name, or `_`.
    fn binder(&mut self) -> Res<Name> {
        let n = self.ident()?;
        if self.sig.instr(&n.text).is_some() {
            return Err(SyntaxError::new(n.pos, format!("`{}` names an instruction and cannot be bound", n.text)));
        }
        Ok(n)
    }

    pub fn int(&mut self) -> Res<u64> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.unexpected("an integer"),
        }
    }

    // ---- types and effects

    pub fn ty(&mut self) -> Res<Ty> {
        let mut t = self.prod_ty()?;
        while self.eat_sym("+") {
            t = Ty::sum(t, self.prod_ty()?);
        }
        Ok(t)
    }

    fn prod_ty(&mut self) -> Res<Ty> {
        let mut t = self.atom_ty()?;
        while self.eat_sym("*") {
            t = Ty::prod(t, self.atom_ty()?);
        }
        Ok(t)
    }

    fn atom_ty(&mut self) -> Res<Ty> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(1) => {
                self.bump();
                Ok(Ty::Unit)
            }
            Tok::Int(0) => {
                self.bump();
                Ok(Ty::Empty)
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.ty()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Ident(n) if !is_keyword(&n) => {
                self.bump();
                if self.sig.base(&n).is_none() {
                    return Err(SyntaxError::new(pos, format!("unknown base type `{n}`")));
                }
                Ok(Ty::Base(n))
            }
            _ => self.unexpected("a type"),
        }
    }

    fn effect(&mut self) -> Res<Effect> {
        let n = self.word()?;
        self.sig.effects.lookup(&n.text).ok_or_else(|| SyntaxError::new(n.pos, format!("unknown effect `{}`", n.text)))
    }

    fn opt_effect(&mut self) -> Res<Effect> {
        if self.eat_sym("@") {
            self.effect()
        } else {
            Ok(self.sig.bot())
        }
    }

    // ---- terms

    pub fn term(&mut self) -> Res<STerm> {
        if self.eat_kw("let") {
            if self.eat_sym("(") {
                let x = self.binder()?;
                self.expect_sym(",")?;
                let y = self.binder()?;
                self.expect_sym(")")?;
                self.expect_sym("=")?;
                let a = self.term()?;
                self.expect_sym(";")?;
                let b = self.term()?;
                return Ok(STerm::Let2(x, y, Box::new(a), Box::new(b)));
            }
            let x = self.binder()?;
            self.expect_sym("=")?;
            let a = self.term()?;
            self.expect_sym(";")?;
            let b = self.term()?;
            return Ok(STerm::Let1(x, Box::new(a), Box::new(b)));
        }
        if self.eat_kw("case") {
            let e = self.term()?;
            let (x, l, y, r) = self.arms(Self::term)?;
            return Ok(STerm::Case(Box::new(e), x, Box::new(l), y, Box::new(r)));
        }
        if self.is_kw("if") {
            let pos = self.bump().pos;
            let e = self.term()?;
            self.expect_sym("{")?;
            let l = self.term()?;
            self.expect_sym("}")?;
            self.expect_kw("else")?;
            self.expect_sym("{")?;
            let r = self.term()?;
            self.expect_sym("}")?;
            let blank = Name { text: "_".into(), pos };
            return Ok(STerm::Case(Box::new(e), blank.clone(), Box::new(l), blank, Box::new(r)));
        }
        self.prefix()
    }

    fn arms<T>(&mut self, f: fn(&mut Self) -> Res<T>) -> Res<(Name, T, Name, T)> {
        self.expect_sym("{")?;
        self.expect_kw("inl")?;
        let x = self.binder()?;
        self.expect_sym("=>")?;
        let l = f(self)?;
        self.expect_sym(",")?;
        self.expect_kw("inr")?;
        let y = self.binder()?;
        self.expect_sym("=>")?;
        let r = f(self)?;
        self.eat_sym(",");
        self.expect_sym("}")?;
        Ok((x, l, y, r))
    }

    fn annotation(&mut self) -> Res<Option<Ty>> {
        if self.eat_sym("[") {
            let t = self.ty()?;
            self.expect_sym("]")?;
            Ok(Some(t))
        } else {
            Ok(None)
        }
    }

    pub fn prefix(&mut self) -> Res<STerm> {
        if let Tok::Ident(s) = self.peek().clone() {
            match s.as_str() {
                "inl" | "inr" | "abort" => {
                    self.bump();
                    let ann = self.annotation()?;
                    let a = Box::new(self.prefix()?);
                    return Ok(match s.as_str() {
                        "inl" => STerm::Inl(a, ann),
                        "inr" => STerm::Inr(a, ann),
                        _ => STerm::Abort(a, ann),
                    });
                }
                _ if self.sig.instr(&s).is_some() => {
                    self.bump();
                    let a = self.prefix()?;
                    return Ok(STerm::Op(s, Box::new(a)));
                }
                _ => {}
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Res<STerm> {
        if self.eat_sym("(") {
            if self.eat_sym(")") {
                return Ok(STerm::Unit);
            }
            let a = self.term()?;
            if self.eat_sym(",") {
                let b = self.term()?;
                self.expect_sym(")")?;
                return Ok(STerm::Pair(Box::new(a), Box::new(b)));
            }
            self.expect_sym(")")?;
            return Ok(a);
        }
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s) => Ok(STerm::Var(self.ident()?)),
            _ => self.unexpected("a term"),
        }
    }

    // ---- regions

    pub fn region(&mut self) -> Res<SRegion> {
        let mut r = self.region_pre()?;
        while self.eat_kw("where") {
            r = SRegion::Where(Box::new(r), self.blocks()?);
        }
        Ok(r)
    }

    /// `{ l(x: A) { region } ... }`
    pub fn blocks(&mut self) -> Res<Vec<SBlock>> {
        self.expect_sym("{")?;
        let mut bs = Vec::new();
        while !self.eat_sym("}") {
            let label = self.ident()?;
            self.expect_sym("(")?;
            let param = self.binder()?;
            self.expect_sym(":")?;
            let ty = self.ty()?;
            self.expect_sym(")")?;
            self.expect_sym("{")?;
            let body = self.region()?;
            self.expect_sym("}")?;
            bs.push(SBlock { label, param, ty, body });
        }
        Ok(bs)
    }

    fn region_pre(&mut self) -> Res<SRegion> {
        if self.eat_sym("{") {
            let r = self.region()?;
            self.expect_sym("}")?;
            return Ok(r);
        }
        if self.eat_kw("let") {
            if self.eat_sym("(") {
                let x = self.binder()?;
                self.expect_sym(",")?;
                let y = self.binder()?;
                self.expect_sym(")")?;
                self.expect_sym("=")?;
                let a = self.term()?;
                self.expect_sym(";")?;
                let r = self.region()?;
                return Ok(SRegion::Let2(x, y, a, Box::new(r)));
            }
            let x = self.binder()?;
            self.expect_sym("=")?;
            let a = self.term()?;
            self.expect_sym(";")?;
            let r = self.region()?;
            return Ok(SRegion::Let1(x, a, Box::new(r)));
        }
        if self.eat_kw("case") {
            let e = self.term()?;
            let (x, l, y, r) = self.arms(Self::region)?;
            return Ok(SRegion::Case(e, x, Box::new(l), y, Box::new(r)));
        }
        if self.is_kw("if") {
            let pos = self.bump().pos;
            let e = self.term()?;
            self.expect_sym("{")?;
            let l = self.region()?;
            self.expect_sym("}")?;
            self.expect_kw("else")?;
            self.expect_sym("{")?;
            let r = self.region()?;
            self.expect_sym("}")?;
            let blank = Name { text: "_".into(), pos };
            return Ok(SRegion::Case(e, blank.clone(), Box::new(l), blank, Box::new(r)));
        }
        if self.eat_kw("br") {
            let l = self.ident()?;
            let a = self.prefix()?;
            return Ok(SRegion::Br(l, a));
        }
        if self.is_kw("ret") {
            let l = self.word()?;
            let a = self.prefix()?;
            return Ok(SRegion::Br(l, a));
        }
        self.unexpected("a region")
    }

    // ---- declarations

    fn params(&mut self) -> Res<Vec<Param>> {
        self.expect_sym("(")?;
        let mut ps: Vec<Param> = Vec::new();
        if !self.eat_sym(")") {
            loop {
                let n = self.binder()?;
                if n.text == "_" || ps.iter().any(|p| p.name == n.text) {
                    return Err(SyntaxError::new(n.pos, format!("duplicate parameter `{}`", n.text)));
                }
                self.expect_sym(":")?;
                let ty = self.ty()?;
                let eff = self.opt_effect()?;
                ps.push(Param { name: n.text, ty, eff });
                if self.eat_sym(")") {
                    break;
                }
                self.expect_sym(",")?;
            }
        }
        Ok(ps)
    }

    fn exits(&mut self) -> Res<Vec<(String, Ty)>> {
        let labelled = matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Sym("(");
        if !labelled {
            return Ok(vec![("ret".to_string(), self.ty()?)]);
        }
        let mut es: Vec<(String, Ty)> = Vec::new();
        loop {
            let n = self.word()?;
            if is_keyword(&n.text) && n.text != "ret" {
                return Err(SyntaxError::new(n.pos, format!("`{}` is a reserved word", n.text)));
            }
            if es.iter().any(|e| e.0 == n.text) {
                return Err(SyntaxError::new(n.pos, format!("duplicate exit label `{}`", n.text)));
            }
            self.expect_sym("(")?;
            let t = self.ty()?;
            self.expect_sym(")")?;
            es.push((n.text, t));
            if !self.eat_sym(",") {
                return Ok(es);
            }
        }
    }

    fn effects_decl(&mut self) -> Res<()> {
        let pos = self.pos();
        if self.sig_started {
            return self.err("`effects` must come before every other declaration");
        }
        let mut names: Vec<String> = Vec::new();
        let mut less = Vec::new();
        let index = |n: &str, names: &mut Vec<String>| match names.iter().position(|m| m == n) {
            Some(i) => i,
            None => {
                names.push(n.to_string());
                names.len() - 1
            }
        };
        loop {
            let mut prev = index(&self.ident()?.text, &mut names);
            while self.eat_sym("<") {
                let next = index(&self.ident()?.text, &mut names);
                less.push((prev, next));
                prev = next;
            }
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym(";")?;
        let lat = EffectLattice::from_order(&names, &less).map_err(|e| SyntaxError::new(pos, e.to_string()))?;
        self.sig = Signature::new(lat);
        Ok(())
    }

    fn instr_decl(&mut self) -> Res<()> {
        let n = self.ident()?;
        self.expect_sym(":")?;
        let dom = self.ty()?;
        self.expect_sym("->")?;
        let cod = self.ty()?;
        let eff = self.opt_effect()?;
        self.sig.add_instr(&n.text, dom, cod, eff).map_err(|e| SyntaxError::new(n.pos, e.to_string()))?;
        if self.eat_sym("=") {
            let pos = self.pos();
            let mut words = Vec::new();
            while !self.is_sym(";") && !self.at_eof() {
                match self.bump().tok {
                    Tok::Ident(s) => words.push(s),
                    Tok::Int(k) => words.push(k.to_string()),
                    t => return Err(SyntaxError::new(pos, format!("unexpected {t} in builtin"))),
                }
            }
            let b: Builtin = words.join(" ").parse().map_err(|e: String| SyntaxError::new(pos, e))?;
            let ins = self.sig.instr(&n.text).expect("just added").clone();
            b.check(&self.sig, &ins).map_err(|e| SyntaxError::new(pos, e))?;
            self.imp.bind(&n.text, b);
        }
        self.expect_sym(";")
    }

    pub fn lit(&mut self) -> Res<Lit> {
        if self.eat_kw("inl") {
            return Ok(Lit::Inl(Box::new(self.lit()?)));
        }
        if self.eat_kw("inr") {
            return Ok(Lit::Inr(Box::new(self.lit()?)));
        }
        if self.eat_sym("(") {
            if self.eat_sym(")") {
                return Ok(Lit::Unit);
            }
            let a = self.lit()?;
            if self.eat_sym(",") {
                let b = self.lit()?;
                self.expect_sym(")")?;
                return Ok(Lit::Pair(Box::new(a), Box::new(b)));
            }
            self.expect_sym(")")?;
            return Ok(a);
        }
        Ok(Lit::Num(self.int()?))
    }

    fn cond(&mut self) -> Res<Cond> {
        let mut c = self.conj()?;
        while self.eat_sym("||") {
            c = Cond::Or(Box::new(c), Box::new(self.conj()?));
        }
        Ok(c)
    }

    fn conj(&mut self) -> Res<Cond> {
        let mut c = self.cond_atom()?;
        while self.eat_sym("&&") {
            c = Cond::And(Box::new(c), Box::new(self.cond_atom()?));
        }
        Ok(c)
    }

    fn cond_atom(&mut self) -> Res<Cond> {
        if self.eat_kw("true") {
            return Ok(Cond::True);
        }
        if self.eat_sym("(") {
            let c = self.cond()?;
            self.expect_sym(")")?;
            return Ok(c);
        }
        let t = self.ident()?;
        self.expect_sym("=")?;
        Ok(Cond::Eq(t.text, self.lit()?))
    }

    fn item(&mut self, unit: &mut Vec<Item>, names: &mut BTreeSet<String>) -> Res<()> {
        let kw = self.word()?;
        let mut fresh = |n: &Name| {
            if names.insert(n.text.clone()) {
                Ok(())
            } else {
                Err(SyntaxError::new(n.pos, format!("duplicate definition `{}`", n.text)))
            }
        };
        match kw.text.as_str() {
            "effects" => return self.effects_decl(),
            "base" => {
                self.sig_started = true;
                let n = self.ident()?;
                let c = self.int()?;
                self.sig.add_base(&n.text, c).map_err(|e| SyntaxError::new(n.pos, e.to_string()))?;
                self.expect_sym(";")?;
            }
            "instr" => {
                self.sig_started = true;
                self.instr_decl()?;
            }
            "region" => {
                self.sig_started = true;
                let n = self.ident()?;
                fresh(&n)?;
                let params = self.params()?;
                self.expect_sym("->")?;
                let exits = self.exits()?;
                self.expect_sym("{")?;
                let body = self.region()?;
                self.expect_sym("}")?;
                let vars: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
                let labels: Vec<String> = exits.iter().map(|e| e.0.clone()).collect();
                let body = Resolver::new(vars, labels).region(&body)?;
                unit.push(Item::Region(RegionDef { name: n.text, params, exits, body }));
            }
            "term" => {
                self.sig_started = true;
                let n = self.ident()?;
                fresh(&n)?;
                let params = self.params()?;
                self.expect_sym(":")?;
                let ty = self.ty()?;
                let eff = self.opt_effect()?;
                self.expect_sym("=")?;
                let body = self.term()?;
                self.expect_sym(";")?;
                let vars: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
                let body = Resolver::new(vars, Vec::new()).term(&body)?;
                unit.push(Item::Term(TermDef { name: n.text, params, ty, eff, body }));
            }
            "thread" => {
                self.sig_started = true;
                let n = self.ident()?;
                fresh(&n)?;
                self.expect_sym("->")?;
                let ty = self.ty()?;
                self.expect_sym("{")?;
                let body = self.region()?;
                self.expect_sym("}")?;
                let body = Resolver::new(Vec::new(), vec!["ret".into()]).region(&body)?;
                unit.push(Item::Thread(ThreadDef { name: n.text, ty, body }));
            }
            "init" => {
                let v = if self.eat_kw("any") { None } else { Some(self.int()?) };
                self.expect_sym(";")?;
                unit.push(Item::Init(v));
            }
            "exists" | "forall" | "forbid" => {
                let quant = match kw.text.as_str() {
                    "exists" => Quant::Exists,
                    "forall" => Quant::Forall,
                    _ => Quant::Forbid,
                };
                let cond = self.cond()?;
                self.expect_sym(";")?;
                unit.push(Item::Post(Post { quant, cond }));
            }
            other => return Err(SyntaxError::new(kw.pos, format!("expected a declaration, found `{other}`"))),
        }
        Ok(())
    }
}

/// Name resolution against stacks of visible variables and labels.
pub(crate) struct Resolver {
    vars: Vec<String>,
    labels: Vec<String>,
}

impl Resolver {
    pub fn new(vars: Vec<String>, labels: Vec<String>) -> Self {
        Resolver { vars, labels }
    }

    fn var(&self, n: &Name) -> Res<usize> {
        if n.text != "_" {
            if let Some(i) = self.vars.iter().rposition(|v| *v == n.text) {
                return Ok(self.vars.len() - 1 - i);
            }
        }
        Err(SyntaxError::new(n.pos, format!("unbound variable `{}`", n.text)))
    }

    fn label(&self, n: &Name) -> Res<usize> {
        match self.labels.iter().rposition(|v| *v == n.text) {
            Some(i) => Ok(self.labels.len() - 1 - i),
            None => Err(SyntaxError::new(n.pos, format!("unbound label `{}`", n.text))),
        }
    }

    fn under<T>(&mut self, names: &[&Name], f: impl FnOnce(&mut Self) -> Res<T>) -> Res<T> {
        for n in names {
            self.vars.push(n.text.clone());
        }
        let out = f(self);
        self.vars.truncate(self.vars.len() - names.len());
        out
    }

    pub fn term(&mut self, t: &STerm) -> Res<Term> {
        let b = Box::new;
        Ok(match t {
            STerm::Var(n) => Term::Var(self.var(n)?),
            STerm::Unit => Term::Unit,
            STerm::Op(f, a) => Term::Op(f.clone(), b(self.term(a)?)),
            STerm::Let1(x, a, body) => {
                let a = self.term(a)?;
                Term::Let1(b(a), b(self.under(&[x], |s| s.term(body))?))
            }
            STerm::Let2(x, y, a, body) => {
                let a = self.term(a)?;
                Term::Let2(b(a), b(self.under(&[x, y], |s| s.term(body))?))
            }
            STerm::Pair(x, y) => Term::Pair(b(self.term(x)?), b(self.term(y)?)),
            STerm::Inl(a, t) => Term::Inl(b(self.term(a)?), t.clone()),
            STerm::Inr(a, t) => Term::Inr(b(self.term(a)?), t.clone()),
            STerm::Abort(a, t) => Term::Abort(b(self.term(a)?), t.clone()),
            STerm::Case(e, x, l, y, r) => {
                let e = self.term(e)?;
                let l = self.under(&[x], |s| s.term(l))?;
                let r = self.under(&[y], |s| s.term(r))?;
                Term::Case(b(e), b(l), b(r))
            }
        })
    }

    pub fn region(&mut self, r: &SRegion) -> Res<Region> {
        let b = Box::new;
        Ok(match r {
            SRegion::Br(l, a) => Region::Br(self.label(l)?, self.term(a)?),
            SRegion::Let1(x, a, body) => {
                let a = self.term(a)?;
                Region::Let1(a, b(self.under(&[x], |s| s.region(body))?))
            }
            SRegion::Let2(x, y, a, body) => {
                let a = self.term(a)?;
                Region::Let2(a, b(self.under(&[x, y], |s| s.region(body))?))
            }
            SRegion::Case(e, x, l, y, r) => {
                let e = self.term(e)?;
                let l = self.under(&[x], |s| s.region(l))?;
                let r = self.under(&[y], |s| s.region(r))?;
                Region::Case(e, b(l), b(r))
            }
            SRegion::Where(head, bs) => {
                let (head, blocks) = self.with_labels(bs, |s| {
                    let head = s.region(head)?;
                    Ok((head, s.block_bodies(bs)?))
                })?;
                Region::Where(b(head), blocks)
            }
        })
    }

    fn with_labels<T>(&mut self, bs: &[SBlock], f: impl FnOnce(&mut Self) -> Res<T>) -> Res<T> {
        let mut seen = BTreeSet::new();
        for blk in bs {
            if !seen.insert(blk.label.text.clone()) {
                return Err(SyntaxError::new(blk.label.pos, format!("duplicate label `{}`", blk.label.text)));
            }
        }
        let n = self.labels.len();
        self.labels.extend(bs.iter().map(|blk| blk.label.text.clone()));
        let out = f(self);
        self.labels.truncate(n);
        out
    }

    fn block_bodies(&mut self, bs: &[SBlock]) -> Res<Vec<Block>> {
        bs.iter()
            .map(|blk| {
                let body = self.under(&[&blk.param], |s| s.region(&blk.body))?;
                Ok(Block { param: blk.ty.clone(), body })
            })
            .collect()
    }

    /// Blocks of one where, each seeing all of their labels.
    pub fn blocks(&mut self, bs: &[SBlock]) -> Res<Vec<Block>> {
        self.with_labels(bs, |s| s.block_bodies(bs))
    }
}

/// Parses a whole source unit.
pub fn parse_unit(src: &str) -> Res<SourceUnit> {
    let mut p = Parser::new(src, Signature::default())?;
    let mut items = Vec::new();
    let mut names = BTreeSet::new();
    while !p.at_eof() {
        p.item(&mut items, &mut names)?;
    }
    Ok(SourceUnit { sig: p.sig, imp: p.imp, items })
}

/// Parses a term in a scope of named variables (outermost first).
pub fn parse_term_in(sig: &Signature, src: &str, vars: &[String]) -> Res<Term> {
    let mut p = Parser::new(src, sig.clone())?;
    let t = p.term()?;
    if !p.at_eof() {
        return p.unexpected("end of input");
    }
    Resolver::new(vars.to_vec(), Vec::new()).term(&t)
}

/// Parses a region in a scope of named variables and labels (outermost first).
pub fn parse_region_in(sig: &Signature, src: &str, vars: &[String], labels: &[String]) -> Res<Region> {
    let mut p = Parser::new(src, sig.clone())?;
    let r = p.region()?;
    if !p.at_eof() {
        return p.unexpected("end of input");
    }
    Resolver::new(vars.to_vec(), labels.to_vec()).region(&r)
}

/// Parses comma-separated literals and reads them at the given types.
pub fn parse_values(sig: &Signature, src: &str, tys: &[Ty]) -> Res<Vec<Value>> {
    let mut p = Parser::new(src, sig.clone())?;
    let mut out = Vec::new();
    for (i, ty) in tys.iter().enumerate() {
        if i > 0 {
            p.expect_sym(",")?;
        }
        let pos = p.pos();
        let lit = p.lit()?;
        let v = lit.to_value(sig, ty).ok_or_else(|| SyntaxError::new(pos, format!("`{lit}` is not a value of type {ty}")))?;
        out.push(v);
    }
    if !p.at_eof() {
        return p.unexpected(&format!("end of input after {} values", tys.len()));
    }
    Ok(out)
}
