//! Rewrite scripts: a sequence of rule applications to one region, one
//! per line, written `rule-id @ path params...`.
//!
//! Parameters mention variables and labels by the names the printer gives
//! them at the rewrite site; `[x, y | k]` binds extra names after those.

use thiserror::Error;

use super::lexer::Pos;
use super::parser::{Name, Parser, Resolver, SBlock, SRegion, STerm};
use super::printer::Namer;
use super::{RegionDef, SourceUnit, SyntaxError};
use crate::ir::{Region, Signature, Term, Ty};
use crate::rewrite::{apply_region_rule_with, Direction, Options, Params, RewriteError, RuleId, RuleInstance};
use crate::semantics::SigImpl;

#[derive(Clone, Debug, Default)]
struct Binders {
    vars: Vec<Name>,
    labels: Vec<Name>,
}

#[derive(Clone, Debug)]
enum RawParam {
    Term(Binders, STerm),
    Region(Binders, SRegion),
    Ty(Ty),
    Blocks(Binders, Vec<SBlock>),
    Perm(Vec<usize>),
    Count(usize),
}

#[derive(Clone, Debug)]
pub enum Step {
    Rule { pos: Pos, rule: RuleId, path: Vec<usize>, dir: Direction, params: Vec<ParamSrc> },
    Print { pos: Pos },
}

/// An unresolved rule parameter.
#[derive(Clone, Debug)]
pub struct ParamSrc(RawParam);

#[derive(Clone, Debug)]
pub struct Script {
    /// The region the script rewrites; the first region when absent.
    pub program: Option<String>,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, Error)]
pub enum ScriptError {
    #[error("{0}")]
    Syntax(#[from] SyntaxError),
    #[error("no region named `{0}`")]
    NoProgram(String),
    #[error("no region to rewrite")]
    NoRegion,
    #[error("{pos}: step {index}: {err}")]
    Rewrite { pos: Pos, index: usize, err: RewriteError },
}

/// The result of one step.
#[derive(Clone, Debug)]
pub struct StepLog {
    pub pos: Pos,
    /// `rule at path [backward]`, or `print`.
    pub description: String,
    pub region: Region,
    /// Premises assumed rather than checked.
    pub assumptions: Vec<String>,
    pub print: bool,
}

const PARAM_WORDS: &[&str] = &["backward", "forward", "term", "region", "blocks", "ty", "perm", "count"];

fn binders(p: &mut Parser) -> Result<Binders, SyntaxError> {
    let mut b = Binders::default();
    if !p.eat_sym("[") {
        return Ok(b);
    }
    let mut labels = false;
    loop {
        if p.eat_sym("]") {
            return Ok(b);
        }
        if p.eat_sym("|") {
            labels = true;
            continue;
        }
        let n = p.ident()?;
        if labels {
            b.labels.push(n);
        } else {
            b.vars.push(n);
        }
        p.eat_sym(",");
    }
}

fn path(p: &mut Parser) -> Result<Vec<usize>, SyntaxError> {
    if p.eat_sym(".") {
        return Ok(Vec::new());
    }
    let mut out = vec![p.int()? as usize];
    while p.eat_sym(".") {
        out.push(p.int()? as usize);
    }
    Ok(out)
}

/// Parses a script against the signature of the unit it will rewrite.
pub fn parse_script(sig: &Signature, src: &str) -> Result<Script, SyntaxError> {
    let mut p = Parser::new(src, sig.clone())?;
    let mut program = None;
    let mut steps = Vec::new();
    while !p.at_eof() {
        let pos = p.pos();
        let kw = p.word()?;
        match kw.text.as_str() {
            "program" => {
                program = Some(p.ident()?.text);
                p.eat_sym(";");
            }
            "print" => {
                p.eat_sym(";");
                steps.push(Step::Print { pos });
            }
            _ => {
                let rule: RuleId = kw.text.parse().map_err(|e: String| SyntaxError::new(kw.pos, e))?;
                let mut at = Vec::new();
                let mut dir = Direction::Forward;
                let mut params = Vec::new();
                loop {
                    let pos = p.pos();
                    if p.eat_sym(";") || p.at_eof() {
                        break;
                    }
                    if p.eat_sym("@") {
                        at = path(&mut p)?;
                        continue;
                    }
                    // a step ends at the end of its line unless a parameter follows
                    let w = match p.peek_word() {
                        Some(w) if PARAM_WORDS.contains(&w.as_str()) => p.word()?,
                        _ if pos.line > p.prev_line() => break,
                        _ => return p.unexpected("a rule parameter"),
                    };
                    let param = match w.text.as_str() {
                        "backward" => {
                            dir = Direction::Backward;
                            continue;
                        }
                        "forward" => {
                            dir = Direction::Forward;
                            continue;
                        }
                        "term" => {
                            let b = binders(&mut p)?;
                            RawParam::Term(b, p.prefix()?)
                        }
                        "region" => {
                            let b = binders(&mut p)?;
                            p.expect_sym("{")?;
                            let r = p.region()?;
                            p.expect_sym("}")?;
                            RawParam::Region(b, r)
                        }
                        "blocks" => {
                            let b = binders(&mut p)?;
                            RawParam::Blocks(b, p.blocks()?)
                        }
                        "ty" => RawParam::Ty(p.ty()?),
                        "perm" => {
                            let mut v = Vec::new();
                            while let Ok(k) = p.int() {
                                v.push(k as usize);
                            }
                            RawParam::Perm(v)
                        }
                        _ => RawParam::Count(p.int()? as usize),
                    };
                    params.push(ParamSrc(param));
                }
                steps.push(Step::Rule { pos, rule, path: at, dir, params });
            }
        }
    }
    Ok(Script { program, steps })
}

/// Names of the variables and labels in scope at `path` inside `def`, as
/// the printer writes them (outermost first).
pub fn scope_at(sig: &Signature, def: &RegionDef, path: &[usize]) -> Result<(Vec<String>, Vec<String>), String> {
    let vars: Vec<String> = def.params.iter().map(|p| p.name.clone()).collect();
    let labels: Vec<String> = def.exits.iter().map(|e| e.0.clone()).collect();
    let mut n = Namer::new(sig, &vars, &labels);
    let mut r = &def.body;
    let mut i = 0;
    while i < path.len() {
        let c = path[i];
        i += 1;
        match (r, c) {
            (Region::Br(_, a), 0) => return term_scope(n, a, &path[i..]),
            (Region::Let1(a, _) | Region::Let2(a, _) | Region::Case(a, _, _), 0) => return term_scope(n, a, &path[i..]),
            (Region::Let1(_, body), 1) => {
                n.bind_var();
                r = body;
            }
            (Region::Let2(_, body), 1) => {
                n.bind_var();
                n.bind_var();
                r = body;
            }
            (Region::Case(_, s, t), 1 | 2) => {
                n.bind_var();
                r = if c == 1 { s } else { t };
            }
            (Region::Where(head, bs), _) if c <= bs.len() => {
                for _ in bs {
                    n.bind_label();
                }
                if c == 0 {
                    r = head;
                } else {
                    n.bind_var();
                    r = &bs[c - 1].body;
                }
            }
            _ => return Err(format!("no child {c} at {:?}", &path[..i - 1])),
        }
    }
    Ok((n.vars, n.labels))
}

fn term_scope(mut n: Namer, mut t: &Term, path: &[usize]) -> Result<(Vec<String>, Vec<String>), String> {
    for (i, &c) in path.iter().enumerate() {
        let kids = t.children();
        let Some(next) = kids.get(c).copied() else {
            return Err(format!("no child {c} at depth {i}"));
        };
        match (t, c) {
            (Term::Let1(..), 1) | (Term::Case(..), 1 | 2) => {
                n.bind_var();
            }
            (Term::Let2(..), 1) => {
                n.bind_var();
                n.bind_var();
            }
            _ => {}
        }
        t = next;
    }
    Ok((n.vars, n.labels))
}

fn resolver(vars: &[String], labels: &[String], b: &Binders) -> Resolver {
    let mut v = vars.to_vec();
    v.extend(b.vars.iter().map(|n| n.text.clone()));
    let mut l = labels.to_vec();
    l.extend(b.labels.iter().map(|n| n.text.clone()));
    Resolver::new(v, l)
}

fn resolve(params: &[ParamSrc], vars: &[String], labels: &[String]) -> Result<Params, SyntaxError> {
    let mut out = Params::default();
    for ParamSrc(p) in params {
        match p {
            RawParam::Term(b, t) => out.terms.push(resolver(vars, labels, b).term(t)?),
            RawParam::Region(b, r) => out.regions.push(resolver(vars, labels, b).region(r)?),
            RawParam::Ty(t) => out.tys.push(t.clone()),
            RawParam::Blocks(b, bs) => out.blocks.extend(resolver(vars, labels, b).blocks(bs)?),
            RawParam::Perm(v) => out.perm = v.clone(),
            RawParam::Count(k) => out.count = Some(*k),
        }
    }
    Ok(out)
}

/// Runs `script` on its program region. With `verify`, semantic premises
/// are checked by the powerset model at the given fuel instead of trusted.
pub fn apply_script(unit: &SourceUnit, script: &Script, verify: Option<(&SigImpl, usize)>) -> Result<(RegionDef, Vec<StepLog>), ScriptError> {
    let mut def = match &script.program {
        Some(n) => unit.region(Some(n)).ok_or_else(|| ScriptError::NoProgram(n.clone()))?.clone(),
        None => unit.region(None).ok_or(ScriptError::NoRegion)?.clone(),
    };
    let sig = &unit.sig;
    let (ctx, l) = (def.ctx(), def.labels());
    let opts = Options { verify };
    let mut logs = Vec::new();
    for (index, step) in script.steps.iter().enumerate() {
        match step {
            Step::Print { pos } => logs.push(StepLog {
                pos: *pos,
                description: "print".into(),
                region: def.body.clone(),
                assumptions: Vec::new(),
                print: true,
            }),
            Step::Rule { pos, rule, path, dir, params } => {
                let fail = |err| ScriptError::Rewrite { pos: *pos, index: index + 1, err };
                let (vars, labels) = scope_at(sig, &def, path).map_err(|msg| fail(RewriteError::Position { path: path.clone(), msg }))?;
                let params = resolve(params, &vars, &labels)?;
                let inst = RuleInstance { rule: *rule, path: path.clone(), dir: *dir, params };
                let out = apply_region_rule_with(sig, &ctx, &def.body, &l, &inst, &opts).map_err(fail)?;
                def.body = out.result;
                let at = if path.is_empty() { ".".to_string() } else { path.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(".") };
                let d = if *dir == Direction::Backward { " backward" } else { "" };
                logs.push(StepLog {
                    pos: *pos,
                    description: format!("{rule} at {at}{d}"),
                    region: def.body.clone(),
                    assumptions: out.assumptions,
                    print: false,
                });
            }
        }
    }
    Ok((def, logs))
}
