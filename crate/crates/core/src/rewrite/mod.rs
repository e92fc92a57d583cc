//! The equational theory as directed, position-addressed rewrites.
//!
//! A [`RuleInstance`] names a rule, a child-index path into the subject, a
//! direction and whatever parameters the rule needs to build its other side.
//! Congruence is implicit: the path selects the subterm or subregion the rule
//! acts on, and the surrounding syntax is rebuilt unchanged.
//!
//! Paths use the child numbering of the type checker:
//! terms `Op [a]`, `Let1/Pair/Let2 [a, b]`, `Inl/Inr/Abort [a]`,
//! `Case [e, l, r]`; regions `Br [a]`, `Let1/Let2 [a, body]`,
//! `Case [e, l, r]`, `Where [head, block 1, block 2, ...]`.

mod catalog;
mod fuzz;
mod nav;
mod region_rules;
mod term_rules;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ir::{Block, Ctx, Effect, LabelCtx, Region, Signature, Term, Ty};
use crate::semantics::SigImpl;
use crate::typing::{elaborate_region, elaborate_term, TypeError};

pub use catalog::{rule_catalog, RuleGroup, RuleInfo};
pub use fuzz::{fuzz_rule_instances, fuzz_signature, FuzzInstance};

macro_rules! rules {
    ($($id:ident => $name:literal),* $(,)?) => {
        /// Every rule of the theory.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum RuleId { $($id),* }

        impl RuleId {
            pub const ALL: &'static [RuleId] = &[$(RuleId::$id),*];

            pub fn name(self) -> &'static str {
                match self { $(RuleId::$id => $name),* }
            }
        }

        impl FromStr for RuleId {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok(RuleId::$id),)*
                    _ => Err(format!("unknown rule `{s}`")),
                }
            }
        }
    };
}

rules! {
    Let1Beta => "let1-beta",
    Let1Eta => "let1-eta",
    Let1Op => "let1-op",
    Let1Let1 => "let1-let1",
    Let1Let2 => "let1-let2",
    Let1Abort => "let1-abort",
    Let1Case => "let1-case",
    Let2Pair => "let2-pair",
    Let2Eta => "let2-eta",
    Let2Bind => "let2-bind",
    CaseInl => "case-inl",
    CaseInr => "case-inr",
    CaseEta => "case-eta",
    CaseBind => "case-bind",
    Initial => "initial",
    Terminal => "terminal",
    InitialExpr => "initial-expr",
    Let1BetaR => "let1-beta-r",
    Let1OpR => "let1-op-r",
    Let1Let1R => "let1-let1-r",
    Let1Let2R => "let1-let2-r",
    Let1CaseR => "let1-case-r",
    Let1AbortR => "let1-abort-r",
    Let2PairR => "let2-pair-r",
    Let2BindR => "let2-bind-r",
    CaseInlR => "case-inl-r",
    CaseInrR => "case-inr-r",
    CaseBindR => "case-bind-r",
    CfgBeta1 => "cfg-beta1",
    CfgBeta2 => "cfg-beta2",
    CfgEta => "cfg-eta",
    Codiag => "codiag",
    Uni => "uni",
    Dinat => "dinat",
    InitialR => "initial-r",
    Case2Cfg => "case2cfg",
    CfgFuse1 => "cfg-fuse1",
    CfgFuse2 => "cfg-fuse2",
    PermCfg => "perm-cfg",
}

impl RuleId {
    /// Does the rule rewrite terms (as opposed to regions)?
    pub fn is_term_rule(self) -> bool {
        (self as usize) <= (RuleId::InitialExpr as usize)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Direction {
    /// Left side to right side, as the rule is displayed.
    #[default]
    Forward,
    Backward,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// Rule-specific parameters. Which fields a rule reads is listed in
/// [`rule_catalog`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Params {
    pub terms: Vec<Term>,
    pub regions: Vec<Region>,
    pub tys: Vec<Ty>,
    pub blocks: Vec<Block>,
    pub perm: Vec<usize>,
    pub count: Option<usize>,
}

impl Params {
    pub fn is_empty(&self) -> bool {
        *self == Params::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub path: Vec<usize>,
    pub dir: Direction,
    pub params: Params,
}

impl RuleInstance {
    pub fn new(rule: RuleId) -> Self {
        RuleInstance { rule, path: Vec::new(), dir: Direction::Forward, params: Params::default() }
    }

    pub fn at(mut self, path: Vec<usize>) -> Self {
        self.path = path;
        self
    }

    pub fn backward(mut self) -> Self {
        self.dir = Direction::Backward;
        self
    }

    pub fn with(mut self, params: Params) -> Self {
        self.params = params;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("subject is ill-typed: {0}")]
    IllTyped(TypeError),
    #[error("invalid position {path:?}: {msg}")]
    Position { path: Vec<usize>, msg: String },
    #[error("{rule}: pattern mismatch: {msg}")]
    Mismatch { rule: RuleId, msg: String },
    #[error("{rule}: side condition violated: {msg}")]
    SideCondition { rule: RuleId, msg: String },
    #[error("{rule}: missing or malformed parameter: {msg}")]
    BadParams { rule: RuleId, msg: String },
    #[error("{rule}: premise not established: {msg}")]
    Premise { rule: RuleId, msg: String },
}

/// How to treat semantic premises (currently only those of `uni`).
#[derive(Clone, Copy, Debug, Default)]
pub struct Options<'a> {
    /// When set, premises are checked with the powerset oracle at this
    /// implementation and fuel; otherwise they are trusted and logged.
    pub verify: Option<(&'a SigImpl, usize)>,
}

/// A rewrite result with the premises that were assumed rather than checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rewritten<T> {
    pub result: T,
    pub assumptions: Vec<String>,
}

pub(crate) type Res<T> = Result<T, RewriteError>;

/// Rewrites a term at `inst.path`; the result has the subject's judgment.
pub fn apply_term_rule(sig: &Signature, ctx: &Ctx, eff: Effect, t: &Term, ty: &Ty, inst: &RuleInstance) -> Res<Term> {
    apply_term_rule_with(sig, ctx, eff, t, ty, inst, &Options::default()).map(|r| r.result)
}

/// Rewrites a region at `inst.path`; the result has the subject's judgment.
pub fn apply_region_rule(sig: &Signature, ctx: &Ctx, r: &Region, l: &LabelCtx, inst: &RuleInstance) -> Res<Region> {
    apply_region_rule_with(sig, ctx, r, l, inst, &Options::default()).map(|r| r.result)
}

pub fn apply_term_rule_with(
    sig: &Signature,
    ctx: &Ctx,
    eff: Effect,
    t: &Term,
    ty: &Ty,
    inst: &RuleInstance,
    opts: &Options<'_>,
) -> Res<Rewritten<Term>> {
    let t = elaborate_term(sig, ctx, eff, t, ty).map_err(RewriteError::IllTyped)?;
    let mut log = Vec::new();
    let out = nav::at_term(sig, ctx, eff, &t, ty, &inst.path, 0, &mut |site| local(sig, site, inst, opts, &mut log))?;
    let out = elaborate_term(sig, ctx, eff, &out, ty)
        .map_err(|e| RewriteError::SideCondition { rule: inst.rule, msg: format!("result is ill-typed: {e}") })?;
    Ok(Rewritten { result: out, assumptions: log })
}

pub fn apply_region_rule_with(
    sig: &Signature,
    ctx: &Ctx,
    r: &Region,
    l: &LabelCtx,
    inst: &RuleInstance,
    opts: &Options<'_>,
) -> Res<Rewritten<Region>> {
    let r = elaborate_region(sig, ctx, r, l).map_err(RewriteError::IllTyped)?;
    let mut log = Vec::new();
    let out = nav::at_region(sig, ctx, &r, l, &inst.path, 0, &mut |site| local(sig, site, inst, opts, &mut log))?;
    let out = elaborate_region(sig, ctx, &out, l)
        .map_err(|e| RewriteError::SideCondition { rule: inst.rule, msg: format!("result is ill-typed: {e}") })?;
    Ok(Rewritten { result: out, assumptions: log })
}

fn local(sig: &Signature, site: nav::Site<'_>, inst: &RuleInstance, opts: &Options<'_>, log: &mut Vec<String>) -> Res<nav::Node> {
    match site {
        nav::Site::Term { ctx, eff, t, ty } => {
            if !inst.rule.is_term_rule() {
                return Err(RewriteError::Position {
                    path: inst.path.clone(),
                    msg: format!("{} rewrites regions but the path names a term", inst.rule),
                });
            }
            let out = term_rules::apply(sig, ctx, eff, t, ty, inst)?;
            let out = elaborate_term(sig, ctx, eff, &out, ty)
                .map_err(|e| RewriteError::SideCondition { rule: inst.rule, msg: format!("rewritten side is ill-typed: {e}") })?;
            Ok(nav::Node::Term(out))
        }
        nav::Site::Region { ctx, r, l } => {
            if inst.rule.is_term_rule() {
                return Err(RewriteError::Position {
                    path: inst.path.clone(),
                    msg: format!("{} rewrites terms but the path names a region", inst.rule),
                });
            }
            let out = region_rules::apply(sig, ctx, r, l, inst, opts, log)?;
            let out = elaborate_region(sig, ctx, &out, l)
                .map_err(|e| RewriteError::SideCondition { rule: inst.rule, msg: format!("rewritten side is ill-typed: {e}") })?;
            Ok(nav::Node::Region(out))
        }
    }
}
