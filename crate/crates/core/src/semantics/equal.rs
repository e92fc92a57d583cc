//! Denotational equality by exhaustive environment enumeration, and a
//! model-erased runner for front ends.

use std::fmt;
use std::str::FromStr;

use super::interp::{denote_region, denote_term, Interp};
use super::model::{Elgot, OptionModel, PowersetModel, Res};
use super::pomset::Pomset;
use super::sigimpl::SigImpl;
use super::trace::{Events, TraceModel, TraceOut};
use super::tso::{Buffer, TsoMachine, TsoModel};
use super::{enumerate_values, Env, EvalError, Outcome, Value, ENUM_LIMIT};
use crate::ir::{Ctx, Region, Signature, Term};

/// Result of a denotational comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    /// The first environment on which the two sides differ, with both results printed.
    Differ { env: Env, lhs: String, rhs: String },
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal)
    }
}

/// Every environment for `ctx`, in a fixed order.
pub fn enumerate_envs(sig: &Signature, ctx: &Ctx) -> Res<Vec<Env>> {
    let mut envs: Vec<Env> = vec![Vec::new()];
    for h in &ctx.0 {
        let vs = enumerate_values(sig, &h.ty)?;
        if (envs.len() as u128) * (vs.len() as u128) > ENUM_LIMIT {
            return Err(EvalError::TooLarge(format!("environments of {} hypotheses", ctx.len())));
        }
        envs = envs
            .iter()
            .flat_map(|e| {
                vs.iter().map(move |v| {
                    let mut e = e.clone();
                    e.push(v.clone());
                    e
                })
            })
            .collect();
    }
    Ok(envs)
}

fn compare<T: PartialEq + fmt::Debug>(
    envs: Vec<Env>,
    mut run: impl FnMut(&Env) -> Res<(T, T)>,
) -> Res<Verdict> {
    for env in envs {
        let (a, b) = run(&env)?;
        if a != b {
            return Ok(Verdict::Differ { env, lhs: format!("{a:?}"), rhs: format!("{b:?}") });
        }
    }
    Ok(Verdict::Equal)
}

/// Compares two regions typed in `ctx` on every environment.
pub fn denotation_equal_regions<M: Elgot>(
    model: &M,
    sig: &Signature,
    imp: &SigImpl,
    ctx: &Ctx,
    lhs: &Region,
    rhs: &Region,
) -> Res<Verdict> {
    compare(enumerate_envs(sig, ctx)?, |env| {
        Ok((denote_region(model, sig, imp, env, lhs)?, denote_region(model, sig, imp, env, rhs)?))
    })
}

/// Compares two terms typed in `ctx` on every environment.
pub fn denotation_equal_terms<M: Elgot>(
    model: &M,
    sig: &Signature,
    imp: &SigImpl,
    ctx: &Ctx,
    lhs: &Term,
    rhs: &Term,
) -> Res<Verdict> {
    compare(enumerate_envs(sig, ctx)?, |env| {
        Ok((denote_term(model, sig, imp, env, lhs)?, denote_term(model, sig, imp, env, rhs)?))
    })
}

/// The models selectable at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Option,
    Powerset,
    Trace,
    Tso,
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "option" => Ok(ModelKind::Option),
            "powerset" => Ok(ModelKind::Powerset),
            "trace" => Ok(ModelKind::Trace),
            "tso" => Ok(ModelKind::Tso),
            _ => Err(format!("unknown model `{s}` (expected option, powerset, trace or tso)")),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Option => "option",
            ModelKind::Powerset => "powerset",
            ModelKind::Trace => "trace",
            ModelKind::Tso => "tso",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelParams {
    /// Option: loop steps. Powerset: search rounds. Trace and TSO: loop depth.
    pub fuel: usize,
    /// Longest divergent trace prefix kept by the trace models.
    pub prefix: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { fuel: 1000, prefix: 16 }
    }
}

/// One member of a result set, independent of the model.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OutcomeRecord {
    /// `None` for divergence.
    pub outcome: Option<Outcome>,
    /// Printed trace, for trace models.
    pub trace: Option<String>,
    /// Divergence was only established up to a bound.
    pub truncated: bool,
}

impl fmt::Display for OutcomeRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            Some(o) => write!(f, "exit {} {}", o.label, o.value)?,
            None if self.truncated => write!(f, "diverges (bound reached)")?,
            None => write!(f, "diverges")?,
        }
        if let Some(t) = &self.trace {
            write!(f, " with trace {t}")?;
        }
        Ok(())
    }
}

/// One line per outcome; an empty set prints as `no outcomes`.
pub fn render_outcomes(rs: &[OutcomeRecord]) -> String {
    if rs.is_empty() {
        return "no outcomes\n".to_string();
    }
    rs.iter().map(|r| format!("{r}\n")).collect()
}

fn from_trace<T, Mo: fmt::Display>(
    out: impl IntoIterator<Item = TraceOut<T, Mo>>,
    f: impl Fn(T) -> Option<Outcome>,
) -> Vec<OutcomeRecord> {
    out.into_iter()
        .filter_map(|o| match o {
            TraceOut::Done(t, w) => f(t).map(|oc| OutcomeRecord { outcome: Some(oc), trace: Some(w.to_string()), truncated: false }),
            TraceOut::Div(w, tr) => Some(OutcomeRecord { outcome: None, trace: Some(w.to_string()), truncated: tr }),
        })
        .collect()
}

fn records(kind: ModelKind, p: ModelParams, sig: &Signature, imp: &SigImpl, env: &Env, r: &Region) -> Res<Vec<OutcomeRecord>> {
    let mut out = match kind {
        ModelKind::Option => {
            let m = OptionModel::new(p.fuel);
            let o = denote_region(&m, sig, imp, env, r)?;
            vec![OutcomeRecord { truncated: o.is_none() && m.fuel_exhausted.get(), outcome: o, trace: None }]
        }
        ModelKind::Powerset => {
            let m = PowersetModel::new(p.fuel);
            denote_region(&m, sig, imp, env, r)?
                .into_iter()
                .map(|o| OutcomeRecord { outcome: Some(o), trace: None, truncated: false })
                .collect()
        }
        ModelKind::Trace => {
            let m = TraceModel::<Events>::new(p.fuel, p.prefix);
            from_trace(denote_region(&m, sig, imp, env, r)?, Some)
        }
        ModelKind::Tso => {
            let m = TsoModel::new(p.fuel, p.prefix);
            let i = Interp { sig, imp, model: &m, machine: &TsoMachine };
            let out: std::collections::BTreeSet<TraceOut<(Outcome, Buffer), Pomset>> = i.region(env, r, Buffer::default())?;
            // only runs that leave nothing buffered are observable
            from_trace(out, |(o, b): (Outcome, Buffer)| b.is_empty().then_some(o))
        }
    };
    out.sort();
    out.dedup();
    Ok(out)
}

/// Runs a region in the chosen model.
pub fn run_region_dyn(
    kind: ModelKind,
    params: ModelParams,
    sig: &Signature,
    imp: &SigImpl,
    env: &Env,
    r: &Region,
) -> Res<Vec<OutcomeRecord>> {
    records(kind, params, sig, imp, env, r)
}

/// Runs a term in the chosen model; outcomes carry label 0.
pub fn run_term_dyn(
    kind: ModelKind,
    params: ModelParams,
    sig: &Signature,
    imp: &SigImpl,
    env: &Env,
    t: &Term,
) -> Res<Vec<OutcomeRecord>> {
    records(kind, params, sig, imp, env, &Region::Br(0, t.clone()))
}

/// Compares two regions in the chosen model on every environment of `ctx`.
pub fn equiv_regions_dyn(
    kind: ModelKind,
    params: ModelParams,
    sig: &Signature,
    imp: &SigImpl,
    ctx: &Ctx,
    lhs: &Region,
    rhs: &Region,
) -> Res<Verdict> {
    for env in enumerate_envs(sig, ctx)? {
        let a = records(kind, params, sig, imp, &env, lhs)?;
        let b = records(kind, params, sig, imp, &env, rhs)?;
        if a != b {
            return Ok(Verdict::Differ { env, lhs: render_outcomes(&a), rhs: render_outcomes(&b) });
        }
    }
    Ok(Verdict::Equal)
}

/// The value tuple an environment renders as.
pub fn render_env(env: &Env) -> String {
    let vs: Vec<String> = env.iter().map(Value::to_string).collect();
    format!("[{}]", vs.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{rg, Ty};
    use crate::typing::infinite_loop;

    #[test]
    fn reflexive_and_separating() {
        let s = Signature::default();
        let i = SigImpl::new();
        let m = PowersetModel::new(50);
        let ctx = Ctx::new();
        let br = rg::br(0, Term::Unit);
        assert_eq!(denotation_equal_regions(&m, &s, &i, &ctx, &br, &br).unwrap(), Verdict::Equal);
        match denotation_equal_regions(&m, &s, &i, &ctx, &br, &infinite_loop()).unwrap() {
            Verdict::Differ { env, .. } => assert!(env.is_empty()),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn environments_cover_the_context() {
        let s = Signature::default();
        let mut ctx = Ctx::new();
        ctx.push(Ty::bool(), s.bot());
        ctx.push(Ty::sum(Ty::Unit, Ty::bool()), s.bot());
        let envs = enumerate_envs(&s, &ctx).unwrap();
        assert_eq!(envs.len(), 6);
        assert!(envs.iter().all(|e| e.len() == 2));
    }

    #[test]
    fn dyn_runner_reports_divergence() {
        let s = Signature::default();
        let i = SigImpl::new();
        let p = ModelParams { fuel: 100, prefix: 4 };
        let r = run_region_dyn(ModelKind::Option, p, &s, &i, &vec![], &infinite_loop()).unwrap();
        assert_eq!(r, vec![OutcomeRecord { outcome: None, trace: None, truncated: true }]);
        assert!(run_region_dyn(ModelKind::Powerset, p, &s, &i, &vec![], &infinite_loop()).unwrap().is_empty());
        let t = run_region_dyn(ModelKind::Trace, p, &s, &i, &vec![], &infinite_loop()).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t[0].outcome.is_none() && !t[0].truncated);
    }
}
