use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lambda_ssa::gen::{Gen, GenConfig};
use lambda_ssa::normalize::{from_cfg, to_anf, to_cfg, to_strict, to_structured};
use lambda_ssa::semantics::{
    enumerate_envs, equiv_regions_dyn, render_env, run_litmus, run_region_dyn, Env, ModelKind, ModelParams, OutcomeRecord, TsoModel,
    Value, Verdict, ENUM_LIMIT,
};
use lambda_ssa::syntax::{
    apply_script, parse_script, parse_unit, parse_values, print_unit, Item, Quant, RegionDef, SourceUnit, SyntaxError,
};
use lambda_ssa::typing::{check_anf, check_strict, check_structured, elaborate_region, elaborate_term};
use lambda_ssa::{Ctx, LabelCtx, Region, Ty};
use serde_json::{json, Value as Json};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "lssa", version, about = "Check, rewrite, normalize and run programs in a typed SSA IR")]
struct Cli {
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampling environments when there are too many to enumerate.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Replace the carrier of every base type with `0..K`.
    #[arg(long, global = true, value_name = "K")]
    word_domain: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and typecheck every item of a file.
    Check { file: PathBuf },
    /// Apply a rewrite script and print the resulting unit.
    Rewrite {
        file: PathBuf,
        #[arg(long)]
        script: PathBuf,
        /// Region to rewrite; overrides the script's `program`.
        #[arg(long)]
        program: Option<String>,
        /// Check semantic premises with the powerset model at this fuel
        /// instead of trusting them.
        #[arg(long, value_name = "FUEL")]
        verify: Option<usize>,
    },
    /// Run a normalization pass over regions and print the result.
    Normalize {
        file: PathBuf,
        #[arg(long, value_enum)]
        pass: Pass,
        /// Only this region; all regions by default.
        #[arg(long)]
        program: Option<String>,
    },
    /// Evaluate a region or term.
    Interpret {
        file: PathBuf,
        /// Region or term to run; the first region by default.
        #[arg(long)]
        program: Option<String>,
        #[arg(long, default_value = "option")]
        model: ModelKind,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
        /// Argument values, comma separated; every environment by default.
        #[arg(long)]
        args: Option<String>,
        /// Environments drawn when there are too many to enumerate.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Compare two programs given as `FILE` or `FILE:NAME`.
    Equiv {
        lhs: String,
        rhs: String,
        #[arg(long, default_value = "powerset")]
        model: ModelKind,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
    /// Run the threads of a litmus file under TSO and check its conditions.
    Litmus {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Pass {
    Anf,
    Strict,
    Structured,
    /// Print the control-flow graph of the strict form.
    Cfg,
    /// Strict form, to a graph and back.
    CfgRoundtrip,
}

/// A failed command: exit 1 for semantic failures, 2 for usage and IO.
struct Failure {
    code: u8,
    msg: String,
    pos: Option<(usize, usize)>,
}

fn fail(msg: impl Display) -> Failure {
    Failure { code: 1, msg: msg.to_string(), pos: None }
}

fn usage(msg: impl Display) -> Failure {
    Failure { code: 2, msg: msg.to_string(), pos: None }
}

fn syntax(file: &Path, e: SyntaxError) -> Failure {
    Failure { code: 1, msg: format!("{}:{}: {}", file.display(), e.pos, e.msg), pos: Some((e.pos.line, e.pos.col)) }
}

/// Command output: text for humans and the JSON body.
struct Report {
    text: String,
    json: Json,
    /// Exit code when the command ran but its verdict is negative.
    code: u8,
}

struct Style {
    color: bool,
}

impl Style {
    fn paint(&self, code: &str, s: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path, domain: Option<u64>) -> Result<SourceUnit, Failure> {
    let src = read(path)?;
    let mut u = parse_unit(&src).map_err(|e| syntax(path, e))?;
    if let Some(k) = domain {
        if k == 0 {
            return Err(usage("--word-domain must be positive"));
        }
        for b in &mut u.sig.bases {
            b.carrier = k;
        }
    }
    Ok(u)
}

fn labels_of(d: &RegionDef) -> Vec<String> {
    d.exits.iter().map(|e| e.0.clone()).collect()
}

fn label_name(names: &[String], k: usize) -> String {
    names.len().checked_sub(k + 1).map_or_else(|| format!("?{k}"), |i| names[i].clone())
}

fn check(u: &SourceUnit) -> Report {
    let sig = &u.sig;
    let mut lines = String::new();
    let mut items = Vec::new();
    let mut ok = true;
    let mut push = |kind: &str, name: &str, res: Result<(), String>| {
        match &res {
            Ok(()) => lines.push_str(&format!("{kind} {name}: ok\n")),
            Err(e) => {
                ok = false;
                lines.push_str(&format!("{kind} {name}: {e}\n"));
            }
        }
        items.push(json!({"kind": kind, "name": name, "ok": res.is_ok(), "error": res.err()}));
    };
    push("signature", "builtins", u.imp.check(sig));
    let threads: Vec<String> = u.threads().map(|t| t.name.clone()).collect();
    for item in &u.items {
        match item {
            Item::Region(d) => push("region", &d.name, elaborate_region(sig, &d.ctx(), &d.body, &d.labels()).map(|_| ()).map_err(|e| e.to_string())),
            Item::Term(d) => {
                push("term", &d.name, elaborate_term(sig, &d.ctx(), d.eff, &d.body, &d.ty).map(|_| ()).map_err(|e| e.to_string()))
            }
            Item::Thread(d) => push(
                "thread",
                &d.name,
                elaborate_region(sig, &Ctx::new(), &d.body, &LabelCtx(vec![d.ty.clone()])).map(|_| ()).map_err(|e| e.to_string()),
            ),
            Item::Post(p) => {
                let vals: Vec<Value> = threads.iter().map(|_| Value::Unit).collect();
                push(&p.quant.to_string(), &p.cond.to_string(), p.cond.holds(&threads, &vals).map(|_| ()))
            }
            Item::Init(_) => {}
        }
    }
    Report { text: lines, json: json!({"ok": ok, "items": items}), code: if ok { 0 } else { 1 } }
}

fn rewrite(u: &SourceUnit, script: &Path, program: Option<String>, verify: Option<usize>) -> Result<Report, Failure> {
    let src = read(script)?;
    let mut s = parse_script(&u.sig, &src).map_err(|e| syntax(script, e))?;
    if program.is_some() {
        s.program = program;
    }
    let verify = verify.map(|f| (&u.imp, f));
    let (def, logs) = apply_script(u, &s, verify).map_err(|e| fail(format!("{}: {e}", script.display())))?;
    let mut out = u.clone();
    let name = def.name.clone();
    *out.region_mut(&name).expect("script region exists") = def.clone();
    let mut text = String::new();
    let mut steps = Vec::new();
    for (i, log) in logs.iter().enumerate() {
        text.push_str(&format!("-- step {}: {}\n", i + 1, log.description));
        for a in &log.assumptions {
            text.push_str(&format!("--   assumed: {a}\n"));
        }
        let mut shown = None;
        if log.print {
            let mut snap = u.clone();
            snap.items = vec![Item::Region(RegionDef { body: log.region.clone(), ..def.clone() })];
            let p = print_unit(&snap);
            let body = p.split("\n\n").nth(1).unwrap_or("").to_string();
            for line in body.lines() {
                text.push_str(&format!("--   {line}\n"));
            }
            shown = Some(body);
        }
        steps.push(json!({"step": i + 1, "line": log.pos.line, "description": log.description, "assumed": log.assumptions, "region": shown}));
    }
    let printed = print_unit(&out);
    text.push_str(&printed);
    Ok(Report { text, json: json!({"program": name, "steps": steps, "unit": printed}), code: 0 })
}

fn normalize(u: &SourceUnit, pass: Pass, program: Option<String>) -> Result<Report, Failure> {
    let sig = &u.sig;
    let defs: Vec<RegionDef> = match &program {
        Some(n) => vec![u.region(Some(n)).ok_or_else(|| fail(format!("no region named `{n}`")))?.clone()],
        None => u.regions().cloned().collect(),
    };
    if defs.is_empty() {
        return Err(fail("no region to normalize"));
    }
    let mut out = u.clone();
    let mut graphs = Vec::new();
    for d in &defs {
        let (ctx, l) = (d.ctx(), d.labels());
        let err = |e: &dyn Display| fail(format!("region {}: {e}", d.name));
        let elab = elaborate_region(sig, &ctx, &d.body, &l).map_err(|e| err(&e))?;
        let (body, ok) = match pass {
            Pass::Anf => {
                let r = to_anf(&elab);
                let ok = check_anf(sig, &ctx, &r, &l);
                (r, ok)
            }
            Pass::Strict => {
                let r = to_strict(sig, &ctx, &elab, &l).map_err(|e| err(&e))?;
                let ok = check_strict(sig, &ctx, &r, &l);
                (r, ok)
            }
            Pass::Structured => {
                let r = to_structured(sig, &ctx, &elab, &l).map_err(|e| err(&e))?;
                let ok = check_structured(sig, &ctx, &r, &l);
                (r, ok)
            }
            Pass::Cfg | Pass::CfgRoundtrip => {
                let s = to_strict(sig, &ctx, &elab, &l).map_err(|e| err(&e))?;
                let g = to_cfg(&ctx, &s, &l).map_err(|e| err(&e))?;
                graphs.push(json!({"region": d.name, "cfg": g.to_string()}));
                if matches!(pass, Pass::Cfg) {
                    continue;
                }
                let r = from_cfg(sig, &g).map_err(|e| err(&e))?;
                let ok = check_strict(sig, &ctx, &r, &l);
                (r, ok)
            }
        };
        if !ok {
            return Err(fail(format!("region {}: pass output failed its form check", d.name)));
        }
        out.region_mut(&d.name).expect("region exists").body = body;
    }
    if matches!(pass, Pass::Cfg) {
        let text: String = graphs.iter().map(|g| format!("-- region {}\n{}\n", g["region"].as_str().unwrap(), g["cfg"].as_str().unwrap())).collect();
        return Ok(Report { text, json: json!({"cfgs": graphs}), code: 0 });
    }
    let printed = print_unit(&out);
    Ok(Report { text: printed.clone(), json: json!({"unit": printed}), code: 0 })
}

/// A runnable program: a region with its scope, or a term as a region
/// exiting through `ret`.
struct Program {
    name: String,
    ctx: Ctx,
    labels: LabelCtx,
    label_names: Vec<String>,
    body: Region,
}

fn program(u: &SourceUnit, name: Option<&str>) -> Result<Program, Failure> {
    if let Some(d) = u.region(name) {
        return Ok(Program { name: d.name.clone(), ctx: d.ctx(), labels: d.labels(), label_names: labels_of(d), body: d.body.clone() });
    }
    let t = match name {
        Some(n) => u.terms().find(|t| t.name == n),
        None => u.terms().next(),
    };
    match t {
        Some(t) => Ok(Program {
            name: t.name.clone(),
            ctx: t.ctx(),
            labels: LabelCtx(vec![t.ty.clone()]),
            label_names: vec!["ret".into()],
            body: Region::Br(0, t.body.clone()),
        }),
        None => Err(fail(match name {
            Some(n) => format!("no region or term named `{n}`"),
            None => "no region or term to run".to_string(),
        })),
    }
}

fn envs(u: &SourceUnit, ctx: &Ctx, seed: u64, samples: usize) -> Result<(Vec<Env>, bool), Failure> {
    match enumerate_envs(&u.sig, ctx) {
        Ok(es) if (es.len() as u128) <= ENUM_LIMIT => Ok((es, false)),
        _ => {
            let mut g = Gen::new(&u.sig, seed, GenConfig::default());
            let mut out = Vec::new();
            for _ in 0..samples {
                let env: Option<Env> = ctx.0.iter().map(|h| g.value(&h.ty)).collect();
                match env {
                    Some(e) => out.push(e),
                    None => break,
                }
            }
            Ok((out, true))
        }
    }
}

fn outcome_json(r: &OutcomeRecord, names: &[String]) -> Json {
    match &r.outcome {
        Some(o) => json!({"label": label_name(names, o.label), "value": o.value.to_string(), "trace": r.trace}),
        None => json!({"diverges": true, "truncated": r.truncated, "trace": r.trace}),
    }
}

fn outcome_text(r: &OutcomeRecord, names: &[String]) -> String {
    let mut s = match &r.outcome {
        Some(o) => format!("exit {} {}", label_name(names, o.label), o.value),
        None if r.truncated => "diverges (bound reached)".to_string(),
        None => "diverges".to_string(),
    };
    if let Some(t) = &r.trace {
        s.push_str(&format!(" with trace {t}"));
    }
    s
}

#[allow(clippy::too_many_arguments)]
fn interpret(
    u: &SourceUnit,
    name: Option<String>,
    model: ModelKind,
    fuel: usize,
    args: Option<String>,
    seed: u64,
    samples: usize,
) -> Result<Report, Failure> {
    let p = program(u, name.as_deref())?;
    let body = elaborate_region(&u.sig, &p.ctx, &p.body, &p.labels).map_err(|e| fail(format!("{}: {e}", p.name)))?;
    let (envs, sampled) = match &args {
        Some(a) => {
            let tys: Vec<Ty> = p.ctx.0.iter().map(|h| h.ty.clone()).collect();
            let vs = parse_values(&u.sig, a, &tys).map_err(|e| usage(format!("--args: column {}: {}", e.pos.col, e.msg)))?;
            (vec![vs], false)
        }
        None => envs(u, &p.ctx, seed, samples)?,
    };
    let params = ModelParams { fuel, ..ModelParams::default() };
    let mut text = String::new();
    if sampled {
        text.push_str(&format!("-- {} sampled environments (seed {seed})\n", envs.len()));
    }
    let mut runs = Vec::new();
    for env in &envs {
        let rs = run_region_dyn(model, params, &u.sig, &u.imp, env, &body).map_err(|e| fail(format!("{}: {e}", p.name)))?;
        let shown = render_env(env);
        if !p.ctx.is_empty() {
            text.push_str(&format!("{shown}:\n"));
        }
        let indent = if p.ctx.is_empty() { "" } else { "  " };
        if rs.is_empty() {
            text.push_str(&format!("{indent}no outcomes\n"));
        }
        for r in &rs {
            text.push_str(&format!("{indent}{}\n", outcome_text(r, &p.label_names)));
        }
        let outs: Vec<Json> = rs.iter().map(|r| outcome_json(r, &p.label_names)).collect();
        runs.push(json!({"env": shown, "outcomes": outs}));
    }
    Ok(Report {
        text,
        json: json!({"program": p.name, "model": model.to_string(), "fuel": fuel, "sampled": sampled, "runs": runs}),
        code: 0,
    })
}

fn split_spec(spec: &str) -> (PathBuf, Option<String>) {
    match spec.rsplit_once(':') {
        Some((f, n)) if !n.is_empty() && !n.contains('/') => (PathBuf::from(f), Some(n.to_string())),
        _ => (PathBuf::from(spec), None),
    }
}

fn equiv(lhs: &str, rhs: &str, model: ModelKind, fuel: usize, domain: Option<u64>) -> Result<Report, Failure> {
    let (fa, na) = split_spec(lhs);
    let (fb, nb) = split_spec(rhs);
    let ua = load(&fa, domain)?;
    let ub = load(&fb, domain)?;
    if ua.sig != ub.sig || ua.imp != ub.imp {
        return Err(fail("the two programs must share a signature and its builtins"));
    }
    let a = program(&ua, na.as_deref())?;
    let b = program(&ub, nb.as_deref())?;
    let tys = |p: &Program| p.ctx.0.iter().map(|h| h.ty.clone()).collect::<Vec<_>>();
    if tys(&a) != tys(&b) || a.labels != b.labels {
        return Err(fail(format!("{} and {} have different interfaces", a.name, b.name)));
    }
    // the context carries the weaker effect of each side
    let ctx = Ctx::from_hyps(a.ctx.0.iter().zip(&b.ctx.0).map(|(x, y)| (x.ty.clone(), ua.sig.effects.join(x.eff, y.eff))).collect());
    let ra = elaborate_region(&ua.sig, &a.ctx, &a.body, &a.labels).map_err(|e| fail(format!("{}: {e}", a.name)))?;
    let rb = elaborate_region(&ub.sig, &b.ctx, &b.body, &b.labels).map_err(|e| fail(format!("{}: {e}", b.name)))?;
    let params = ModelParams { fuel, ..ModelParams::default() };
    let v = equiv_regions_dyn(model, params, &ua.sig, &ua.imp, &ctx, &ra, &rb).map_err(fail)?;
    Ok(match v {
        Verdict::Equal => Report {
            text: format!("equal under the {model} model\n"),
            json: json!({"equal": true, "model": model.to_string()}),
            code: 0,
        },
        Verdict::Differ { env, .. } => {
            let shown = render_env(&env);
            let side = |p: &Program, r: &Region| -> Result<Vec<String>, Failure> {
                let rs = run_region_dyn(model, params, &ua.sig, &ua.imp, &env, r).map_err(fail)?;
                Ok(rs.iter().map(|o| outcome_text(o, &p.label_names)).collect())
            };
            let (la, lb) = (side(&a, &ra)?, side(&b, &rb)?);
            let block = |ls: &[String]| if ls.is_empty() { "  no outcomes\n".to_string() } else { ls.iter().map(|l| format!("  {l}\n")).collect() };
            Report {
                text: format!("differ under the {model} model on {shown}\nlhs {}:\n{}rhs {}:\n{}", lhs, block(&la), rhs, block(&lb)),
                json: json!({"equal": false, "model": model.to_string(), "env": shown, "lhs": la, "rhs": lb}),
                code: 1,
            }
        }
    })
}

fn litmus(u: &SourceUnit, fuel: usize) -> Result<Report, Failure> {
    let names: Vec<String> = u.threads().map(|t| t.name.clone()).collect();
    if names.is_empty() {
        return Err(fail("no threads"));
    }
    let mut threads = Vec::new();
    for t in u.threads() {
        let r = elaborate_region(&u.sig, &Ctx::new(), &t.body, &LabelCtx(vec![t.ty.clone()]))
            .map_err(|e| fail(format!("thread {}: {e}", t.name)))?;
        threads.push(r);
    }
    let model = TsoModel::new(fuel, ModelParams::default().prefix);
    let rep = run_litmus(&u.sig, &u.imp, &threads, &model, u.init()).map_err(fail)?;
    let allowed = rep.allowed();
    let mut text = String::from("allowed:\n");
    let mut outs = Vec::new();
    for vs in &allowed {
        let row: Vec<String> = names.iter().zip(vs).map(|(n, v)| format!("{n} = {v}")).collect();
        text.push_str(&format!("  {}\n", row.join(", ")));
        outs.push(json!(names.iter().zip(vs).map(|(n, v)| (n.clone(), json!(v.to_string()))).collect::<serde_json::Map<_, _>>()));
    }
    text.push_str(&format!("executions: {} valid, {} rejected, {} divergent\n", rep.valid.len(), rep.rejected, rep.diverged.len()));
    let mut ok = true;
    let mut posts = Vec::new();
    for p in u.posts() {
        let mut hits = Vec::new();
        for vs in &allowed {
            hits.push(p.cond.holds(&names, vs).map_err(fail)?);
        }
        let holds = match p.quant {
            Quant::Exists => hits.iter().any(|h| *h),
            Quant::Forall => hits.iter().all(|h| *h),
            Quant::Forbid => !hits.iter().any(|h| *h),
        };
        ok &= holds;
        text.push_str(&format!("{} {}: {}\n", p.quant, p.cond, if holds { "holds" } else { "fails" }));
        posts.push(json!({"condition": format!("{} {}", p.quant, p.cond), "holds": holds}));
    }
    Ok(Report {
        text,
        json: json!({
            "threads": names,
            "allowed": outs,
            "valid": rep.valid.len(),
            "rejected": rep.rejected,
            "diverged": rep.diverged.len(),
            "conditions": posts,
            "ok": ok,
        }),
        code: if ok { 0 } else { 1 },
    })
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let d = cli.word_domain;
    match &cli.cmd {
        Cmd::Check { file } => Ok(check(&load(file, d)?)),
        Cmd::Rewrite { file, script, program, verify } => rewrite(&load(file, d)?, script, program.clone(), *verify),
        Cmd::Normalize { file, pass, program } => normalize(&load(file, d)?, *pass, program.clone()),
        Cmd::Interpret { file, program, model, fuel, args, samples } => {
            interpret(&load(file, d)?, program.clone(), *model, *fuel, args.clone(), cli.seed, *samples)
        }
        Cmd::Equiv { lhs, rhs, model, fuel } => equiv(lhs, rhs, *model, *fuel, d),
        Cmd::Litmus { file, fuel } => litmus(&load(file, d)?, *fuel),
    }
}

fn command_name(c: &Cmd) -> &'static str {
    match c {
        Cmd::Check { .. } => "check",
        Cmd::Rewrite { .. } => "rewrite",
        Cmd::Normalize { .. } => "normalize",
        Cmd::Interpret { .. } => "interpret",
        Cmd::Equiv { .. } => "equiv",
        Cmd::Litmus { .. } => "litmus",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let style = Style { color: std::env::var("SSA_COLOR").is_ok_and(|v| !v.is_empty() && v != "0") };
    let command = command_name(&cli.cmd);
    match run(&cli) {
        Ok(rep) => {
            if cli.json {
                let mut body = json!({"schema_version": SCHEMA_VERSION, "command": command, "status": rep.code});
                if let (Json::Object(b), Json::Object(extra)) = (&mut body, rep.json) {
                    b.extend(extra);
                }
                println!("{body}");
            } else {
                print!("{}", rep.text);
                if rep.code != 0 {
                    eprintln!("{}", style.paint("31", "failed"));
                }
            }
            ExitCode::from(rep.code)
        }
        Err(f) => {
            if cli.json {
                let pos = f.pos.map(|(line, col)| json!({"line": line, "col": col}));
                println!(
                    "{}",
                    json!({"schema_version": SCHEMA_VERSION, "command": command, "status": f.code, "error": {"message": f.msg, "pos": pos}})
                );
            } else {
                eprintln!("{} {}", style.paint("31;1", "error:"), f.msg);
            }
            ExitCode::from(f.code)
        }
    }
}
