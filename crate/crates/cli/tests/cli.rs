use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn programs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs")
}

fn file(name: &str) -> String {
    programs().join(name).to_string_lossy().into_owned()
}

fn lssa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lssa")).args(args).env_remove("SSA_COLOR").output().expect("lssa runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("lssa-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn check_accepts_the_factorial_file() {
    let o = lssa(&["check", &file("fact.ssa")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("region fact_bba: ok"));
}

#[test]
fn every_factorial_variant_computes_ten_factorial() {
    for p in ["fact_bba", "fact_anf", "fact_subst", "fact_opt", "fact_rotated"] {
        let o = lssa(&["interpret", &file("fact.ssa"), "--program", p, "--model", "option", "--fuel", "64"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(stdout(&o), "exit ret 3628800\n", "{p}");
    }
}

#[test]
fn equiv_accepts_an_inlining_pair_and_rejects_a_broken_one() {
    let o = lssa(&["equiv", &file("beta-lhs.ssa"), &file("beta-rhs.ssa"), "--model", "powerset"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let bad = std::fs::read_to_string(file("beta-rhs.ssa")).unwrap().replace("succ succ x", "succ x");
    let bad = scratch("bad.ssa", &bad);
    let o = lssa(&["--json", "equiv", &file("beta-lhs.ssa"), &bad]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["equal"], false);
    assert_eq!(v["env"], "[0, 1]");
}

#[test]
fn store_buffering_admits_both_zero() {
    let o = lssa(&["--json", "litmus", &file("sb.tso")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let zero = serde_json::json!({"r1": "0", "r2": "0"});
    assert!(v["allowed"].as_array().unwrap().contains(&zero), "{v}");
}

#[test]
fn fences_forbid_both_zero() {
    let o = lssa(&["litmus", &file("sb-fence.tso")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("r1 = 0, r2 = 0"));
    let flipped = std::fs::read_to_string(file("sb-fence.tso")).unwrap().replace("forbid", "exists");
    let o = lssa(&["litmus", &scratch("sb-exists.tso", &flipped)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("exists r1 = 0 && r2 = 0: fails"));
}

#[test]
fn a_thread_reads_its_own_write() {
    let o = lssa(&["litmus", &file("own-write.tso")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("forall r1 = 1: holds"));
}

#[test]
fn rewrite_script_output_matches_the_substituted_program() {
    let o = lssa(&["rewrite", &file("fact.ssa"), "--script", &file("fact.rw")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = scratch("rewritten.ssa", &stdout(&o));
    let o = lssa(&["equiv", &format!("{out}:fact_anf"), &format!("{}:fact_subst", file("fact.ssa")), "--model", "option"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn normalize_output_reparses() {
    for pass in ["anf", "strict", "structured", "cfg-roundtrip"] {
        let o = lssa(&["normalize", &file("fact.ssa"), "--pass", pass]);
        assert_eq!(o.status.code(), Some(0), "{pass}: {}", stderr(&o));
        let out = scratch(&format!("{pass}.ssa"), &stdout(&o));
        let o = lssa(&["equiv", &format!("{out}:fact_bba"), &format!("{}:fact_bba", file("fact.ssa")), "--model", "option"]);
        assert_eq!(o.status.code(), Some(0), "{pass}: {}", stdout(&o));
    }
    let o = lssa(&["normalize", &file("fact.ssa"), "--pass", "cfg", "--program", "fact_opt"]);
    assert!(stdout(&o).starts_with("-- region fact_opt\nentry() -> [l0(word)]:"), "{}", stdout(&o));
}

#[test]
fn exit_codes_follow_the_contract() {
    let bad = scratch("bad-parse.ssa", "base a 2;\nregion f(x: a) -> a {\n  br nowhere x\n}\n");
    let o = lssa(&["check", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(":3:6: unbound label `nowhere`"), "{}", stderr(&o));
    let o = lssa(&["--json", "check", &bad]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["error"]["pos"]["line"], 3);
    let ill = scratch("ill.ssa", "base a 2;\nbase b 2;\nregion f(x: a) -> b { ret x }\n");
    assert_eq!(lssa(&["check", &ill]).status.code(), Some(1));
    assert_eq!(lssa(&["check", "/nonexistent/file.ssa"]).status.code(), Some(2));
    assert_eq!(lssa(&["interpret", &file("fact.ssa"), "--model", "quantum"]).status.code(), Some(2));
    assert_eq!(lssa(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn sampling_is_reproducible_from_the_seed() {
    let run = |seed: &str| stdout(&lssa(&["--seed", seed, "--word-domain", "300", "interpret", &file("beta-lhs.ssa"), "--model", "powerset", "--samples", "8"]));
    let a = run("7");
    assert!(a.starts_with("-- 8 sampled environments (seed 7)"), "{a}");
    assert_eq!(a, run("7"));
    assert_ne!(a, run("8"));
}

#[test]
fn color_only_when_requested() {
    let o = Command::new(env!("CARGO_BIN_EXE_lssa")).args(["check", "/nonexistent"]).env("SSA_COLOR", "1").output().unwrap();
    assert!(stderr(&o).contains("\x1b[31;1merror:"));
    assert!(!stderr(&lssa(&["check", "/nonexistent"])).contains('\x1b'));
}
