use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use layoutforge_core::io;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    run_env(args, None)
}

fn run_env(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_layoutforge"));
    cmd.args(args).env_remove("LAYOUTFORGE_SEED");
    if let Some(s) = seed_env {
        cmd.env("LAYOUTFORGE_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_minimal_spec_writes_layout_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let (out, svg) = (dir.path().join("layout.json"), dir.path().join("scene.svg"));
    let o = run(&["solve", s(&fixture("minimal.json")), "--out", s(&out), "--svg", s(&svg)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let layout = io::read_layout(&out).unwrap();
    assert!(layout.feasible);
    assert_eq!(layout.objects.len(), 1);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<polygon").count(), 2);
    assert!(text.contains(">desk</text>"));
}

#[test]
fn over_constrained_spec_exits_2_and_flags_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("layout.json");
    let o = run(&["solve", s(&fixture("overconstrained.json")), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let layout = io::read_layout(&out).unwrap();
    assert!(!layout.feasible);
    assert!(layout.objects.iter().all(|o| !o.feasible));
    assert!(layout.levels[0].total_violation > 0.0);
}

#[test]
fn snap_only_solve_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("anneal.json"), dir.path().join("oracle.json"));
    let spec = fixture("pair.json");
    let o = run(&["solve", s(&spec), "--snap-only", "--grid-step", "0.25", "--seed", "4", "--out", s(&a)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["oracle", s(&spec), "--grid-step", "0.25", "--out", s(&b)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let la = io::read_layout(&a).unwrap();
    let lb = io::read_layout(&b).unwrap();
    assert!((la.levels[0].objective - lb.levels[0].objective).abs() <= 1e-9);
}

#[test]
fn seed_precedence_flag_over_env() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("pair.json");
    let solve = |name: &str, flag: Option<&str>, env: Option<&str>| {
        let out = dir.path().join(name);
        let mut args = vec!["solve", s(&spec), "--max-evals", "3000", "--out", s(&out)];
        if let Some(f) = flag {
            args.extend(["--seed", f]);
        }
        let o = run_env(&args, env);
        assert!(o.status.success());
        std::fs::read(out).unwrap()
    };
    let flag7 = solve("a.json", Some("7"), None);
    let env7 = solve("b.json", None, Some("7"));
    let flag7_env3 = solve("c.json", Some("7"), Some("3"));
    let default = solve("d.json", None, None);
    let flag0 = solve("e.json", Some("0"), None);
    assert_eq!(flag7, env7);
    assert_eq!(flag7, flag7_env3);
    assert_eq!(default, flag0);
    assert_ne!(flag7, default);
}

#[test]
fn trace_and_traj_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("pair.json");
    let (layout, trace, track) = (dir.path().join("l.json"), dir.path().join("t.txt"), dir.path().join("k.txt"));
    let o = run(&["solve", s(&spec), "--max-evals", "2000", "--trace", s(&trace), "--out", s(&layout)]);
    assert!(o.status.success());
    let lines = std::fs::read_to_string(&trace).unwrap();
    assert!(lines.starts_with("# restart eval temperature current best\n"));
    assert!(lines.lines().count() > 1);

    let o = run(&["traj", s(&spec), "--command", "0", "--fps", "30", "--layout", s(&layout), "--out", s(&track)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&track).unwrap();
    assert!(text.starts_with("# subject=camera fps=30 frames=8\n"));
    assert_eq!(text.lines().count(), 9);

    let o = run(&["traj", s(&spec), "--command", "3", "--out", s(&track)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("out of range"));
}

#[test]
fn forge_run_then_lookup() {
    let dir = tempfile::tempdir().unwrap();
    let manual = dir.path().join("manual.jsonl");
    let task = fixture("legs_task.json");
    let o = run(&["forge", "run", "--task", s(&task), "--manual", s(&manual), "--max-iters", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("accepted after 2 attempt(s); committed"));
    let o = run(&["forge", "run", "--task", s(&task), "--manual", s(&manual), "--max-iters", "5"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("already in manual"));
    assert_eq!(std::fs::read_to_string(&manual).unwrap().lines().count(), 1);

    let o = run(&["forge", "lookup", "--manual", s(&manual), "--query", "table with four legs"]);
    assert!(o.status.success());
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("kitchen table with four legs\ttable\t"));
    assert!(out.contains("leg_count=4"));

    let o = run(&["forge", "run", "--task", s(&task), "--manual", s(&manual), "--max-iters", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_and_input_errors_exit_1() {
    let o = run(&["solve"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"version\": 1, \"domain\": {}}").unwrap();
    let o = run(&["solve", s(&bad), "--out", s(&dir.path().join("x.json"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}
