use std::path::PathBuf;
use std::process::{Command, Stdio};

use std::io::Write;

fn run(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut input = stdin.as_bytes();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("exobasis").chain(args.iter().copied());
    let code = exobasis::cli::run(argv, &mut input, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str], stdin: &str) -> String {
    let (code, out, err) = run(args, stdin);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

fn temp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("exobasis-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn completed_odd(j: &str) -> String {
    let omega = ok(&["gallery", "example_2_11", "--J", j], "");
    ok(&["complete", "--n", "2", "--v", "1", "--k", "2"], &omega)
}

#[test]
fn binary_pipeline_reports_subtile() {
    let bin = env!("CARGO_BIN_EXE_exobasis");
    let gallery = Command::new(bin)
        .args(["gallery", "example_2_11", "--J", "20"])
        .output()
        .unwrap();
    assert!(gallery.status.success());
    let mut check = Command::new(bin)
        .arg("check-tile")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    check.stdin.take().unwrap().write_all(&gallery.stdout).unwrap();
    let done = check.wait_with_output().unwrap();
    assert_eq!(done.status.code(), Some(0));
    let text = String::from_utf8(done.stdout).unwrap();
    assert!(text.contains("level SubTile(2)"), "{text}");
    assert!(text.contains("multiplicity 1: 1/1048576"), "{text}");
}

#[test]
fn binary_exit_code_on_bad_input() {
    let bin = env!("CARGO_BIN_EXE_exobasis");
    let mut child = Command::new(bin)
        .arg("check-tile")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"{\"lattice\": [}").unwrap();
    let done = child.wait_with_output().unwrap();
    assert_eq!(done.status.code(), Some(2));
    assert!(done.stdout.is_empty());
    let err = String::from_utf8(done.stderr).unwrap();
    assert!(err.contains("line 1, column"), "{err}");
}

#[test]
fn search_on_consecutive_translates_finds_nothing() {
    let omega = ok(&["gallery", "example_2_10", "--J", "50"], "");
    let (code, out, _) = run(&["admissible", "search", "--n-max", "50", "--v-height", "50"], &omega);
    assert_eq!(code, 1);
    assert_eq!(out.trim(), "none within bounds (n_max=50, v_height=50)");
}

#[test]
fn search_on_odd_translates() {
    let omega = ok(&["gallery", "example_2_11", "--J", "12"], "");
    let out = ok(&["--json", "admissible", "search"], &omega);
    assert_eq!(json(&out), json(r#"{"n": 2, "v": [1]}"#));
}

#[test]
fn check_reports_violations() {
    let omega = ok(&["gallery", "example_2_10", "--J", "3"], "");
    let (code, out, _) = run(&["--json", "admissible", "check", "--n", "2", "--v", "1"], &omega);
    assert_eq!(code, 1);
    let v = json(&out);
    let vs = v["violations"].as_array().unwrap();
    assert_eq!(vs.len(), 1);
    assert_eq!(vs[0]["points"], json("[[0], [2]]"));
    assert_eq!(vs[0]["residue"], 0);
    let (code, out, _) = run(&["admissible", "check", "--n", "2", "--v", "-1"], &ok(&["gallery", "example_2_11"], ""));
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "Valid n=2 v=(-1)");
}

#[test]
fn basis_on_completed_set() {
    let delta = completed_odd("10");
    let out = ok(&["build-basis", "--n", "2", "--v", "1", "--k", "2"], &delta);
    assert!(out.contains("A 2.00000000000\n"), "{out}");
    assert!(out.contains("B 2.00000000000\n"), "{out}");
    assert!(out.contains("kind RieszBounds\n"), "{out}");
    let doc = json(&ok(&["--json", "build-basis", "--n", "2", "--v", "1", "--k", "2"], &delta));
    assert_eq!(doc["schema"], "exobasis/1");
    assert_eq!(doc["A"], 2.0);
    assert_eq!(doc["B_L2"], 2.0);
    assert_eq!(doc["kind"], "RieszBounds");
    assert_eq!(doc["classes"].as_array().unwrap().len(), 11);
    assert_eq!(doc["offsets"][1]["a"], json("[0.5]"));
}

#[test]
fn bounds_csv_written() {
    let path = temp_path("bounds.csv");
    let delta = completed_odd("3");
    ok(
        &["build-basis", "--n", "2", "--v", "1", "--k", "2", "--csv", path.to_str().unwrap()],
        &delta,
    );
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("class,size,points,residues,eig_min,eig_max"));
    assert_eq!(lines.next(), Some("0,2,0;3,0;1,2.00000000000,2.00000000000"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn degenerate_system_exits_one() {
    let tile = ok(&["gallery", "box", "--k", "2"], "");
    let (code, out, _) = run(&["build-basis", "--n", "4", "--v", "2", "--s", "0,2"], &tile);
    assert_eq!(code, 1);
    assert!(out.contains("kind Degenerate"), "{out}");
}

#[test]
fn composite_warning_on_stderr() {
    let tile = ok(&["gallery", "box", "--k", "2"], "");
    let (code, _, err) = run(&["build-basis", "--n", "4", "--v", "1", "--s", "0,2"], &tile);
    assert_eq!(code, 0);
    assert!(err.contains("composite"), "{err}");
}

#[test]
fn free_offsets() {
    let tile = ok(&["gallery", "box", "--k", "2"], "");
    let out = ok(&["--json", "build-basis", "--free", "0", "--free", "0.5"], &tile);
    let doc = json(&out);
    assert!((doc["A"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let (code, _, err) = run(&["build-basis", "--free", "0,1"], &tile);
    assert_eq!(code, 2);
    assert!(err.contains("dimension mismatch"), "{err}");
}

#[test]
fn completion_dry_run_and_result() {
    let omega = ok(&["gallery", "example_2_11", "--J", "3"], "");
    let out = ok(&["complete", "--n", "2", "--v", "1", "--k", "2", "--dry-run"], &omega);
    assert_eq!(out, "class 3 [7/8, 1): + (-1) residue 1\n");
    let doc = json(&ok(&["--json", "complete", "--n", "2", "--v", "1", "--k", "2", "--dry-run"], &omega));
    assert_eq!(doc["additions"][0]["point"], json("[-1]"));
    let delta = ok(&["complete", "--n", "2", "--v", "1", "--k", "2"], &omega);
    assert!(ok(&["check-tile"], &delta).contains("level ExactTile(2)"));
    let (code, _, err) = run(&["complete", "--n", "2", "--v", "1", "--k", "2"], &ok(&["gallery", "example_2_10", "--J", "3"], ""));
    assert_eq!(code, 1);
    assert!(err.contains("not valid"), "{err}");
}

#[test]
fn partition_export() {
    let omega = ok(&["gallery", "example_2_10", "--J", "2"], "");
    let doc = json(&ok(&["partition"], &omega));
    assert_eq!(doc["schema"], "exobasis/1");
    assert_eq!(doc["classes"][0]["points"], json("[[0], [1]]"));
    assert_eq!(doc["uncovered"]["boxes"], json("[]"));
}

#[test]
fn check_tile_json() {
    let omega = ok(&["gallery", "example_2_11", "--J", "2"], "");
    let doc = json(&ok(&["--json", "check-tile"], &omega));
    assert_eq!(doc["level"], "SubTile(2)");
    assert_eq!(doc["measure"], "7/4");
    assert_eq!(doc["histogram"], json(r#"[{"multiplicity": 1, "measure": "1/4"}, {"multiplicity": 2, "measure": "3/4"}]"#));
}

#[test]
fn input_from_file() {
    let path = temp_path("set.json");
    std::fs::write(&path, ok(&["gallery", "box", "--k", "3", "--dim", "2"], "")).unwrap();
    let out = ok(&["check-tile", path.to_str().unwrap()], "");
    assert!(out.contains("level ExactTile(3)"), "{out}");
    let (code, _, err) = run(&["check-tile", "/nonexistent/set.json"], "");
    assert_eq!(code, 2);
    assert!(err.starts_with("error: /nonexistent/set.json"), "{err}");
}

#[test]
fn malformed_json_diagnostics() {
    let (code, out, err) = run(&["check-tile"], "{\n  \"lattice\": {\"dim\": 1, \"basis\": [[\"1\"]]},\n  \"pieces\": [,]\n}");
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("line 3, column 14"), "{err}");
}

#[test]
fn seeds_are_mandatory_and_deterministic() {
    let delta = completed_odd("6");
    let (code, _, err) = run(&["verify", "rayleigh", "--n", "2", "--v", "1", "--k", "2"], &delta);
    assert_eq!(code, 2);
    assert!(err.contains("--seed"), "{err}");
    let args = ["--json", "verify", "rayleigh", "--n", "2", "--v", "1", "--k", "2", "--seed", "9", "--trials", "8", "--m", "256"];
    let first = ok(&args, &delta);
    assert_eq!(first, ok(&args, &delta));
    assert_eq!(json(&first)["pass"], true);
}

#[test]
fn verify_subcommands_pass_on_completed_set() {
    let delta = completed_odd("8");
    let base = ["--n", "2", "--v", "1", "--k", "2"];
    let parseval: Vec<&str> = ["verify", "parseval"].into_iter().chain(base).chain(["--seed", "1", "--trials", "4"]).collect();
    assert!(ok(&parseval, &delta).ends_with("PASS\n"));
    let gram: Vec<&str> = ["verify", "gram"].into_iter().chain(base).chain(["--radius", "3"]).collect();
    let out = ok(&gram, &delta);
    assert!(out.starts_with("window 14 m 512\n"), "{out}");
    let path = temp_path("trials.csv");
    let rayleigh: Vec<&str> = ["verify", "rayleigh"]
        .into_iter()
        .chain(base)
        .chain(["--seed", "2", "--trials", "5", "--csv", path.to_str().unwrap()])
        .collect();
    ok(&rayleigh, &delta);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().next(), Some("trial,quotient,lower,upper"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn tight_tolerance_fails() {
    let tile = ok(&["gallery", "box", "--k", "2"], "");
    // a negative tolerance makes the sandwich unsatisfiable
    let (code, out, _) = run(
        &["verify", "gram", "--n", "3", "--v", "1", "--k", "2", "--tol=-1"],
        &tile,
    );
    assert_eq!(code, 1);
    assert!(out.ends_with("FAIL\n"), "{out}");
}

#[test]
fn kronecker_verification() {
    let out = ok(&["verify", "kronecker", "--J", "4", "--m-max", "100000"], "");
    assert!(out.ends_with("PASS\n"), "{out}");
    let (code, _, err) = run(&["verify", "kronecker", "--J", "2", "--eps", "0.0001", "--m-max", "3"], "");
    assert_eq!(code, 1);
    assert!(err.contains("Kronecker search failed"), "{err}");
}

#[test]
fn gallery_kronecker_sets() {
    // n_1 = n_2 = -376 here, so two intervals share a translate and one piece
    let omega = ok(&["gallery", "kronecker", "--J", "3", "--m-max", "100000"], "");
    let doc = json(&omega);
    assert_eq!(doc["pieces"].as_array().unwrap().len(), 3);
    let report = json(&ok(&["--json", "check-tile"], &omega));
    assert_eq!(report["measure"], "15/8");
    assert_eq!(report["level"], "SubTile(2)");
    let done = ok(&["gallery", "kronecker_completed", "--J", "3", "--m-max", "100000"], "");
    assert!(ok(&["check-tile"], &done).contains("ExactTile(2)"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["gallery", "nonsense"], "").0, 2);
    assert_eq!(run(&["build-basis", "--n", "2", "--v", "1", "--k", "2", "--s", "0,1"], "").0, 2);
    let tile = ok(&["gallery", "box"], "");
    let (code, _, err) = run(&["build-basis", "--n", "2", "--v", "1", "--k", "3"], &tile);
    assert_eq!(code, 2);
    assert!(err.contains("exceeds"), "{err}");
}
