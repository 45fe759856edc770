use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lorentzcert"));
    for var in [
        "LORENTZCERT_Q_GRID",
        "LORENTZCERT_MODE",
        "LORENTZCERT_SEED",
        "LORENTZCERT_TOL",
        "LORENTZCERT_CAP",
    ] {
        c.env_remove(var);
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lorentzcert-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_is_deterministic_and_convert_is_idempotent() {
    let dir = scratch("gen");
    let a = run(&["--seed", "7", "gen", "murota", "--n", "4", "--d", "2"]);
    let b = run(&["--seed", "7", "gen", "murota", "--n", "4", "--d", "2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let src = dir.join("m.json");
    std::fs::write(&src, &a.stdout).unwrap();
    let once = dir.join("once.json");
    let twice = dir.join("twice.json");
    assert!(run(&["convert", path_str(&src), path_str(&once)])
        .status
        .success());
    assert!(run(&["convert", path_str(&once), path_str(&twice)])
        .status
        .success());
    assert_eq!(
        std::fs::read(&once).unwrap(),
        std::fs::read(&twice).unwrap()
    );
}

#[test]
fn validate_reports_exchange_witness() {
    let dir = scratch("validate");
    let f = dir.join("f.json");
    // ν(S) = 0 except ν({0,1}) = 1, which breaks the exchange property.
    std::fs::write(
        &f,
        r#"{"n": 2, "default": "0", "values": [{"set": [0, 1], "v": "1"}]}"#,
    )
    .unwrap();
    let o = run(&["validate", path_str(&f)]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["kind"], "setfn");
    assert_eq!(v["mnat_concave"], false);
    assert!(v["witness"].is_object());
}

#[test]
fn pinned_converse_example_fails_at_one_half() {
    let dir = scratch("converse");
    let f = dir.join("nu12.json");
    std::fs::write(
        &f,
        r#"{"n": 2, "default": "0", "values": [{"set": [0, 1], "v": "1"}]}"#,
    )
    .unwrap();
    let o = run(&[
        "--q-grid",
        "1/2",
        "check",
        "thm_qlorentzian_converse",
        path_str(&f),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let cells = stdout_json(&o);
    let cell = &cells[0];
    assert_eq!(cell["status"], "xfail");
    assert_eq!(cell["witness"]["inertia"]["n_pos"], 2);
}

#[test]
fn tree_commands() {
    let dir = scratch("tree");
    let t = dir.join("star.json");
    std::fs::write(
        &t,
        r#"{"root": 3, "edges": [[3, 0, "1"], [3, 1, "1"], [3, 2, "1"]]}"#,
    )
    .unwrap();
    let ct = run(&["ct", path_str(&t)]);
    assert!(ct.status.success());
    let v = stdout_json(&ct);
    assert_eq!(v["interval"]["exact"], "2/3");

    let cert = run(&["certify", "tree-psd", path_str(&t)]);
    assert!(cert.status.success());
    let v = stdout_json(&cert);
    assert_eq!(v["a_matrix"]["psd"], true);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = scratch("errors");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"values\": {").unwrap();
    let o = run(&["validate", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    assert_eq!(
        run(&["suite", "--claims", "no_such_claim"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["--q-grid", "3/2", "suite", "--small"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["gen", "tree", "--leaves", "1000"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["gen", "uniform", "--n", "4"]).status.code(), Some(2));
}

#[test]
fn empty_claim_list_produces_empty_report() {
    let o = run(&["suite", "--claims", ""]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o), serde_json::json!([]));
}

#[test]
fn small_suite_passes_and_is_reproducible() {
    let args = [
        "--seed",
        "3",
        "suite",
        "--small",
        "--claims",
        "thm_psd,lemma_ultra,cor_partition,pak_counterexample",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    assert_eq!(a.stdout, b.stdout);
}
