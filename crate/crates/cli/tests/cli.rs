use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("crkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn crkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crkit"))
        .args(args)
        .env_remove("CRKIT_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn report(args: &[&str]) -> (i32, Value) {
    let mut args = args.to_vec();
    args.push("--json");
    let out = crkit(&args);
    let v = serde_json::from_str(&stdout(&out)).expect("json report");
    (code(&out), v)
}

#[test]
fn amenability_exit_codes() {
    assert_eq!(code(&crkit(&["amenable", &data("tree.g")])), 0);
    let out = crkit(&["amenable", &data("c6.g"), "--witness", "--cross-check"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("violation: condition"), "{text}");
    assert!(text.contains("cross_check: agree"), "{text}");
}

#[test]
fn refinement_equivalent_but_not_isomorphic() {
    let (g, h) = (data("c3c4.g"), data("c7.g"));
    let (exit, v) = report(&["iso", &g, &h, "--transcript"]);
    assert_eq!(exit, 1);
    assert_eq!(v["verdicts"]["isomorphic"], false);
    assert_eq!(v["verdicts"]["rejection"], "histogram");
    assert_eq!(code(&crkit(&["fractiso", &g, &h])), 0);
    assert_eq!(code(&crkit(&["fractiso", &g, &data("tree.g")])), 1);
}

#[test]
fn iso_finds_a_relabeling() {
    let permuted = scratch("tree_perm.g");
    std::fs::write(
        &permuted,
        "p cgraph 7 6\ne 6 5\ne 6 4\ne 5 3\ne 5 2\ne 4 1\ne 4 0\n",
    )
    .unwrap();
    let p = permuted.display().to_string();
    for policy in ["det", "rand"] {
        let (exit, v) = report(&[
            "iso",
            &data("tree.g"),
            &p,
            "--policy",
            policy,
            "--seed",
            "7",
        ]);
        assert_eq!(exit, 0);
        assert_eq!(v["details"]["map"].as_array().unwrap().len(), 7);
    }
    let (_, a) = report(&["canon", &data("tree.g")]);
    let (_, b) = report(&["canon", &p]);
    assert_eq!(a["verdicts"]["hash"], b["verdicts"]["hash"]);
}

#[test]
fn compactness() {
    let out = crkit(&["compact", &data("c3c4.g"), "--trials", "100", "--witness"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("1/4"));
    let (exit, v) = report(&["compact", &data("tree.g")]);
    assert_eq!(exit, 0);
    assert_eq!(v["verdicts"]["compact"], "theorem");
    let (exit, v) = report(&["compact", &data("c6.g"), "--trials", "20"]);
    assert_eq!(exit, 0);
    assert_eq!(v["verdicts"]["compact"], "no-counterexample-found");
}

#[test]
fn report_layout() {
    let raw = stdout(&crkit(&["refine", &data("tree.g"), "--trace", "--json"]));
    let at: Vec<usize> = [
        "command",
        "input_digest",
        "seed",
        "version",
        "verdicts",
        "details",
        "timings_ms",
    ]
    .iter()
    .map(|k| raw.find(&format!("\n  \"{k}\"")).expect(k))
    .collect();
    assert!(at.windows(2).all(|w| w[0] < w[1]), "{raw}");
    let (exit, v) = report(&["refine", &data("tree.g"), "--trace"]);
    assert_eq!(exit, 0);
    assert_eq!(v["command"], "refine");
    assert_eq!(v["verdicts"]["classes"], 3);
    assert_eq!(v["details"]["round_sizes"][1].as_array().unwrap().len(), 3);
    assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_crkit"))
        .args(["classify", &data("c6.g"), "--json"])
        .env("CRKIT_SEED", "41")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 41);
    assert_eq!(v["verdicts"]["amenable"], false);
    assert_eq!(v["verdicts"]["godsil"], true);
    assert_eq!(v["verdicts"]["aut_order"], 12);
}

#[test]
fn deterministic_output() {
    let args = [
        "compact",
        &data("c3c4.g"),
        "--trials",
        "100",
        "--witness",
        "--seed",
        "3",
    ];
    let (_, mut a) = report(&args);
    let (_, mut b) = report(&args);
    a["timings_ms"] = Value::Null;
    b["timings_ms"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn usage_and_parse_errors() {
    assert_eq!(code(&crkit(&["frobnicate"])), 2);
    assert_eq!(code(&crkit(&["refine", "/nonexistent/graph.g"])), 2);
    let bad = scratch("bad.g");
    std::fs::write(&bad, "p cgraph 3 1\ne 0 5\n").unwrap();
    let out = crkit(&["refine", &bad.display().to_string()]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
    assert_eq!(
        code(&crkit(&["reduce", &data("circuit.txt"), "--variant", "H"])),
        2
    );
}

#[test]
fn budget_exceeded() {
    assert_eq!(code(&crkit(&["sweep", "6", "--budget-ms", "1"])), 3);
}

#[test]
fn reduction_output_round_trips() {
    for variant in ["G", "Gp", "Gpp"] {
        let path = scratch(&format!("reduced_{variant}.g"));
        let p = path.display().to_string();
        let (exit, v) = report(&[
            "reduce",
            &data("circuit.txt"),
            "--variant",
            variant,
            "-o",
            &p,
        ]);
        assert_eq!(exit, 0);
        assert_eq!(v["verdicts"]["circuit_value"], true);
        let text = std::fs::read_to_string(&path).unwrap();
        let g = crkit::io::load(&text).unwrap();
        assert_eq!(crkit::io::save(&g), text);
        assert_eq!(v["verdicts"]["vertices"], g.n());
    }
}

#[test]
fn cell_graph_layouts() {
    let out = stdout(&crkit(&["cellgraph", &data("tree.g")]));
    assert!(out.contains("cell 0: empty degree 0 size 4"), "{out}");
    assert!(out.contains("component"));
    let dot = stdout(&crkit(&["cellgraph", &data("tree.g"), "--dot"]));
    assert!(dot.starts_with("graph cells {"));
    assert!(dot.contains("style=dashed"));
}

#[test]
fn sweeps() {
    let (exit, v) = report(&["sweep", "4"]);
    assert_eq!(exit, 0);
    assert_eq!(v["verdicts"]["inclusion_violations"], 0);
    assert_eq!(v["details"]["labeled"]["total"], 64);
    let (exit, v) = report(&["classify", "--all-n", "3"]);
    assert_eq!(exit, 0);
    assert_eq!(v["details"]["classes"]["total"], 4);
}

#[test]
fn bench_reports_timings() {
    let (exit, v) = report(&[
        "bench", "refine", "--n", "2000", "--m", "10000", "--reps", "2",
    ]);
    assert_eq!(exit, 0);
    assert!(v["timings_ms"]["best"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["details"]["runs_ms"].as_array().unwrap().len(), 2);
}
