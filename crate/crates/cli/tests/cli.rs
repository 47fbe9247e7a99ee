use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_mqc-lab");

fn run(args: &[&str]) -> Output {
    run_with_threads(args, None)
}

fn run_with_threads(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("MQC_LAB_THREADS");
    if let Some(t) = threads {
        cmd.env("MQC_LAB_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        )
    })
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ghz_rank_width_fails_universality() {
    let o = run(&["analyze", "--family", "ghz", "--sizes", "3..7"]);
    assert_eq!(code(&o), 2);
    let r = json(&o);
    assert_eq!(r["overall"], "fails-universality");
    let v = &r["verdicts"][0];
    assert_eq!(v["measure"], "rank_width");
    assert_eq!(v["fit_class"], "bounded");
    assert!(v["values"]
        .as_array()
        .unwrap()
        .iter()
        .all(|x| x["value"] == 1.0));
}

#[test]
fn grid_rank_width_is_consistent_and_csv_has_one_row_per_size() {
    let o = run(&[
        "analyze", "--family", "grid", "--sizes", "2..4", "--format", "csv",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "{text}");
    assert!(lines[0].starts_with("family,size,qubits,measure,value,"));
    let values: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(4).unwrap())
        .collect();
    assert_eq!(values, ["1.0", "2.0", "3.0"], "{text}");
}

#[test]
fn w_state_measures_and_plot_data() {
    let dir = TempDir::new().unwrap();
    let plot = dir.path().join("plot.txt");
    let out = dir.path().join("report.json");
    let o = run(&[
        "analyze",
        "--family",
        "w",
        "--sizes",
        "2..5",
        "--measures",
        "geometric_measure,entanglement_width",
        "--emit-plot-data",
        path_str(&plot),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    // rows come sorted by size, then measure name
    let order: Vec<(u64, &str)> = r["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| (x["size"].as_u64().unwrap(), x["measure"].as_str().unwrap()))
        .collect();
    assert_eq!(order[0], (2, "entanglement_width"));
    assert_eq!(order[1], (2, "geometric_measure"));
    assert_eq!(order.len(), 8);
    let plot = std::fs::read_to_string(&plot).unwrap();
    assert!(plot.contains("# w geometric_measure"));
    let points = plot
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .count();
    assert_eq!(points, 8);
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["analyze", "--family", "grid", "--sizes", "5..2"][..],
        &["analyze", "--family", "ring", "--sizes", "2..4"],
        &["analyze", "--family", "grid"],
        &["analyze", "--family", "nonsense", "--sizes", "2..3"],
        &["verify-protocol", "cnot", "--extent", "0x"],
        &["no-such-command"],
    ] {
        assert_eq!(code(&run(args)), 64, "{args:?}");
    }
    let o = run_with_threads(
        &["analyze", "--family", "ghz", "--sizes", "2..3"],
        Some("0"),
    );
    assert_eq!(code(&o), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn reports_are_identical_across_runs_and_thread_counts() {
    let cases: [&[&str]; 3] = [
        &[
            "analyze",
            "--family",
            "w",
            "--sizes",
            "2..5",
            "--measures",
            "geometric_measure,schmidt_rank_width",
            "--seed",
            "3",
        ],
        &[
            "verify-protocol",
            "hex-to-square",
            "--extent",
            "2",
            "--seed",
            "5",
        ],
        &[
            "verify-protocol",
            "euler-rotation",
            "--trials",
            "4",
            "--seed",
            "5",
        ],
    ];
    for args in cases {
        let a = run_with_threads(args, Some("1"));
        let b = run_with_threads(args, Some("4"));
        let c = run_with_threads(args, Some("4"));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(b.stdout, c.stdout, "{args:?}");
    }
}

#[test]
fn conversion_protocol_passes_and_reports_overhead() {
    let o = run(&["verify-protocol", "hex-to-square", "--extent", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = json(&o);
    assert_eq!(r["passed"], true);
    let conv = &r["result"];
    assert_eq!(conv["stages"].as_array().unwrap().len(), 3);
    assert!(conv["overhead"]["hexagon_ratio"].as_f64().unwrap() > 1.0);
}

#[test]
fn gate_protocols_pass() {
    for p in ["euler-rotation", "bridge-cz"] {
        let o = run(&["verify-protocol", p, "--trials", "3"]);
        assert_eq!(code(&o), 0, "{p}");
        assert_eq!(json(&o)["result"]["trials"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn bellpair_on_a_chain_and_on_disconnected_vertices() {
    let dir = TempDir::new().unwrap();
    let path4 = write(&dir, "path4.edges", "4\n0 1\n1 2\n2 3\n");
    let o = run(&["bellpair", &path4, "0", "3"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["pattern_text"], "Y1 Y2");
    assert_eq!(r["e_bell"], 1.0);
    assert_eq!(r["passed"], true);

    let split = write(&dir, "two.edges", "6\n0 1\n1 2\n3 4\n4 5\n");
    let o = run(&["bellpair", &split, "0", "5"]);
    assert_eq!(code(&o), 2);
    let r = json(&o);
    assert_eq!(r["e_bell"], 0.0);
    assert_eq!(r["connected"], false);
    assert!(r["certificate"].is_string());

    assert_eq!(code(&run(&["bellpair", &path4, "0", "9"])), 64);
    let missing = dir.path().join("missing.edges");
    assert_eq!(code(&run(&["bellpair", path_str(&missing), "0", "1"])), 64);
}

#[test]
fn transform_writes_the_rewritten_graph() {
    let dir = TempDir::new().unwrap();
    let path4 = write(&dir, "path4.edges", "4\n0 1\n1 2\n2 3\n");
    let out = dir.path().join("out.edges");
    let o = run(&[
        "transform",
        &path4,
        "--ops",
        "Y1,Z3",
        "--graph-out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["passed"], true);
    assert_eq!(r["statevec_checked"], true);
    assert_eq!(r["labels"], serde_json::json!([0, 2]));
    let written = std::fs::read_to_string(&out).unwrap();
    let edges: Vec<&str> = written.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(edges, ["2", "0 1"]);
    // an absent qubit, and a Y that the frame turns into an X on the graph, are refused
    assert_eq!(code(&run(&["transform", &path4, "--ops", "Z7"])), 64);
    assert_eq!(code(&run(&["transform", &path4, "--ops", "Y1,Y2"])), 64);
}

const WIRE: &str = r#"{
  "steps": [{"qubit": 0, "basis": {"type": "x"}}, {"qubit": 1, "basis": {"type": "x"}}],
  "outputs": [2],
  "byproducts": [{"qubit": 2, "x_domain": [1], "z_domain": [0]}]
}"#;

#[test]
fn pattern_run_checks_determinism() {
    let dir = TempDir::new().unwrap();
    let graph = write(&dir, "p3.edges", "3\n0 1\n1 2\n");
    let good = write(&dir, "wire.json", WIRE);
    let o = run(&["pattern-run", &good, "--graph", &graph]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["branches"].as_array().unwrap().len(), 4);
    assert_eq!(r["deterministic"], true);

    let bad = write(
        &dir,
        "bad.json",
        &WIRE.replace(r#"[{"qubit": 2, "x_domain": [1], "z_domain": [0]}]"#, "[]"),
    );
    let o = run(&["pattern-run", &bad, "--graph", &graph, "--format", "csv"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .starts_with("outcomes,probability,fidelity_to_first"));
}

#[test]
fn encode_analyze_matches_unencoded_measures() {
    let o = run(&[
        "encode-analyze",
        "--family",
        "linear_cluster",
        "--sizes",
        "2..3",
        "--encoding",
        "w",
        "--m",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["passed"], true);
    assert!(r["max_difference"].as_f64().unwrap() < 1e-9);
    let x = r["logical_paulis"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["pauli"] == "X")
        .unwrap();
    assert_ne!(x["locality"], "local");
}
