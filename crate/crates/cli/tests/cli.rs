//! End-to-end CLI tests: exit codes, output contracts and determinism,
//! exercised through the real binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qplex::backends::mock::MockProvider;
use qplex::circuits::parse_qasm3;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_qplex")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn solve_exact_knapsack() {
    let model = fixture("knapsack.json");
    let output = run(&["solve", model.to_str().unwrap(), "--backend", "exact"]);
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("status: optimal"), "{text}");
    assert!(text.contains("x0 = 0"), "{text}");
    assert!(text.contains("x1 = 1"), "{text}");
    assert!(text.contains("objective: 4"), "{text}");
}

#[test]
fn solve_simulator_matches_exact_backend() {
    let model = fixture("knapsack.json");
    let output = run(&[
        "solve",
        model.to_str().unwrap(),
        "--backend",
        "simulator",
        "--algorithm",
        "qaoa",
        "--p",
        "1",
        "--shots",
        "0",
        "--seed",
        "7",
    ]);
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("x0 = 0"), "{text}");
    assert!(text.contains("x1 = 1"), "{text}");
}

#[test]
fn solve_unknown_backend_lists_registered() {
    let model = fixture("knapsack.json");
    let output = run(&["solve", model.to_str().unwrap(), "--backend", "nosuch"]);
    assert_eq!(exit_code(&output), 3);
    let message = stderr(&output);
    for name in ["annealer-sim", "exact", "mock-remote", "simulator"] {
        assert!(message.contains(name), "{message}");
    }
}

#[test]
fn solve_infeasible_model_exits_4() {
    let model = fixture("infeasible.json");
    let output = run(&["solve", model.to_str().unwrap(), "--backend", "exact"]);
    assert_eq!(exit_code(&output), 4, "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("status: infeasible"));
}

#[test]
fn solve_rejects_malformed_model() {
    let dir = std::env::temp_dir().join("qplex-cli-bad-model");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let output = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr(&output).contains("malformed model JSON"));
}

#[test]
fn solve_missing_file_exits_2() {
    let output = run(&["solve", "/nonexistent/model.json"]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn json_output_is_parseable_and_deterministic() {
    let model = fixture("knapsack.json");
    let args = [
        "solve",
        model.to_str().unwrap(),
        "--backend",
        "simulator",
        "--algorithm",
        "qaoa",
        "--shots",
        "0",
        "--seed",
        "3",
        "--output",
        "json",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(exit_code(&first), 0, "stderr: {}", stderr(&first));
    assert_eq!(first.stdout, second.stdout, "seeded runs must be byte-identical");
    let parsed: serde_json::Value = serde_json::from_str(stdout(&first).trim()).unwrap();
    assert_eq!(parsed["status"], "feasible");
    assert_eq!(parsed["assignment"]["x1"], 1.0);
}

#[test]
fn cobyla_alias_notes_substitution() {
    let model = fixture("knapsack.json");
    let output = run(&[
        "solve",
        model.to_str().unwrap(),
        "--backend",
        "simulator",
        "--algorithm",
        "vqe",
        "--shots",
        "0",
        "--optimizer",
        "cobyla",
    ]);
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr(&output));
    assert!(stderr(&output).contains("nelder-mead"), "{}", stderr(&output));
}

#[test]
fn convert_writes_qubo_document() {
    let dir = std::env::temp_dir().join("qplex-cli-convert");
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("knapsack.qubo.json");
    let model = fixture("knapsack.json");
    let output = run(&[
        "convert",
        model.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("5 bits"));
    assert!(stdout(&output).contains("penalty 8"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["n"], 5);
    assert_eq!(doc["penalty"], 8.0);
    assert_eq!(doc["encodings"].as_array().unwrap().len(), 3);
}

#[test]
fn convert_single_binary_has_empty_quadratic() {
    let dir = std::env::temp_dir().join("qplex-cli-convert-single");
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("single.qubo.json");
    let model = fixture("single.json");
    let output = run(&[
        "convert",
        model.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["n"], 1);
    assert_eq!(doc["quadratic"].as_array().unwrap().len(), 0);
}

#[test]
fn convert_rejects_continuous_variables() {
    let model = fixture("continuous.json");
    let output = run(&["convert", model.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr(&output).contains("\"w\""), "{}", stderr(&output));
}

#[test]
fn emit_round_trips_and_validates_param_count() {
    let dir = std::env::temp_dir().join("qplex-cli-emit");
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("knapsack.qasm");
    let model = fixture("knapsack.json");

    let output = run(&[
        "emit",
        model.to_str().unwrap(),
        "--algorithm",
        "qaoa",
        "--p",
        "1",
        "--params",
        "0,0",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr(&output));
    let text = std::fs::read_to_string(&out).unwrap();
    parse_qasm3(&text).expect("emitted file parses");

    let bad = run(&[
        "emit",
        model.to_str().unwrap(),
        "--algorithm",
        "qaoa",
        "--p",
        "1",
        "--params",
        "0,0,1",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&bad), 1);
}

#[test]
fn emit_is_deterministic_per_seed() {
    let dir = std::env::temp_dir().join("qplex-cli-emit-seeded");
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.qasm");
    let b = dir.join("b.qasm");
    let model = fixture("knapsack.json");
    for (path, _) in [(&a, 0), (&b, 1)] {
        let output = run(&[
            "emit",
            model.to_str().unwrap(),
            "--algorithm",
            "vqe",
            "--depth",
            "2",
            "--seed",
            "11",
            "-o",
            path.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&output), 0, "stderr: {}", stderr(&output));
    }
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "same seed must emit identical bytes"
    );
}

#[test]
fn devices_table_marks_selection() {
    let provider = MockProvider::builder().start();
    let output = Command::new(binary())
        .args([
            "devices",
            "--provider-url",
            provider.url(),
            "--require",
            "15",
        ])
        .env("QPLEX_MOCK-REMOTE_TOKEN", provider.token())
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr(&output));
    let text = stdout(&output);
    // Only mock-gate-b (24 qubits) qualifies for 15; the annealer has
    // more qubits but select_device sees the full list here.
    assert!(text.contains("mock-gate-a"), "{text}");
    let selected_line = text
        .lines()
        .find(|line| line.contains("<- selected"))
        .expect("a device is marked");
    assert!(selected_line.contains("mock-annealer"), "{selected_line}");
}

#[test]
fn devices_json_round_trips() {
    let provider = MockProvider::builder().start();
    let output = Command::new(binary())
        .args([
            "devices",
            "--provider-url",
            provider.url(),
            "--output",
            "json",
        ])
        .env("QPLEX_MOCK-REMOTE_TOKEN", provider.token())
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr(&output));
    let doc: serde_json::Value = serde_json::from_str(stdout(&output).trim()).unwrap();
    assert_eq!(doc["devices"].as_array().unwrap().len(), 3);
}

#[test]
fn devices_without_token_exits_3() {
    let provider = MockProvider::builder().start();
    let output = Command::new(binary())
        .args(["devices", "--provider-url", provider.url()])
        .env_remove("QPLEX_MOCK-REMOTE_TOKEN")
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 3);
    assert!(
        stderr(&output).contains("QPLEX_MOCK-REMOTE_TOKEN"),
        "{}",
        stderr(&output)
    );
}

#[test]
fn devices_unreachable_provider_exits_3() {
    let output = Command::new(binary())
        .args(["devices", "--provider-url", "http://127.0.0.1:1"])
        .env("QPLEX_MOCK-REMOTE_TOKEN", "token")
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 3);
}

#[test]
fn devices_empty_list_exits_3() {
    let provider = MockProvider::builder().devices(Vec::new()).start();
    let output = Command::new(binary())
        .args(["devices", "--provider-url", provider.url()])
        .env("QPLEX_MOCK-REMOTE_TOKEN", provider.token())
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 3);
    assert!(stderr(&output).contains("no devices"), "{}", stderr(&output));
}

#[test]
fn solve_through_mock_remote_backend() {
    let provider = MockProvider::builder().pending_polls(1).start();
    let model = fixture("knapsack.json");
    let output = Command::new(binary())
        .args([
            "solve",
            model.to_str().unwrap(),
            "--backend",
            "mock-remote",
            "--algorithm",
            "annealing",
            "--num-reads",
            "50",
            "--provider-url",
            provider.url(),
        ])
        .env("QPLEX_MOCK-REMOTE_TOKEN", provider.token())
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 0, "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("x1 = 1"), "{text}");
}
