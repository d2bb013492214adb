//! End-to-end checks of the binary: exit-status contract, JSON schema
//! round-trips, and determinism of reports across worker counts.

use std::process::{Command, Output};

fn critpair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critpair"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json_without_elapsed(out: &Output) -> serde_json::Value {
    let mut v: serde_json::Value =
        serde_json::from_str(&stdout_str(out)).expect("stdout is JSON");
    if let Some(map) = v.as_object_mut() {
        map.remove("elapsed_ms");
    }
    v
}

#[test]
fn sumset_restricted_example() {
    let out = critpair(&[
        "sumset",
        "--group",
        r#"{"cyclic":7}"#,
        "--a",
        "0,1,2",
        "--b",
        "0,1,2",
        "--restricted",
        "--theta",
        r#"{"identity":true}"#,
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr_str(&out).is_empty());
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["result"], serde_json::json!([1, 2, 3]));
    assert_eq!(v["size"], serde_json::json!(3));
}

#[test]
fn sumset_text_output() {
    let out = critpair(&[
        "sumset",
        "--group",
        r#"{"cyclic":5}"#,
        "--a",
        "0,1",
        "--b",
        "0,2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains("result: 0,1,2,3"));
    assert!(text.contains("size: 4"));
}

#[test]
fn example_reproduction_passes() {
    let out = critpair(&["example", "eh-nonabelian", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] == serde_json::json!(true)));
    assert!(stdout_str(&out).contains("11"));

    let unknown = critpair(&["example", "nope"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(stderr_str(&unknown).contains("unknown example"));
}

#[test]
fn hypothesis_gate_exits_one_with_diagnostic() {
    let out = critpair(&["verify", "thm51", "--n", "15", "--k", "3", "--l", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_str(&out).is_empty());
    let err = stderr_str(&out);
    assert!(err.contains("hypothesis p(G) > k+l-3 fails (p=3)"), "{err}");
}

#[test]
fn verify_cd_clean_run() {
    let out = critpair(&["verify", "cd", "--group", r#"{"cyclic":7}"#, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_without_elapsed(&out);
    assert_eq!(v["instances_checked"], serde_json::json!(127 * 127));
    assert_eq!(v["bound_violations"], serde_json::json!([]));
}

#[test]
fn reports_are_deterministic_across_workers() {
    let run = |workers: &str| {
        let out = critpair(&[
            "verify",
            "eh",
            "--group",
            r#"{"cyclic":7}"#,
            "--theta",
            r#"{"multiplier":3}"#,
            "--workers",
            workers,
            "--json",
        ]);
        assert_eq!(out.status.code(), Some(0));
        json_without_elapsed(&out)
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn verify_chowla_runs() {
    let out = critpair(&["verify", "chowla", "--n", "12", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_without_elapsed(&out);
    assert_eq!(v["bound_violations"], serde_json::json!([]));
}

#[test]
fn verify_vosper_classifies_everything() {
    let out = critpair(&["verify", "vosper", "--p", "5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_without_elapsed(&out);
    assert_eq!(v["classification_failures"], serde_json::json!([]));
    assert_eq!(v["critical_pairs_found"], serde_json::json!(635));
}

#[test]
fn search_critical_writes_csv() {
    let dir = std::env::temp_dir().join(format!("critpair-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv_path = dir.join("pairs.csv");
    let out = critpair(&[
        "search",
        "critical",
        "--group",
        r#"{"cyclic":7}"#,
        "--bound",
        "cd",
        "--k",
        "1",
        "--l",
        "1..7",
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_str(&out));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "a_bits_hex,b_bits_hex,a_size,b_size,product_size,case_label"
    );
    // 7 singletons x 127 sets, all critical, all case (i)
    assert_eq!(lines.clone().count(), 7 * 127);
    assert!(lines.all(|l| l.ends_with(",i")));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn group_info_reports_structure() {
    let out = critpair(&["group", "info", "--group", r#"{"cyclic":1}"#, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["p_of_g"], serde_json::json!("infinity"));
    assert_eq!(v["order"], serde_json::json!(1));

    let out = critpair(&[
        "group",
        "info",
        "--group",
        r#"{"semidirect":{"normal":{"modulus":47,"rank":2},"quotient":23,"matrix":[[2,0],[0,1]]}}"#,
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["order"], serde_json::json!(50807));
    assert_eq!(v["p_of_g"], serde_json::json!(23));
    assert_eq!(v["nilpotent"], serde_json::json!(false));
    assert_eq!(v["center_size"], serde_json::json!(47));
}

#[test]
fn usage_errors_exit_one() {
    let out = critpair(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_str(&out).is_empty());
    assert!(!stderr_str(&out).is_empty());

    let out = critpair(&["group", "info", "--group", "{broken"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_str(&out).is_empty());
    assert!(stderr_str(&out).contains("invalid group spec"));

    let out = critpair(&["verify", "cd", "--group", r#"{"cyclic":20}"#]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("cap"));
}

#[test]
fn out_flag_writes_report_file() {
    let dir = std::env::temp_dir().join(format!("critpair-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = critpair(&[
        "verify",
        "cd",
        "--group",
        r#"{"cyclic":5}"#,
        "--json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(file["verifier"], serde_json::json!("cd"));
    assert_eq!(stdout_str(&out).trim(), serde_json::to_string_pretty(&file).unwrap());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn task_descriptor_json_accepted() {
    let task = r#"{"group_spec":{"cyclic":7},"mode":"self_pairs","cardinality_range":{"k":[3,3],"l":[3,3]}}"#;
    let out = critpair(&["verify", "eh", "--task", task, "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_str(&out));
    let v = json_without_elapsed(&out);
    assert_eq!(v["instances_checked"], serde_json::json!(35)); // C(7,3)
}

#[test]
fn dupan_sampled_run() {
    let out = critpair(&[
        "verify",
        "dupan",
        "--group",
        r#"{"semidirect":{"normal":{"modulus":47,"rank":2},"quotient":23,"matrix":[[2,0],[0,1]]}}"#,
        "--samples",
        "100",
        "--size",
        "4",
        "--seed",
        "7",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_without_elapsed(&out);
    assert_eq!(v["seed"], serde_json::json!(7));
    assert_eq!(v["bound_violations"], serde_json::json!([]));
}

#[test]
fn thm61_on_witness_group() {
    let out = critpair(&[
        "verify",
        "thm61",
        "--group",
        r#"{"semidirect":{"normal":{"modulus":47,"rank":2},"quotient":23,"matrix":[[2,0],[0,1]]}}"#,
        "--k",
        "5",
        "--l",
        "9",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_str(&out));
    let v = json_without_elapsed(&out);
    assert_eq!(v["counterexamples"], serde_json::json!([]));
    assert!(v["critical_pairs_found"].as_u64().unwrap() >= 1);
}
