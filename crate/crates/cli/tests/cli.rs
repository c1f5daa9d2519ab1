//! End-to-end tests of the rao-lab binary: exit codes, output schemas, and
//! determinism across reruns and worker counts.

use std::path::Path;
use std::process::{Command, Output};

fn rao_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rao-lab"))
        .args(args)
        .env_remove("RAO_LAB_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("config written");
    path.to_string_lossy().into_owned()
}

#[test]
fn generate_reports_accuracy_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lemma5.json");
    let output = rao_lab(&[
        "generate",
        "--family",
        "lemma5",
        "--n",
        "5",
        "--c-acc",
        "10",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    let report = stdout_of(&output);
    assert!(report.contains("accuracy C = 10"), "{report}");
    assert!(report.contains("n=5"), "{report}");

    let text = std::fs::read_to_string(&out).unwrap();
    let inst: rao_core::Instance = serde_json::from_str(&text).unwrap();
    assert_eq!(inst.len(), 5);
    assert_eq!(
        rao_core::model::accuracy(&inst).unwrap().c_value,
        rao_core::rat::rat_u64(10)
    );
}

#[test]
fn generate_constant_profile_reports_unit_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("flat.json");
    let output = rao_lab(&[
        "generate",
        "--family",
        "random",
        "--n",
        "6",
        "--budget",
        "10",
        "--hint-min",
        "1",
        "--hint-max",
        "30",
        "--length",
        "3",
        "--seed",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    let report = stdout_of(&output);
    assert!(report.contains("accuracy C = 1\n"), "{report}");
    assert!(report.contains("validation: ok"), "{report}");
}

#[test]
fn generate_rejects_sub_unit_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad.json");
    let output = rao_lab(&[
        "generate",
        "--family",
        "random",
        "--n",
        "3",
        "--budget",
        "5",
        "--hint-min",
        "1",
        "--hint-max",
        "9",
        "--length",
        "2",
        "--acc-min",
        "0.5",
        "--acc-max",
        "0.9",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.exists(), "rejected params must not write a file");
}

#[test]
fn run_emits_one_row_per_instance_reader_pair() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "sweep.json",
        r#"{
            "seed": 11,
            "trials": 60,
            "experiments": [
                {
                    "instance": {"generator": {"family": "random", "seed": 3, "n": 8,
                        "budget": 9, "hint_min": 1, "hint_max": 40,
                        "length": {"uniform": {"min": 1, "max": 4}}, "shape": "constant"}},
                    "readers": [
                        {"name": "threshold", "g": 0.01},
                        {"name": "threshold", "g": 0.0215},
                        {"name": "threshold", "g": 0.05},
                        {"name": "threshold", "g": 0.1}
                    ]
                },
                {
                    "instance": {"generator": {"family": "random", "seed": 4, "n": 8,
                        "budget": 9, "hint_min": 1, "hint_max": 40,
                        "length": {"uniform": {"min": 1, "max": 4}}, "shape": "constant"}},
                    "readers": [{"name": "threshold", "g": 0.0215}, {"name": "secretary"}]
                }
            ]
        }"#,
    );
    let output = rao_lab(&["run", "--config", &config]);
    let csv = stdout_of(&output);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "instance_id,reader,params,trials,mean,ci95,opt,opt_source,ratio"
    );
    assert_eq!(lines.len(), 1 + 4 + 2);
    assert_eq!(csv.matches("g=43/2000").count(), 2);
    assert!(lines[1..5].iter().all(|l| l.starts_with("random-n8-s3")));
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[3], "60");
        assert!(fields[7] == "dp", "small instances resolve via dp: {line}");
    }
}

#[test]
fn run_is_deterministic_across_reruns_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "det.json",
        r#"{
            "seed": 99,
            "trials": 80,
            "experiments": [{
                "instance": {"generator": {"family": "random", "seed": 5, "n": 10,
                    "budget": 8, "hint_min": 1, "hint_max": 50,
                    "length": {"uniform": {"min": 1, "max": 3}}, "shape": "constant"}},
                "readers": [{"name": "reduction"}, {"name": "direct"}, {"name": "prefix", "len": 2}]
            }]
        }"#,
    );
    let base = stdout_of(&rao_lab(&["run", "--config", &config, "--workers", "1"]));
    let rerun = stdout_of(&rao_lab(&["run", "--config", &config, "--workers", "1"]));
    let wide = stdout_of(&rao_lab(&["run", "--config", &config, "--workers", "6"]));
    assert_eq!(base, rerun);
    assert_eq!(base, wide);

    let env_run = Command::new(env!("CARGO_BIN_EXE_rao-lab"))
        .args(["run", "--config", &config])
        .env("RAO_LAB_WORKERS", "3")
        .output()
        .expect("binary runs");
    assert_eq!(base, stdout_of(&env_run));

    let reseeded = stdout_of(&rao_lab(&["run", "--config", &config, "--seed", "100"]));
    assert_ne!(base, reseeded, "the seed must matter");

    let zero = rao_lab(&["run", "--config", &config, "--workers", "0"]);
    assert_eq!(zero.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&zero.stderr);
    assert!(stderr.contains("--workers"), "{stderr}");
}

#[test]
fn run_reads_instances_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = dir.path().join("corpus.json");
    stdout_of(&rao_lab(&[
        "generate",
        "--family",
        "random",
        "--n",
        "7",
        "--budget",
        "6",
        "--hint-min",
        "2",
        "--hint-max",
        "25",
        "--length",
        "2",
        "--seed",
        "8",
        "--out",
        inst_path.to_str().unwrap(),
    ]));
    let config = write_config(
        dir.path(),
        "file.json",
        &format!(
            r#"{{"seed": 1, "trials": 40, "experiments": [{{
                "instance": {{"file": {path:?}}},
                "readers": [{{"name": "secretary"}}]
            }}]}}"#,
            path = inst_path.to_str().unwrap()
        ),
    );
    let csv = stdout_of(&rao_lab(&["run", "--config", &config]));
    let row = csv.lines().nth(1).expect("one data row");
    assert!(row.starts_with("corpus,secretary"), "{row}");
}

#[test]
fn run_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "bad.json",
        r#"{"seed": 1, "trials": 5, "typo_key": 1, "experiments": [{
            "instance": {"generator": {"family": "lemma4", "n": 9, "seed": 1}},
            "readers": [{"name": "secretary"}]
        }]}"#,
    );
    let output = rao_lab(&["run", "--config", &config]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("typo_key"), "{stderr}");
}

#[test]
fn run_surfaces_oracle_limits() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "huge.json",
        r#"{"seed": 1, "trials": 2, "opt_source": "dp", "experiments": [{
            "instance": {"generator": {"family": "random", "seed": 9, "n": 60,
                "budget": 1000000, "hint_min": 1, "hint_max": 200,
                "length": {"uniform": {"min": 1, "max": 3}}, "shape": "constant"}},
            "readers": [{"name": "secretary"}]
        }]}"#,
    );
    let output = rao_lab(&["run", "--config", &config]);
    assert_eq!(output.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("oracle limit"), "{stderr}");
}

#[test]
fn bound_eval_prints_the_documented_seven_keys() {
    let output = rao_lab(&["bound", "eval", "1/81", "0.75", "1.5"]);
    let text = stdout_of(&output);
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    let object = json.as_object().unwrap();
    let keys: Vec<&str> = object.keys().map(String::as_str).collect();
    let mut expected = vec!["g", "beta", "gamma", "tail1", "tail2", "p_prime", "ratio"];
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    expected.sort_unstable();
    assert_eq!(sorted, expected);
    let ratio = object["ratio"].as_f64().unwrap();
    assert!((ratio - 341.87).abs() < 0.01, "ratio {ratio}");
}

#[test]
fn bound_eval_rejects_infeasible_points() {
    let output = rao_lab(&["bound", "eval", "0.3", "0.7", "1.5"]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("2g + beta"), "{stderr}");
}

#[test]
fn bound_maximize_is_deterministic() {
    let first = stdout_of(&rao_lab(&["bound", "maximize"]));
    let second = stdout_of(&rao_lab(&["bound", "maximize"]));
    assert_eq!(first, second);
    let json: serde_json::Value = serde_json::from_str(&first).unwrap();
    let ratio = json["ratio"].as_f64().unwrap();
    assert!(ratio > 240.0 && ratio < 246.0, "ratio {ratio}");
}

#[test]
fn bound_grid_emits_feasible_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let output = rao_lab(&[
        "bound",
        "grid",
        "--g-step",
        "0.05",
        "--beta-step",
        "0.1",
        "--gamma-step",
        "0.1",
        "--out",
        out.to_str().unwrap(),
    ]);
    stdout_of(&output);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "g,beta,gamma,tail1,tail2,p_prime,objective,ratio"
    );
    let mut rows = 0;
    for line in lines {
        rows += 1;
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        let (g, beta, gamma) = (fields[0], fields[1], fields[2]);
        assert!(g > 0.0 && g < 0.5);
        assert!(2.0 * g + beta < 1.0, "{line}");
        assert!(4.0 * g + gamma < 2.0, "{line}");
        assert!(gamma + g >= 1.5 - 1e-9, "{line}");
    }
    assert!(rows > 10, "grid should sample the feasible region, got {rows}");
}
