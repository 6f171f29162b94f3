use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_deception"))
}

fn benchmark() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/benchmark_insider.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("DECEPTION_OUT_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_reports_the_optimal_value() {
    let spec = benchmark();
    let o = run(&["--format", "csv", "bounds", spec.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "lower,upper\n-0.612,0.68\n");

    let o = run(&["solve", spec.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("status") && l.ends_with("Optimal")));
    assert!(text.lines().any(|l| l.starts_with("value") && l.ends_with("-0.0292")));
}

#[test]
fn covert_specs_need_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let spec = std::fs::read_to_string(benchmark()).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&spec).unwrap();
    v.as_object_mut().unwrap().remove("insider");
    v["beliefs"]["b"] = serde_json::json!([0.0, 1.0]);
    v["beliefs"]["b_U"] = serde_json::json!([[0.6, 0.4], [0.6, 0.4]]);
    let path = dir.path().join("covert.json");
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();

    let o = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["solve", "--covert", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l.starts_with("value") && l.ends_with("0.32")));
}

#[test]
fn invalid_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ \"states\": ").unwrap();
    assert_eq!(run(&["solve", path.to_str().unwrap()]).status.code(), Some(2));
    let o = run(&["case-study", "--figure", "fig9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("fig9"));
    let spec = benchmark();
    let o = run(&["design", spec.to_str().unwrap(), "--c-grid", "1:0.1:0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn case_study_writes_to_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "case-study",
        "--figure",
        "fig6",
        "--grid",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let first = std::fs::read(dir.path().join("fig6.csv")).unwrap();

    let env_dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["case-study", "--figure", "fig6", "--grid", "5"])
        .env("DECEPTION_OUT_DIR", env_dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read(env_dir.path().join("fig6.csv")).unwrap(), first);

    let o = run(&["--format", "csv", "case-study", "--figure", "fig6", "--grid", "5"]);
    assert_eq!(o.stdout, first);
}

#[test]
fn commands_are_reproducible() {
    let spec = benchmark();
    let spec = spec.to_str().unwrap();
    for args in [
        vec!["partition", spec],
        vec!["--format", "csv", "concavify", spec, "--samples", "11"],
        vec!["design", spec, "--c-grid", "-0.5:0.25:0.5"],
        vec!["--seed", "7", "--format", "csv", "partition", spec],
    ] {
        let a = run(&args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, run(&args).stdout, "{args:?}");
    }
}

#[test]
fn partition_lists_the_three_benchmark_cells() {
    let spec = benchmark();
    let o = run(&["partition", spec.to_str().unwrap()]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("AC/DO  b(x1) in [0.473684211, 0.769230769]"));
}
