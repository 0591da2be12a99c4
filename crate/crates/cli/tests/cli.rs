use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tabu(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tabu-fluid"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn sizing_prints_designer_case() {
    let dir = tempfile::tempdir().unwrap();
    let o = tabu(dir.path(), &["sizing", "--compare", "185,923"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let designer = text.lines().find(|l| l.starts_with("designer")).unwrap();
    let cols: Vec<&str> = designer.split_whitespace().collect();
    assert_eq!(&cols[1..3], &["17.24", "77.81"]);
    assert!(text.contains("candidate 1") && text.contains("185.00"));
}

#[test]
fn bench_report_is_byte_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let read = || fs::read(dir.path().join("rastrigin_report.csv")).unwrap();
    let args = ["--runs", "3", "--seed", "11", "bench", "--problem", "rastrigin"];
    assert!(tabu(dir.path(), &args).status.success());
    let first = read();
    assert!(tabu(dir.path(), &args).status.success());
    assert_eq!(first, read());
    let text = String::from_utf8(first).unwrap();
    assert!(text.contains("# seed = 11\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn config_overrides_reach_the_report_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(&cfg, "problem = rastrigin\nsearch.n = 10\nseed = 42\nruns = 1\n").unwrap();
    let o = tabu(dir.path(), &["--config", cfg.to_str().unwrap(), "bench"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("rastrigin_report.csv")).unwrap();
    assert!(text.contains("# search.n = 10\n") && text.contains("# seed = 42\n"));
}

#[test]
fn invalid_config_exits_nonzero_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "problem = rastrigin\nruns = 0\n").unwrap();
    let o = tabu(dir.path(), &["--config", cfg.to_str().unwrap(), "bench"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("runs"), "{}", stderr(&o));

    fs::write(&cfg, "problem = rastrigin\nsearch.m = many\n").unwrap();
    let o = tabu(dir.path(), &["--config", cfg.to_str().unwrap(), "bench"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 2") && stderr(&o).contains("search.m"), "{}", stderr(&o));
}

#[test]
fn export_writes_decimated_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = tabu(
        dir.path(),
        &["export", "--problem", "transmission", "--params", "185,923", "--interval", "0.01"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("transmission_trace.csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("time [s],pressure [Pa],motor_speed [rad/s]"), "{header}");
    assert_eq!(lines.count(), 501);
}

#[test]
fn simulate_reports_objective_and_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let o = tabu(dir.path(), &["simulate", "--problem", "transmission", "--params", "185,923"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("objective = "));

    let o = tabu(dir.path(), &["simulate", "--problem", "transmission", "--params", "185"]);
    assert!(!o.status.success());
    let o = tabu(dir.path(), &["optimize", "--problem", "rastrigin"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("bench"));
}

#[test]
fn unwritable_output_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = tabu(&blocker, &["--runs", "1", "bench", "--problem", "rastrigin"]);
    assert!(!o.status.success());
}
