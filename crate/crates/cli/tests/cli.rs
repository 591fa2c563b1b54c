use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_breakcoint"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn describe_prints_the_descriptives_table() {
    let o = run(&["describe"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("| INF | 43 |"), "{s}");
    assert!(!s.contains("Zivot"));
}

#[test]
fn stage_commands_write_csv_tables_under_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["estimate", "--format", "csv", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let mut names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["table5_long_run_with_term.csv", "table5_long_run_without_term.csv"]);
}

#[test]
fn invalid_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"variables":{"dependent":"INF","regressors":["IMP"]},"unknown":1}"#).unwrap();
    let out = dir.path().join("out");
    let o = run(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "run"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown"));
    assert!(!out.exists());
}

#[test]
fn unknown_column_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"variables":{"dependent":"INF","regressors":["GDP"]}}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "describe"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--test", "df", "--t", "5", "--reps", "1000"]).status.code(), Some(2));
}

#[test]
fn simulate_prints_three_levels() {
    let o = run(&["simulate", "--test", "df", "--t", "50", "--reps", "1000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let lines: Vec<_> = s.lines().collect();
    assert_eq!(lines[0], "test_id,model,T,reps,level,quantile,mc_stderr");
    assert_eq!(lines.len(), 4);
    assert_eq!(s, stdout(&run(&["simulate", "--test", "df", "--t", "50", "--reps", "1000", "--seed", "7"])));
}

#[test]
fn run_then_replicate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = configs().join("turkiye.json");
    let o = run(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "run"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["bundle.json", "provenance.json", "report.md", "tables/table1_descriptives.csv", "plots/with_term_ardl_cusum.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }

    let ok = dir.path().join("ok.csv");
    std::fs::write(&ok, "table,row,column,kind,expected,tolerance\ntable1_descriptives,INF,Obs,abs,43,0\n").unwrap();
    let o = run(&["--out", out.to_str().unwrap(), "replicate", "--expectations", ok.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "table,row,column,kind,expected,tolerance\ntable1_descriptives,INF,Obs,abs,44,0.5\n").unwrap();
    let bundle = out.join("bundle.json");
    let o = run(&["replicate", "--bundle", bundle.to_str().unwrap(), "--expectations", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("table1_descriptives / INF / Obs:"));

    std::fs::write(&bad, "table,row\n").unwrap();
    let o = run(&["replicate", "--bundle", bundle.to_str().unwrap(), "--expectations", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fetch_rejects_bad_arguments_before_network() {
    let o = run(&["fetch", "--country", "T U", "--from", "1980", "--to", "1990"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["fetch", "--from", "2000", "--to", "1990"]);
    assert_eq!(o.status.code(), Some(2));
}
