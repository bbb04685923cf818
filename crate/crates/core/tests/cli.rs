use std::path::Path;
use std::process::{Command, Output};

fn d2dsim(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_d2dsim"))
        .current_dir(cwd)
        .env_remove("D2DSIM_CONFIG")
        .env_remove("D2DSIM_OUT")
        .env_remove("D2DSIM_SEED")
        .env_remove("D2DSIM_POLICY")
        .env_remove("D2DSIM_RUNS")
        .env_remove("D2DSIM_THREADS")
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_accepts_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = d2dsim(&["validate"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("hash"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(d2dsim(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(d2dsim(&["--set", "num_cus=0", "validate"], dir.path()).status.code(), Some(1));
    assert_eq!(d2dsim(&["--set", "no_such_key=1", "validate"], dir.path()).status.code(), Some(1));
    assert_eq!(d2dsim(&["--policy", "nope", "run"], dir.path()).status.code(), Some(1));
    assert_eq!(d2dsim(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn config_file_is_read_not_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.cfg");
    let text = "# small scenario\nnum_cus = 2\nnum_mgs = 3\nmonte_carlo_runs = 3\n";
    std::fs::write(&path, text).unwrap();
    let o = d2dsim(&["--config", path.to_str().unwrap(), "--out", "o", "run"], dir.path());
    assert!(matches!(o.status.code(), Some(0 | 2)), "{o:?}");
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
    let csv = std::fs::read_to_string(dir.path().join("o/run.csv")).unwrap();
    // comment line, header and one row per run
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn outputs_carry_the_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let v = d2dsim(&["--set", "num_mgs=4", "--runs", "4", "validate"], dir.path());
    let hash = stdout(&v).split_whitespace().last().unwrap().to_string();
    let run = |args: &[&str]| {
        let mut full = vec!["--set", "num_mgs=4", "--runs", "4", "--out", "o"];
        full.extend_from_slice(args);
        let o = d2dsim(&full, dir.path());
        assert!(matches!(o.status.code(), Some(0 | 2)), "{o:?}");
    };
    run(&["sweep", "--axis", "geographic_spread", "--values", "50,100"]);
    run(&["dump-gains"]);
    run(&["dump-assignment"]);
    let o = dir.path().join("o");
    let csv = std::fs::read_to_string(o.join("sweep_geographic_spread.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), format!("# config_hash={hash}"));
    for f in ["sweep_geographic_spread.json", "gains.json", "assignment.json"] {
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(o.join(f)).unwrap()).unwrap();
        assert_eq!(v["config_hash"], hash.as_str(), "{f}");
    }
}

#[test]
fn hungarian_oracle_reports_golden_weight() {
    let dir = tempfile::tempdir().unwrap();
    let o = d2dsim(&["oracle", "hungarian"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("28"), "{}", stdout(&o));
}
