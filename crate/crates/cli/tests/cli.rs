use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn purify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_purify")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn figure1_writes_metadata_and_columns() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "f.toml", "experiment = \"figure1\"\nseed = 1\n");
    let out = dir.path().join("nested/f.csv");
    let res = purify(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# experiment: figure1");
    assert!(lines[1].starts_with("# config: {\"experiment\":\"figure1\""));
    assert!(lines[2].starts_with("# config_hash: ") && lines[2].len() == "# config_hash: ".len() + 64);
    assert_eq!(lines[3], "delta,laplace_var,gaussian_var");
    assert_eq!(lines.len(), 4 + 46);
    assert!(lines[4].starts_with("1e-10,2.0,"));
    assert!(!text.contains('\r'));
}

#[test]
fn cli_overrides_take_precedence() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "m.toml", "experiment = \"mode\"\nseed = 1\ntrials = 2\n");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(purify(&["run", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    let res =
        purify(&["run", "--config", &cfg, "--out", b.to_str().unwrap(), "--seed", "2", "--trials", "5"]);
    assert!(res.status.success());
    let a = std::fs::read_to_string(a).unwrap();
    let b = std::fs::read_to_string(b).unwrap();
    assert!(b.contains("\"seed\":2") && b.contains("\"trials\":5"));
    assert_eq!(a.lines().count(), 4 + 2);
    let trials: Vec<&str> = b.lines().skip(4).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(trials, ["0", "1", "2", "3", "4"]);
}

#[test]
fn unknown_experiment_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "x.toml", "experiment = \"nope\"\nseed = 1\n");
    let out = dir.path().join("x.csv");
    let res = purify(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("unknown experiment"));
    assert!(!out.exists());
}

#[test]
fn missing_seed_and_bad_params_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o.csv");
    let no_seed = write_config(dir.path(), "a.toml", "experiment = \"mode\"\n");
    assert_eq!(purify(&["run", "--config", &no_seed, "--out", out.to_str().unwrap()]).status.code(), Some(2));
    let bad_key =
        write_config(dir.path(), "b.toml", "experiment = \"mode\"\nseed = 1\n[params]\nunivers = 4\n");
    assert_eq!(purify(&["run", "--config", &bad_key, "--out", out.to_str().unwrap()]).status.code(), Some(2));
    let bad_type =
        write_config(dir.path(), "c.toml", "experiment = \"mode\"\nseed = 1\n[params]\neps = \"big\"\n");
    assert_eq!(
        purify(&["run", "--config", &bad_type, "--out", out.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(purify(&["run"]).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn validate_reports_violated_preconditions() {
    let dir = TempDir::new().unwrap();
    let ok = write_config(dir.path(), "ok.toml", "experiment = \"erm-sgd\"\nseed = 1\n");
    let res = purify(&["validate", "--config", &ok]);
    assert!(res.status.success());

    let sgd = write_config(
        dir.path(),
        "sgd.toml",
        "experiment = \"erm-sgd\"\nseed = 1\n[params]\nn = 2\ndim = 1\neps = 1000.0\n",
    );
    let res = purify(&["validate", "--config", &sgd]);
    assert_eq!(res.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("eps <= min(d, 8)·ln(1/delta)"), "{stdout}");

    let mwem = write_config(
        dir.path(),
        "mw.toml",
        "experiment = \"mwem\"\nseed = 1\n[params]\nn = 1000000\ndim = 16\n",
    );
    let res = purify(&["validate", "--config", &mwem]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!res.stdout.is_empty());

    // A run with violated preconditions refuses to write anything.
    let out = dir.path().join("sgd.csv");
    assert_eq!(purify(&["run", "--config", &sgd, "--out", out.to_str().unwrap()]).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn list_names_every_experiment() {
    let res = purify(&["list"]);
    assert!(res.status.success());
    let stdout = String::from_utf8_lossy(&res.stdout);
    for name in purify_cli::CATALOG.iter().map(|(n, _)| n) {
        assert!(stdout.lines().any(|l| l.starts_with(name)), "{name}");
    }
    assert_eq!(purify_cli::CATALOG.len(), 11);
}

#[test]
fn runtime_failures_exit_1() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "f.toml", "experiment = \"figure1\"\nseed = 1\n");
    // The output path is an existing directory.
    let res = purify(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
}
