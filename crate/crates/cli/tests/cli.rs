use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(fixture: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(fixture).join("config.toml")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robust-esm")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn optimize_then_feastest_flags_fragile_design() {
    let dir = tempfile::tempdir().unwrap();
    let config = data("five_days");
    let lp = dir.path().join("capex.lp");
    let out = run(&["optimize", "--config", s(&config), "--scenario", "y0", "--export-lp", s(&lp)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let lp_text = std::fs::read_to_string(&lp).unwrap();
    assert!(lp_text.starts_with("\\") || lp_text.contains("Minimize"), "{lp_text:.200}");
    let design = dir.path().join("design.json");
    std::fs::write(&design, &out.stdout).unwrap();

    let only_y0 = run(&["feastest", "--config", s(&config), "--design", s(&design), "--scenarios", "y0"]);
    assert_eq!(code(&only_y0), 0, "{}", String::from_utf8_lossy(&only_y0.stderr));
    let all = run(&["feastest", "--config", s(&config), "--design", s(&design)]);
    assert_eq!(code(&all), 2, "{}", String::from_utf8_lossy(&all.stderr));
    assert_eq!(String::from_utf8_lossy(&all.stdout).lines().count(), 3);
}

#[test]
fn robustify_writes_run_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = data("five_days");
    let out = run(&["robustify", "--config", s(&config), "--strategy", "mod1", "--out", s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("run.json").exists());
    let report = run(&["report", "--run", s(dir.path())]);
    assert_eq!(code(&report), 0, "{}", String::from_utf8_lossy(&report.stderr));
    for f in ["costs.csv", "robust_costs.csv", "gaps.csv", "summary.md"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

/// Copies a fixture into a scratch directory with `edit` applied to its config.
fn edited_fixture(fixture: &str, edit: impl Fn(String) -> String) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let src = data(fixture);
    for entry in std::fs::read_dir(src.parent().unwrap()).unwrap() {
        let path = entry.unwrap().path();
        std::fs::copy(&path, dir.path().join(path.file_name().unwrap())).unwrap();
    }
    let config = dir.path().join("config.toml");
    std::fs::write(&config, edit(std::fs::read_to_string(&config).unwrap())).unwrap();
    (dir, config)
}

#[test]
fn iteration_cap_exits_two() {
    let (_dir, config) = edited_fixture("five_days", |t| t.replace("max_iterations = 20", "max_iterations = 1"));
    let out = run(&["robustify", "--config", s(&config), "--strategy", "mod1"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn input_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.toml");
    assert_eq!(code(&run(&["oracle", "--config", s(&missing)])), 3);
    let out = run(&["optimize", "--config", s(&data("five_days")), "--scenario", "y9"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("y9"));
    let bad_cf = dir.path().join("y0.csv");
    std::fs::write(&bad_cf, "hour,cf_wind_onshore\n0,1.5\n").unwrap();
    std::fs::write(dir.path().join("demand.csv"), "hour,demand\n0,1\n").unwrap();
    let config = dir.path().join("c.toml");
    std::fs::write(&config, "[data]\ndemand = \"demand.csv\"\nscenarios = { y0 = \"y0.csv\" }\n").unwrap();
    let out = run(&["optimize", "--config", s(&config), "--scenario", "y0"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn oracle_size_limit_exits_four() {
    let (_dir, config) =
        edited_fixture("five_days", |t| t.replace("variable_budget = 200000", "variable_budget = 10"));
    let out = run(&["oracle", "--config", s(&config)]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
}
