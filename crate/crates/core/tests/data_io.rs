//! Shipped CSV fixtures, configuration loading and report output.

use std::path::PathBuf;

use robust_esm::config::RunConfig;
use robust_esm::fixtures;
use robust_esm::report::{write_report, RunArtifact};
use robust_esm::robustify::{per_year_optima, robustify, RobustifyConfig, Strategy};
use robust_esm::solver::SolverSettings;
use robust_esm::stats::{flh_correlation, YearResult};
use robust_esm::CostModel;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

#[test]
fn shipped_csvs_match_generator() {
    for f in fixtures::all() {
        let config = RunConfig::load(&data_dir().join(&f.name).join("config.toml")).unwrap();
        assert_eq!(config.catalog.build().unwrap(), f.catalog, "{}", f.name);
        assert_eq!(config.robustify.reference_scenario, f.reference);
        let loaded = config.load_scenarios().unwrap();
        assert_eq!(loaded, f.scenarios, "{}", f.name);
    }
}

#[test]
fn missing_data_is_reported_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[data]\ndemand = \"nope.csv\"\n").unwrap();
    let err = RunConfig::load(&cfg).unwrap().load_scenarios().unwrap_err().to_string();
    assert!(err.contains("nope.csv"), "{err}");
}

fn artifact_for(years: usize) -> RunArtifact {
    let f = fixtures::by_name("five_days").unwrap();
    let scenarios = &f.scenarios[..years];
    let cm = CostModel::default();
    let settings = SolverSettings::default();
    let config = RunConfig {
        robustify: RobustifyConfig::new(Strategy::Mod1, &f.reference),
        ..RunConfig::default()
    };
    let mut artifact = RunArtifact::new(config.clone());
    let optima = per_year_optima(scenarios, &f.catalog, &cm, &settings).unwrap();
    let mut years_out = Vec::new();
    for s in scenarios {
        let d = optima[&s.year_id].0.clone();
        years_out.push(YearResult::new(s, &d, &f.catalog, &cm).unwrap());
        artifact.add_year_design(&s.year_id, d, &f.catalog).unwrap();
    }
    if years_out.len() >= 3 {
        artifact.correlation_stats = Some(flh_correlation(&years_out).unwrap());
    }
    let r = robustify(&config.robustify, scenarios, &f.catalog, &cm, &settings).unwrap();
    artifact.add_robust_design("mod1", r.design.clone(), &f.catalog).unwrap();
    for s in scenarios {
        let g = robust_esm::feasibility::test_feasibility(&optima[&f.reference].0, s, &f.catalog, &settings).unwrap();
        artifact.add_gaps(&f.reference, &g);
    }
    artifact.robust_runs.push((&r).into());
    artifact
}

#[test]
fn report_cardinality_and_determinism() {
    let artifact = artifact_for(2);
    let techs = artifact.config_snapshot.catalog.build().unwrap().len();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let files = write_report(&artifact, a.path()).unwrap();
    write_report(&artifact, b.path()).unwrap();
    for f in &files {
        let name = f.file_name().unwrap();
        assert_eq!(std::fs::read(f).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{name:?}");
    }
    let costs = std::fs::read_to_string(a.path().join("costs.csv")).unwrap();
    assert_eq!(costs.lines().count(), 1 + 2 * techs);
    let gaps = std::fs::read_to_string(a.path().join("gaps.csv")).unwrap();
    // 120 hours fit in one month
    assert_eq!(gaps.lines().count(), 1 + 2);
}

#[test]
fn artifact_round_trips_losslessly() {
    let artifact = artifact_for(3);
    assert!(artifact.correlation_stats.is_some());
    let dir = tempfile::tempdir().unwrap();
    artifact.save(dir.path()).unwrap();
    let back = RunArtifact::load(dir.path()).unwrap();
    assert_eq!(back, artifact);
}
