//! Effect of registered cuts on the expansion optimum.

use std::collections::BTreeMap;

use robust_esm::critical_periods::HourSpan;
use robust_esm::fixtures;
use robust_esm::modifications::{CutTerm, ModificationState, DEFAULT_ALPHA};
use robust_esm::robustify::{oracle_monolithic, optimize_year, robustify, RobustifyConfig, Strategy, DEFAULT_VARIABLE_BUDGET};
use robust_esm::solver::SolverSettings;
use robust_esm::{CostModel, Scenario, TechKind, Technology, TechnologyCatalog};

fn two_tech() -> (TechnologyCatalog, Scenario) {
    let cat = TechnologyCatalog::new(vec![
        Technology::new("wind", TechKind::Supply, 1000.0, 0.0, 10, 1e4),
        Technology::new("pv", TechKind::Supply, 400.0, 0.0, 10, 1e4),
        Technology::new("bat", TechKind::Battery, 10.0, 0.0, 10, 1e4),
    ])
    .unwrap();
    let s = Scenario::new(
        "y",
        BTreeMap::from([("wind".into(), vec![0.5, 0.5, 0.5, 0.5]), ("pv".into(), vec![0.0, 1.0, 1.0, 0.0])]),
        vec![10.0; 4],
    )
    .unwrap();
    (cat, s)
}

fn cost(cat: &TechnologyCatalog, s: &Scenario, state: &ModificationState) -> f64 {
    optimize_year(s, cat, &CostModel::default(), state, &SolverSettings::default(), "t").unwrap().1
}

#[test]
fn yearly_balance_binds_only_when_violated() {
    let (cat, s) = two_tech();
    let base_state = ModificationState::new(4, DEFAULT_ALPHA).unwrap();
    let base = cost(&cat, &s, &base_state);
    // unconstrained optimum serves demand exactly, so loss weight 1 without
    // a gap is slack
    let mut loose = base_state.clone();
    loose.mod3a_yearly_balance(&s, &cat, 0.0, 1.0).unwrap();
    assert!((cost(&cat, &s, &loose) - base).abs() <= 1e-9 * base);
    let mut tight = base_state.clone();
    tight.mod3a_yearly_balance(&s, &cat, 20.0, 1.0).unwrap();
    assert!(cost(&cat, &s, &tight) > base * (1.0 + 1e-6));
}

#[test]
fn local_capacity_sizes_turbine() {
    // no renewables at all: the cut alone dictates turbine capacity
    let cat = TechnologyCatalog::new(vec![
        Technology::new("wind", TechKind::Supply, 1000.0, 0.0, 10, 0.0),
        Technology::new("cavern", TechKind::HydrogenStorage, 1.0, 0.0, 10, 1e4),
        Technology::new("ely", TechKind::Electrolyser, 1.0, 0.0, 10, 1e4).with_efficiency(0.7),
        Technology::new("gt", TechKind::GasTurbine, 1.0, 0.0, 10, 1e4).with_efficiency(0.5),
    ])
    .unwrap();
    let s = Scenario::new("y", BTreeMap::from([("wind".into(), vec![0.0; 4])]), vec![0.0, 30.0, 50.0, 0.0]).unwrap();
    let mut state = ModificationState::new(4, DEFAULT_ALPHA).unwrap();
    let span = HourSpan::new(1, 2).unwrap();
    assert!(state.mod4_local_capacity(&s, &cat, span, false).unwrap());
    assert!(!state.mod4_local_capacity(&s, &cat, span, false).unwrap());
    // deficit 80 over 2 hours at efficiency 0.5
    let cut = state.cuts().next().unwrap();
    let x_gt = 80.0 / (2.0 * 0.5);
    let at = |x: f64| cut.surplus(|t| if *t == CutTerm::Capacity("gt".into()) { x } else { 0.0 });
    assert!(at(x_gt).abs() < 1e-12);
    assert!(at(x_gt - 1.0) < 0.0);
}

#[test]
fn battery_local_capacity_cuts_hold_at_the_oracle() {
    let f = fixtures::by_name("five_days").unwrap();
    let cm = CostModel::default();
    let settings = SolverSettings::default();
    let mut config = RobustifyConfig::new(Strategy::Mod4, &f.reference);
    config.mod4_include_battery = true;
    let r = robustify(&config, &f.scenarios, &f.catalog, &cm, &settings).unwrap();
    let oracle = oracle_monolithic(&f.scenarios, &f.catalog, &cm, &settings, DEFAULT_VARIABLE_BUDGET).unwrap();
    let mut checked = 0;
    for cut in r.state.cuts() {
        let surplus = cut.surplus(|t| match t {
            CutTerm::Capacity(id) => oracle.design.capacity(id),
            _ => unreachable!("local capacity cuts only reference capacities"),
        });
        assert!(surplus >= -1e-6 * cut.rhs.abs().max(1.0), "{}: {surplus}", cut.label);
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn converged_runs_report_consistent_trajectories() {
    let f = fixtures::by_name("five_days").unwrap();
    let cm = CostModel::default();
    let settings = SolverSettings::default();
    let r = robustify(&RobustifyConfig::new(Strategy::Mod1, &f.reference), &f.scenarios, &f.catalog, &cm, &settings).unwrap();
    assert!(r.converged);
    assert_eq!(r.cost_trajectory.len(), r.gap_trajectory.len());
    assert!(r.gap_trajectory.last().unwrap() <= &r.eps_gap);
    assert!(r.final_gaps.values().all(|&g| g <= r.eps_gap));
    assert!(!r.modification_log.is_empty());
}

#[test]
fn rejects_unknown_reference_and_mixed_demand() {
    let f = fixtures::by_name("five_days").unwrap();
    let cm = CostModel::default();
    let settings = SolverSettings::default();
    let bad = RobustifyConfig::new(Strategy::Mod1, "nope");
    assert!(robustify(&bad, &f.scenarios, &f.catalog, &cm, &settings).is_err());
    let mut scenarios = f.scenarios.clone();
    scenarios[1].demand[0] += 1.0;
    let ok = RobustifyConfig::new(Strategy::Mod1, &f.reference);
    assert!(robustify(&ok, &scenarios, &f.catalog, &cm, &settings).is_err());
}
