//! Shared helpers for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use robust_esm::{Scenario, SystemDesign, TechKind, Technology, TechnologyCatalog};

/// Minimum total unmet demand of a fixed design, assembled directly on the
/// simplex backend with a separate formulation: explicit battery charge and
/// discharge, turbine hydrogen intake instead of electric output, and
/// storage levels indexed cyclically over `H` hours.
pub fn independent_gap(design: &SystemDesign, scenario: &Scenario, catalog: &TechnologyCatalog) -> f64 {
    let h = scenario.horizon();
    let cap = |kind: TechKind| {
        catalog
            .iter()
            .find(|t| t.kind == kind)
            .map(|t| (design.capacity(&t.id), t.efficiency.unwrap_or(1.0), t.self_discharge_per_hour))
    };
    let (bat, _, loss) = cap(TechKind::Battery).unwrap_or((0.0, 1.0, 0.0));
    let (cav, _, _) = cap(TechKind::HydrogenStorage).unwrap_or((0.0, 1.0, 0.0));
    let (ely, eta_el, _) = cap(TechKind::Electrolyser).unwrap_or((0.0, 1.0, 0.0));
    let (gt, eta_gt, _) = cap(TechKind::GasTurbine).unwrap_or((0.0, 1.0, 0.0));

    let mut p = Problem::new(OptimizationDirection::Minimize);
    let level_el: Vec<_> = (0..h).map(|_| p.add_var(0.0, (0.0, bat))).collect();
    let level_h2: Vec<_> = (0..h).map(|_| p.add_var(0.0, (0.0, cav))).collect();
    let charge: Vec<_> = (0..h).map(|_| p.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let discharge: Vec<_> = (0..h).map(|_| p.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let ely_in: Vec<_> = (0..h).map(|_| p.add_var(0.0, (0.0, ely))).collect();
    let gt_h2: Vec<_> = (0..h).map(|_| p.add_var(0.0, (0.0, gt))).collect();
    let gap: Vec<_> = (0..h).map(|t| p.add_var(1.0, (0.0, scenario.demand[t]))).collect();
    for t in 0..h {
        let next = (t + 1) % h;
        let renewable: f64 = catalog
            .iter()
            .filter(|x| x.kind == TechKind::Supply)
            .map(|x| scenario.capacity_factors[&x.id][t] * design.capacity(&x.id))
            .sum();
        // renewable + discharge - charge + eta*gt_h2 - ely_in + gap >= d
        p.add_constraint(
            [(discharge[t], 1.0), (charge[t], -1.0), (gt_h2[t], eta_gt), (ely_in[t], -1.0), (gap[t], 1.0)],
            ComparisonOp::Ge,
            scenario.demand[t] - renewable,
        );
        // level_el[next] = (1-loss) level_el[t] + charge - discharge
        p.add_constraint(
            [(level_el[next], 1.0), (level_el[t], -(1.0 - loss)), (charge[t], -1.0), (discharge[t], 1.0)],
            ComparisonOp::Eq,
            0.0,
        );
        p.add_constraint(
            [(level_h2[next], 1.0), (level_h2[t], -1.0), (ely_in[t], -eta_el), (gt_h2[t], 1.0)],
            ComparisonOp::Eq,
            0.0,
        );
    }
    let outcome = p.solve().expect("gap minimisation is always feasible");
    outcome.solution().expect("solved to optimality").objective()
}

/// Small random instance: catalog with random efficiencies and losses,
/// a scenario of 3 to 9 hours and a design within the limits.
pub fn random_instance(rng: &mut ChaCha8Rng) -> (TechnologyCatalog, Scenario, SystemDesign) {
    let mut techs = vec![
        Technology::new("wind", TechKind::Supply, 1000.0, 20.0, 20, 200.0),
        Technology::new("pv", TechKind::Supply, 500.0, 10.0, 25, 200.0),
    ];
    if rng.gen_bool(0.8) {
        let loss = if rng.gen_bool(0.5) { rng.gen_range(0.0..0.05) } else { 0.0 };
        techs.push(Technology::new("bat", TechKind::Battery, 200.0, 2.0, 15, 300.0).with_self_discharge(loss));
    }
    if rng.gen_bool(0.8) {
        techs.push(Technology::new("cavern", TechKind::HydrogenStorage, 1.0, 0.0, 40, 1000.0));
        techs.push(
            Technology::new("ely", TechKind::Electrolyser, 350.0, 11.0, 10, 100.0).with_efficiency(rng.gen_range(0.5..0.9)),
        );
        techs.push(Technology::new("ccgt", TechKind::GasTurbine, 760.0, 23.0, 20, 100.0).with_efficiency(rng.gen_range(0.4..0.7)));
    }
    let catalog = TechnologyCatalog::new(techs).unwrap();
    let h = rng.gen_range(3..10);
    let mut cf = BTreeMap::new();
    for id in ["wind", "pv"] {
        cf.insert(id.to_string(), (0..h).map(|_| rng.gen_range(0.0..1.0)).collect());
    }
    let demand = (0..h).map(|_| rng.gen_range(0.0..100.0)).collect();
    let scenario = Scenario::new("r", cf, demand).unwrap();
    let caps = catalog
        .iter()
        .map(|t| (t.id.clone(), rng.gen_range(0.0..=t.max_capacity * 0.5)))
        .collect();
    (catalog, scenario, SystemDesign::new(caps, "random"))
}

/// Equality up to relative rounding error.
pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Scenario on the reference catalog with one wind and one PV profile.
pub fn reference_scenario(cf: &[(f64, f64)], demand: Vec<f64>) -> Scenario {
    let catalog = TechnologyCatalog::reference(1e4);
    let mut series: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (_, t) in catalog.supply() {
        let wind = t.id.contains("wind");
        series.insert(t.id.clone(), cf.iter().map(|p| if wind { p.0 } else { p.1 }).collect());
    }
    Scenario::new("r", series, demand).unwrap()
}
