//! Seeded synthetic weather years for tests, examples and the shipped CSV
//! fixtures.
//!
//! Every year shares one demand series. Wind follows a mean-reverting
//! random walk, PV a clear-sky bell curve scaled by a daily cloudiness
//! draw. Dark lulls scale both down over a stretch of hours.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::TechnologyCatalog;
use crate::scenario::Scenario;

/// Uniform capacity limit of the fixture catalogs.
pub const FIXTURE_MAX_CAPACITY: f64 = 1e5;

#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: String,
    pub catalog: TechnologyCatalog,
    pub scenarios: Vec<Scenario>,
    pub reference: String,
    /// Year and hours of an inserted dark lull, if any.
    pub dark_lull: Option<(String, usize, usize)>,
}

impl Fixture {
    pub fn scenario(&self, id: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.year_id == id)
    }
}

/// Parameters of a generated fixture.
#[derive(Clone, Debug, PartialEq)]
pub struct FixtureSpec {
    pub name: String,
    pub seed: u64,
    pub horizon: usize,
    pub years: usize,
    /// Relative spread of the per-year wind and PV scaling.
    pub annual_spread: f64,
    pub lull: Option<LullSpec>,
    /// Capacity limit imposed on the electrolyser.
    pub electrolyser_limit: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LullSpec {
    pub year: usize,
    pub start: usize,
    pub hours: usize,
    /// Factor applied to all capacity factors inside the lull.
    pub depth: f64,
}

fn demand(rng: &mut ChaCha8Rng, horizon: usize, base: f64) -> Vec<f64> {
    (0..horizon)
        .map(|t| {
            let hod = (t % 24) as f64;
            let daily = 0.15 * (2.0 * PI * (hod - 8.0) / 24.0).sin();
            let noise = rng.gen_range(-0.03..0.03);
            (base * (1.0 + daily + noise) * 1000.0).round() / 1000.0
        })
        .collect()
}

fn weather(rng: &mut ChaCha8Rng, id: &str, spec: &FixtureSpec, demand: &[f64], lull: Option<&LullSpec>) -> Scenario {
    let h = spec.horizon;
    let mut onshore = Vec::with_capacity(h);
    let mut offshore = Vec::with_capacity(h);
    let mut pv = Vec::with_capacity(h);
    let wind_scale = 1.0 + rng.gen_range(-spec.annual_spread..=spec.annual_spread);
    let sun_scale = 1.0 + rng.gen_range(-spec.annual_spread..=spec.annual_spread);
    let mut w: f64 = rng.gen_range(0.25..0.45);
    let mut cloud = 1.0;
    for t in 0..h {
        w += 0.1 * (0.35 - w) + rng.gen_range(-0.08..0.08);
        w = w.clamp(0.0, 1.0);
        if t % 24 == 0 {
            cloud = rng.gen_range(0.4..1.0);
        }
        let hod = (t % 24) as f64;
        let sun = (PI * (hod - 6.0) / 12.0).sin().max(0.0);
        let mut depth = 1.0;
        if let Some(l) = lull.filter(|l| (l.start..l.start + l.hours).contains(&t)) {
            depth = l.depth;
        }
        let q = |x: f64| ((x * depth).clamp(0.0, 1.0) * 1e4).round() / 1e4;
        onshore.push(q(w * wind_scale));
        offshore.push(q((0.1 + 0.9 * w) * wind_scale));
        pv.push(q(0.75 * sun * cloud * sun_scale));
    }
    let cf = BTreeMap::from([
        ("pv_open_field".to_string(), pv.clone()),
        ("pv_rooftop".to_string(), pv),
        ("wind_offshore".to_string(), offshore),
        ("wind_onshore".to_string(), onshore),
    ]);
    Scenario::new(id, cf, demand.to_vec()).expect("generated data is valid")
}

/// Generates the years of `spec` with the reference catalog.
pub fn generate(spec: &FixtureSpec) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let demand = demand(&mut rng, spec.horizon, 100.0);
    let mut scenarios = Vec::with_capacity(spec.years);
    let mut dark = None;
    for y in 0..spec.years {
        let id = format!("y{y}");
        let l = spec.lull.as_ref().filter(|l| l.year == y);
        if let Some(l) = l {
            dark = Some((id.clone(), l.start, l.start + l.hours - 1));
        }
        scenarios.push(weather(&mut rng, &id, spec, &demand, l));
    }
    let mut catalog = TechnologyCatalog::reference(FIXTURE_MAX_CAPACITY);
    if let Some(limit) = spec.electrolyser_limit {
        catalog = catalog
            .with_max_capacity("electrolyser", limit)
            .expect("reference catalog has an electrolyser");
    }
    Fixture {
        name: spec.name.clone(),
        catalog,
        scenarios,
        reference: "y0".to_string(),
        dark_lull: dark,
    }
}

/// Specs of the shipped fixtures.
pub fn specs() -> Vec<FixtureSpec> {
    vec![
        FixtureSpec {
            name: "dark_lull".into(),
            seed: 1,
            horizon: 168,
            years: 4,
            annual_spread: 0.1,
            lull: Some(LullSpec {
                year: 3,
                start: 60,
                hours: 24,
                depth: 0.2,
            }),
            electrolyser_limit: None,
        },
        FixtureSpec {
            name: "five_days".into(),
            seed: 3,
            horizon: 120,
            years: 3,
            annual_spread: 0.1,
            lull: None,
            electrolyser_limit: None,
        },
        FixtureSpec {
            name: "electrolyser_limit".into(),
            seed: 3,
            horizon: 120,
            years: 3,
            annual_spread: 0.1,
            lull: None,
            electrolyser_limit: Some(5.0),
        },
    ]
}

pub fn all() -> Vec<Fixture> {
    specs().iter().map(generate).collect()
}

pub fn by_name(name: &str) -> Option<Fixture> {
    specs().iter().find(|s| s.name == name).map(generate)
}
