//! Testing fixed designs against weather years.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::TechnologyCatalog;
use crate::design::SystemDesign;
use crate::error::{Error, Result};
use crate::model::build_feasibility;
use crate::scenario::Scenario;
use crate::solver::{solve_optimal, SolverSettings};

pub const DEFAULT_EPS_HOUR: f64 = 1e-6;
/// Admissible total gap as a fraction of annual demand.
pub const DEFAULT_EPS_GAP_FRACTION: f64 = 1e-3;

/// Hourly unmet demand of a design in one year.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupplyGapSeries {
    pub scenario_id: String,
    pub gaps: Vec<f64>,
    pub total: f64,
}

impl SupplyGapSeries {
    pub fn new(scenario_id: impl Into<String>, gaps: Vec<f64>) -> Result<Self> {
        if let Some((t, g)) = gaps.iter().enumerate().find(|(_, g)| !(g.is_finite() && **g >= 0.0)) {
            return Err(Error::InvalidParameter(format!("gap at hour {t} is {g}")));
        }
        let total = gaps.iter().sum();
        Ok(SupplyGapSeries {
            scenario_id: scenario_id.into(),
            gaps,
            total,
        })
    }
}

/// Solves the feasibility LP of `design` on `scenario`.
pub fn test_feasibility(
    design: &SystemDesign,
    scenario: &Scenario,
    catalog: &TechnologyCatalog,
    settings: &SolverSettings,
) -> Result<SupplyGapSeries> {
    let model = build_feasibility(design, scenario, catalog)?;
    let sol = solve_optimal(&model.problem, settings)
        .map_err(|e| Error::solver(format!("feasibility test on {}", scenario.year_id), e))?;
    SupplyGapSeries::new(&scenario.year_id, model.slack(&sol, 0).to_vec())
}

/// Default gap threshold: a fixed fraction of the largest annual demand.
pub fn default_eps_gap(scenarios: &[Scenario]) -> f64 {
    DEFAULT_EPS_GAP_FRACTION
        * scenarios
            .iter()
            .map(Scenario::total_demand)
            .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Robust,
    NotRobust,
    /// At least one year could not be evaluated.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub verdict: Verdict,
    pub eps_gap: f64,
    pub per_year: BTreeMap<String, SupplyGapSeries>,
    /// Error messages of years that failed to solve.
    pub failures: BTreeMap<String, String>,
}

impl RobustnessReport {
    pub fn is_robust(&self) -> bool {
        self.verdict == Verdict::Robust
    }

    /// Year with the largest total gap, ties broken by id.
    pub fn worst(&self) -> Option<&SupplyGapSeries> {
        self.per_year
            .values()
            .fold(None, |best: Option<&SupplyGapSeries>, s| match best {
                Some(b) if b.total >= s.total => Some(b),
                _ => Some(s),
            })
    }

    pub fn max_total(&self) -> f64 {
        self.per_year.values().map(|s| s.total).fold(0.0, f64::max)
    }
}

/// Tests `design` against every scenario in parallel.
pub fn is_robust(
    design: &SystemDesign,
    scenarios: &[Scenario],
    catalog: &TechnologyCatalog,
    eps_gap: f64,
    settings: &SolverSettings,
) -> Result<RobustnessReport> {
    if scenarios.is_empty() {
        return Err(Error::InvalidParameter("no scenarios to test".into()));
    }
    if !(eps_gap >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps_gap must be non-negative, got {eps_gap}")));
    }
    let results: Vec<_> = scenarios
        .par_iter()
        .map(|s| (s.year_id.clone(), test_feasibility(design, s, catalog, settings)))
        .collect();

    let mut per_year = BTreeMap::new();
    let mut failures = BTreeMap::new();
    for (id, r) in results {
        match r {
            Ok(series) => {
                per_year.insert(id, series);
            }
            Err(Error::Solver { .. }) | Err(Error::SizeLimit { .. }) => {
                failures.insert(id, r.unwrap_err().to_string());
            }
            Err(e) => return Err(e),
        }
    }
    let verdict = if !failures.is_empty() {
        Verdict::Indeterminate
    } else if per_year.values().all(|s| s.total <= eps_gap) {
        Verdict::Robust
    } else {
        Verdict::NotRobust
    };
    Ok(RobustnessReport {
        verdict,
        eps_gap,
        per_year,
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossOfLoadSummary {
    pub total_gap: f64,
    pub fraction_of_annual_demand: f64,
    pub peak_hourly_gap: f64,
    /// Largest ratio of hourly gap to hourly demand.
    pub peak_fraction_of_hourly_demand: f64,
    pub gap_hours: usize,
}

pub fn loss_of_load_summary(gaps: &SupplyGapSeries, scenario: &Scenario, eps_hour: f64) -> Result<LossOfLoadSummary> {
    if gaps.gaps.len() != scenario.horizon() {
        return Err(Error::Schema(format!(
            "gap series has {} entries, scenario {} has {}",
            gaps.gaps.len(),
            scenario.year_id,
            scenario.horizon()
        )));
    }
    let annual = scenario.total_demand();
    let total = gaps.gaps.iter().sum::<f64>();
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    Ok(LossOfLoadSummary {
        total_gap: total,
        fraction_of_annual_demand: ratio(total, annual),
        peak_hourly_gap: gaps.gaps.iter().copied().fold(0.0, f64::max),
        peak_fraction_of_hourly_demand: gaps
            .gaps
            .iter()
            .zip(&scenario.demand)
            .map(|(&g, &d)| ratio(g, d))
            .fold(0.0, f64::max),
        gap_hours: gaps.gaps.iter().filter(|&&g| g > eps_hour).count(),
    })
}
