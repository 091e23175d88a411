//! Correlation of weather-year full load hours with system cost.

use serde::{Deserialize, Serialize};

use crate::catalog::{CostModel, TechKind, TechnologyCatalog};
use crate::design::{cost_breakdown, SystemDesign};
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Pearson correlation coefficient; `None` when either input has zero
/// variance or the lengths differ.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Technology group for correlation reports, derived from the id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupplyGroup {
    Wind,
    Pv,
}

impl SupplyGroup {
    pub fn of(id: &str) -> Option<SupplyGroup> {
        let id = id.to_ascii_lowercase();
        if id.contains("wind") {
            Some(SupplyGroup::Wind)
        } else if id.contains("pv") || id.contains("solar") {
            Some(SupplyGroup::Pv)
        } else {
            None
        }
    }
}

/// Summary of one single-year optimum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YearResult {
    pub scenario_id: String,
    /// Mean annual full load hours over the wind technologies.
    pub flh_wind: f64,
    pub flh_pv: f64,
    /// Share of total annual cost spent on wind capacity.
    pub cost_share_wind: f64,
    pub cost_share_pv: f64,
    pub tac: f64,
}

impl YearResult {
    pub fn new(
        scenario: &Scenario,
        design: &SystemDesign,
        catalog: &TechnologyCatalog,
        cost_model: &CostModel,
    ) -> Result<Self> {
        let costs = cost_breakdown(design, catalog, cost_model)?;
        let tac: f64 = costs.iter().map(|(_, c)| c).sum();
        let mut flh = [(0.0, 0usize); 2];
        let mut cost = [0.0; 2];
        for (tech, (_, c)) in catalog.iter().zip(&costs) {
            if tech.kind != TechKind::Supply {
                continue;
            }
            let Some(group) = SupplyGroup::of(&tech.id) else { continue };
            let g = group as usize;
            let series = scenario
                .cf(&tech.id)
                .ok_or_else(|| Error::Schema(format!("{}: no series for {}", scenario.year_id, tech.id)))?;
            flh[g].0 += series.iter().sum::<f64>();
            flh[g].1 += 1;
            cost[g] += c;
        }
        let mean = |(s, n): (f64, usize)| if n == 0 { 0.0 } else { s / n as f64 };
        let share = |c: f64| if tac > 0.0 { c / tac } else { 0.0 };
        Ok(YearResult {
            scenario_id: scenario.year_id.clone(),
            flh_wind: mean(flh[SupplyGroup::Wind as usize]),
            flh_pv: mean(flh[SupplyGroup::Pv as usize]),
            cost_share_wind: share(cost[SupplyGroup::Wind as usize]),
            cost_share_pv: share(cost[SupplyGroup::Pv as usize]),
            tac,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelationStats {
    pub pearson_flh_wind_vs_tac: Option<f64>,
    pub pearson_flh_pv_vs_tac: Option<f64>,
    pub pearson_cost_share_wind_vs_tac: Option<f64>,
    pub pearson_cost_share_pv_vs_tac: Option<f64>,
}

/// Correlates full load hours and cost shares with TAC across years.
pub fn flh_correlation(results: &[YearResult]) -> Result<CorrelationStats> {
    if results.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "correlation needs at least 3 years, got {}",
            results.len()
        )));
    }
    let tac: Vec<f64> = results.iter().map(|r| r.tac).collect();
    let vs = |f: fn(&YearResult) -> f64| pearson(&results.iter().map(f).collect::<Vec<_>>(), &tac);
    Ok(CorrelationStats {
        pearson_flh_wind_vs_tac: vs(|r| r.flh_wind),
        pearson_flh_pv_vs_tac: vs(|r| r.flh_pv),
        pearson_cost_share_wind_vs_tac: vs(|r| r.cost_share_wind),
        pearson_cost_share_pv_vs_tac: vs(|r| r.cost_share_pv),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn anti_linear_is_minus_one() {
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[8.0, 6.0, 4.0, 2.0]).unwrap();
        assert!((r + 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_variance_is_absent() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[5.0; 3]), None);
        assert_eq!(pearson(&[1.0], &[1.0]), None);
        assert_eq!(pearson(&[1.0, 2.0], &[1.0]), None);
    }

    #[test]
    fn hand_computed_four_points() {
        // x = [1,2,3,5], y = [2,1,4,3]: mean 2.75 and 2.5,
        // Sxy = 3.5, Sxx = 8.75, Syy = 5
        let r = pearson(&[1.0, 2.0, 3.0, 5.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert!((r - 3.5 / (8.75f64 * 5.0).sqrt()).abs() < 1e-15);
    }

    fn year(id: &str, wind: f64, tac: f64) -> YearResult {
        YearResult {
            scenario_id: id.into(),
            flh_wind: wind,
            flh_pv: 10.0,
            cost_share_wind: wind / 100.0,
            cost_share_pv: 0.2,
            tac,
        }
    }

    #[test]
    fn constant_tac_gives_no_coefficients() {
        let r = flh_correlation(&[year("a", 1.0, 5.0), year("b", 2.0, 5.0), year("c", 4.0, 5.0)]).unwrap();
        assert_eq!(r, CorrelationStats::default());
        assert!(flh_correlation(&[year("a", 1.0, 5.0)]).is_err());
    }

    #[test]
    fn wind_flh_anticorrelated() {
        let r = flh_correlation(&[year("a", 1.0, 9.0), year("b", 2.0, 7.0), year("c", 3.0, 5.0)]).unwrap();
        assert!((r.pearson_flh_wind_vs_tac.unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(r.pearson_flh_pv_vs_tac, None);
    }

    #[test]
    fn year_result_groups() {
        let catalog = TechnologyCatalog::reference(1e4);
        let cf: BTreeMap<String, Vec<f64>> = catalog
            .supply()
            .map(|(_, t)| (t.id.clone(), vec![if t.id.contains("wind") { 0.5 } else { 0.25 }; 4]))
            .collect();
        let s = Scenario::new("y", cf, vec![1.0; 4]).unwrap();
        let mut d = SystemDesign::zero(&catalog);
        d.capacities.insert("wind_onshore".into(), 20.0);
        d.capacities.insert("pv_open_field".into(), 20.0);
        let cm = CostModel::default();
        let r = YearResult::new(&s, &d, &catalog, &cm).unwrap();
        assert_eq!(r.flh_wind, 2.0);
        assert_eq!(r.flh_pv, 1.0);
        // onshore 1e6/20 + 25e3, open field 320e3/20 + 5.4e3
        let wind = 20.0 * 75e3;
        let pv = 20.0 * 21.4e3;
        assert!((r.tac - wind - pv).abs() < 1e-6);
        assert!((r.cost_share_wind - wind / (wind + pv)).abs() < 1e-12);
    }
}
