use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::{annualize_cost, CostModel, TechKind, TechnologyCatalog};
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Capacities below zero or above the limit by less than this are rounding.
const CAPACITY_SLACK: f64 = 1e-7;

/// Installed capacity per technology.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemDesign {
    pub capacities: BTreeMap<String, f64>,
    /// What produced the design, e.g. `capex:2012` or `robust:mod2`.
    pub source: String,
}

impl SystemDesign {
    pub fn new(capacities: BTreeMap<String, f64>, source: impl Into<String>) -> Self {
        SystemDesign {
            capacities,
            source: source.into(),
        }
    }

    /// All-zero design over the catalog.
    pub fn zero(catalog: &TechnologyCatalog) -> Self {
        SystemDesign::new(
            catalog.ids().map(|id| (id.to_string(), 0.0)).collect(),
            "zero",
        )
    }

    pub fn capacity(&self, id: &str) -> f64 {
        self.capacities.get(id).copied().unwrap_or(0.0)
    }

    /// Multiplies every capacity by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        SystemDesign::new(
            self.capacities
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect(),
            self.source.clone(),
        )
    }

    pub fn validate(&self, catalog: &TechnologyCatalog) -> Result<()> {
        for tech in catalog.iter() {
            let Some(&x) = self.capacities.get(&tech.id) else {
                return Err(Error::InvalidDesign(format!(
                    "no capacity given for {}",
                    tech.id
                )));
            };
            let slack = CAPACITY_SLACK * tech.max_capacity.max(1.0);
            if !x.is_finite() || x < -slack || x > tech.max_capacity + slack {
                return Err(Error::InvalidDesign(format!(
                    "{} capacity {x} outside [0, {}]",
                    tech.id, tech.max_capacity
                )));
            }
        }
        if let Some(extra) = self
            .capacities
            .keys()
            .find(|k| catalog.get(k.as_str()).is_none())
        {
            return Err(Error::InvalidDesign(format!(
                "capacity given for unknown technology {extra}"
            )));
        }
        Ok(())
    }
}

/// Annualized cost per technology, in catalog order.
pub fn cost_breakdown(
    design: &SystemDesign,
    catalog: &TechnologyCatalog,
    cost_model: &CostModel,
) -> Result<Vec<(String, f64)>> {
    design.validate(catalog)?;
    catalog
        .iter()
        .map(|t| Ok((t.id.clone(), annualize_cost(t, cost_model)? * design.capacity(&t.id))))
        .collect()
}

/// Total annual cost of a design.
pub fn total_annual_cost(
    design: &SystemDesign,
    catalog: &TechnologyCatalog,
    cost_model: &CostModel,
) -> Result<f64> {
    Ok(cost_breakdown(design, catalog, cost_model)?
        .iter()
        .map(|(_, c)| c)
        .sum())
}

/// Power available in `hour` with every generator and the gas turbine at
/// full load.
pub fn potential_supply(
    design: &SystemDesign,
    scenario: &Scenario,
    catalog: &TechnologyCatalog,
    hour: usize,
) -> Result<f64> {
    if hour >= scenario.horizon() {
        return Err(Error::InvalidParameter(format!(
            "hour {hour} outside horizon {}",
            scenario.horizon()
        )));
    }
    let mut total = 0.0;
    for tech in catalog.iter() {
        let x = design.capacity(&tech.id);
        match tech.kind {
            TechKind::Supply => {
                let cf = scenario.cf(&tech.id).ok_or_else(|| {
                    Error::Schema(format!("missing capacity factors for {}", tech.id))
                })?;
                total += cf[hour] * x;
            }
            TechKind::GasTurbine => total += tech.efficiency.unwrap_or(0.0) * x,
            _ => {}
        }
    }
    Ok(total)
}
