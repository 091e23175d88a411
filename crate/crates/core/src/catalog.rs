//! Technology parameters and cost annualization.
//!
//! Capacities are measured in MW for supply and conversion technologies and
//! in MWh for storage. Gas turbine capacity is expressed on the hydrogen
//! input side, so its electrical output is `efficiency * capacity`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Role a technology plays in the single-node model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TechKind {
    /// Weather-dependent generation (PV, wind).
    Supply,
    /// Lossless electricity storage, capacity in MWh.
    Battery,
    /// Hydrogen storage (salt cavern), capacity in MWh of hydrogen.
    HydrogenStorage,
    /// Power-to-hydrogen conversion, capacity in MW of electrical input.
    Electrolyser,
    /// Hydrogen-fired backup plant, capacity in MW of hydrogen input.
    GasTurbine,
}

/// Coarse classification used in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TechClass {
    Supply,
    Storage,
    Conversion,
}

impl TechKind {
    pub fn class(self) -> TechClass {
        match self {
            TechKind::Supply => TechClass::Supply,
            TechKind::Battery | TechKind::HydrogenStorage => TechClass::Storage,
            TechKind::Electrolyser | TechKind::GasTurbine => TechClass::Conversion,
        }
    }

    pub fn is_conversion(self) -> bool {
        self.class() == TechClass::Conversion
    }
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Technology {
    pub id: String,
    pub kind: TechKind,
    /// Investment cost per capacity unit.
    pub capex: f64,
    /// Fixed operating cost per capacity unit and year.
    pub opex_fix: f64,
    pub lifetime_years: u32,
    pub max_capacity: f64,
    /// Conversion efficiency; required for electrolysers and gas turbines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efficiency: Option<f64>,
    /// Fractional loss of stored energy per hour (batteries only).
    #[serde(default, skip_serializing_if = "is_zero")]
    pub self_discharge_per_hour: f64,
}

impl Technology {
    pub fn new(
        id: impl Into<String>,
        kind: TechKind,
        capex: f64,
        opex_fix: f64,
        lifetime_years: u32,
        max_capacity: f64,
    ) -> Self {
        Technology {
            id: id.into(),
            kind,
            capex,
            opex_fix,
            lifetime_years,
            max_capacity,
            efficiency: None,
            self_discharge_per_hour: 0.0,
        }
    }

    pub fn with_efficiency(mut self, efficiency: f64) -> Self {
        self.efficiency = Some(efficiency);
        self
    }

    pub fn with_self_discharge(mut self, per_hour: f64) -> Self {
        self.self_discharge_per_hour = per_hour;
        self
    }

    pub fn with_max_capacity(mut self, max_capacity: f64) -> Self {
        self.max_capacity = max_capacity;
        self
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("{}: {}", self.id, what)));
        if self.id.is_empty() {
            return Err(Error::InvalidParameter("empty technology id".into()));
        }
        if !(self.capex.is_finite() && self.capex >= 0.0) {
            return bad("capex must be finite and non-negative");
        }
        if !(self.opex_fix.is_finite() && self.opex_fix >= 0.0) {
            return bad("opex_fix must be finite and non-negative");
        }
        if self.lifetime_years < 1 {
            return bad("lifetime must be at least one year");
        }
        if !(self.max_capacity.is_finite() && self.max_capacity >= 0.0) {
            return bad("max_capacity must be finite and non-negative");
        }
        match (self.kind.is_conversion(), self.efficiency) {
            (true, Some(eta)) if eta > 0.0 && eta <= 1.0 => {}
            (true, Some(_)) => return bad("efficiency must lie in (0, 1]"),
            (true, None) => return bad("conversion technologies need an efficiency"),
            (false, Some(_)) => return bad("efficiency is only meaningful for conversion"),
            (false, None) => {}
        }
        if !(0.0..1.0).contains(&self.self_discharge_per_hour) {
            return bad("self-discharge must lie in [0, 1)");
        }
        if self.self_discharge_per_hour > 0.0 && self.kind != TechKind::Battery {
            return bad("self-discharge is only supported for batteries");
        }
        Ok(())
    }
}

/// Validated, ordered set of technologies.
///
/// Supply technologies may appear any number of times; each of the other
/// kinds at most once, since the model carries a single electricity store,
/// a single hydrogen store and one conversion path in each direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Technology>", into = "Vec<Technology>")]
pub struct TechnologyCatalog {
    techs: Vec<Technology>,
}

impl TryFrom<Vec<Technology>> for TechnologyCatalog {
    type Error = Error;

    fn try_from(techs: Vec<Technology>) -> Result<Self> {
        TechnologyCatalog::new(techs)
    }
}

impl From<TechnologyCatalog> for Vec<Technology> {
    fn from(c: TechnologyCatalog) -> Self {
        c.techs
    }
}

impl TechnologyCatalog {
    pub fn new(techs: Vec<Technology>) -> Result<Self> {
        for (i, t) in techs.iter().enumerate() {
            t.validate()?;
            if techs[..i].iter().any(|o| o.id == t.id) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate technology id {}",
                    t.id
                )));
            }
            if t.kind != TechKind::Supply && techs[..i].iter().any(|o| o.kind == t.kind) {
                return Err(Error::InvalidParameter(format!(
                    "at most one technology of kind {:?} is supported",
                    t.kind
                )));
            }
        }
        if !techs.iter().any(|t| t.kind == TechKind::Supply) {
            return Err(Error::InvalidParameter(
                "catalog needs at least one supply technology".into(),
            ));
        }
        Ok(TechnologyCatalog { techs })
    }

    pub fn len(&self) -> usize {
        self.techs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.techs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Technology> {
        self.techs.iter()
    }

    pub fn get(&self, id: &str) -> Option<&Technology> {
        self.techs.iter().find(|t| t.id == id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.techs.iter().position(|t| t.id == id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.techs.iter().map(|t| t.id.as_str())
    }

    /// Supply technologies with their catalog index.
    pub fn supply(&self) -> impl Iterator<Item = (usize, &Technology)> {
        self.techs
            .iter()
            .enumerate()
            .filter(|(_, t)| t.kind == TechKind::Supply)
    }

    pub fn find_kind(&self, kind: TechKind) -> Option<(usize, &Technology)> {
        self.techs.iter().enumerate().find(|(_, t)| t.kind == kind)
    }

    pub fn battery(&self) -> Option<(usize, &Technology)> {
        self.find_kind(TechKind::Battery)
    }

    pub fn hydrogen_storage(&self) -> Option<(usize, &Technology)> {
        self.find_kind(TechKind::HydrogenStorage)
    }

    pub fn electrolyser(&self) -> Option<(usize, &Technology)> {
        self.find_kind(TechKind::Electrolyser)
    }

    pub fn gas_turbine(&self) -> Option<(usize, &Technology)> {
        self.find_kind(TechKind::GasTurbine)
    }

    /// Electrical output efficiency of the gas turbine, zero when absent.
    pub fn gas_turbine_efficiency(&self) -> f64 {
        self.gas_turbine()
            .and_then(|(_, t)| t.efficiency)
            .unwrap_or(0.0)
    }

    /// Returns a copy with one technology's capacity limit replaced.
    pub fn with_max_capacity(&self, id: &str, max_capacity: f64) -> Result<Self> {
        let mut techs = self.techs.clone();
        let tech = techs
            .iter_mut()
            .find(|t| t.id == id)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown technology {id}")))?;
        tech.max_capacity = max_capacity;
        TechnologyCatalog::new(techs)
    }

    /// Catalog built from the reference cost table, with MW/MWh units and
    /// the given uniform capacity limit.
    ///
    /// The table gives no conversion efficiencies; 0.7 is used for
    /// electrolysis and 0.6 for the hydrogen turbine.
    pub fn reference(max_capacity: f64) -> Self {
        let rows = reference_cost_table();
        let mut techs = Vec::new();
        for row in rows.iter() {
            let Some(kind) = row.kind else { continue };
            let mut t = Technology::new(
                row.id,
                kind,
                row.capex_per_kilo * 1000.0,
                row.opex_per_kilo * 1000.0,
                row.lifetime_years,
                max_capacity,
            );
            match kind {
                TechKind::Electrolyser => t = t.with_efficiency(0.7),
                TechKind::GasTurbine => t = t.with_efficiency(0.6),
                _ => {}
            }
            techs.push(t);
        }
        // pv_rooftop/pv_open_field and the two wind classes are all supply,
        // the rest occur once each.
        TechnologyCatalog::new(techs).expect("reference catalog is valid")
    }
}

/// One row of the techno-economic reference table, in the table's own units
/// (€/kW, €/kWh or €/(kW km)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostTableRow {
    pub id: &'static str,
    pub capex_per_kilo: f64,
    pub opex_per_kilo: f64,
    pub lifetime_years: u32,
    pub unit: &'static str,
    /// `None` for network assets that the single-node model does not build.
    pub kind: Option<TechKind>,
}

pub fn reference_cost_table() -> [CostTableRow; 10] {
    use TechKind::*;
    let row = |id, capex, opex, life, unit, kind| CostTableRow {
        id,
        capex_per_kilo: capex,
        opex_per_kilo: opex,
        lifetime_years: life,
        unit,
        kind,
    };
    [
        row("pv_rooftop", 474.0, 10.0, 20, "EUR/kW", Some(Supply)),
        row("pv_open_field", 320.0, 5.4, 20, "EUR/kW", Some(Supply)),
        row("wind_onshore", 1000.0, 25.0, 20, "EUR/kW", Some(Supply)),
        row("wind_offshore", 2530.0, 63.0, 20, "EUR/kW", Some(Supply)),
        row("li_ion_battery", 131.0, 3.3, 15, "EUR/kWh", Some(Battery)),
        row("h2_salt_cavern", 0.7, 0.01, 40, "EUR/kWh", Some(HydrogenStorage)),
        row("electricity_grid", 0.86, 0.03, 40, "EUR/(kW km)", None),
        row("h2_pipeline", 0.185, 0.01, 40, "EUR/(kW km)", None),
        row("electrolyser", 350.0, 11.0, 10, "EUR/kW", Some(Electrolyser)),
        row("h2_ccgt", 760.0, 23.0, 20, "EUR/kW", Some(GasTurbine)),
    ]
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Annualization {
    #[default]
    StraightLine,
    Annuity,
}

/// How investment is turned into annual cost, and the price of unserved
/// energy in the capacity-expansion objective.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostModel {
    pub annualization: Annualization,
    pub discount_rate: f64,
    /// Penalty per MWh of shed load.
    pub shedding_penalty: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            annualization: Annualization::StraightLine,
            discount_rate: 0.0,
            shedding_penalty: 1e6,
        }
    }
}

impl CostModel {
    pub fn annuity(discount_rate: f64) -> Self {
        CostModel {
            annualization: Annualization::Annuity,
            discount_rate,
            ..CostModel::default()
        }
    }

    /// Checks the rate range and that shedding is dearer than a full year
    /// of any technology's capacity.
    pub fn validate(&self, catalog: &TechnologyCatalog) -> Result<()> {
        if !(0.0..1.0).contains(&self.discount_rate) {
            return Err(Error::InvalidParameter(format!(
                "discount rate {} outside [0, 1)",
                self.discount_rate
            )));
        }
        let mut largest: f64 = 0.0;
        for tech in catalog.iter() {
            largest = largest.max(annualize_cost(tech, self)?);
        }
        if !(self.shedding_penalty.is_finite() && self.shedding_penalty > largest) {
            return Err(Error::InvalidParameter(format!(
                "shedding penalty {} must exceed the largest annualized cost {}",
                self.shedding_penalty, largest
            )));
        }
        Ok(())
    }
}

/// Capital recovery factor `r(1+r)^L / ((1+r)^L - 1)`; `1/L` at `r = 0`.
pub fn annuity_factor(rate: f64, lifetime_years: u32) -> f64 {
    let n = f64::from(lifetime_years);
    if rate == 0.0 {
        return 1.0 / n;
    }
    let growth = (1.0 + rate).powf(n);
    rate * growth / (growth - 1.0)
}

/// Annual cost of one capacity unit of `tech`.
pub fn annualize_cost(tech: &Technology, cost_model: &CostModel) -> Result<f64> {
    if tech.lifetime_years < 1 {
        return Err(Error::InvalidParameter(format!(
            "{}: lifetime must be at least one year",
            tech.id
        )));
    }
    let capital = match cost_model.annualization {
        Annualization::StraightLine => tech.capex / f64::from(tech.lifetime_years),
        Annualization::Annuity => {
            tech.capex * annuity_factor(cost_model.discount_rate, tech.lifetime_years)
        }
    };
    Ok(capital + tech.opex_fix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn salt_cavern_straight_line() {
        let cavern = Technology::new("cavern", TechKind::HydrogenStorage, 0.7, 0.01, 40, 1.0);
        let c = annualize_cost(&cavern, &CostModel::default()).unwrap();
        assert_relative_eq!(c, 0.0275, max_relative = 1e-12);
    }

    #[test]
    fn zero_cost_technology() {
        let t = Technology::new("free", TechKind::Supply, 0.0, 0.0, 20, 1.0);
        assert_eq!(annualize_cost(&t, &CostModel::default()).unwrap(), 0.0);
    }

    #[test]
    fn onshore_wind_annuity() {
        // Closed form evaluated independently: 1.08^20 = 4.660957143...,
        // 0.08 * 4.660957143 / 3.660957143 = 0.1018522088.
        let growth: f64 = (0..20).fold(1.0, |acc, _| acc * 1.08);
        let expected_factor = 0.08 * growth / (growth - 1.0);
        assert_relative_eq!(expected_factor, 0.101_852_208_8, max_relative = 1e-9);
        let wind = Technology::new("wind", TechKind::Supply, 1000.0, 25.0, 20, 1.0);
        let c = annualize_cost(&wind, &CostModel::annuity(0.08)).unwrap();
        assert_relative_eq!(c, 25.0 + 1000.0 * expected_factor, max_relative = 1e-12);
    }

    #[test]
    fn annuity_at_zero_rate_is_straight_line() {
        assert_relative_eq!(annuity_factor(0.0, 20), 0.05);
        assert!(annuity_factor(1e-9, 20) - 0.05 < 1e-8);
    }

    #[test]
    fn annualized_cost_never_below_opex() {
        let t = Technology::new("t", TechKind::Supply, 500.0, 7.0, 30, 1.0);
        for cm in [CostModel::default(), CostModel::annuity(0.05)] {
            assert!(annualize_cost(&t, &cm).unwrap() >= 7.0);
        }
    }

    #[test]
    fn zero_lifetime_rejected() {
        let t = Technology::new("t", TechKind::Supply, 1.0, 0.0, 0, 1.0);
        assert!(annualize_cost(&t, &CostModel::default()).is_err());
        assert!(TechnologyCatalog::new(vec![t]).is_err());
    }

    #[test]
    fn catalog_rejects_bad_entries() {
        let wind = Technology::new("wind", TechKind::Supply, 1.0, 0.0, 20, 1.0);
        assert!(TechnologyCatalog::new(vec![wind.clone(), wind.clone()]).is_err());
        let el = Technology::new("el", TechKind::Electrolyser, 1.0, 0.0, 10, 1.0);
        assert!(TechnologyCatalog::new(vec![wind.clone(), el.clone()]).is_err());
        assert!(
            TechnologyCatalog::new(vec![wind.clone(), el.clone().with_efficiency(1.2)]).is_err()
        );
        assert!(TechnologyCatalog::new(vec![wind.clone(), el.with_efficiency(0.7)]).is_ok());
        assert!(TechnologyCatalog::new(vec![]).is_err());
        let neg = Technology::new("neg", TechKind::Supply, -1.0, 0.0, 20, 1.0);
        assert!(TechnologyCatalog::new(vec![neg]).is_err());
    }

    #[test]
    fn reference_catalog_matches_table() {
        let cat = TechnologyCatalog::reference(1e5);
        assert_eq!(cat.len(), 8);
        let cavern = cat.hydrogen_storage().unwrap().1;
        assert_relative_eq!(cavern.capex, 700.0);
        let c = annualize_cost(cavern, &CostModel::default()).unwrap();
        assert_relative_eq!(c, 27.5, max_relative = 1e-12);
        assert!(CostModel::default().validate(&cat).is_ok());
    }

    #[test]
    fn shedding_penalty_must_dominate() {
        let cat = TechnologyCatalog::reference(1e5);
        let cm = CostModel {
            shedding_penalty: 10.0,
            ..CostModel::default()
        };
        assert!(cm.validate(&cat).is_err());
        let cm = CostModel {
            discount_rate: 1.0,
            ..CostModel::default()
        };
        assert!(cm.validate(&cat).is_err());
    }
}
