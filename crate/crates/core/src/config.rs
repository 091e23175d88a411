//! Declarative run configuration, read from TOML.
//!
//! ```toml
//! variable_budget = 200000
//!
//! [catalog]
//! max_capacity = 1e5          # uniform limit for the reference catalog
//! limits = { electrolyser = 5.0 }
//! # technologies = [...]      # replaces the reference catalog
//!
//! [cost_model]
//! annualization = "straight_line"
//! shedding_penalty = 1e6
//!
//! [robustify]
//! strategy = "mod2"
//! reference_scenario = "y0"
//! max_iterations = 20
//! alpha = 0.7
//!
//! [solver]
//! feasibility_tol = 1e-6
//!
//! [data]
//! demand = "demand.csv"
//! scenarios = { y0 = "y0.csv", y1 = "y1.csv" }
//! ```
//!
//! Data paths are relative to the configuration file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catalog::{CostModel, Technology, TechnologyCatalog};
use crate::error::{Error, Result};
use crate::io::{load_demand_csv, load_scenario_csv};
use crate::robustify::{RobustifyConfig, DEFAULT_VARIABLE_BUDGET};
use crate::scenario::Scenario;
use crate::solver::SolverSettings;

pub const DEFAULT_MAX_CAPACITY: f64 = 1e5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CatalogConfig {
    /// Uniform capacity limit applied to the reference catalog.
    pub max_capacity: f64,
    /// Per-technology capacity limits applied last.
    pub limits: BTreeMap<String, f64>,
    pub technologies: Option<Vec<Technology>>,
}

impl Default for CatalogConfig {
    fn default() -> Self {
        CatalogConfig {
            max_capacity: DEFAULT_MAX_CAPACITY,
            limits: BTreeMap::new(),
            technologies: None,
        }
    }
}

impl CatalogConfig {
    pub fn build(&self) -> Result<TechnologyCatalog> {
        let mut catalog = match &self.technologies {
            Some(techs) => TechnologyCatalog::new(techs.clone())?,
            None => TechnologyCatalog::reference(self.max_capacity),
        };
        for (id, limit) in &self.limits {
            catalog = catalog.with_max_capacity(id, *limit)?;
        }
        Ok(catalog)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub demand: Option<PathBuf>,
    pub scenarios: BTreeMap<String, PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub variable_budget: usize,
    pub catalog: CatalogConfig,
    pub cost_model: CostModel,
    pub robustify: RobustifyConfig,
    pub solver: SolverSettings,
    pub data: DataConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            variable_budget: DEFAULT_VARIABLE_BUDGET,
            catalog: CatalogConfig::default(),
            cost_model: CostModel::default(),
            robustify: RobustifyConfig::default(),
            solver: SolverSettings::default(),
            data: DataConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::parse("configuration", e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::parse("configuration", e.to_string()))
    }

    /// Reads a configuration file and makes its data paths absolute.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
        let mut config = Self::from_toml(&text)
            .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.data.demand = config.data.demand.map(|p| base.join(p));
        for p in config.data.scenarios.values_mut() {
            *p = base.join(&*p);
        }
        Ok(config)
    }

    /// Loads the demand file and every scenario listed under `data`.
    pub fn load_scenarios(&self) -> Result<Vec<Scenario>> {
        let demand_path = self
            .data
            .demand
            .as_ref()
            .ok_or_else(|| Error::Schema("configuration has no data.demand".into()))?;
        let demand = load_demand_csv(demand_path)?;
        self.data
            .scenarios
            .iter()
            .map(|(id, path)| load_scenario_csv(id, path, &demand))
            .collect()
    }
}
