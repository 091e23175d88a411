use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::TechnologyCatalog;
use crate::error::{Error, Result};

/// One weather year: hourly capacity factors per supply technology and the
/// hourly electricity demand in MW.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub year_id: String,
    pub capacity_factors: BTreeMap<String, Vec<f64>>,
    pub demand: Vec<f64>,
}

impl Scenario {
    pub fn new(
        year_id: impl Into<String>,
        capacity_factors: BTreeMap<String, Vec<f64>>,
        demand: Vec<f64>,
    ) -> Result<Self> {
        let s = Scenario {
            year_id: year_id.into(),
            capacity_factors,
            demand,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn horizon(&self) -> usize {
        self.demand.len()
    }

    pub fn validate(&self) -> Result<()> {
        let horizon = self.horizon();
        if horizon == 0 {
            return Err(Error::Schema(format!("{}: empty horizon", self.year_id)));
        }
        for (t, &d) in self.demand.iter().enumerate() {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::Schema(format!(
                    "{}: demand at hour {t} is {d}, expected a finite non-negative value",
                    self.year_id
                )));
            }
        }
        for (tech, series) in &self.capacity_factors {
            if series.len() != horizon {
                return Err(Error::Schema(format!(
                    "{}: capacity factors for {tech} have {} entries, horizon is {horizon}",
                    self.year_id,
                    series.len()
                )));
            }
            if let Some((t, v)) = series
                .iter()
                .enumerate()
                .find(|(_, v)| !(0.0..=1.0).contains(*v))
            {
                return Err(Error::Schema(format!(
                    "{}: capacity factor {v} for {tech} at hour {t} outside [0, 1]",
                    self.year_id
                )));
            }
        }
        Ok(())
    }

    /// Ensures every supply technology of `catalog` has a series.
    pub fn check_catalog(&self, catalog: &TechnologyCatalog) -> Result<()> {
        for (_, tech) in catalog.supply() {
            if !self.capacity_factors.contains_key(&tech.id) {
                return Err(Error::Schema(format!(
                    "{}: missing capacity factors for supply technology {}",
                    self.year_id, tech.id
                )));
            }
        }
        Ok(())
    }

    pub fn cf(&self, tech: &str) -> Option<&[f64]> {
        self.capacity_factors.get(tech).map(Vec::as_slice)
    }

    pub fn total_demand(&self) -> f64 {
        self.demand.iter().sum()
    }

    /// Full load hours of one technology over `hours`.
    pub fn full_load_hours(&self, tech: &str, hours: std::ops::RangeInclusive<usize>) -> f64 {
        self.cf(tech).map_or(0.0, |s| s[hours].iter().sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cf(v: &[f64]) -> BTreeMap<String, Vec<f64>> {
        BTreeMap::from([("wind".to_string(), v.to_vec())])
    }

    #[test]
    fn rejects_mismatched_horizon() {
        assert!(Scenario::new("a", cf(&[0.1, 0.2]), vec![1.0; 3]).is_err());
    }

    #[test]
    fn rejects_out_of_range_values() {
        assert!(Scenario::new("a", cf(&[0.1, 1.2]), vec![1.0; 2]).is_err());
        assert!(Scenario::new("a", cf(&[0.1, f64::NAN]), vec![1.0; 2]).is_err());
        assert!(Scenario::new("a", cf(&[0.1, 0.2]), vec![1.0, -1.0]).is_err());
        assert!(Scenario::new("a", cf(&[0.0, 1.0]), vec![0.0, 0.0]).is_ok());
    }

    #[test]
    fn full_load_hours_sum_capacity_factors() {
        let s = Scenario::new("a", cf(&[0.1, 0.2, 0.3]), vec![1.0; 3]).unwrap();
        assert!((s.full_load_hours("wind", 0..=2) - 0.6).abs() < 1e-12);
        assert_eq!(s.full_load_hours("pv", 0..=2), 0.0);
    }
}
