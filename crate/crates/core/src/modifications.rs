//! Problem modifications accumulated across robustification iterations.
//!
//! A [`ModificationState`] holds everything the expansion LP needs beyond
//! the raw reference data: demand additions, a record of spliced periods,
//! extra linear constraints over capacities and auxiliary variables, and an
//! end-of-year hydrogen requirement. Every operation validates its inputs
//! before touching the state, so a failed call leaves it unchanged.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::catalog::TechnologyCatalog;
use crate::critical_periods::HourSpan;
use crate::error::{Error, Result};
use crate::lp::Sense;
use crate::scenario::Scenario;

/// Default half-width of the demand smoothing window in hours.
pub const DEFAULT_SMOOTHING_WINDOW: usize = 12;
pub const DEFAULT_ALPHA: f64 = 0.7;

/// A variable referenced by a registered constraint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutTerm {
    Capacity(String),
    /// Start-of-year hydrogen storage level.
    InitialHydrogen,
    /// Index into [`ModificationState::sigma`].
    Sigma(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutOrigin {
    YearlyBalance,
    LocalHydrogen,
    SigmaLimit,
    HydrogenPrefix,
    LocalCapacity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub label: String,
    pub origin: CutOrigin,
    pub scenario_id: String,
    pub period: Option<HourSpan>,
    pub terms: Vec<(CutTerm, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Cut {
    /// Left-hand side minus right-hand side for given values, positive when
    /// a `>=` cut holds with slack.
    pub fn surplus(&self, value: impl Fn(&CutTerm) -> f64) -> f64 {
        let lhs: f64 = self.terms.iter().map(|(t, a)| a * value(t)).sum();
        match self.sense {
            Sense::Ge => lhs - self.rhs,
            Sense::Le => self.rhs - lhs,
            Sense::Eq => -(lhs - self.rhs).abs(),
        }
    }
}

/// Auxiliary turbine energy for one critical period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaSpec {
    pub scenario_id: String,
    pub period: HourSpan,
}

impl SigmaSpec {
    pub fn key(&self) -> String {
        format!("{}:{}", self.scenario_id, self.period)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Splice {
    pub target: HourSpan,
    pub donor: String,
    /// Same hours as `target`; kept explicit for reporting.
    pub donor_hours: HourSpan,
    pub iteration: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModificationState {
    pub demand_additions: Vec<f64>,
    pub spliced_periods: Vec<Splice>,
    pub sigma: Vec<SigmaSpec>,
    pub h2_end_bonus: f64,
    alpha: f64,
    cuts: Vec<Cut>,
    prefix_cuts: BTreeMap<String, Vec<Cut>>,
    balanced_years: BTreeSet<String>,
}

fn check_nonneg(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be finite and non-negative, got {v}")))
    }
}

/// Spreads every entry uniformly over `[t-w, t+w]` clipped to the series.
pub fn smooth_uniform(values: &[f64], half_width: usize) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    for (t, &v) in values.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let lo = t.saturating_sub(half_width);
        let hi = (t + half_width).min(n - 1);
        let share = v / (hi - lo + 1) as f64;
        for o in &mut out[lo..=hi] {
            *o += share;
        }
    }
    out
}

impl ModificationState {
    pub fn new(horizon: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        Ok(ModificationState {
            demand_additions: vec![0.0; horizon],
            spliced_periods: Vec::new(),
            sigma: Vec::new(),
            h2_end_bonus: 0.0,
            alpha,
            cuts: Vec::new(),
            prefix_cuts: BTreeMap::new(),
            balanced_years: BTreeSet::new(),
        })
    }

    pub fn horizon(&self) -> usize {
        self.demand_additions.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// All registered constraints in a stable order.
    pub fn cuts(&self) -> impl Iterator<Item = &Cut> {
        self.cuts.iter().chain(self.prefix_cuts.values().flatten())
    }

    pub fn cut_count(&self) -> usize {
        self.cuts().count()
    }

    pub fn has_yearly_balance(&self, scenario_id: &str) -> bool {
        self.balanced_years.contains(scenario_id)
    }

    pub fn sigma_index(&self, scenario_id: &str, period: HourSpan) -> Option<usize> {
        self.sigma
            .iter()
            .position(|s| s.scenario_id == scenario_id && s.period == period)
    }

    /// Periods carrying a sigma variable for `scenario_id`, in start order.
    pub fn sigma_periods(&self, scenario_id: &str) -> Vec<HourSpan> {
        let mut v: Vec<_> = self
            .sigma
            .iter()
            .filter(|s| s.scenario_id == scenario_id)
            .map(|s| s.period)
            .collect();
        v.sort();
        v
    }

    fn check_scenario(&self, scenario: &Scenario, catalog: &TechnologyCatalog) -> Result<()> {
        scenario.check_catalog(catalog)?;
        if scenario.horizon() != self.horizon() {
            return Err(Error::Schema(format!(
                "scenario {} has horizon {}, state has {}",
                scenario.year_id,
                scenario.horizon(),
                self.horizon()
            )));
        }
        Ok(())
    }

    fn modified_demand(&self, scenario: &Scenario, hours: impl Iterator<Item = usize>) -> f64 {
        hours.map(|t| scenario.demand[t] + self.demand_additions[t]).sum()
    }

    /// Supply-capacity terms weighted by full load hours over `hours`.
    fn supply_terms(
        scenario: &Scenario,
        catalog: &TechnologyCatalog,
        hours: std::ops::RangeInclusive<usize>,
        weight: f64,
    ) -> Vec<(CutTerm, f64)> {
        catalog
            .supply()
            .map(|(_, t)| {
                (
                    CutTerm::Capacity(t.id.clone()),
                    weight * scenario.full_load_hours(&t.id, hours.clone()),
                )
            })
            .filter(|(_, a)| *a != 0.0)
            .collect()
    }

    /// Adds the hourly gaps to the demand, optionally smoothed.
    pub fn mod1_demand_increase(&mut self, gaps: &[f64], smoothing: Option<usize>) -> Result<()> {
        if gaps.len() != self.horizon() {
            return Err(Error::Schema(format!(
                "gap series has {} entries, horizon is {}",
                gaps.len(),
                self.horizon()
            )));
        }
        if let Some((t, &g)) = gaps.iter().enumerate().find(|(_, &g)| !(g.is_finite() && g >= 0.0)) {
            return Err(Error::InvalidParameter(format!("gap at hour {t} is {g}")));
        }
        let add = match smoothing {
            Some(w) => smooth_uniform(gaps, w),
            None => gaps.to_vec(),
        };
        for (d, a) in self.demand_additions.iter_mut().zip(add) {
            *d += a;
        }
        Ok(())
    }

    /// Copies all capacity factors of `donor` over `period` into `reference`.
    ///
    /// Demand is left untouched. Periods overlapping an earlier splice are
    /// rejected.
    pub fn mod2_splice(
        &mut self,
        reference: &Scenario,
        donor: &Scenario,
        period: HourSpan,
        iteration: usize,
    ) -> Result<Scenario> {
        if reference.horizon() != donor.horizon() || reference.horizon() != self.horizon() {
            return Err(Error::Schema(format!(
                "horizon mismatch: reference {}, donor {}, state {}",
                reference.horizon(),
                donor.horizon(),
                self.horizon()
            )));
        }
        period.check_within(reference.horizon())?;
        if let Some(prev) = self.spliced_periods.iter().find(|s| s.target.overlaps(&period)) {
            return Err(Error::Overlap {
                start: period.start,
                end: period.end,
                other_start: prev.target.start,
                other_end: prev.target.end,
            });
        }
        let mut synthetic = reference.clone();
        for (tech, series) in synthetic.capacity_factors.iter_mut() {
            let src = donor.cf(tech).ok_or_else(|| {
                Error::Schema(format!("donor {} lacks capacity factors for {tech}", donor.year_id))
            })?;
            series[period.start..=period.end].copy_from_slice(&src[period.start..=period.end]);
        }
        self.spliced_periods.push(Splice {
            target: period,
            donor: donor.year_id.clone(),
            donor_hours: period,
            iteration,
        });
        Ok(synthetic)
    }

    /// Requires weighted yearly renewable supply to exceed modified demand by
    /// `gap_total`.
    pub fn mod3a_yearly_balance(
        &mut self,
        scenario: &Scenario,
        catalog: &TechnologyCatalog,
        gap_total: f64,
        loss_weight: f64,
    ) -> Result<()> {
        check_nonneg("gap total", gap_total)?;
        check_nonneg("loss weight", loss_weight)?;
        self.check_scenario(scenario, catalog)?;
        let h = scenario.horizon();
        let terms = Self::supply_terms(scenario, catalog, 0..=h.saturating_sub(1), loss_weight);
        if terms.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "scenario {} has no renewable supply to balance",
                scenario.year_id
            )));
        }
        let rhs = gap_total + self.modified_demand(scenario, 0..h);
        self.cuts.push(Cut {
            label: format!("yearly_balance[{}#{}]", scenario.year_id, self.cuts.len()),
            origin: CutOrigin::YearlyBalance,
            scenario_id: scenario.year_id.clone(),
            period: None,
            terms,
            sense: Sense::Ge,
            rhs,
        });
        self.balanced_years.insert(scenario.year_id.clone());
        Ok(())
    }

    /// Introduces turbine energy `sigma` covering the renewable deficit of
    /// `period`. Returns `false` when the period is already registered.
    pub fn mod3b_local_h2(
        &mut self,
        scenario: &Scenario,
        catalog: &TechnologyCatalog,
        period: HourSpan,
    ) -> Result<bool> {
        self.check_scenario(scenario, catalog)?;
        period.check_within(scenario.horizon())?;
        if self.sigma_index(&scenario.year_id, period).is_some() {
            return Ok(false);
        }
        let spec = SigmaSpec {
            scenario_id: scenario.year_id.clone(),
            period,
        };
        let k = self.sigma.len();
        let key = spec.key();

        let mut terms = Self::supply_terms(scenario, catalog, period.hours(), 1.0);
        terms.push((CutTerm::Sigma(k), 1.0));
        let demand = self.modified_demand(scenario, period.hours());
        let mut limit = vec![(CutTerm::Sigma(k), 1.0)];
        if let Some((_, gt)) = catalog.gas_turbine() {
            let eta = gt.efficiency.unwrap_or(1.0);
            limit.push((CutTerm::Capacity(gt.id.clone()), -(period.len() as f64) * eta));
        }

        self.sigma.push(spec);
        self.cuts.push(Cut {
            label: format!("local_h2[{key}]"),
            origin: CutOrigin::LocalHydrogen,
            scenario_id: scenario.year_id.clone(),
            period: Some(period),
            terms,
            sense: Sense::Ge,
            rhs: demand,
        });
        self.cuts.push(Cut {
            label: format!("sigma_limit[{key}]"),
            origin: CutOrigin::SigmaLimit,
            scenario_id: scenario.year_id.clone(),
            period: Some(period),
            terms: limit,
            sense: Sense::Le,
            rhs: 0.0,
        });
        Ok(true)
    }

    /// Replaces the hydrogen prefix constraints of `scenario` by one per
    /// listed period: stored hydrogen plus discounted renewable surplus
    /// before the period covers all turbine energy up to and including it.
    pub fn mod3_h2_prefix(
        &mut self,
        scenario: &Scenario,
        catalog: &TechnologyCatalog,
        ordered_periods: &[HourSpan],
    ) -> Result<()> {
        self.check_scenario(scenario, catalog)?;
        let mut sigma_ix = Vec::with_capacity(ordered_periods.len());
        for (i, p) in ordered_periods.iter().enumerate() {
            p.check_within(scenario.horizon())?;
            if i > 0 && ordered_periods[i - 1].end >= p.start {
                return Err(Error::InvalidParameter(format!(
                    "periods {} and {p} are unordered or overlapping",
                    ordered_periods[i - 1]
                )));
            }
            let k = self.sigma_index(&scenario.year_id, *p).ok_or_else(|| {
                Error::InvalidParameter(format!("no sigma registered for {}:{p}", scenario.year_id))
            })?;
            sigma_ix.push(k);
        }

        let mut cuts = Vec::with_capacity(ordered_periods.len());
        for (i, p) in ordered_periods.iter().enumerate() {
            let mut terms = vec![(CutTerm::InitialHydrogen, 1.0)];
            let mut rhs = 0.0;
            if p.start > 0 {
                terms.extend(Self::supply_terms(scenario, catalog, 0..=p.start - 1, self.alpha));
                rhs = self.alpha * self.modified_demand(scenario, 0..p.start);
            }
            terms.extend(sigma_ix[..=i].iter().map(|&k| (CutTerm::Sigma(k), -1.0)));
            cuts.push(Cut {
                label: format!("h2_prefix[{}:{p}]", scenario.year_id),
                origin: CutOrigin::HydrogenPrefix,
                scenario_id: scenario.year_id.clone(),
                period: Some(*p),
                terms,
                sense: Sense::Ge,
                rhs,
            });
        }
        if cuts.is_empty() {
            self.prefix_cuts.remove(&scenario.year_id);
        } else {
            self.prefix_cuts.insert(scenario.year_id.clone(), cuts);
        }
        Ok(())
    }

    /// Requires renewable supply plus full-load turbine output (and battery
    /// capacity if asked) to cover demand over `period`. Returns `false` if
    /// the same period is already registered.
    pub fn mod4_local_capacity(
        &mut self,
        scenario: &Scenario,
        catalog: &TechnologyCatalog,
        period: HourSpan,
        include_battery: bool,
    ) -> Result<bool> {
        self.check_scenario(scenario, catalog)?;
        period.check_within(scenario.horizon())?;
        let label = format!("local_capacity[{}:{period}]", scenario.year_id);
        if self.cuts.iter().any(|c| c.label == label) {
            return Ok(false);
        }
        let mut terms = Self::supply_terms(scenario, catalog, period.hours(), 1.0);
        if let Some((_, gt)) = catalog.gas_turbine() {
            let eta = gt.efficiency.unwrap_or(1.0);
            terms.push((CutTerm::Capacity(gt.id.clone()), period.len() as f64 * eta));
        }
        if include_battery {
            if let Some((_, b)) = catalog.battery() {
                terms.push((CutTerm::Capacity(b.id.clone()), 1.0));
            }
        }
        if terms.is_empty() {
            return Err(Error::InvalidParameter("no capacity can serve the period".into()));
        }
        self.cuts.push(Cut {
            label,
            origin: CutOrigin::LocalCapacity,
            scenario_id: scenario.year_id.clone(),
            period: Some(period),
            terms,
            sense: Sense::Ge,
            rhs: self.modified_demand(scenario, period.hours()),
        });
        Ok(true)
    }

    /// Raises the required end-of-year hydrogen surplus.
    pub fn mod6_global_h2(&mut self, gap_total: f64) -> Result<()> {
        check_nonneg("gap total", gap_total)?;
        self.h2_end_bonus += gap_total;
        Ok(())
    }
}
