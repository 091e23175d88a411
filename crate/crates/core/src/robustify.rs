//! The robustification loop, cost bounds and the exact multi-year oracle.
//!
//! Each iteration optimises capacities on the (possibly synthetic)
//! reference data under the accumulated modifications, tests the design
//! against every year, and feeds the worst year's gaps into the selected
//! modification strategy.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{CostModel, TechnologyCatalog};
use crate::critical_periods::{assess_period, cluster_gap_hours, rank_candidate_periods, HourSpan, RankedPeriod};
use crate::design::{total_annual_cost, SystemDesign};
use crate::error::{Error, Result};
use crate::feasibility::{
    is_robust, RobustnessReport, SupplyGapSeries, Verdict, DEFAULT_EPS_GAP_FRACTION, DEFAULT_EPS_HOUR,
};
use crate::model::{build_capex, build_deterministic_equivalent};
use crate::modifications::{ModificationState, DEFAULT_ALPHA, DEFAULT_SMOOTHING_WINDOW};
use crate::scenario::Scenario;
use crate::solver::{solve_optimal, SolveStatus, SolverError, SolverSettings};

pub const DEFAULT_MAX_ITERATIONS: usize = 20;
pub const DEFAULT_JOIN_DISTANCE: usize = 6;
pub const DEFAULT_VARIABLE_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Mod1,
    Mod1Smoothed,
    Mod2,
    Mod3,
    Mod4,
    Mod6,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Mod1,
        Strategy::Mod1Smoothed,
        Strategy::Mod2,
        Strategy::Mod3,
        Strategy::Mod4,
        Strategy::Mod6,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Strategy::Mod1 => "mod1",
            Strategy::Mod1Smoothed => "mod1s",
            Strategy::Mod2 => "mod2",
            Strategy::Mod3 => "mod3",
            Strategy::Mod4 => "mod4",
            Strategy::Mod6 => "mod6",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mod1" => Ok(Strategy::Mod1),
            "mod1s" | "mod1_smoothed" => Ok(Strategy::Mod1Smoothed),
            "mod2" => Ok(Strategy::Mod2),
            "mod3" => Ok(Strategy::Mod3),
            "mod4" => Ok(Strategy::Mod4),
            "mod6" => Ok(Strategy::Mod6),
            other => Err(Error::InvalidParameter(format!("unknown strategy {other}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RobustifyConfig {
    pub strategy: Strategy,
    pub max_iterations: usize,
    /// Admissible total gap per year as a fraction of annual demand.
    pub eps_gap_fraction: f64,
    /// Absolute override of the admissible total gap.
    pub eps_gap: Option<f64>,
    pub eps_hour: f64,
    pub reference_scenario: String,
    /// Years to robustify against; empty means all supplied scenarios.
    pub scenario_set: Vec<String>,
    pub alpha: f64,
    /// Weight of renewable supply in the yearly balance; defaults to `alpha`.
    pub loss_weight: Option<f64>,
    pub smoothing_window: usize,
    pub max_join_distance: usize,
    /// Hours added on both sides of a clustered period.
    pub period_margin: usize,
    pub splices_per_iteration: usize,
    /// Length of the blocks offered for splicing once no uncovered deficit
    /// period is left.
    pub splice_block_hours: usize,
    pub mod4_include_battery: bool,
}

impl Default for RobustifyConfig {
    fn default() -> Self {
        RobustifyConfig {
            strategy: Strategy::Mod2,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            eps_gap_fraction: DEFAULT_EPS_GAP_FRACTION,
            eps_gap: None,
            eps_hour: DEFAULT_EPS_HOUR,
            reference_scenario: String::new(),
            scenario_set: Vec::new(),
            alpha: DEFAULT_ALPHA,
            loss_weight: None,
            smoothing_window: DEFAULT_SMOOTHING_WINDOW,
            max_join_distance: DEFAULT_JOIN_DISTANCE,
            period_margin: 0,
            splices_per_iteration: 1,
            splice_block_hours: 24,
            mod4_include_battery: false,
        }
    }
}

impl RobustifyConfig {
    pub fn new(strategy: Strategy, reference: impl Into<String>) -> Self {
        RobustifyConfig {
            strategy,
            reference_scenario: reference.into(),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1".into());
        }
        if !(self.eps_gap_fraction >= 0.0) || self.eps_gap.is_some_and(|e| !(e >= 0.0)) {
            return bad("gap tolerance must be non-negative".into());
        }
        if !(self.eps_hour >= 0.0) {
            return bad("eps_hour must be non-negative".into());
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if self.loss_weight.is_some_and(|w| !(w >= 0.0)) {
            return bad("loss_weight must be non-negative".into());
        }
        if self.splices_per_iteration == 0 {
            return bad("splices_per_iteration must be at least 1".into());
        }
        if self.reference_scenario.is_empty() {
            return bad("no reference scenario given".into());
        }
        if !self.scenario_set.is_empty() && !self.scenario_set.contains(&self.reference_scenario) {
            return bad(format!(
                "reference {} is not in the scenario set",
                self.reference_scenario
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    IterationLimit,
    /// The strategy had nothing new to add.
    Stalled,
    /// The modified expansion problem has no solution; the result holds the
    /// last design that could be computed.
    ModelInfeasible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModificationKind {
    DemandIncrease,
    SmoothedDemandIncrease,
    Splice,
    YearlyBalance,
    LocalHydrogen,
    HydrogenPrefix,
    LocalCapacity,
    HydrogenEndBonus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModificationRecord {
    pub iteration: usize,
    pub kind: ModificationKind,
    pub scenario_id: String,
    pub period: Option<HourSpan>,
    /// Energy involved: gap total, demand added or period deficit.
    pub amount: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustifyResult {
    pub strategy: Strategy,
    pub design: SystemDesign,
    pub converged: bool,
    pub iterations: usize,
    pub termination: Termination,
    /// Total annual cost of the design of every iteration.
    pub cost_trajectory: Vec<f64>,
    /// Largest yearly gap of every iteration.
    pub gap_trajectory: Vec<f64>,
    pub final_gaps: BTreeMap<String, f64>,
    pub eps_gap: f64,
    pub modification_log: Vec<ModificationRecord>,
    pub state: ModificationState,
    /// Reference data after all splices.
    pub reference_data: Scenario,
}

impl RobustifyResult {
    pub fn cost(&self) -> f64 {
        self.cost_trajectory.last().copied().unwrap_or(f64::NAN)
    }
}

/// Checks that all scenarios share horizon and demand.
pub fn check_scenario_set(scenarios: &[Scenario]) -> Result<()> {
    let Some(first) = scenarios.first() else {
        return Err(Error::InvalidParameter("no scenarios given".into()));
    };
    let mut seen = std::collections::BTreeSet::new();
    for s in scenarios {
        s.validate()?;
        if !seen.insert(s.year_id.as_str()) {
            return Err(Error::Schema(format!("duplicate scenario id {}", s.year_id)));
        }
        if s.horizon() != first.horizon() {
            return Err(Error::Schema(format!(
                "{} has horizon {}, {} has {}",
                s.year_id,
                s.horizon(),
                first.year_id,
                first.horizon()
            )));
        }
        if s.demand != first.demand {
            return Err(Error::Schema(format!(
                "{} and {} have different demand series",
                s.year_id, first.year_id
            )));
        }
    }
    Ok(())
}

fn select<'a>(config: &RobustifyConfig, scenarios: &'a [Scenario]) -> Result<Vec<&'a Scenario>> {
    if config.scenario_set.is_empty() {
        return Ok(scenarios.iter().collect());
    }
    config
        .scenario_set
        .iter()
        .map(|id| {
            scenarios
                .iter()
                .find(|s| &s.year_id == id)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown scenario {id}")))
        })
        .collect()
}

/// Solves the single-year expansion problem.
pub fn optimize_year(
    scenario: &Scenario,
    catalog: &TechnologyCatalog,
    cost_model: &CostModel,
    mods: &ModificationState,
    settings: &SolverSettings,
    source: &str,
) -> Result<(SystemDesign, f64)> {
    let model = build_capex(scenario, catalog, cost_model, mods)?;
    let sol = solve_optimal(&model.problem, settings)
        .map_err(|e| Error::solver(format!("expansion problem on {}", scenario.year_id), e))?;
    let design = model.design(&sol, catalog, source);
    let cost = total_annual_cost(&design, catalog, cost_model)?;
    Ok((design, cost))
}

/// Optimal design and cost of every year on its own.
pub fn per_year_optima(
    scenarios: &[Scenario],
    catalog: &TechnologyCatalog,
    cost_model: &CostModel,
    settings: &SolverSettings,
) -> Result<BTreeMap<String, (SystemDesign, f64)>> {
    scenarios
        .par_iter()
        .map(|s| {
            let mods = ModificationState::new(s.horizon(), DEFAULT_ALPHA)?;
            let r = optimize_year(s, catalog, cost_model, &mods, settings, &s.year_id)?;
            Ok((s.year_id.clone(), r))
        })
        .collect()
}

/// Highest single-year cost; no robust design is cheaper.
pub fn dual_bound(per_year_costs: &BTreeMap<String, f64>) -> Result<f64> {
    per_year_costs
        .values()
        .copied()
        .reduce(f64::max)
        .ok_or_else(|| Error::InvalidParameter("no per-year costs".into()))
}

/// Componentwise maximum of per-year designs; robust for those years.
pub fn primal_bound_design(designs: &[SystemDesign]) -> Result<SystemDesign> {
    let Some(first) = designs.first() else {
        return Err(Error::InvalidParameter("no designs given".into()));
    };
    let mut caps = first.capacities.clone();
    for d in &designs[1..] {
        if d.capacities.len() != caps.len() || d.capacities.keys().any(|k| !caps.contains_key(k)) {
            return Err(Error::InvalidDesign(format!(
                "designs {} and {} cover different technologies",
                first.source, d.source
            )));
        }
        for (k, &x) in &d.capacities {
            let c = caps.get_mut(k).expect("checked above");
            *c = c.max(x);
        }
    }
    Ok(SystemDesign::new(caps, "primal_bound"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub design: SystemDesign,
    pub cost: f64,
}

/// Exact robust optimum from the deterministic equivalent over all years.
pub fn oracle_monolithic(
    scenarios: &[Scenario],
    catalog: &TechnologyCatalog,
    cost_model: &CostModel,
    settings: &SolverSettings,
    variable_budget: usize,
) -> Result<OracleResult> {
    let model = build_deterministic_equivalent(scenarios, catalog, cost_model, variable_budget)?;
    let sol = solve_optimal(&model.problem, settings)
        .map_err(|e| Error::solver("deterministic equivalent", e))?;
    let design = model.design(&sol, catalog, "oracle");
    let cost = total_annual_cost(&design, catalog, cost_model)?;
    Ok(OracleResult { design, cost })
}

/// Parts of `span` not covered by any of `taken`, longest first.
fn uncovered_pieces(span: HourSpan, taken: &[HourSpan]) -> Vec<HourSpan> {
    let mut pieces = Vec::new();
    let mut start = span.start;
    let mut blocked: Vec<_> = taken.iter().filter(|t| t.overlaps(&span)).collect();
    blocked.sort();
    for b in blocked {
        if b.start > start {
            pieces.push(HourSpan { start, end: b.start - 1 });
        }
        start = start.max(b.end + 1);
    }
    if start <= span.end {
        pieces.push(HourSpan { start, end: span.end });
    }
    pieces.sort_by_key(|p| (std::cmp::Reverse(p.len()), p.start));
    pieces
}

struct Loop<'a> {
    config: &'a RobustifyConfig,
    catalog: &'a TechnologyCatalog,
    scenarios: Vec<&'a Scenario>,
    state: ModificationState,
    reference: Scenario,
    log: Vec<ModificationRecord>,
}

impl<'a> Loop<'a> {
    fn clusters(&self, gaps: &SupplyGapSeries) -> Vec<HourSpan> {
        let h = self.reference.horizon();
        let mut spans: Vec<HourSpan> = Vec::new();
        for s in cluster_gap_hours(&gaps.gaps, self.config.max_join_distance, self.config.eps_hour) {
            let p = s.padded(self.config.period_margin, h);
            match spans.last_mut() {
                Some(last) if last.end >= p.start => last.end = last.end.max(p.end),
                _ => spans.push(p),
            }
        }
        spans
    }

    fn scenario(&self, id: &str) -> &'a Scenario {
        self.scenarios
            .iter()
            .copied()
            .find(|s| s.year_id == id)
            .expect("report only covers selected scenarios")
    }

    fn record(&mut self, iteration: usize, kind: ModificationKind, id: &str, period: Option<HourSpan>, amount: f64) {
        self.log.push(ModificationRecord {
            iteration,
            kind,
            scenario_id: id.to_string(),
            period,
            amount,
        });
    }

    fn demand_increase(&mut self, it: usize, worst: &SupplyGapSeries, smoothed: bool) -> Result<bool> {
        let (window, kind) = if smoothed {
            (Some(self.config.smoothing_window), ModificationKind::SmoothedDemandIncrease)
        } else {
            (None, ModificationKind::DemandIncrease)
        };
        self.state.mod1_demand_increase(&worst.gaps, window)?;
        self.record(it, kind, &worst.scenario_id, None, worst.total);
        Ok(worst.total > 0.0)
    }

    /// Uncovered pieces of every gap cluster of every failing year; when
    /// none of them is a deficit period, also the uncovered hours cut into
    /// blocks. Candidates that neither show a deficit nor lower the full
    /// load hours of the reference data are dropped.
    fn splice_candidates(&self, it: usize, design: &SystemDesign, report: &RobustnessReport) -> Result<Vec<RankedPeriod>> {
        let taken: Vec<_> = self.state.spliced_periods.iter().map(|s| s.target).collect();
        let failing: Vec<_> = report.per_year.values().filter(|g| g.total > report.eps_gap).collect();
        let mut candidates = Vec::new();
        for gaps in &failing {
            let donor = self.scenario(&gaps.scenario_id);
            for span in self.clusters(gaps) {
                for piece in uncovered_pieces(span, &taken) {
                    candidates.push(assess_period(design, donor, self.catalog, piece, it)?);
                }
            }
        }
        if !candidates.iter().any(|c| c.avg_gap < 0.0) {
            let whole = HourSpan {
                start: 0,
                end: self.reference.horizon() - 1,
            };
            let block = self.config.splice_block_hours.max(1);
            for gaps in &failing {
                let donor = self.scenario(&gaps.scenario_id);
                for piece in uncovered_pieces(whole, &taken) {
                    let mut start = piece.start;
                    while start <= piece.end {
                        let end = (start + block - 1).min(piece.end);
                        candidates.push(assess_period(design, donor, self.catalog, HourSpan { start, end }, it)?);
                        start = end + 1;
                    }
                }
            }
        }
        let ranked = rank_candidate_periods(&self.reference, self.catalog, candidates)?;
        Ok(ranked
            .into_iter()
            .filter(|r| r.period.avg_gap < 0.0 || r.flh_reduction > 0.0)
            .collect())
    }

    fn splice(&mut self, it: usize, design: &SystemDesign, report: &RobustnessReport) -> Result<bool> {
        let ranked = self.splice_candidates(it, design, report)?;
        let mut applied = 0;
        for r in ranked {
            if applied == self.config.splices_per_iteration {
                break;
            }
            let span = r.period.span;
            if self.state.spliced_periods.iter().any(|s| s.target.overlaps(&span)) {
                continue;
            }
            let donor = self.scenario(&r.period.scenario_id);
            self.reference = self.state.mod2_splice(&self.reference, donor, span, it)?;
            let amount = (-r.period.avg_gap * span.len() as f64).max(0.0);
            self.record(it, ModificationKind::Splice, &donor.year_id, Some(span), amount);
            applied += 1;
        }
        Ok(applied > 0)
    }

    fn hydrogen_cuts(&mut self, it: usize, worst: &SupplyGapSeries) -> Result<bool> {
        let year = self.scenario(&worst.scenario_id);
        if !self.state.has_yearly_balance(&year.year_id) {
            let weight = self.config.loss_weight.unwrap_or(self.config.alpha);
            self.state.mod3a_yearly_balance(year, self.catalog, worst.total, weight)?;
            self.record(it, ModificationKind::YearlyBalance, &year.year_id, None, worst.total);
            return Ok(true);
        }
        let existing = self.state.sigma_periods(&year.year_id);
        let mut added = false;
        for span in self.clusters(worst) {
            if existing.iter().any(|e| e.overlaps(&span)) {
                continue;
            }
            self.state.mod3b_local_h2(year, self.catalog, span)?;
            let amount = span.hours().map(|t| worst.gaps[t]).sum();
            self.record(it, ModificationKind::LocalHydrogen, &year.year_id, Some(span), amount);
            added = true;
        }
        if added {
            let periods = self.state.sigma_periods(&year.year_id);
            self.state.mod3_h2_prefix(year, self.catalog, &periods)?;
            self.record(it, ModificationKind::HydrogenPrefix, &year.year_id, None, periods.len() as f64);
            return Ok(true);
        }
        self.demand_increase(it, worst, false)
    }

    fn local_capacity(&mut self, it: usize, worst: &SupplyGapSeries) -> Result<bool> {
        let year = self.scenario(&worst.scenario_id);
        let mut added = false;
        for span in self.clusters(worst) {
            if self
                .state
                .mod4_local_capacity(year, self.catalog, span, self.config.mod4_include_battery)?
            {
                let amount = span.hours().map(|t| worst.gaps[t]).sum();
                self.record(it, ModificationKind::LocalCapacity, &year.year_id, Some(span), amount);
                added = true;
            }
        }
        Ok(added)
    }

    fn apply(&mut self, it: usize, design: &SystemDesign, report: &RobustnessReport) -> Result<bool> {
        let worst = report.worst().expect("non-empty report").clone();
        match self.config.strategy {
            Strategy::Mod1 => self.demand_increase(it, &worst, false),
            Strategy::Mod1Smoothed => self.demand_increase(it, &worst, true),
            Strategy::Mod2 => {
                if self.splice(it, design, report)? {
                    Ok(true)
                } else {
                    self.demand_increase(it, &worst, false)
                }
            }
            Strategy::Mod3 => self.hydrogen_cuts(it, &worst),
            Strategy::Mod4 => self.local_capacity(it, &worst),
            Strategy::Mod6 => {
                self.state.mod6_global_h2(worst.total)?;
                self.record(it, ModificationKind::HydrogenEndBonus, &worst.scenario_id, None, worst.total);
                Ok(worst.total > 0.0)
            }
        }
    }
}

/// Runs the robustification loop.
///
/// Reaching the iteration limit or running out of new modifications is
/// reported through [`RobustifyResult::termination`], not as an error.
pub fn robustify(
    config: &RobustifyConfig,
    scenarios: &[Scenario],
    catalog: &TechnologyCatalog,
    cost_model: &CostModel,
    settings: &SolverSettings,
) -> Result<RobustifyResult> {
    config.validate()?;
    check_scenario_set(scenarios)?;
    let selected = select(config, scenarios)?;
    let reference = scenarios
        .iter()
        .find(|s| s.year_id == config.reference_scenario)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown reference {}", config.reference_scenario)))?;
    for s in &selected {
        s.check_catalog(catalog)?;
    }
    cost_model.validate(catalog)?;
    let eps_gap = config
        .eps_gap
        .unwrap_or(config.eps_gap_fraction * reference.total_demand());
    let tested: Vec<Scenario> = selected.iter().map(|s| (*s).clone()).collect();

    let mut lp = Loop {
        config,
        catalog,
        scenarios: selected,
        state: ModificationState::new(reference.horizon(), config.alpha)?,
        reference: reference.clone(),
        log: Vec::new(),
    };
    let mut cost_trajectory = Vec::new();
    let mut gap_trajectory = Vec::new();
    let source = format!("robustify:{}:{}", config.strategy, reference.year_id);

    let mut last: Option<(SystemDesign, RobustnessReport)> = None;
    let mut iteration = 0;
    loop {
        iteration += 1;
        let model = build_capex(&lp.reference, catalog, cost_model, &lp.state)?;
        let termination = match solve_optimal(&model.problem, settings) {
            Ok(sol) => {
                let design = model.design(&sol, catalog, &source);
                let cost = total_annual_cost(&design, catalog, cost_model)?;
                let report = is_robust(&design, &tested, catalog, eps_gap, settings)?;
                if report.verdict == Verdict::Indeterminate {
                    let (id, msg) = report.failures.iter().next().expect("indeterminate has failures");
                    return Err(Error::solver(
                        format!("feasibility test on {id}"),
                        SolverError::Numerical(msg.clone()),
                    ));
                }
                cost_trajectory.push(cost);
                gap_trajectory.push(report.max_total());
                let t = if report.is_robust() {
                    Some(Termination::Converged)
                } else if iteration >= config.max_iterations {
                    Some(Termination::IterationLimit)
                } else if !lp.apply(iteration, &design, &report)? {
                    Some(Termination::Stalled)
                } else {
                    None
                };
                last = Some((design, report));
                t
            }
            Err(SolverError::NotOptimal(SolveStatus::Infeasible)) if last.is_some() => {
                iteration -= 1;
                Some(Termination::ModelInfeasible)
            }
            Err(e) => return Err(Error::solver(format!("expansion problem on {}", lp.reference.year_id), e)),
        };
        if let Some(termination) = termination {
            let (design, report) = last.expect("set on every successful iteration");
            return Ok(RobustifyResult {
                strategy: config.strategy,
                design,
                converged: termination == Termination::Converged,
                iterations: iteration,
                termination,
                cost_trajectory,
                gap_trajectory,
                final_gaps: report.per_year.iter().map(|(k, v)| (k.clone(), v.total)).collect(),
                eps_gap,
                modification_log: lp.log,
                state: lp.state,
                reference_data: lp.reference,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span(a: usize, b: usize) -> HourSpan {
        HourSpan::new(a, b).unwrap()
    }

    fn design(pairs: &[(&str, f64)]) -> SystemDesign {
        SystemDesign::new(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect(), "t")
    }

    #[test]
    fn dual_bound_is_max() {
        let m = BTreeMap::from([("A".to_string(), 10.0), ("B".to_string(), 12.0)]);
        assert_eq!(dual_bound(&m).unwrap(), 12.0);
        let m = BTreeMap::from([("A".to_string(), 7.0)]);
        assert_eq!(dual_bound(&m).unwrap(), 7.0);
        assert!(dual_bound(&BTreeMap::new()).is_err());
    }

    #[test]
    fn primal_bound_is_componentwise_max() {
        let a = design(&[("wind", 5.0), ("pv", 1.0)]);
        let b = design(&[("wind", 2.0), ("pv", 4.0)]);
        let m = primal_bound_design(&[a.clone(), b]).unwrap();
        assert_eq!(m.capacities, design(&[("wind", 5.0), ("pv", 4.0)]).capacities);
        assert_eq!(primal_bound_design(&[a.clone(), a.clone()]).unwrap().capacities, a.capacities);
        assert!(primal_bound_design(&[a, design(&[("wind", 1.0)])]).is_err());
        assert!(primal_bound_design(&[]).is_err());
    }

    #[test]
    fn uncovered_pieces_cases() {
        assert_eq!(uncovered_pieces(span(0, 9), &[]), vec![span(0, 9)]);
        assert_eq!(uncovered_pieces(span(0, 9), &[span(3, 4)]), vec![span(5, 9), span(0, 2)]);
        assert!(uncovered_pieces(span(2, 3), &[span(0, 5)]).is_empty());
        assert_eq!(uncovered_pieces(span(2, 8), &[span(0, 3), span(7, 9)]), vec![span(4, 6)]);
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.short_name().parse::<Strategy>().unwrap(), s);
        }
        assert_eq!("mod1_smoothed".parse::<Strategy>().unwrap(), Strategy::Mod1Smoothed);
        assert!("mod5".parse::<Strategy>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = RobustifyConfig::new(Strategy::Mod1, "A");
        assert!(c.validate().is_ok());
        c.scenario_set = vec!["B".into()];
        assert!(c.validate().is_err());
        let mut c = RobustifyConfig::new(Strategy::Mod1, "A");
        c.max_iterations = 0;
        assert!(c.validate().is_err());
    }
}
