//! Construction of the capacity-expansion and feasibility LPs.
//!
//! Both problems share one operational block per scenario. For a horizon of
//! `H` hours the block holds
//!
//! * storage levels `s_el[k]`, `s_h2[k]` for boundaries `k = 0..=H`, where
//!   `s[0]` is the start-of-year level and `s[k]` the level after hour
//!   `k - 1`;
//! * hourly electrolyser input `h2_in[t]` and turbine output `h2_out[t]`
//!   (both electrical MW);
//! * an hourly slack: penalised load shedding in the expansion problem,
//!   unit-cost supply gap in the feasibility problem, absent in the
//!   deterministic equivalent.
//!
//! Rows per hour are the electricity balance
//! `sum cf*x + h2_out - h2_in + (1-loss) s_el[t] - s_el[t+1] + slack >= d'(t)`,
//! forward hydrogen dynamics
//! `s_h2[t+1] = s_h2[t] + eta_el * h2_in[t] - h2_out[t] / eta_gt`,
//! storage-capacity coupling and conversion-capacity coupling. Storage
//! closes cyclically: `s[H] = s[0]`, or `s_h2[H] >= s_h2[0] + bonus` when an
//! end-of-year hydrogen requirement is registered.

use std::ops::Range;

use crate::catalog::{annualize_cost, CostModel, TechnologyCatalog};
use crate::design::SystemDesign;
use crate::error::{Error, Result};
use crate::lp::{LpProblem, Sense};
use crate::modifications::{CutTerm, ModificationState};
use crate::scenario::Scenario;
use crate::solver::Solution;

/// How unmet demand enters the operational block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Slack {
    /// Load shedding `[0, d'(t)]` priced at the given penalty.
    Shedding(f64),
    /// Supply gap `[0, d(t)]` with unit cost.
    Gap,
    /// Demand must be met exactly.
    None,
}

/// Variable and row ranges of one scenario's operational block.
#[derive(Clone, Debug, PartialEq)]
pub struct OperationalBlock {
    pub scenario_id: String,
    pub storage_el: Range<usize>,
    pub storage_h2: Range<usize>,
    pub h2_charge: Range<usize>,
    pub h2_discharge: Range<usize>,
    /// Empty when the block has no slack.
    pub slack: Range<usize>,
    pub balance_rows: Range<usize>,
}

impl OperationalBlock {
    pub fn initial_h2(&self) -> usize {
        self.storage_h2.start
    }
}

/// An LP together with the layout needed to read its solution.
#[derive(Clone, Debug)]
pub struct EnergyModel {
    pub problem: LpProblem,
    /// Capacity variables in catalog order.
    pub capacity: Range<usize>,
    pub blocks: Vec<OperationalBlock>,
    /// Auxiliary turbine-energy variables, one per registered period.
    pub sigma: Range<usize>,
}

impl EnergyModel {
    pub fn design(&self, solution: &Solution, catalog: &TechnologyCatalog, source: &str) -> SystemDesign {
        let caps = catalog
            .iter()
            .zip(&solution.values[self.capacity.clone()])
            .map(|(t, &x)| (t.id.clone(), x.clamp(0.0, t.max_capacity)))
            .collect();
        SystemDesign::new(caps, source)
    }

    /// Hourly slack values of block `b`.
    pub fn slack<'a>(&self, solution: &'a Solution, b: usize) -> &'a [f64] {
        &solution.values[self.blocks[b].slack.clone()]
    }
}

enum Capacities<'a> {
    Decision(&'a CostModel),
    Fixed(&'a SystemDesign),
}

fn add_capacities(lp: &mut LpProblem, catalog: &TechnologyCatalog, mode: Capacities) -> Result<Range<usize>> {
    let start = lp.num_variables();
    for tech in catalog.iter() {
        let name = format!("x[{}]", tech.id);
        match mode {
            Capacities::Decision(cm) => {
                let cost = annualize_cost(tech, cm)?;
                lp.add_variable(name, 0.0, tech.max_capacity, cost);
            }
            Capacities::Fixed(design) => {
                let x = design.capacity(&tech.id).clamp(0.0, tech.max_capacity);
                lp.add_variable(name, x, x, 0.0);
            }
        }
    }
    let range = start..lp.num_variables();
    lp.tag("capacity", range.clone());
    Ok(range)
}

fn check_inputs(scenario: &Scenario, catalog: &TechnologyCatalog, extra_demand: &[f64]) -> Result<()> {
    scenario.validate()?;
    scenario.check_catalog(catalog)?;
    if !extra_demand.is_empty() && extra_demand.len() != scenario.horizon() {
        return Err(Error::Schema(format!(
            "demand additions have {} entries, horizon is {}",
            extra_demand.len(),
            scenario.horizon()
        )));
    }
    Ok(())
}

struct BlockSpec<'a> {
    scenario: &'a Scenario,
    extra_demand: &'a [f64],
    slack: Slack,
    h2_end_bonus: f64,
    /// Appended to tags and names; empty for single-scenario models.
    suffix: String,
}

fn add_block(
    lp: &mut LpProblem,
    x: &Range<usize>,
    catalog: &TechnologyCatalog,
    spec: BlockSpec,
) -> OperationalBlock {
    let BlockSpec {
        scenario,
        extra_demand,
        slack,
        h2_end_bonus,
        suffix,
    } = spec;
    let h = scenario.horizon();
    let xv = |i: usize| x.start + i;
    let name = |base: &str, k: usize| {
        if suffix.is_empty() {
            format!("{base}[{k}]")
        } else {
            format!("{base}[{suffix},{k}]")
        }
    };
    let tag = |base: &str| {
        if suffix.is_empty() {
            base.to_string()
        } else {
            format!("{base}@{suffix}")
        }
    };
    let demand = |t: usize| scenario.demand[t] + extra_demand.get(t).copied().unwrap_or(0.0);

    let battery = catalog.battery();
    let cavern = catalog.hydrogen_storage();
    let electrolyser = catalog.electrolyser();
    let turbine = catalog.gas_turbine();
    let upper = |t: Option<(usize, &crate::catalog::Technology)>, scale: f64| {
        t.map_or(0.0, |(_, t)| t.max_capacity * scale)
    };
    let eta_el = electrolyser.and_then(|(_, t)| t.efficiency).unwrap_or(1.0);
    let eta_gt = turbine.and_then(|(_, t)| t.efficiency).unwrap_or(1.0);
    let retention = 1.0 - battery.map_or(0.0, |(_, t)| t.self_discharge_per_hour);

    let start = lp.num_variables();
    let s_el_max = upper(battery, 1.0);
    for k in 0..=h {
        lp.add_variable(name("s_el", k), 0.0, s_el_max, 0.0);
    }
    let storage_el = start..lp.num_variables();
    let start = lp.num_variables();
    let s_h2_max = upper(cavern, 1.0);
    for k in 0..=h {
        lp.add_variable(name("s_h2", k), 0.0, s_h2_max, 0.0);
    }
    let storage_h2 = start..lp.num_variables();
    let start = lp.num_variables();
    let charge_max = upper(electrolyser, 1.0);
    for t in 0..h {
        lp.add_variable(name("h2_in", t), 0.0, charge_max, 0.0);
    }
    let h2_charge = start..lp.num_variables();
    let start = lp.num_variables();
    let discharge_max = upper(turbine, eta_gt);
    for t in 0..h {
        lp.add_variable(name("h2_out", t), 0.0, discharge_max, 0.0);
    }
    let h2_discharge = start..lp.num_variables();
    let start = lp.num_variables();
    match slack {
        Slack::Shedding(penalty) => {
            for t in 0..h {
                lp.add_variable(name("shed", t), 0.0, demand(t), penalty);
            }
        }
        Slack::Gap => {
            for t in 0..h {
                lp.add_variable(name("gap", t), 0.0, demand(t), 1.0);
            }
        }
        Slack::None => {}
    }
    let slack_range = start..lp.num_variables();

    lp.tag(tag("storage_el"), storage_el.clone());
    lp.tag(tag("storage_h2"), storage_h2.clone());
    lp.tag(tag("h2_charge"), h2_charge.clone());
    lp.tag(tag("h2_discharge"), h2_discharge.clone());
    match slack {
        Slack::Shedding(_) => lp.tag(tag("shedding"), slack_range.clone()),
        Slack::Gap => lp.tag(tag("gap"), slack_range.clone()),
        Slack::None => {}
    }

    let supply: Vec<(usize, &[f64])> = catalog
        .supply()
        .map(|(i, t)| (xv(i), scenario.cf(&t.id).expect("checked by check_inputs")))
        .collect();

    let rows_start = lp.num_constraints();
    for t in 0..h {
        let mut terms: Vec<(usize, f64)> = supply.iter().map(|&(j, cf)| (j, cf[t])).collect();
        terms.push((h2_discharge.start + t, 1.0));
        terms.push((h2_charge.start + t, -1.0));
        terms.push((storage_el.start + t, retention));
        terms.push((storage_el.start + t + 1, -1.0));
        if !slack_range.is_empty() {
            terms.push((slack_range.start + t, 1.0));
        }
        lp.add_constraint(name("balance", t), terms, Sense::Ge, demand(t));
    }
    let balance_rows = rows_start..lp.num_constraints();

    for t in 0..h {
        lp.add_constraint(
            name("h2", t),
            [
                (storage_h2.start + t + 1, 1.0),
                (storage_h2.start + t, -1.0),
                (h2_charge.start + t, -eta_el),
                (h2_discharge.start + t, 1.0 / eta_gt),
            ],
            Sense::Eq,
            0.0,
        );
    }
    if let Some((i, _)) = battery {
        for k in 1..=h {
            lp.add_constraint(name("el_cap", k), [(storage_el.start + k, 1.0), (xv(i), -1.0)], Sense::Le, 0.0);
        }
    }
    if let Some((i, _)) = cavern {
        for k in 1..=h {
            lp.add_constraint(name("h2_cap", k), [(storage_h2.start + k, 1.0), (xv(i), -1.0)], Sense::Le, 0.0);
        }
    }
    if let Some((i, _)) = electrolyser {
        for t in 0..h {
            lp.add_constraint(
                name("electrolysis_cap", t),
                [(h2_charge.start + t, 1.0), (xv(i), -1.0)],
                Sense::Le,
                0.0,
            );
        }
    }
    if let Some((i, _)) = turbine {
        for t in 0..h {
            lp.add_constraint(
                name("turbine_cap", t),
                [(h2_discharge.start + t, 1.0), (xv(i), -eta_gt)],
                Sense::Le,
                0.0,
            );
        }
    }
    let cycle = |base: &str| {
        if suffix.is_empty() {
            base.to_string()
        } else {
            format!("{base}[{suffix}]")
        }
    };
    if battery.is_some() {
        lp.add_constraint(
            cycle("el_cycle"),
            [(storage_el.end - 1, 1.0), (storage_el.start, -1.0)],
            Sense::Eq,
            0.0,
        );
    }
    if cavern.is_some() {
        let sense = if h2_end_bonus > 0.0 { Sense::Ge } else { Sense::Eq };
        lp.add_constraint(
            cycle("h2_cycle"),
            [(storage_h2.end - 1, 1.0), (storage_h2.start, -1.0)],
            sense,
            h2_end_bonus,
        );
    }

    OperationalBlock {
        scenario_id: scenario.year_id.clone(),
        storage_el,
        storage_h2,
        h2_charge,
        h2_discharge,
        slack: slack_range,
        balance_rows,
    }
}

/// Number of variables of a single-scenario model without auxiliary cut
/// variables.
pub fn variable_count(catalog: &TechnologyCatalog, horizon: usize) -> usize {
    catalog.len() + 2 * (horizon + 1) + 3 * horizon
}

/// Capacity-expansion LP on (possibly synthetic) data `scenario`, with every
/// modification registered in `mods`.
pub fn build_capex(
    scenario: &Scenario,
    catalog: &TechnologyCatalog,
    cost_model: &CostModel,
    mods: &ModificationState,
) -> Result<EnergyModel> {
    check_inputs(scenario, catalog, &mods.demand_additions)?;
    cost_model.validate(catalog)?;
    if !(mods.h2_end_bonus >= 0.0) {
        return Err(Error::InvalidParameter("negative end-of-year hydrogen bonus".into()));
    }
    let mut lp = LpProblem::new(format!("capex:{}", scenario.year_id));
    let capacity = add_capacities(&mut lp, catalog, Capacities::Decision(cost_model))?;
    let block = add_block(
        &mut lp,
        &capacity,
        catalog,
        BlockSpec {
            scenario,
            extra_demand: &mods.demand_additions,
            slack: Slack::Shedding(cost_model.shedding_penalty),
            h2_end_bonus: mods.h2_end_bonus,
            suffix: String::new(),
        },
    );

    let start = lp.num_variables();
    for sigma in &mods.sigma {
        lp.add_variable(format!("sigma[{}]", sigma.key()), 0.0, f64::INFINITY, 0.0);
    }
    let sigma = start..lp.num_variables();
    lp.tag("sigma", sigma.clone());

    for cut in mods.cuts() {
        let mut terms = Vec::with_capacity(cut.terms.len());
        for (term, coef) in &cut.terms {
            let j = match term {
                CutTerm::Capacity(id) => {
                    let i = catalog.index_of(id).ok_or_else(|| {
                        Error::Schema(format!("cut {} references unknown technology {id}", cut.label))
                    })?;
                    capacity.start + i
                }
                CutTerm::InitialHydrogen => block.initial_h2(),
                CutTerm::Sigma(k) => {
                    if *k >= sigma.len() {
                        return Err(Error::Schema(format!("cut {} references missing sigma {k}", cut.label)));
                    }
                    sigma.start + k
                }
            };
            terms.push((j, *coef));
        }
        lp.add_constraint(cut.label.clone(), terms, cut.sense, cut.rhs);
    }

    Ok(EnergyModel {
        problem: lp,
        capacity,
        blocks: vec![block],
        sigma,
    })
}

/// Feasibility LP for a fixed design: minimise the total hourly supply gap.
pub fn build_feasibility(
    design: &SystemDesign,
    scenario: &Scenario,
    catalog: &TechnologyCatalog,
) -> Result<EnergyModel> {
    check_inputs(scenario, catalog, &[])?;
    design.validate(catalog)?;
    let mut lp = LpProblem::new(format!("feasibility:{}", scenario.year_id));
    let capacity = add_capacities(&mut lp, catalog, Capacities::Fixed(design))?;
    let block = add_block(
        &mut lp,
        &capacity,
        catalog,
        BlockSpec {
            scenario,
            extra_demand: &[],
            slack: Slack::Gap,
            h2_end_bonus: 0.0,
            suffix: String::new(),
        },
    );
    let end = lp.num_variables();
    Ok(EnergyModel {
        problem: lp,
        capacity,
        blocks: vec![block],
        sigma: end..end,
    })
}

/// Capacity-expansion LP with a fixed design and penalised shedding; its
/// shedding total equals the feasibility gap.
pub fn build_fixed_capex(
    design: &SystemDesign,
    scenario: &Scenario,
    catalog: &TechnologyCatalog,
    cost_model: &CostModel,
) -> Result<EnergyModel> {
    check_inputs(scenario, catalog, &[])?;
    design.validate(catalog)?;
    let mut lp = LpProblem::new(format!("fixed:{}", scenario.year_id));
    let capacity = add_capacities(&mut lp, catalog, Capacities::Fixed(design))?;
    let block = add_block(
        &mut lp,
        &capacity,
        catalog,
        BlockSpec {
            scenario,
            extra_demand: &[],
            slack: Slack::Shedding(cost_model.shedding_penalty),
            h2_end_bonus: 0.0,
            suffix: String::new(),
        },
    );
    let end = lp.num_variables();
    Ok(EnergyModel {
        problem: lp,
        capacity,
        blocks: vec![block],
        sigma: end..end,
    })
}

/// One LP with shared capacities and one slack-free operational block per
/// scenario.
pub fn build_deterministic_equivalent(
    scenarios: &[Scenario],
    catalog: &TechnologyCatalog,
    cost_model: &CostModel,
    variable_budget: usize,
) -> Result<EnergyModel> {
    let Some(first) = scenarios.first() else {
        return Err(Error::InvalidParameter("no scenarios given".into()));
    };
    for s in scenarios {
        check_inputs(s, catalog, &[])?;
        if s.horizon() != first.horizon() {
            return Err(Error::Schema(format!(
                "{} has horizon {}, {} has {}",
                s.year_id,
                s.horizon(),
                first.year_id,
                first.horizon()
            )));
        }
    }
    cost_model.validate(catalog)?;
    let needed = catalog.len() + scenarios.len() * (variable_count(catalog, first.horizon()) - catalog.len());
    if needed > variable_budget {
        return Err(Error::SizeLimit {
            variables: needed,
            budget: variable_budget,
        });
    }
    let mut lp = LpProblem::new("deterministic_equivalent");
    let capacity = add_capacities(&mut lp, catalog, Capacities::Decision(cost_model))?;
    let blocks = scenarios
        .iter()
        .map(|s| {
            add_block(
                &mut lp,
                &capacity,
                catalog,
                BlockSpec {
                    scenario: s,
                    extra_demand: &[],
                    slack: Slack::None,
                    h2_end_bonus: 0.0,
                    suffix: s.year_id.clone(),
                },
            )
        })
        .collect();
    let end = lp.num_variables();
    Ok(EnergyModel {
        problem: lp,
        capacity,
        blocks,
        sigma: end..end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{TechKind, Technology};
    use crate::solver::{solve_optimal, SolverSettings};
    use std::collections::BTreeMap;

    fn catalog() -> TechnologyCatalog {
        TechnologyCatalog::new(vec![
            Technology::new("wind", TechKind::Supply, 1000.0, 20.0, 20, 1e4),
            Technology::new("pv", TechKind::Supply, 500.0, 10.0, 25, 1e4),
            Technology::new("bat", TechKind::Battery, 200.0, 2.0, 15, 1e4),
            Technology::new("cavern", TechKind::HydrogenStorage, 0.7, 0.01, 40, 1e6),
            Technology::new("ely", TechKind::Electrolyser, 600.0, 10.0, 25, 1e4).with_efficiency(0.7),
            Technology::new("ccgt", TechKind::GasTurbine, 800.0, 20.0, 30, 1e4).with_efficiency(0.6),
        ])
        .unwrap()
    }

    fn scenario(demand: Vec<f64>) -> Scenario {
        let h = demand.len();
        let wind = (0..h).map(|t| if t % 3 == 0 { 0.1 } else { 0.6 }).collect();
        let pv = (0..h).map(|t| if t % 2 == 0 { 0.0 } else { 0.5 }).collect();
        Scenario::new("y", BTreeMap::from([("wind".into(), wind), ("pv".into(), pv)]), demand).unwrap()
    }

    fn solve_capex(s: &Scenario, mods: &ModificationState) -> (EnergyModel, Solution) {
        let m = build_capex(s, &catalog(), &CostModel::default(), mods).unwrap();
        let sol = solve_optimal(&m.problem, &SolverSettings::default()).unwrap();
        (m, sol)
    }

    #[test]
    fn variable_count_matches_layout() {
        let s = scenario(vec![1.0; 4]);
        let m = build_capex(&s, &catalog(), &CostModel::default(), &ModificationState::new(4, 0.7).unwrap()).unwrap();
        assert_eq!(m.problem.num_variables(), variable_count(&catalog(), 4));
        assert_eq!(variable_count(&catalog(), 4), 6 + 10 + 12);
        assert!(m.problem.validate().is_ok());
    }

    #[test]
    fn zero_demand_costs_nothing() {
        let s = scenario(vec![0.0; 6]);
        let (m, sol) = solve_capex(&s, &ModificationState::new(6, 0.7).unwrap());
        assert!(sol.objective.abs() < 1e-9);
        assert!(m.design(&sol, &catalog(), "t").capacities.values().all(|&x| x.abs() < 1e-9));
    }

    #[test]
    fn registering_a_cut_adds_one_row() {
        let s = scenario(vec![5.0; 4]);
        let mut mods = ModificationState::new(4, 0.7).unwrap();
        let base = build_capex(&s, &catalog(), &CostModel::default(), &mods).unwrap();
        mods.mod3a_yearly_balance(&s, &catalog(), 0.0, 0.7).unwrap();
        let cut = build_capex(&s, &catalog(), &CostModel::default(), &mods).unwrap();
        assert_eq!(cut.problem.num_constraints(), base.problem.num_constraints() + 1);
    }

    #[test]
    fn optimum_passes_its_own_feasibility_test() {
        let s = scenario(vec![10.0, 12.0, 8.0, 15.0, 9.0, 11.0, 14.0, 7.0]);
        let (m, sol) = solve_capex(&s, &ModificationState::new(8, 0.7).unwrap());
        assert!(m.slack(&sol, 0).iter().sum::<f64>() < 1e-7);
        let design = m.design(&sol, &catalog(), "t");
        let f = build_feasibility(&design, &s, &catalog()).unwrap();
        let fs = solve_optimal(&f.problem, &SolverSettings::default()).unwrap();
        assert!(fs.objective.abs() < 1e-6);
    }

    #[test]
    fn storage_closes_cyclically() {
        let s = scenario(vec![10.0, 30.0, 8.0, 25.0, 9.0, 40.0]);
        let (m, sol) = solve_capex(&s, &ModificationState::new(6, 0.7).unwrap());
        let b = &m.blocks[0];
        let el = &sol.values[b.storage_el.clone()];
        let h2 = &sol.values[b.storage_h2.clone()];
        assert!((el[0] - el[6]).abs() < 1e-6);
        assert!((h2[0] - h2[6]).abs() < 1e-6);
    }

    #[test]
    fn end_bonus_raises_final_hydrogen() {
        let s = scenario(vec![10.0; 6]);
        let mut mods = ModificationState::new(6, 0.7).unwrap();
        mods.mod6_global_h2(20.0).unwrap();
        let (m, sol) = solve_capex(&s, &mods);
        let h2 = &sol.values[m.blocks[0].storage_h2.clone()];
        assert!(h2[6] - h2[0] >= 20.0 - 1e-6);
    }

    #[test]
    fn feasibility_rejects_oversized_design() {
        let s = scenario(vec![1.0; 3]);
        let mut d = SystemDesign::zero(&catalog());
        d.capacities.insert("wind".into(), 1e9);
        assert!(matches!(build_feasibility(&d, &s, &catalog()), Err(Error::InvalidDesign(_))));
    }

    #[test]
    fn missing_series_is_schema_error() {
        let s = Scenario::new("y", BTreeMap::from([("wind".into(), vec![0.5; 3])]), vec![1.0; 3]).unwrap();
        let r = build_capex(&s, &catalog(), &CostModel::default(), &ModificationState::new(3, 0.7).unwrap());
        assert!(matches!(r, Err(Error::Schema(_))));
    }

    #[test]
    fn single_scenario_equivalent_matches_capex() {
        let s = scenario(vec![10.0, 12.0, 8.0, 15.0, 9.0, 11.0]);
        let (_, sol) = solve_capex(&s, &ModificationState::new(6, 0.7).unwrap());
        let de = build_deterministic_equivalent(std::slice::from_ref(&s), &catalog(), &CostModel::default(), 10_000).unwrap();
        let ds = solve_optimal(&de.problem, &SolverSettings::default()).unwrap();
        assert!((ds.objective - sol.objective).abs() <= 1e-6 * sol.objective.abs());
        assert!(matches!(
            build_deterministic_equivalent(&[s], &catalog(), &CostModel::default(), 10),
            Err(Error::SizeLimit { .. })
        ));
    }
}
