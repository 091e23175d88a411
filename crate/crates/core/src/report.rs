//! Run artifacts and the plot-ready report written from them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catalog::{CostModel, TechnologyCatalog};
use crate::config::RunConfig;
use crate::design::{cost_breakdown, SystemDesign};
use crate::error::{Error, Result};
use crate::feasibility::SupplyGapSeries;
use crate::robustify::{RobustifyResult, Strategy, Termination};
use crate::stats::CorrelationStats;

pub const FORMAT_VERSION: u32 = 1;
pub const ARTIFACT_FILE: &str = "run.json";
/// Hours per reporting month.
pub const HOURS_PER_MONTH: usize = 730;

/// Installed capacity and annual cost of one technology.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostLine {
    pub technology: String,
    pub capacity: f64,
    pub annual_cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapTable {
    /// Label of the tested design.
    pub design: String,
    pub scenario_id: String,
    pub gaps: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustRun {
    pub strategy: Strategy,
    pub converged: bool,
    pub iterations: usize,
    pub termination: Termination,
    pub eps_gap: f64,
    pub cost_trajectory: Vec<f64>,
    pub gap_trajectory: Vec<f64>,
}

impl From<&RobustifyResult> for RobustRun {
    fn from(r: &RobustifyResult) -> Self {
        RobustRun {
            strategy: r.strategy,
            converged: r.converged,
            iterations: r.iterations,
            termination: r.termination,
            eps_gap: r.eps_gap,
            cost_trajectory: r.cost_trajectory.clone(),
            gap_trajectory: r.gap_trajectory.clone(),
        }
    }
}

/// Everything a run produced, stored as JSON with full precision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunArtifact {
    pub format_version: u32,
    pub config_snapshot: RunConfig,
    /// Single-year optima keyed by scenario id.
    pub designs: BTreeMap<String, SystemDesign>,
    /// Robust designs keyed by label, e.g. `mod2` or `oracle`.
    pub robust_designs: BTreeMap<String, SystemDesign>,
    pub cost_breakdowns: BTreeMap<String, Vec<CostLine>>,
    pub gap_tables: Vec<GapTable>,
    pub robust_runs: Vec<RobustRun>,
    pub correlation_stats: Option<CorrelationStats>,
}

fn cost_lines(design: &SystemDesign, catalog: &TechnologyCatalog, cost_model: &CostModel) -> Result<Vec<CostLine>> {
    Ok(cost_breakdown(design, catalog, cost_model)?
        .into_iter()
        .map(|(technology, annual_cost)| CostLine {
            capacity: design.capacity(&technology),
            technology,
            annual_cost,
        })
        .collect())
}

impl RunArtifact {
    pub fn new(config: RunConfig) -> Self {
        RunArtifact {
            format_version: FORMAT_VERSION,
            config_snapshot: config,
            designs: BTreeMap::new(),
            robust_designs: BTreeMap::new(),
            cost_breakdowns: BTreeMap::new(),
            gap_tables: Vec::new(),
            robust_runs: Vec::new(),
            correlation_stats: None,
        }
    }

    fn insert_costs(&mut self, label: &str, design: &SystemDesign, catalog: &TechnologyCatalog) -> Result<()> {
        if self.cost_breakdowns.contains_key(label) {
            return Err(Error::InvalidParameter(format!("design label {label} used twice")));
        }
        let lines = cost_lines(design, catalog, &self.config_snapshot.cost_model)?;
        self.cost_breakdowns.insert(label.to_string(), lines);
        Ok(())
    }

    pub fn add_year_design(&mut self, scenario_id: &str, design: SystemDesign, catalog: &TechnologyCatalog) -> Result<()> {
        self.insert_costs(scenario_id, &design, catalog)?;
        self.designs.insert(scenario_id.to_string(), design);
        Ok(())
    }

    pub fn add_robust_design(&mut self, label: &str, design: SystemDesign, catalog: &TechnologyCatalog) -> Result<()> {
        self.insert_costs(label, &design, catalog)?;
        self.robust_designs.insert(label.to_string(), design);
        Ok(())
    }

    pub fn add_gaps(&mut self, design: &str, series: &SupplyGapSeries) {
        self.gap_tables.push(GapTable {
            design: design.to_string(),
            scenario_id: series.scenario_id.clone(),
            gaps: series.gaps.clone(),
        });
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("format_version").and_then(serde_json::Value::as_u64) {
            Some(v) if v == u64::from(FORMAT_VERSION) => {}
            Some(v) => return Err(Error::Schema(format!("unsupported artifact format version {v}"))),
            None => return Err(Error::Schema("artifact has no format_version".into())),
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(ARTIFACT_FILE);
        fs::write(&path, self.to_json()?)?;
        Ok(path)
    }

    /// Reads `run.json` from `dir`, or `dir` itself when it is a file.
    pub fn load(dir: &Path) -> Result<Self> {
        let path = if dir.is_dir() { dir.join(ARTIFACT_FILE) } else { dir.to_path_buf() };
        let text = fs::read_to_string(&path).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
        Self::from_json(&text)
    }
}

/// Rounds to 6 significant digits and prints the shortest decimal form.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), sig6)
}

/// Monthly sums of an hourly series.
pub fn monthly_totals(hourly: &[f64]) -> Vec<f64> {
    hourly.chunks(HOURS_PER_MONTH).map(|c| c.iter().sum()).collect()
}

fn cost_csv(rows: &BTreeMap<String, Vec<CostLine>>, keys: impl Iterator<Item = String>, first: &str) -> String {
    let mut out = format!("{first},technology,capacity,annual_cost\n");
    for key in keys {
        for line in &rows[&key] {
            let _ = writeln!(out, "{key},{},{},{}", line.technology, sig6(line.capacity), sig6(line.annual_cost));
        }
    }
    out
}

fn summary(artifact: &RunArtifact) -> String {
    let total = |label: &str| artifact.cost_breakdowns[label].iter().map(|l| l.annual_cost).sum::<f64>();
    let mut md = String::from("# Run summary\n\n");
    let _ = writeln!(md, "Format version {}.\n", artifact.format_version);
    md.push_str("## Single-year optima\n\n| year | total annual cost |\n|---|---|\n");
    for id in artifact.designs.keys() {
        let _ = writeln!(md, "| {id} | {} |", sig6(total(id)));
    }
    md.push_str("\n## Robust designs\n\n| design | total annual cost |\n|---|---|\n");
    for label in artifact.robust_designs.keys() {
        let _ = writeln!(md, "| {label} | {} |", sig6(total(label)));
    }
    if !artifact.robust_runs.is_empty() {
        md.push_str("\n## Robustification runs\n\n| strategy | converged | iterations | termination | final cost |\n|---|---|---|---|---|\n");
        for r in &artifact.robust_runs {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {:?} | {} |",
                r.strategy,
                r.converged,
                r.iterations,
                r.termination,
                opt(r.cost_trajectory.last().copied())
            );
        }
    }
    md.push_str("\n## Supply gaps\n\n| design | scenario | total gap |\n|---|---|---|\n");
    for g in &artifact.gap_tables {
        let _ = writeln!(md, "| {} | {} | {} |", g.design, g.scenario_id, sig6(g.gaps.iter().sum()));
    }
    if let Some(c) = &artifact.correlation_stats {
        md.push_str("\n## Correlation with total annual cost\n\n| quantity | Pearson r |\n|---|---|\n");
        let _ = writeln!(md, "| wind full load hours | {} |", opt(c.pearson_flh_wind_vs_tac));
        let _ = writeln!(md, "| PV full load hours | {} |", opt(c.pearson_flh_pv_vs_tac));
        let _ = writeln!(md, "| wind cost share | {} |", opt(c.pearson_cost_share_wind_vs_tac));
        let _ = writeln!(md, "| PV cost share | {} |", opt(c.pearson_cost_share_pv_vs_tac));
    }
    md
}

/// Writes `costs.csv`, `robust_costs.csv`, `gaps.csv` and `summary.md`.
pub fn write_report(artifact: &RunArtifact, out_dir: &Path) -> Result<Vec<PathBuf>> {
    for label in artifact.designs.keys().chain(artifact.robust_designs.keys()) {
        if !artifact.cost_breakdowns.contains_key(label) {
            return Err(Error::Schema(format!("no cost breakdown for design {label}")));
        }
    }
    fs::create_dir_all(out_dir)?;
    let mut gaps = String::from("design,scenario,month,gap\n");
    for g in &artifact.gap_tables {
        for (m, v) in monthly_totals(&g.gaps).iter().enumerate() {
            let _ = writeln!(gaps, "{},{},{m},{}", g.design, g.scenario_id, sig6(*v));
        }
    }
    let files = [
        ("costs.csv", cost_csv(&artifact.cost_breakdowns, artifact.designs.keys().cloned(), "year")),
        (
            "robust_costs.csv",
            cost_csv(&artifact.cost_breakdowns, artifact.robust_designs.keys().cloned(), "design"),
        ),
        ("gaps.csv", gaps),
        ("summary.md", summary(artifact)),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = out_dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(1234567.0), "1234570");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(2.5), "2.5");
        assert_eq!(sig6(-0.0), "0");
        assert_eq!(sig6(-1e-20), "-0.00000000000000000001");
    }

    #[test]
    fn months_split_at_730_hours() {
        let t = monthly_totals(&vec![1.0; 1500]);
        assert_eq!(t, vec![730.0, 730.0, 40.0]);
        assert!(monthly_totals(&[]).is_empty());
    }

    #[test]
    fn empty_artifact_gives_headers() {
        let dir = tempfile::tempdir().unwrap();
        write_report(&RunArtifact::new(RunConfig::default()), dir.path()).unwrap();
        let costs = fs::read_to_string(dir.path().join("costs.csv")).unwrap();
        assert_eq!(costs, "year,technology,capacity,annual_cost\n");
        let gaps = fs::read_to_string(dir.path().join("gaps.csv")).unwrap();
        assert_eq!(gaps, "design,scenario,month,gap\n");
    }

    #[test]
    fn duplicate_labels_rejected() {
        let cat = TechnologyCatalog::reference(10.0);
        let mut a = RunArtifact::new(RunConfig::default());
        a.add_year_design("y0", SystemDesign::zero(&cat), &cat).unwrap();
        assert!(a.add_robust_design("y0", SystemDesign::zero(&cat), &cat).is_err());
    }

    #[test]
    fn version_checked() {
        let a = RunArtifact::new(RunConfig::default());
        let json = a.to_json().unwrap();
        assert_eq!(RunArtifact::from_json(&json).unwrap(), a);
        let bumped = json.replacen("\"format_version\": 1", "\"format_version\": 99", 1);
        assert!(RunArtifact::from_json(&bumped).is_err());
        assert!(RunArtifact::from_json("{}").is_err());
    }
}
