use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use robust_esm::config::RunConfig;
use robust_esm::feasibility::{is_robust, test_feasibility};
use robust_esm::model::{build_capex, build_deterministic_equivalent, build_feasibility};
use robust_esm::modifications::ModificationState;
use robust_esm::report::{write_report, RobustRun, RunArtifact};
use robust_esm::robustify::{
    check_scenario_set, oracle_monolithic, optimize_year, per_year_optima, robustify, Strategy,
};
use robust_esm::solver::export_lp_file;
use robust_esm::stats::{flh_correlation, YearResult};
use robust_esm::{Error, Scenario, SystemDesign, TechnologyCatalog};

const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_SOLVER: u8 = 4;

#[derive(Parser)]
#[command(name = "robust-esm", version, about = "Robust capacity expansion for renewable energy systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Directory receiving `run.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the LP of the solved problem to this path.
    #[arg(long)]
    export_lp: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Optimise capacities for a single weather year.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenario: String,
    },
    /// Test a fixed design against weather years.
    Feastest {
        #[command(flatten)]
        common: Common,
        /// Design as JSON, e.g. from `run.json` or `optimize` output.
        #[arg(long)]
        design: PathBuf,
        /// Comma-separated scenario ids; all configured years by default.
        #[arg(long, value_delimiter = ',')]
        scenarios: Vec<String>,
    },
    /// Iteratively modify the reference year until the design is robust.
    Robustify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        strategy: Option<Strategy>,
        #[arg(long)]
        reference: Option<String>,
        #[arg(long, value_delimiter = ',')]
        scenarios: Vec<String>,
    },
    /// Solve the deterministic equivalent over all years.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        scenarios: Vec<String>,
    },
    /// Write CSV tables and a summary from a stored run.
    Report {
        #[arg(long)]
        run: PathBuf,
        /// Output directory; defaults to the run directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Inputs {
    config: RunConfig,
    catalog: TechnologyCatalog,
    scenarios: Vec<Scenario>,
}

fn load(common: &Common, only: &[String]) -> Result<Inputs> {
    let config = RunConfig::load(&common.config)?;
    let catalog = config.catalog.build()?;
    let mut scenarios = config.load_scenarios()?;
    if !only.is_empty() {
        for id in only {
            if !scenarios.iter().any(|s| &s.year_id == id) {
                return Err(Error::InvalidParameter(format!("unknown scenario {id}")).into());
            }
        }
        scenarios.retain(|s| only.contains(&s.year_id));
    }
    if scenarios.is_empty() {
        return Err(Error::InvalidParameter("no scenarios selected".into()).into());
    }
    for s in &scenarios {
        s.check_catalog(&catalog)?;
    }
    Ok(Inputs {
        config,
        catalog,
        scenarios,
    })
}

fn export(path: Option<&Path>, lp: impl FnOnce() -> robust_esm::Result<robust_esm::lp::LpProblem>) -> Result<()> {
    if let Some(path) = path {
        std::fs::write(path, export_lp_file(&lp()?)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn save(artifact: &RunArtifact, out: Option<&Path>) -> Result<()> {
    if let Some(dir) = out {
        let path = artifact.save(dir)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn read_design(path: &Path) -> Result<SystemDesign> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let design = serde_json::from_str(&text)
        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
    Ok(design)
}

fn print_json(value: &SystemDesign) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Optimize { common, scenario } => {
            let inp = load(&common, std::slice::from_ref(&scenario))?;
            let year = &inp.scenarios[0];
            let mods = ModificationState::new(year.horizon(), inp.config.robustify.alpha)?;
            export(common.export_lp.as_deref(), || {
                Ok(build_capex(year, &inp.catalog, &inp.config.cost_model, &mods)?.problem)
            })?;
            let (design, _) = optimize_year(year, &inp.catalog, &inp.config.cost_model, &mods, &inp.config.solver, &year.year_id)?;
            let mut artifact = RunArtifact::new(inp.config.clone());
            artifact.add_year_design(&year.year_id, design.clone(), &inp.catalog)?;
            save(&artifact, common.out.as_deref())?;
            print_json(&design)?;
            Ok(0)
        }
        Command::Feastest {
            common,
            design,
            scenarios,
        } => {
            let inp = load(&common, &scenarios)?;
            let design = read_design(&design)?;
            export(common.export_lp.as_deref(), || {
                Ok(build_feasibility(&design, &inp.scenarios[0], &inp.catalog)?.problem)
            })?;
            let eps = inp.config.robustify.eps_gap.unwrap_or(
                inp.config.robustify.eps_gap_fraction * inp.scenarios[0].total_demand(),
            );
            let report = is_robust(&design, &inp.scenarios, &inp.catalog, eps, &inp.config.solver)?;
            if !report.failures.is_empty() {
                for (id, msg) in &report.failures {
                    eprintln!("error: {id}: {msg}");
                }
                return Ok(EXIT_SOLVER);
            }
            let mut artifact = RunArtifact::new(inp.config.clone());
            artifact.add_robust_design("tested", design, &inp.catalog)?;
            for (id, g) in &report.per_year {
                println!("{id}\t{}", g.total);
                artifact.add_gaps("tested", g);
            }
            save(&artifact, common.out.as_deref())?;
            Ok(if report.is_robust() { 0 } else { EXIT_NOT_CONVERGED })
        }
        Command::Robustify {
            common,
            strategy,
            reference,
            scenarios,
        } => {
            let inp = load(&common, &[])?;
            let mut cfg = inp.config.robustify.clone();
            if let Some(s) = strategy {
                cfg.strategy = s;
            }
            if let Some(r) = reference {
                cfg.reference_scenario = r;
            }
            if !scenarios.is_empty() {
                cfg.scenario_set = scenarios;
            }
            let cm = &inp.config.cost_model;
            let result = robustify(&cfg, &inp.scenarios, &inp.catalog, cm, &inp.config.solver)?;
            export(common.export_lp.as_deref(), || {
                Ok(build_capex(&result.reference_data, &inp.catalog, cm, &result.state)?.problem)
            })?;

            let mut config = inp.config.clone();
            config.robustify = cfg.clone();
            let mut artifact = RunArtifact::new(config);
            let optima = per_year_optima(&inp.scenarios, &inp.catalog, cm, &inp.config.solver)?;
            let mut years = Vec::new();
            for s in &inp.scenarios {
                let (design, _) = &optima[&s.year_id];
                years.push(YearResult::new(s, design, &inp.catalog, cm)?);
                artifact.add_year_design(&s.year_id, design.clone(), &inp.catalog)?;
            }
            if years.len() >= 3 {
                artifact.correlation_stats = Some(flh_correlation(&years)?);
            }
            let label = cfg.strategy.short_name();
            artifact.add_robust_design(label, result.design.clone(), &inp.catalog)?;
            for s in &inp.scenarios {
                let g = test_feasibility(&result.design, s, &inp.catalog, &inp.config.solver)?;
                artifact.add_gaps(label, &g);
            }
            artifact.robust_runs.push(RobustRun::from(&result));
            save(&artifact, common.out.as_deref())?;
            eprintln!(
                "{}: {:?} after {} iterations, cost {}",
                cfg.strategy,
                result.termination,
                result.iterations,
                result.cost()
            );
            print_json(&result.design)?;
            Ok(if result.converged { 0 } else { EXIT_NOT_CONVERGED })
        }
        Command::Oracle { common, scenarios } => {
            let inp = load(&common, &scenarios)?;
            check_scenario_set(&inp.scenarios)?;
            let cm = &inp.config.cost_model;
            export(common.export_lp.as_deref(), || {
                Ok(build_deterministic_equivalent(&inp.scenarios, &inp.catalog, cm, inp.config.variable_budget)?.problem)
            })?;
            let oracle = oracle_monolithic(&inp.scenarios, &inp.catalog, cm, &inp.config.solver, inp.config.variable_budget)?;
            let mut artifact = RunArtifact::new(inp.config.clone());
            artifact.add_robust_design("oracle", oracle.design.clone(), &inp.catalog)?;
            save(&artifact, common.out.as_deref())?;
            eprintln!("oracle cost {}", oracle.cost);
            print_json(&oracle.design)?;
            Ok(0)
        }
        Command::Report { run, out } => {
            let artifact = RunArtifact::load(&run)?;
            let dir = out.unwrap_or_else(|| if run.is_dir() { run.clone() } else { PathBuf::from(".") });
            for path in write_report(&artifact, &dir)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(0)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Solver { .. }) | Some(Error::SizeLimit { .. }) => EXIT_SOLVER,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
