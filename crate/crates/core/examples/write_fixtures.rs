//! Regenerates the CSV fixtures under `data/`.
//!
//! Usage: `cargo run -p robust-esm --example write_fixtures [OUT_DIR]`

use std::path::PathBuf;

use robust_esm::config::RunConfig;
use robust_esm::fixtures;
use robust_esm::io::{save_demand_csv, save_scenario_csv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"));
    for spec in fixtures::specs() {
        let f = fixtures::generate(&spec);
        let dir = out.join(&f.name);
        std::fs::create_dir_all(&dir)?;
        save_demand_csv(&f.scenarios[0].demand, &dir.join("demand.csv"))?;
        let mut config = RunConfig::default();
        config.robustify.reference_scenario = f.reference.clone();
        config.data.demand = Some("demand.csv".into());
        if let Some(limit) = spec.electrolyser_limit {
            config.catalog.limits.insert("electrolyser".into(), limit);
        }
        config.catalog.max_capacity = fixtures::FIXTURE_MAX_CAPACITY;
        for s in &f.scenarios {
            let file = format!("{}.csv", s.year_id);
            save_scenario_csv(s, &dir.join(&file))?;
            config.data.scenarios.insert(s.year_id.clone(), file.into());
        }
        std::fs::write(dir.join("config.toml"), config.to_toml()?)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
