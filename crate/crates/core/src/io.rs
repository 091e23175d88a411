//! CSV ingestion and export of hourly time series.
//!
//! Capacity factor files have an `hour` column followed by one `cf_<tech>`
//! column per supply technology. Demand files have the columns `hour` and
//! `demand`. Hours must count up from zero. Values are written with the
//! shortest representation that parses back to the same `f64`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scenario::Scenario;

const CF_PREFIX: &str = "cf_";

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

/// Parsed rows of a numeric CSV with an `hour` column first.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn read_table(source: &str, reader: impl Read) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(source, format!("unreadable header: {e}")))?
        .clone();
    if headers.get(0) != Some("hour") {
        return Err(Error::parse(format!("{source}: header"), "first column must be `hour`"));
    }
    let columns: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        // header is line 1
        let line = i + 2;
        let at = |col: &str| format!("{source}: line {line}, column {col}");
        let record = record.map_err(|e| Error::parse(format!("{source}: line {line}"), e.to_string()))?;
        if record.len() != headers.len() {
            return Err(Error::parse(
                format!("{source}: line {line}"),
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        let hour: usize = record[0]
            .parse()
            .map_err(|_| Error::parse(at("hour"), format!("`{}` is not an hour index", &record[0])))?;
        if hour != i {
            return Err(Error::parse(at("hour"), format!("expected hour {i}, found {hour}")));
        }
        let mut values = Vec::with_capacity(columns.len());
        for (col, field) in columns.iter().zip(record.iter().skip(1)) {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::parse(at(col), format!("`{field}` is not a number")))?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::parse(at(col), format!("value {v} must be finite and non-negative")));
            }
            values.push(v);
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(Error::parse(source, "no data rows"));
    }
    Ok(Table { columns, rows })
}

/// Reads `cf_<tech>` columns into per-technology series.
pub fn read_capacity_factors(source: &str, reader: impl Read) -> Result<BTreeMap<String, Vec<f64>>> {
    let table = read_table(source, reader)?;
    let mut out = BTreeMap::new();
    for (j, col) in table.columns.iter().enumerate() {
        let tech = col
            .strip_prefix(CF_PREFIX)
            .filter(|t| !t.is_empty())
            .ok_or_else(|| Error::parse(format!("{source}: header"), format!("column `{col}` is not `cf_<tech>`")))?;
        let series: Vec<f64> = table.rows.iter().map(|r| r[j]).collect();
        if let Some((t, v)) = series.iter().enumerate().find(|(_, v)| **v > 1.0) {
            return Err(Error::parse(
                format!("{source}: line {}, column {col}", t + 2),
                format!("capacity factor {v} exceeds 1"),
            ));
        }
        if out.insert(tech.to_string(), series).is_some() {
            return Err(Error::parse(format!("{source}: header"), format!("duplicate column `{col}`")));
        }
    }
    if out.is_empty() {
        return Err(Error::parse(format!("{source}: header"), "no capacity factor columns"));
    }
    Ok(out)
}

pub fn read_demand(source: &str, reader: impl Read) -> Result<Vec<f64>> {
    let table = read_table(source, reader)?;
    if table.columns != ["demand"] {
        return Err(Error::parse(
            format!("{source}: header"),
            format!("expected columns `hour,demand`, found {:?}", table.columns),
        ));
    }
    Ok(table.rows.into_iter().map(|r| r[0]).collect())
}

/// Combines a capacity factor file with a demand series into a scenario.
pub fn read_scenario(year_id: &str, source: &str, reader: impl Read, demand: &[f64]) -> Result<Scenario> {
    let cf = read_capacity_factors(source, reader)?;
    let horizon = cf.values().next().map_or(0, Vec::len);
    if horizon != demand.len() {
        return Err(Error::Schema(format!(
            "{source}: {horizon} hours of capacity factors, demand has {}",
            demand.len()
        )));
    }
    Scenario::new(year_id, cf, demand.to_vec())
}

pub fn load_scenario_csv(year_id: &str, path: &Path, demand: &[f64]) -> Result<Scenario> {
    read_scenario(year_id, &path.display().to_string(), open(path)?, demand)
}

pub fn load_demand_csv(path: &Path) -> Result<Vec<f64>> {
    read_demand(&path.display().to_string(), open(path)?)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

pub fn write_capacity_factors(scenario: &Scenario, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["hour".to_string()];
    header.extend(scenario.capacity_factors.keys().map(|k| format!("{CF_PREFIX}{k}")));
    w.write_record(&header).map_err(csv_error)?;
    for t in 0..scenario.horizon() {
        let mut row = vec![t.to_string()];
        row.extend(scenario.capacity_factors.values().map(|s| s[t].to_string()));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_demand(demand: &[f64], writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["hour", "demand"]).map_err(csv_error)?;
    for (t, d) in demand.iter().enumerate() {
        w.write_record([t.to_string(), d.to_string()]).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_scenario_csv(scenario: &Scenario, path: &Path) -> Result<()> {
    write_capacity_factors(scenario, File::create(path)?)
}

pub fn save_demand_csv(demand: &[f64], path: &Path) -> Result<()> {
    write_demand(demand, File::create(path)?)
}
