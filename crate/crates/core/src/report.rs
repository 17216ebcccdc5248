//! Experiment reports: CSV tables, contract checks and the JSON summary
//! that carries provenance.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::statistics::OBSERVABLE_FAMILY_VERSION;

/// One pass/fail line, naming the operation and contract it checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub operation: String,
    pub contract: String,
    pub estimate: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `estimate ≤ tolerance`.
    pub fn at_most(name: &str, operation: &str, contract: &str, estimate: f64, tolerance: f64) -> Self {
        Self::new(name, operation, contract, estimate, tolerance, estimate <= tolerance)
    }

    /// `estimate ≥ tolerance`.
    pub fn at_least(name: &str, operation: &str, contract: &str, estimate: f64, tolerance: f64) -> Self {
        Self::new(name, operation, contract, estimate, tolerance, estimate >= tolerance)
    }

    /// A boolean property; the estimate is 1 or 0.
    pub fn holds(name: &str, operation: &str, contract: &str, pass: bool) -> Self {
        Self::new(name, operation, contract, f64::from(u8::from(pass)), 1.0, pass)
    }

    pub fn new(name: &str, operation: &str, contract: &str, estimate: f64, tolerance: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            operation: operation.into(),
            contract: contract.into(),
            estimate,
            tolerance,
            pass: pass && !estimate.is_nan(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {} [{}] estimate {} tolerance {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.contract,
            self.operation,
            self.estimate,
            self.tolerance
        )
    }
}

/// A header plus rows; cells are already formatted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Formats a row of displayable values.
#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$(($v).to_string()),*] };
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    /// Experiment-specific scalar results.
    pub results: serde_json::Value,
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> Self {
        Self { experiment: experiment.into(), tables: Vec::new(), checks: Vec::new(), results: serde_json::json!({}) }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("result serializes");
        self.results.as_object_mut().expect("results is an object").insert(key.into(), v);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub observable_family_version: u32,
}

impl Provenance {
    pub fn of(cfg: &ExperimentConfig) -> Self {
        Self {
            config_hash: cfg.hash(),
            seed: cfg.seed,
            version: env!("CARGO_PKG_VERSION").into(),
            observable_family_version: OBSERVABLE_FAMILY_VERSION,
        }
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'a str,
    provenance: Provenance,
    config: serde_json::Value,
    passed: bool,
    checks: &'a [Check],
    results: &'a serde_json::Value,
}

/// The JSON summary: provenance, config echo, checks and results.
pub fn summary_json(report: &ExperimentReport, cfg: &ExperimentConfig) -> String {
    let s = Summary {
        experiment: &report.experiment,
        provenance: Provenance::of(cfg),
        config: cfg.echo(),
        passed: report.passed(),
        checks: &report.checks,
        results: &report.results,
    };
    let mut text = serde_json::to_string_pretty(&s).expect("summary serializes");
    text.push('\n');
    text
}

/// Writes `<experiment>_<table>.csv` for every table and
/// `<experiment>_summary.json`; returns the written paths.
pub fn write_report(report: &ExperimentReport, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(report.tables.len() + 1);
    for t in &report.tables {
        let path = dir.join(format!("{}_{}.csv", report.experiment, t.name));
        fs::write(&path, t.to_csv()?)?;
        written.push(path);
    }
    let path = dir.join(format!("{}_summary.json", report.experiment));
    fs::write(&path, summary_json(report, cfg))?;
    written.push(path);
    Ok(written)
}
