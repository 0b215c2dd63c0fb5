use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    /// Not applicable to the fixture; results recorded for comparison.
    Control,
    Inconclusive,
    Fail,
}

impl Status {
    /// Worst of a set of statuses, with control runs counting as passes.
    pub fn combine(items: impl IntoIterator<Item = Status>) -> Status {
        items
            .into_iter()
            .map(|s| if s == Status::Control { Status::Pass } else { s })
            .max()
            .unwrap_or(Status::Pass)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Control => "control",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
        }
    }
}

/// Numeric table written as CSV.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub name: String,
    pub kind: String,
    pub status: Status,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub tables: BTreeMap<String, Table>,
}

impl AuditReport {
    pub fn new(name: &str, kind: &str) -> Self {
        Self { name: name.into(), kind: kind.into(), status: Status::Pass, metrics: BTreeMap::new(), notes: Vec::new(), tables: BTreeMap::new() }
    }

    pub fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.into(), value);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    pub fn table(&mut self, key: &str, t: Table) {
        self.tables.insert(key.into(), t);
    }

    /// `<name>.json` plus one `<name>_<table>.csv` per table.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::write(dir.join(format!("{}.json", self.name)), serde_json::to_string_pretty(self)? + "\n")?;
        for (key, t) in &self.tables {
            t.write_csv(&dir.join(format!("{}_{key}.csv", self.name)))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub status: Status,
    pub metrics: BTreeMap<String, f64>,
}

/// Contents of `result.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub seed: u64,
    pub status: Status,
    pub audits: BTreeMap<String, AuditSummary>,
}

impl RunSummary {
    pub fn from_reports(name: &str, seed: u64, reports: &[AuditReport]) -> Self {
        Self {
            name: name.into(),
            seed,
            status: Status::combine(reports.iter().map(|r| r.status)),
            audits: reports
                .iter()
                .map(|r| (r.name.clone(), AuditSummary { status: r.status, metrics: r.metrics.clone() }))
                .collect(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::write(dir.join("result.json"), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}
