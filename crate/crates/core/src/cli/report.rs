use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::Suite;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

/// One pass/fail comparison of a measured value against its threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
    /// Hard checks decide the exit status.
    pub hard: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, threshold: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => value <= threshold,
            Relation::AtLeast => value >= threshold,
            Relation::Equal => value == threshold,
        };
        Check { name: name.into(), value, relation, threshold, passed, hard: true }
    }

    pub fn soft(mut self) -> Self {
        self.hard = false;
        self
    }

    pub fn line(&self) -> String {
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Equal => "==",
        };
        format!(
            "{} {} ({:.6e} {rel} {:.6e}){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.threshold,
            if self.hard { "" } else { " [soft]" }
        )
    }
}

/// CSV table written next to the JSON report.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for r in &self.rows {
            writeln!(out, "{}", r.join(","))?;
        }
        Ok(())
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub data: serde_json::Value,
    /// Error that stopped the suite early, if any.
    pub error: Option<String>,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed || !c.hard)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub chart: String,
    pub ambient: String,
    pub n_r: usize,
    pub n_phi: usize,
    pub area: f64,
    pub dirichlet_energy: f64,
    pub conformality_residual: f64,
    pub mean_curvature_residual: f64,
    pub boundary_residual: f64,
    pub frame_residual: f64,
    pub b_sup: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub name: String,
    pub provenance: Provenance,
    pub theta: f64,
    pub h: f64,
    pub geometry: GeometrySummary,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

impl ScenarioReport {
    pub fn suite(&self, s: Suite) -> Option<&SuiteReport> {
        self.suites.iter().find(|r| r.suite == s)
    }

    pub fn checks(&self) -> impl Iterator<Item = (&Suite, &Check)> {
        self.suites.iter().flat_map(|s| s.checks.iter().map(move |c| (&s.suite, c)))
    }

    pub fn hard_failures(&self) -> usize {
        self.checks().filter(|(_, c)| c.hard && !c.passed).count()
            + self.suites.iter().filter(|s| s.error.is_some()).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `report.json` plus one CSV per table.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json() + "\n")?;
        for s in &self.suites {
            for t in &s.tables {
                let f = std::fs::File::create(dir.join(format!("{}.csv", t.name)))?;
                t.write_csv(std::io::BufWriter::new(f))?;
            }
        }
        Ok(())
    }
}
