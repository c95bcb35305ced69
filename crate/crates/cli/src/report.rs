//! Machine-readable audit reports.

use std::fmt;

use rankaudit::rank_invariant::Rrt1Verdict;
use rankaudit::{
    CycleStrategy, DecisionMatrix, RankResult, RankTable, RanksComparator, Rrt2Result, Rrt3Report,
};
use serde::{Deserialize, Serialize};

use crate::input::ProblemConfig;

pub const TOOL: &str = "rankaudit";

/// Schema the reports are validated against, as shipped in `schema/`.
pub const SCHEMA: &str = include_str!("../schema/audit-report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Eval,
    Rrt1,
    Rrt2,
    Rrt3,
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::Eval => "eval",
            TestKind::Rrt1 => "rrt1",
            TestKind::Rrt2 => "rrt2",
            TestKind::Rrt3 => "rrt3",
        })
    }
}

/// The decision matrix as it was read, echoed for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEcho {
    pub alternatives: Vec<String>,
    pub criteria: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl From<&DecisionMatrix<f64>> for MatrixEcho {
    fn from(dm: &DecisionMatrix<f64>) -> Self {
        Self {
            alternatives: dm.alternatives().to_vec(),
            criteria: dm.criteria().to_vec(),
            values: dm.rows().map(<[f64]>::to_vec).collect(),
        }
    }
}

/// Command-specific parameters; unused ones are omitted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeats: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allow_missing: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<CycleStrategy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub summary: String,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{}: {status} {}", self.name, self.summary)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rrt1Section {
    pub verdict: Rrt1Verdict,
    /// Baseline first, then one entry per mutation with its record under
    /// `extra.rank_inv_check`.
    pub rankings: RanksComparator,
    pub rank_table: RankTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub tool: String,
    pub version: String,
    pub test: TestKind,
    pub seed: u64,
    pub matrix: MatrixEcho,
    pub config: ProblemConfig,
    pub parameters: Parameters,
    pub passed: bool,
    pub verdicts: Vec<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval: Option<RankResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rrt1: Option<Rrt1Section>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rrt2: Option<Rrt2Result>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rrt3: Option<Rrt3Report>,
}

impl AuditReport {
    pub fn new(
        test: TestKind,
        seed: u64,
        dm: &DecisionMatrix<f64>,
        config: &ProblemConfig,
        parameters: Parameters,
    ) -> Self {
        Self {
            tool: TOOL.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            test,
            seed,
            matrix: dm.into(),
            config: config.clone(),
            parameters,
            passed: true,
            verdicts: Vec::new(),
            eval: None,
            rrt1: None,
            rrt2: None,
            rrt3: None,
        }
    }

    pub fn add_verdict(&mut self, name: &str, passed: bool, summary: String) {
        self.passed &= passed;
        self.verdicts.push(Verdict {
            name: name.to_owned(),
            passed,
            summary,
        });
    }

    /// Pretty JSON with a trailing newline. Key order follows field
    /// declaration order and sorted map keys, so equal reports serialize
    /// to equal bytes.
    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}
