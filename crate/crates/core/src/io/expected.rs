//! Golden fixtures: expected value and decision tables with tolerances.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::model_file::parse_toml;
use crate::error::{Error, Result};
use crate::solver::{Policy, SolveResult};

pub const EXPECTED_FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpectedFile {
    format_version: String,
    #[serde(default)]
    description: Option<String>,
    value_tolerance_abs: f64,
    #[serde(default)]
    value_tolerance_rel: f64,
    /// Epoch-major, epochs 0..=N.
    values: Vec<Vec<f64>>,
    /// Epoch-major, epochs 0..N, 1-based actions.
    #[serde(default)]
    decisions: Vec<Vec<usize>>,
}

/// Expected tables for one (model, horizon) pair.
///
/// A value cell matches when `|actual - expected| <= max(abs, rel * |expected|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedResults {
    pub description: Option<String>,
    pub value_table: Vec<Vec<f64>>,
    pub decision_table: Vec<Vec<usize>>,
    pub value_tolerance_abs: f64,
    pub value_tolerance_rel: f64,
}

/// One cell that failed comparison. Epochs and states are reported 1-based
/// for states and 0-based for epochs, as in the published tables.
#[derive(Debug, Clone, PartialEq)]
pub enum Mismatch {
    Value {
        epoch: usize,
        state: usize,
        expected: f64,
        actual: f64,
        tolerance: f64,
    },
    Decision {
        epoch: usize,
        state: usize,
        expected: usize,
        actual: usize,
    },
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::Value {
                epoch,
                state,
                expected,
                actual,
                tolerance,
            } => write!(
                f,
                "v_{state}({epoch}): expected {expected}, got {actual} (|diff| {} > {tolerance})",
                (actual - expected).abs()
            ),
            Mismatch::Decision {
                epoch,
                state,
                expected,
                actual,
            } => write!(f, "d_{state}({epoch}): expected {expected}, got {actual}"),
        }
    }
}

impl ExpectedResults {
    pub fn state_count(&self) -> usize {
        self.value_table[0].len()
    }

    pub fn horizon(&self) -> usize {
        self.value_table.len() - 1
    }

    pub fn tolerance_for(&self, expected: f64) -> f64 {
        self.value_tolerance_abs
            .max(self.value_tolerance_rel * expected.abs())
    }

    pub fn policy(&self) -> Result<Policy> {
        Policy::from_one_based(&self.decision_table)
    }

    fn validate(&self) -> Result<()> {
        let width = match self.value_table.first() {
            Some(r) if !r.is_empty() => r.len(),
            _ => {
                return Err(Error::Validation(
                    "expected values need a non-empty terminal row".into(),
                ))
            }
        };
        for (name, tol) in [
            ("value_tolerance_abs", self.value_tolerance_abs),
            ("value_tolerance_rel", self.value_tolerance_rel),
        ] {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(Error::Validation(format!(
                    "{name} must be finite and >= 0, got {tol}"
                )));
            }
        }
        for (n, row) in self.value_table.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Validation(format!(
                    "values epoch {n} has {} entries, expected {width}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Validation(format!(
                    "values epoch {n}: {v} is not finite"
                )));
            }
        }
        if self.decision_table.len() + 1 != self.value_table.len() {
            return Err(Error::Validation(format!(
                "{} value rows need {} decision rows, found {}",
                self.value_table.len(),
                self.value_table.len() - 1,
                self.decision_table.len()
            )));
        }
        for (n, row) in self.decision_table.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Validation(format!(
                    "decisions epoch {n} has {} entries, expected {width}",
                    row.len()
                )));
            }
            if row.contains(&0) {
                return Err(Error::Validation(format!(
                    "decisions epoch {n}: actions are numbered from 1"
                )));
            }
        }
        Ok(())
    }

    /// Every cell that falls outside tolerance. Errors if the shapes differ.
    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn compare(&self, result: &SolveResult) -> Result<Vec<Mismatch>> {
        let table = &result.value_table;
        if table.horizon().epochs() != self.horizon() || table.state_count() != self.state_count() {
            return Err(Error::invalid_argument(format!(
                "result has horizon {} and {} states, fixtures have horizon {} and {} states",
                table.horizon(),
                table.state_count(),
                self.horizon(),
                self.state_count()
            )));
        }
        let mut out = Vec::new();
        for (n, (exp_row, act_row)) in self.value_table.iter().zip(table.rows()).enumerate() {
            for (i, (&expected, &actual)) in exp_row.iter().zip(act_row).enumerate() {
                let tolerance = self.tolerance_for(expected);
                if !((actual - expected).abs() <= tolerance) {
                    out.push(Mismatch::Value {
                        epoch: n,
                        state: i + 1,
                        expected,
                        actual,
                        tolerance,
                    });
                }
            }
        }
        let actual = result.policy.to_one_based();
        for (n, (exp_row, act_row)) in self.decision_table.iter().zip(&actual).enumerate() {
            for (i, (&expected, &actual)) in exp_row.iter().zip(act_row).enumerate() {
                if expected != actual {
                    out.push(Mismatch::Decision {
                        epoch: n,
                        state: i + 1,
                        expected,
                        actual,
                    });
                }
            }
        }
        Ok(out)
    }
}

pub fn load_expected_results(bytes: &[u8]) -> Result<ExpectedResults> {
    let file: ExpectedFile = parse_toml(bytes)?;
    if file.format_version != EXPECTED_FORMAT_VERSION {
        return Err(Error::Validation(format!(
            "unsupported format_version {:?}, expected {:?}",
            file.format_version, EXPECTED_FORMAT_VERSION
        )));
    }
    let expected = ExpectedResults {
        description: file.description,
        value_table: file.values,
        decision_table: file.decisions,
        value_tolerance_abs: file.value_tolerance_abs,
        value_tolerance_rel: file.value_tolerance_rel,
    };
    expected.validate()?;
    Ok(expected)
}
