//! File formats: models, expected-result fixtures, policies, terminal
//! values, and solve reports.

mod expected;
mod model_file;
mod report;

use serde::Deserialize;

pub use expected::{load_expected_results, ExpectedResults, Mismatch, EXPECTED_FORMAT_VERSION};
pub use model_file::{
    load_model, load_model_with, model_to_toml, ActionEntry, ModelFile, StateEntry,
    TransitionEntry, MODEL_FORMAT_VERSION,
};
pub use report::{emit_report, format_significant, JsonReport, ReportFormat};

use crate::error::Result;
use crate::solver::Policy;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicyFile {
    decisions: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TerminalFile {
    terminal_values: Vec<f64>,
}

/// `decisions = [[...], ...]`, epoch-major with 1-based actions.
pub fn load_policy(bytes: &[u8]) -> Result<Policy> {
    let file: PolicyFile = model_file::parse_toml(bytes)?;
    Policy::from_one_based(&file.decisions)
}

/// `terminal_values = [...]`, one entry per state.
pub fn load_terminal_values(bytes: &[u8]) -> Result<Vec<f64>> {
    let file: TerminalFile = model_file::parse_toml(bytes)?;
    Ok(file.terminal_values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_and_terminal_files() {
        let p = load_policy(b"decisions = [[1, 2], [2, 2]]").unwrap();
        assert_eq!(p.to_one_based(), vec![vec![1, 2], vec![2, 2]]);
        assert!(load_policy(b"decisions = [[0]]").is_err());
        assert_eq!(
            load_terminal_values(b"terminal_values = [1.5, 0.0]").unwrap(),
            vec![1.5, 0.0]
        );
        assert!(load_terminal_values(b"values = [1.0]").is_err());
    }
}
