use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::SolveResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// Aligned text, 6 significant digits.
    Table,
    /// `epoch,state,value,decision`, shortest round-trip numbers.
    Csv,
    /// Full precision.
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::invalid_argument(format!(
                "unknown report format {other:?} (table, csv, json)"
            ))),
        }
    }
}

/// JSON report body. Decisions are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub horizon: usize,
    pub state_count: usize,
    pub values: Vec<Vec<f64>>,
    pub decisions: Vec<Vec<usize>>,
}

impl JsonReport {
    pub fn from_result(result: &SolveResult) -> Self {
        JsonReport {
            horizon: result.horizon().epochs(),
            state_count: result.value_table.state_count(),
            values: result.value_table.rows().to_vec(),
            decisions: result.policy.to_one_based(),
        }
    }
}

pub fn emit_report(result: &SolveResult, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Table => table(result).into_bytes(),
        ReportFormat::Csv => csv(result).into_bytes(),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&JsonReport::from_result(result))
                .expect("report is always serializable");
            s.push('\n');
            s.into_bytes()
        }
    }
}

/// `x` rounded to `digits` significant digits, without exponent below 1e15.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let digits = digits.max(1);
    let mut magnitude = x.abs().log10().floor() as i32;
    // rounding can carry into the next power of ten
    let rounded = |mag: i32| {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        format!("{:.*}", decimals, x)
    };
    let mut s = rounded(magnitude);
    let parsed: f64 = s.parse().unwrap_or(x);
    if parsed.abs() >= 10f64.powi(magnitude + 1) {
        magnitude += 1;
        s = rounded(magnitude);
    }
    if magnitude >= digits as i32 {
        // integer part already has more digits than requested
        let scale = 10f64.powi(magnitude + 1 - digits as i32);
        return format!("{:.0}", (x / scale).round() * scale);
    }
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        return trimmed.to_string();
    }
    s
}

fn table(result: &SolveResult) -> String {
    let values = result.value_table.rows();
    let epochs = values.len();
    let states = result.value_table.state_count();
    let decisions = result.policy.to_one_based();

    let labels: Vec<String> = (1..=states).map(|i| format!("v_{i}(n)")).collect();
    let cells: Vec<Vec<String>> = (0..states)
        .map(|i| {
            (0..epochs)
                .map(|n| format_significant(values[n][i], 6))
                .collect()
        })
        .collect();
    let label_w = labels
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max("n".len());
    let cell_w = cells
        .iter()
        .flatten()
        .map(String::len)
        .chain((0..epochs).map(|n| n.to_string().len()))
        .max()
        .unwrap_or(1);

    let mut out = String::new();
    out.push_str("Expected total rewards v_i(n)\n");
    let _ = write!(out, "{:>label_w$}", "n");
    for n in 0..epochs {
        let _ = write!(out, "  {n:>cell_w$}");
    }
    out.push('\n');
    for (label, row) in labels.iter().zip(&cells) {
        let _ = write!(out, "{label:>label_w$}");
        for c in row {
            let _ = write!(out, "  {c:>cell_w$}");
        }
        out.push('\n');
    }

    if !decisions.is_empty() {
        let dec_w = decisions
            .iter()
            .flatten()
            .map(|k| k.to_string().len())
            .chain((0..epochs).map(|n| n.to_string().len()))
            .max()
            .unwrap_or(1);
        out.push_str("\nOptimal decisions d_i(n)\n");
        let _ = write!(out, "{:>label_w$}", "n");
        for n in 0..epochs {
            let _ = write!(out, "  {n:>dec_w$}");
        }
        out.push('\n');
        for i in 0..states {
            let _ = write!(out, "{:>label_w$}", format!("d_{}(n)", i + 1));
            for row in &decisions {
                let _ = write!(out, "  {:>dec_w$}", row[i]);
            }
            let _ = writeln!(out, "  {:>dec_w$}", "-");
        }
    }
    out
}

fn csv(result: &SolveResult) -> String {
    let values = result.value_table.rows();
    let decisions = result.policy.to_one_based();
    let mut out = String::from("epoch,state,value,decision\n");
    for (n, row) in values.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            let d = decisions
                .get(n)
                .map(|r| r[i].to_string())
                .unwrap_or_default();
            let _ = writeln!(out, "{n},{},{v:?},{d}", i + 1);
        }
    }
    out
}
