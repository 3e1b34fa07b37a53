//! Models and fixtures bundled with the crate.

use crate::error::Result;
use crate::io::{load_expected_results, load_model, ExpectedResults};
use crate::model::{FiniteHorizonMdp, Horizon};

/// Spiral-drilling feed-rate model: 10 axial-force states, 5 feed rates each.
pub const DRILLING_MODEL: &str = include_str!("../data/drilling.toml");
/// Final value and decision tables for the drilling model, N = 10.
pub const DRILLING_FINAL: &str = include_str!("../data/drilling_final.toml");
/// Stage-by-stage maxima for the drilling model, N = 10.
pub const DRILLING_STAGEWISE: &str = include_str!("../data/drilling_stagewise.toml");
/// Three-state toy model.
pub const TOY3_MODEL: &str = include_str!("../data/toy3.toml");

/// Planning horizon of the drilling case: ten holes.
pub const DRILLING_HORIZON: Horizon = Horizon(10);

pub fn drilling() -> FiniteHorizonMdp {
    load_model(DRILLING_MODEL.as_bytes()).expect("bundled drilling model is valid")
}

pub fn toy3() -> FiniteHorizonMdp {
    load_model(TOY3_MODEL.as_bytes()).expect("bundled toy model is valid")
}

pub fn drilling_final() -> Result<ExpectedResults> {
    load_expected_results(DRILLING_FINAL.as_bytes())
}

pub fn drilling_stagewise() -> Result<ExpectedResults> {
    load_expected_results(DRILLING_STAGEWISE.as_bytes())
}

/// Bundled model text by name (`drilling`, `toy3`).
pub fn builtin_model(name: &str) -> Option<&'static str> {
    match name {
        "drilling" => Some(DRILLING_MODEL),
        "toy3" => Some(TOY3_MODEL),
        _ => None,
    }
}

/// Bundled fixture text by name (`drilling-final`, `drilling-stagewise`).
pub fn builtin_expected(name: &str) -> Option<&'static str> {
    match name {
        "drilling-final" => Some(DRILLING_FINAL),
        "drilling-stagewise" => Some(DRILLING_STAGEWISE),
        _ => None,
    }
}
