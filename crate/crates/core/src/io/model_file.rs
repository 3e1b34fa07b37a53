//! TOML model files, format version "1".
//!
//! ```toml
//! format_version = "1"
//! reward_unit = "1e-2 mm"
//!
//! [[states]]
//! label = "F1"
//! metadata = { axial_force_N = 50.92 }
//!
//! [[states.actions]]
//! label = "S1"
//! metadata = { feed_rate_mm_per_rev = 0.0522 }
//! reward = 7161.82
//! transitions = [
//!     { to_state = 1, probability = 0.75 },
//!     { to_state = 2, probability = 0.15 },
//!     { to_state = 3, probability = 0.1 },
//! ]
//! ```
//!
//! Transition lists are sparse: omitted targets have probability 0. State
//! numbers are 1-based. See `docs/model-format.md` for the full schema.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActionSpec, FiniteHorizonMdp, ModelSpec, RowCheck, StateSpec};

pub const MODEL_FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub reward_unit: String,
    pub states: Vec<StateEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, f64>,
    pub actions: Vec<ActionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, f64>,
    pub reward: f64,
    #[serde(default)]
    pub transitions: Vec<TransitionEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub to_state: usize,
    pub probability: f64,
}

pub(crate) fn utf8(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| Error::Malformed(format!("input is not UTF-8: {e}")))
}

pub(crate) fn parse_toml<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    toml::from_str(utf8(bytes)?).map_err(|e| Error::Malformed(e.to_string()))
}

impl ModelFile {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        parse_toml(bytes)
    }

    /// Expands sparse transitions into dense rows and checks file-level rules.
    pub fn to_spec(&self) -> Result<ModelSpec> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported format_version {:?}, expected {:?}",
                self.format_version, MODEL_FORMAT_VERSION
            )));
        }
        let n = self.states.len();
        let mut seen = HashSet::new();
        let mut states = Vec::with_capacity(n);
        for (i, s) in self.states.iter().enumerate() {
            if let Some(label) = &s.label {
                if !seen.insert(label.as_str()) {
                    return Err(Error::Validation(format!(
                        "state {}: duplicate label {label:?}",
                        i + 1
                    )));
                }
            }
            let mut actions = Vec::with_capacity(s.actions.len());
            for (k, a) in s.actions.iter().enumerate() {
                let mut row = vec![0.0; n];
                let mut targets = HashSet::new();
                for t in &a.transitions {
                    if t.to_state == 0 || t.to_state > n {
                        return Err(Error::Validation(format!(
                            "state {}, action {}: transition target {} out of range 1..={n}",
                            i + 1,
                            k + 1,
                            t.to_state
                        )));
                    }
                    if !targets.insert(t.to_state) {
                        return Err(Error::Validation(format!(
                            "state {}, action {}: transition target {} listed twice",
                            i + 1,
                            k + 1,
                            t.to_state
                        )));
                    }
                    row[t.to_state - 1] = t.probability;
                }
                actions.push(ActionSpec {
                    label: a.label.clone(),
                    metadata: a.metadata.clone(),
                    reward: a.reward,
                    probabilities: row,
                });
            }
            states.push(StateSpec {
                label: s.label.clone(),
                metadata: s.metadata.clone(),
                actions,
            });
        }
        Ok(ModelSpec {
            reward_unit: self.reward_unit.clone(),
            states,
        })
    }

    pub fn from_model(mdp: &FiniteHorizonMdp) -> Self {
        let spec = mdp.to_spec();
        ModelFile {
            format_version: MODEL_FORMAT_VERSION.to_string(),
            name: None,
            reward_unit: spec.reward_unit,
            states: spec
                .states
                .into_iter()
                .map(|s| StateEntry {
                    label: s.label,
                    metadata: s.metadata,
                    actions: s
                        .actions
                        .into_iter()
                        .map(|a| ActionEntry {
                            label: a.label,
                            metadata: a.metadata,
                            reward: a.reward,
                            transitions: a
                                .probabilities
                                .iter()
                                .enumerate()
                                .filter(|(_, &p)| p != 0.0)
                                .map(|(j, &p)| TransitionEntry {
                                    to_state: j + 1,
                                    probability: p,
                                })
                                .collect(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Canonical text form, with transitions as inline tables.
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "format_version = {}", quote(&self.format_version));
        if let Some(name) = &self.name {
            let _ = writeln!(out, "name = {}", quote(name));
        }
        let _ = writeln!(out, "reward_unit = {}", quote(&self.reward_unit));
        for s in &self.states {
            out.push_str("\n[[states]]\n");
            if let Some(label) = &s.label {
                let _ = writeln!(out, "label = {}", quote(label));
            }
            if !s.metadata.is_empty() {
                let _ = writeln!(out, "metadata = {}", inline_map(&s.metadata));
            }
            for a in &s.actions {
                out.push_str("\n[[states.actions]]\n");
                if let Some(label) = &a.label {
                    let _ = writeln!(out, "label = {}", quote(label));
                }
                if !a.metadata.is_empty() {
                    let _ = writeln!(out, "metadata = {}", inline_map(&a.metadata));
                }
                let _ = writeln!(out, "reward = {}", number(a.reward));
                out.push_str("transitions = [\n");
                for t in &a.transitions {
                    let _ = writeln!(
                        out,
                        "    {{ to_state = {}, probability = {} }},",
                        t.to_state,
                        number(t.probability)
                    );
                }
                out.push_str("]\n");
            }
        }
        out
    }
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn key(k: &str) -> String {
    let bare = !k.is_empty()
        && k.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    if bare {
        k.to_string()
    } else {
        quote(k)
    }
}

fn inline_map(m: &BTreeMap<String, f64>) -> String {
    let body: Vec<String> = m
        .iter()
        .map(|(k, v)| format!("{} = {}", key(k), number(*v)))
        .collect();
    format!("{{ {} }}", body.join(", "))
}

/// Shortest representation that parses back to the same f64, always with
/// a fractional part or exponent so TOML reads it as a float.
pub(crate) fn number(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains(['.', 'e', 'E']) || !x.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

pub fn load_model(bytes: &[u8]) -> Result<FiniteHorizonMdp> {
    load_model_with(bytes, RowCheck::default())
}

pub fn load_model_with(bytes: &[u8], check: RowCheck) -> Result<FiniteHorizonMdp> {
    FiniteHorizonMdp::new(ModelFile::parse(bytes)?.to_spec()?, check)
}

pub fn model_to_toml(mdp: &FiniteHorizonMdp) -> String {
    ModelFile::from_model(mdp).to_toml()
}
