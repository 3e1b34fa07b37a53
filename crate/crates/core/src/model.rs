//! Validated finite-horizon decision model.
//!
//! Indices are 0-based inside the crate. `Display` for [`StateId`] and
//! [`ActionId`] prints the 1-based form used by every external format.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result, RowError};

/// Default absolute tolerance on transition row sums.
pub const PROB_TOLERANCE: f64 = 1e-6;

macro_rules! one_based_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(usize);

        impl $name {
            pub const fn from_index(index: usize) -> Self {
                Self(index)
            }

            /// `None` for 0.
            pub fn from_one_based(value: usize) -> Option<Self> {
                value.checked_sub(1).map(Self)
            }

            pub const fn index(self) -> usize {
                self.0
            }

            pub const fn one_based(self) -> usize {
                self.0 + 1
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.one_based())
            }
        }
    };
}

one_based_id!(
    /// A state of the model.
    StateId
);
one_based_id!(
    /// An action, numbered per state.
    ActionId
);

/// How transition rows are checked when a model is built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowCheck {
    /// Row sums must be within the given absolute tolerance of 1.
    Tolerance(f64),
    /// Row sums (ascending state order) must equal 1.0 exactly.
    Strict,
    /// Rows within the tolerance are rescaled to sum to 1.
    Renormalize(f64),
}

impl Default for RowCheck {
    fn default() -> Self {
        RowCheck::Tolerance(PROB_TOLERANCE)
    }
}

/// A probability distribution over next states.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow {
    probabilities: Vec<f64>,
}

impl TransitionRow {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(mut probabilities: Vec<f64>, check: RowCheck) -> Result<Self, RowError> {
        for (j, &p) in probabilities.iter().enumerate() {
            let target = StateId::from_index(j);
            if !p.is_finite() {
                return Err(RowError::NonFinite { target, value: p });
            }
            if p < 0.0 {
                return Err(RowError::Negative { target, value: p });
            }
        }
        let sum = ascending_sum(&probabilities);
        match check {
            RowCheck::Strict => {
                if sum != 1.0 {
                    return Err(RowError::BadSum { sum });
                }
            }
            RowCheck::Tolerance(eps) => {
                if !((sum - 1.0).abs() <= eps) {
                    return Err(RowError::BadSum { sum });
                }
            }
            RowCheck::Renormalize(eps) => {
                if !((sum - 1.0).abs() <= eps) {
                    return Err(RowError::BadSum { sum });
                }
                if sum != 1.0 {
                    for p in &mut probabilities {
                        *p /= sum;
                    }
                }
            }
        }
        Ok(Self { probabilities })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn sum(&self) -> f64 {
        ascending_sum(&self.probabilities)
    }

    /// Next states with strictly positive probability, ascending.
    pub fn support(&self) -> impl Iterator<Item = (StateId, f64)> + '_ {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(j, &p)| (StateId::from_index(j), p))
    }
}

fn ascending_sum(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |acc, &x| acc + x)
}

/// Unvalidated description of one action.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ActionSpec {
    pub label: Option<String>,
    pub metadata: BTreeMap<String, f64>,
    pub reward: f64,
    /// Dense row, one entry per state.
    pub probabilities: Vec<f64>,
}

/// Unvalidated description of one state and its actions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StateSpec {
    pub label: Option<String>,
    pub metadata: BTreeMap<String, f64>,
    pub actions: Vec<ActionSpec>,
}

/// Unvalidated description of a whole model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelSpec {
    pub reward_unit: String,
    pub states: Vec<StateSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub label: Option<String>,
    pub metadata: BTreeMap<String, f64>,
    pub reward: f64,
    pub row: TransitionRow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub label: Option<String>,
    pub metadata: BTreeMap<String, f64>,
    pub actions: Vec<Action>,
}

/// A validated finite-horizon MDP: every state has at least one action,
/// every row is a probability distribution, every reward is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteHorizonMdp {
    reward_unit: String,
    states: Vec<State>,
}

impl FiniteHorizonMdp {
    pub fn new(spec: ModelSpec, check: RowCheck) -> Result<Self> {
        let n = spec.states.len();
        if n == 0 {
            return Err(Error::InvalidModel("model has no states".into()));
        }
        let mut states = Vec::with_capacity(n);
        for (i, s) in spec.states.into_iter().enumerate() {
            let state = StateId::from_index(i);
            if s.actions.is_empty() {
                return Err(Error::InvalidModel(format!("state {state} has no actions")));
            }
            let mut actions = Vec::with_capacity(s.actions.len());
            for (k, a) in s.actions.into_iter().enumerate() {
                let action = ActionId::from_index(k);
                if !a.reward.is_finite() {
                    return Err(Error::InvalidModel(format!(
                        "state {state}, action {action}: reward {} is not finite",
                        a.reward
                    )));
                }
                if a.probabilities.len() != n {
                    return Err(Error::InvalidRow {
                        state,
                        action,
                        source: RowError::WrongLength {
                            expected: n,
                            actual: a.probabilities.len(),
                        },
                    });
                }
                let row = TransitionRow::new(a.probabilities, check).map_err(|source| {
                    Error::InvalidRow {
                        state,
                        action,
                        source,
                    }
                })?;
                actions.push(Action {
                    label: a.label,
                    metadata: a.metadata,
                    reward: a.reward,
                    row,
                });
            }
            states.push(State {
                label: s.label,
                metadata: s.metadata,
                actions,
            });
        }
        Ok(Self {
            reward_unit: spec.reward_unit,
            states,
        })
    }

    pub fn to_spec(&self) -> ModelSpec {
        ModelSpec {
            reward_unit: self.reward_unit.clone(),
            states: self
                .states
                .iter()
                .map(|s| StateSpec {
                    label: s.label.clone(),
                    metadata: s.metadata.clone(),
                    actions: s
                        .actions
                        .iter()
                        .map(|a| ActionSpec {
                            label: a.label.clone(),
                            metadata: a.metadata.clone(),
                            reward: a.reward,
                            probabilities: a.row.probabilities().to_vec(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn reward_unit(&self) -> &str {
        &self.reward_unit
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId::from_index)
    }

    /// Panics if `state` is out of range.
    pub fn action_count(&self, state: StateId) -> usize {
        self.states[state.index()].actions.len()
    }

    pub fn max_action_count(&self) -> usize {
        self.states
            .iter()
            .map(|s| s.actions.len())
            .max()
            .unwrap_or(0)
    }

    pub fn action(&self, state: StateId, action: ActionId) -> Option<&Action> {
        self.states.get(state.index())?.actions.get(action.index())
    }

    pub fn check_state(&self, state: StateId) -> Result<()> {
        if state.index() < self.states.len() {
            Ok(())
        } else {
            Err(Error::invalid_argument(format!(
                "state {state} out of range 1..={}",
                self.states.len()
            )))
        }
    }

    pub(crate) fn checked_action(&self, state: StateId, action: ActionId) -> Result<&Action> {
        self.check_state(state)?;
        self.action(state, action).ok_or_else(|| {
            Error::invalid_argument(format!(
                "action {action} out of range 1..={} for state {state}",
                self.action_count(state)
            ))
        })
    }

    /// Same transitions, every reward multiplied by `factor`.
    pub fn scale_rewards(&self, factor: f64) -> Result<Self> {
        let mut out = self.clone();
        for a in out.states.iter_mut().flat_map(|s| s.actions.iter_mut()) {
            a.reward *= factor;
            if !a.reward.is_finite() {
                return Err(Error::invalid_argument(format!(
                    "scaling by {factor} produces a non-finite reward"
                )));
            }
        }
        Ok(out)
    }
}

/// Number of decision stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Horizon(pub usize);

impl Horizon {
    pub const fn epochs(self) -> usize {
        self.0
    }
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
