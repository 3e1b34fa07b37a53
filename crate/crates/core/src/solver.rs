//! Backward induction over a finite horizon.
//!
//! With `N` decision stages, values exist for epochs `0..=N` and decisions for
//! epochs `0..N`. The row at epoch `N` holds the terminal values.
//!
//! All expected values are computed by [`one_step_lookahead`], which sums
//! `p_j * v_j` in ascending `j` and then adds the reward. The solver, the
//! policy evaluator and the oracles share that routine, so a policy extracted
//! by the solver re-evaluates to bit-identical values.

use crate::error::{Error, Result};
use crate::model::{ActionId, FiniteHorizonMdp, Horizon, StateId};

/// Expected total reward per epoch (rows) and state (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    rows: Vec<Vec<f64>>,
}

impl ValueTable {
    /// Needs at least one row; all rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::invalid_argument("value table needs a terminal row"))?;
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::invalid_argument("value table rows differ in length"));
        }
        Ok(Self { rows })
    }

    pub fn horizon(&self) -> Horizon {
        Horizon(self.rows.len() - 1)
    }

    pub fn state_count(&self) -> usize {
        self.rows[0].len()
    }

    /// Values at epoch `n`. Panics if `n > N`.
    pub fn row(&self, epoch: usize) -> &[f64] {
        &self.rows[epoch]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn value(&self, epoch: usize, state: StateId) -> f64 {
        self.rows[epoch][state.index()]
    }

    pub fn terminal(&self) -> &[f64] {
        self.rows.last().expect("value table is never empty")
    }
}

/// A Markov policy: one action per (epoch, state).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Policy {
    decisions: Vec<Vec<ActionId>>,
}

impl Policy {
    pub fn new(decisions: Vec<Vec<ActionId>>) -> Self {
        Self { decisions }
    }

    /// Builds a policy from 1-based action numbers.
    pub fn from_one_based(decisions: &[Vec<usize>]) -> Result<Self> {
        decisions
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&k| {
                        ActionId::from_one_based(k)
                            .ok_or_else(|| Error::invalid_argument("action numbers start at 1"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    /// The same action at every epoch and state.
    pub fn constant(horizon: Horizon, state_count: usize, action: ActionId) -> Self {
        Self::new(vec![vec![action; state_count]; horizon.epochs()])
    }

    pub fn horizon(&self) -> Horizon {
        Horizon(self.decisions.len())
    }

    pub fn action(&self, epoch: usize, state: StateId) -> ActionId {
        self.decisions[epoch][state.index()]
    }

    pub fn decisions(&self) -> &[Vec<ActionId>] {
        &self.decisions
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.decisions
            .iter()
            .map(|row| row.iter().map(|a| a.one_based()).collect())
            .collect()
    }

    /// Checks dimensions and action ranges against a model.
    pub fn validate(&self, mdp: &FiniteHorizonMdp, horizon: Horizon) -> Result<()> {
        if self.decisions.len() != horizon.epochs() {
            return Err(Error::invalid_argument(format!(
                "policy covers {} epochs, horizon is {}",
                self.decisions.len(),
                horizon
            )));
        }
        for (n, row) in self.decisions.iter().enumerate() {
            if row.len() != mdp.state_count() {
                return Err(Error::invalid_argument(format!(
                    "policy epoch {n} has {} entries, model has {} states",
                    row.len(),
                    mdp.state_count()
                )));
            }
            for (i, &a) in row.iter().enumerate() {
                let state = StateId::from_index(i);
                if a.index() >= mdp.action_count(state) {
                    return Err(Error::invalid_argument(format!(
                        "policy epoch {n}, state {state}: action {a} out of range 1..={}",
                        mdp.action_count(state)
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub value_table: ValueTable,
    pub policy: Policy,
}

impl SolveResult {
    pub fn horizon(&self) -> Horizon {
        self.value_table.horizon()
    }
}

/// `q_i^k + Σ_j p_ij^k · next_values[j]`.
pub fn one_step_lookahead(
    mdp: &FiniteHorizonMdp,
    state: StateId,
    action: ActionId,
    next_values: &[f64],
) -> Result<f64> {
    let a = mdp.checked_action(state, action)?;
    check_len(mdp, next_values, "next_values")?;
    Ok(lookahead(a.reward, a.row.probabilities(), next_values))
}

#[inline]
pub(crate) fn lookahead(reward: f64, row: &[f64], next_values: &[f64]) -> f64 {
    let expected = row
        .iter()
        .zip(next_values)
        .fold(0.0, |acc, (&p, &v)| acc + p * v);
    reward + expected
}

fn check_len(mdp: &FiniteHorizonMdp, values: &[f64], what: &str) -> Result<()> {
    if values.len() != mdp.state_count() {
        return Err(Error::invalid_argument(format!(
            "{what} has length {}, model has {} states",
            values.len(),
            mdp.state_count()
        )));
    }
    Ok(())
}

fn terminal_row(mdp: &FiniteHorizonMdp, terminal_values: Option<&[f64]>) -> Result<Vec<f64>> {
    match terminal_values {
        None => Ok(vec![0.0; mdp.state_count()]),
        Some(t) => {
            check_len(mdp, t, "terminal_values")?;
            if let Some(bad) = t.iter().find(|v| !v.is_finite()) {
                return Err(Error::invalid_argument(format!(
                    "terminal value {bad} is not finite"
                )));
            }
            Ok(t.to_vec())
        }
    }
}

/// Optimal values and decisions by backward induction.
///
/// Ties between actions resolve to the lowest action index.
pub fn solve_backward_induction(
    mdp: &FiniteHorizonMdp,
    horizon: Horizon,
    terminal_values: Option<&[f64]>,
) -> Result<SolveResult> {
    let n_epochs = horizon.epochs();
    let mut rows = vec![Vec::new(); n_epochs + 1];
    rows[n_epochs] = terminal_row(mdp, terminal_values)?;
    let mut decisions = vec![Vec::new(); n_epochs];

    for n in (0..n_epochs).rev() {
        let next = &rows[n + 1];
        let (values, choices): (Vec<f64>, Vec<ActionId>) = mdp
            .states()
            .iter()
            .map(|s| {
                let mut best = (f64::NEG_INFINITY, ActionId::from_index(0));
                for (k, a) in s.actions.iter().enumerate() {
                    let v = lookahead(a.reward, a.row.probabilities(), next);
                    if v > best.0 {
                        best = (v, ActionId::from_index(k));
                    }
                }
                best
            })
            .unzip();
        rows[n] = values;
        decisions[n] = choices;
    }

    Ok(SolveResult {
        value_table: ValueTable { rows },
        policy: Policy::new(decisions),
    })
}

/// Expected total reward of a fixed Markov policy.
pub fn evaluate_policy(
    mdp: &FiniteHorizonMdp,
    policy: &Policy,
    horizon: Horizon,
    terminal_values: Option<&[f64]>,
) -> Result<ValueTable> {
    policy.validate(mdp, horizon)?;
    let n_epochs = horizon.epochs();
    let mut rows = vec![Vec::new(); n_epochs + 1];
    rows[n_epochs] = terminal_row(mdp, terminal_values)?;
    for n in (0..n_epochs).rev() {
        let next = &rows[n + 1];
        rows[n] = mdp
            .states()
            .iter()
            .zip(&policy.decisions[n])
            .map(|(s, a)| {
                let a = &s.actions[a.index()];
                lookahead(a.reward, a.row.probabilities(), next)
            })
            .collect();
    }
    Ok(ValueTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActionSpec, ModelSpec, RowCheck, StateSpec};

    fn model(states: Vec<Vec<(f64, Vec<f64>)>>) -> FiniteHorizonMdp {
        FiniteHorizonMdp::new(
            ModelSpec {
                reward_unit: String::new(),
                states: states
                    .into_iter()
                    .map(|acts| StateSpec {
                        actions: acts
                            .into_iter()
                            .map(|(reward, probabilities)| ActionSpec {
                                reward,
                                probabilities,
                                ..Default::default()
                            })
                            .collect(),
                        ..Default::default()
                    })
                    .collect(),
            },
            RowCheck::Strict,
        )
        .unwrap()
    }

    fn toy() -> FiniteHorizonMdp {
        model(vec![
            vec![(1.0, vec![0.5, 0.5]), (2.0, vec![0.0, 1.0])],
            vec![(3.0, vec![1.0, 0.0]), (0.5, vec![0.25, 0.75])],
        ])
    }

    #[test]
    fn zero_horizon_is_terminal_only() {
        let r = solve_backward_induction(&toy(), Horizon(0), None).unwrap();
        assert_eq!(r.value_table.rows(), &[vec![0.0, 0.0]]);
        assert!(r.policy.decisions().is_empty());

        let t = [4.0, -1.0];
        let r = solve_backward_induction(&toy(), Horizon(0), Some(&t)).unwrap();
        assert_eq!(r.value_table.row(0), &t);
        let v = evaluate_policy(&toy(), &r.policy, Horizon(0), Some(&t)).unwrap();
        assert_eq!(v.rows(), &[t.to_vec()]);
    }

    #[test]
    fn toy_two_stage_by_hand() {
        // n=1: v = [max(1,2), max(3,0.5)] = [2, 3], d = [2, 1]
        // n=0: s1: 1 + .5*2 + .5*3 = 3.5 ; 2 + 3 = 5 -> 5 (a2)
        //      s2: 3 + 2 = 5 ; 0.5 + .25*2 + .75*3 = 3.25 -> 5 (a1)
        let r = solve_backward_induction(&toy(), Horizon(2), None).unwrap();
        assert_eq!(r.value_table.row(1), &[2.0, 3.0]);
        assert_eq!(r.value_table.row(0), &[5.0, 5.0]);
        assert_eq!(r.policy.to_one_based(), vec![vec![2, 1], vec![2, 1]]);
    }

    #[test]
    fn ties_pick_lowest_action() {
        let m = model(vec![vec![
            (1.0, vec![1.0]),
            (1.0, vec![1.0]),
            (0.5, vec![1.0]),
        ]]);
        let r = solve_backward_induction(&m, Horizon(3), None).unwrap();
        assert!(r
            .policy
            .decisions()
            .iter()
            .flatten()
            .all(|a| a.index() == 0));
    }

    #[test]
    fn lookahead_with_zero_next_values_is_reward() {
        let m = toy();
        for s in m.state_ids() {
            for k in 0..m.action_count(s) {
                let a = ActionId::from_index(k);
                let v = one_step_lookahead(&m, s, a, &[0.0, 0.0]).unwrap();
                assert_eq!(v, m.action(s, a).unwrap().reward);
            }
        }
    }

    #[test]
    fn argument_errors() {
        let m = toy();
        let s = StateId::from_index(0);
        assert!(one_step_lookahead(
            &m,
            StateId::from_index(2),
            ActionId::from_index(0),
            &[0.0; 2]
        )
        .is_err());
        assert!(one_step_lookahead(&m, s, ActionId::from_index(2), &[0.0; 2]).is_err());
        assert!(one_step_lookahead(&m, s, ActionId::from_index(0), &[0.0; 3]).is_err());
        assert!(solve_backward_induction(&m, Horizon(1), Some(&[0.0])).is_err());
        assert!(solve_backward_induction(&m, Horizon(1), Some(&[0.0, f64::NAN])).is_err());

        let short = Policy::constant(Horizon(1), 2, ActionId::from_index(0));
        assert!(evaluate_policy(&m, &short, Horizon(2), None).is_err());
        let bad_action = Policy::constant(Horizon(1), 2, ActionId::from_index(2));
        assert!(evaluate_policy(&m, &bad_action, Horizon(1), None).is_err());
        let narrow = Policy::constant(Horizon(1), 1, ActionId::from_index(0));
        assert!(evaluate_policy(&m, &narrow, Horizon(1), None).is_err());
    }

    #[test]
    fn evaluating_extracted_policy_is_bitwise_equal() {
        let m = toy();
        let t = [0.3, 1.7];
        let r = solve_backward_induction(&m, Horizon(6), Some(&t)).unwrap();
        let v = evaluate_policy(&m, &r.policy, Horizon(6), Some(&t)).unwrap();
        assert_eq!(v, r.value_table);
    }

    #[test]
    fn suboptimal_policy_is_dominated() {
        let m = toy();
        let opt = solve_backward_induction(&m, Horizon(4), None).unwrap();
        let worse = Policy::constant(Horizon(4), 2, ActionId::from_index(0));
        let v = evaluate_policy(&m, &worse, Horizon(4), None).unwrap();
        for (a, b) in v
            .rows()
            .iter()
            .flatten()
            .zip(opt.value_table.rows().iter().flatten())
        {
            assert!(a <= b);
        }
        assert!(v.row(0)[0] < opt.value_table.row(0)[0]);
    }

    #[test]
    fn single_action_and_absorbing_states() {
        let m = model(vec![vec![(2.5, vec![1.0])]]);
        let r = solve_backward_induction(&m, Horizon(2), None).unwrap();
        assert_eq!(r.value_table.row(0), &[5.0]);
        assert_eq!(r.policy.to_one_based(), vec![vec![1], vec![1]]);
    }
}
