use crate::error::{Error, Result};
use crate::model::{ActionId, FiniteHorizonMdp, Horizon};
use crate::solver::{evaluate_policy, Policy, SolveResult};

pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Number of Markov policies, `(Π_i |A_i|)^N`, or `None` if it overflows u128.
pub fn policy_count(mdp: &FiniteHorizonMdp, horizon: Horizon) -> Option<u128> {
    let per_epoch = mdp
        .state_ids()
        .try_fold(1u128, |acc, s| acc.checked_mul(mdp.action_count(s) as u128))?;
    (0..horizon.epochs()).try_fold(1u128, |acc, _| acc.checked_mul(per_epoch))
}

pub fn enumerate_optimal(mdp: &FiniteHorizonMdp, horizon: Horizon) -> Result<SolveResult> {
    enumerate_optimal_with_cap(mdp, horizon, DEFAULT_ENUMERATION_CAP)
}

/// Evaluates every Markov policy and keeps the componentwise best epoch-0
/// values.
///
/// The returned policy is the lexicographically first one (epoch-major,
/// then state, lowest action first) whose epoch-0 values reach the maximum at
/// every state, up to a relative 1e-12. Its full evaluation is returned as
/// the value table.
pub fn enumerate_optimal_with_cap(
    mdp: &FiniteHorizonMdp,
    horizon: Horizon,
    cap: u64,
) -> Result<SolveResult> {
    let count = policy_count(mdp, horizon);
    match count {
        Some(c) if c <= cap as u128 => {}
        _ => {
            return Err(Error::InstanceTooLarge {
                policies: count.map_or_else(|| "more than 2^128".to_string(), |c| c.to_string()),
                cap,
            })
        }
    }

    let mut best = vec![f64::NEG_INFINITY; mdp.state_count()];
    for_each_policy(mdp, horizon, |policy| {
        let table = evaluate_policy(mdp, policy, horizon, None)?;
        for (b, &v) in best.iter_mut().zip(table.row(0)) {
            if v > *b {
                *b = v;
            }
        }
        Ok(false)
    })?;

    let mut found = None;
    for_each_policy(mdp, horizon, |policy| {
        let table = evaluate_policy(mdp, policy, horizon, None)?;
        let attains = table
            .row(0)
            .iter()
            .zip(&best)
            .all(|(&v, &b)| b - v <= 1e-12 * b.abs().max(1.0));
        if attains {
            found = Some(SolveResult {
                value_table: table,
                policy: policy.clone(),
            });
        }
        Ok(attains)
    })?;

    found.ok_or_else(|| {
        Error::Validation("no single Markov policy attains the componentwise maximum".into())
    })
}

/// Visits policies in lexicographic order; the visitor returns `true` to stop.
fn for_each_policy<F>(mdp: &FiniteHorizonMdp, horizon: Horizon, mut visit: F) -> Result<()>
where
    F: FnMut(&Policy) -> Result<bool>,
{
    let states = mdp.state_count();
    let radix: Vec<usize> = (0..horizon.epochs())
        .flat_map(|_| mdp.state_ids().map(|s| mdp.action_count(s)))
        .collect();
    let mut digits = vec![0usize; radix.len()];
    loop {
        let decisions = digits
            .chunks(states)
            .map(|row| row.iter().map(|&k| ActionId::from_index(k)).collect())
            .collect();
        if visit(&Policy::new(decisions))? {
            return Ok(());
        }
        // odometer: last position turns fastest
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < radix[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActionSpec, ModelSpec, RowCheck, StateSpec};
    use crate::solver::{one_step_lookahead, solve_backward_induction};

    fn two_by_two() -> FiniteHorizonMdp {
        let act = |reward, probabilities| ActionSpec {
            reward,
            probabilities,
            ..Default::default()
        };
        FiniteHorizonMdp::new(
            ModelSpec {
                reward_unit: String::new(),
                states: vec![
                    StateSpec {
                        actions: vec![act(1.0, vec![0.2, 0.8]), act(1.5, vec![1.0, 0.0])],
                        ..Default::default()
                    },
                    StateSpec {
                        actions: vec![act(4.0, vec![0.9, 0.1]), act(0.25, vec![0.0, 1.0])],
                        ..Default::default()
                    },
                ],
            },
            RowCheck::Strict,
        )
        .unwrap()
    }

    #[test]
    fn counts_policies() {
        let m = two_by_two();
        assert_eq!(policy_count(&m, Horizon(0)), Some(1));
        assert_eq!(policy_count(&m, Horizon(1)), Some(4));
        assert_eq!(policy_count(&m, Horizon(3)), Some(64));
    }

    #[test]
    fn single_stage_is_per_state_max() {
        let m = two_by_two();
        let r = enumerate_optimal(&m, Horizon(1)).unwrap();
        for s in m.state_ids() {
            let best = (0..2)
                .map(|k| one_step_lookahead(&m, s, ActionId::from_index(k), &[0.0, 0.0]).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(r.value_table.value(0, s), best);
        }
        let bi = solve_backward_induction(&m, Horizon(1), None).unwrap();
        assert_eq!(r.value_table.row(0), bi.value_table.row(0));
        assert_eq!(r.policy, bi.policy);
    }

    #[test]
    fn zero_horizon_enumerates_the_empty_policy() {
        let r = enumerate_optimal(&two_by_two(), Horizon(0)).unwrap();
        assert_eq!(r.value_table.rows(), &[vec![0.0, 0.0]]);
        assert!(r.policy.decisions().is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let m = two_by_two();
        assert!(enumerate_optimal_with_cap(&m, Horizon(3), 64).is_ok());
        assert!(matches!(
            enumerate_optimal_with_cap(&m, Horizon(3), 63),
            Err(Error::InstanceTooLarge { cap: 63, .. })
        ));
    }
}
