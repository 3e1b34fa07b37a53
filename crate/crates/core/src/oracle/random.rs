use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ActionSpec, FiniteHorizonMdp, Horizon, ModelSpec, RowCheck, StateSpec};

/// Shape of the seeded random instances used by the oracle checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomModelConfig {
    pub max_states: usize,
    pub max_actions: usize,
    /// Horizons are drawn from `1..=max_horizon` (0 if this is 0).
    pub max_horizon: usize,
    /// Rewards are uniform in `[min_reward, max_reward)`.
    pub min_reward: f64,
    pub max_reward: f64,
    /// Chance that a transition entry is forced to zero.
    pub zero_probability: f64,
}

impl Default for RandomModelConfig {
    fn default() -> Self {
        Self {
            max_states: 3,
            max_actions: 3,
            max_horizon: 3,
            min_reward: 0.0,
            max_reward: 100.0,
            zero_probability: 0.3,
        }
    }
}

/// A reproducible random model and horizon for `seed`.
pub fn random_instance(seed: u64, config: &RandomModelConfig) -> (FiniteHorizonMdp, Horizon) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=config.max_states.max(1));
    let states = (0..n)
        .map(|_| {
            let k = rng.random_range(1..=config.max_actions.max(1));
            StateSpec {
                actions: (0..k)
                    .map(|_| ActionSpec {
                        reward: if config.max_reward > config.min_reward {
                            rng.random_range(config.min_reward..config.max_reward)
                        } else {
                            config.min_reward
                        },
                        probabilities: random_row(&mut rng, n, config.zero_probability),
                        ..Default::default()
                    })
                    .collect(),
                ..Default::default()
            }
        })
        .collect();
    let horizon = if config.max_horizon == 0 {
        0
    } else {
        rng.random_range(1..=config.max_horizon)
    };
    let mdp = FiniteHorizonMdp::new(
        ModelSpec {
            reward_unit: String::new(),
            states,
        },
        RowCheck::default(),
    )
    .expect("generated rows are normalized");
    (mdp, Horizon(horizon))
}

fn random_row(rng: &mut ChaCha8Rng, n: usize, zero_probability: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random::<f64>() < zero_probability {
                0.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        let j = rng.random_range(0..n);
        w[j] = 1.0;
    }
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= sum);
    w
}
