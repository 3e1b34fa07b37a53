use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ActionId, FiniteHorizonMdp, StateId, TransitionRow};
use crate::solver::Policy;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeStep {
    pub epoch: usize,
    pub state: StateId,
    pub action: ActionId,
    pub reward: f64,
    pub next_state: StateId,
}

/// One sampled path through the horizon. Terminal values are taken as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    pub steps: Vec<EpisodeStep>,
    pub total_reward: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub start_state: StateId,
    pub episode_count: u64,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(episode_count)`; zero for a
    /// single episode.
    pub standard_error: f64,
    pub seed: u64,
}

/// Generator for episode `episode` under `seed`.
///
/// Each episode owns its own ChaCha stream, so changing the episode count
/// never reshuffles the episodes that were already drawn.
pub fn episode_rng(seed: u64, episode: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(episode);
    rng
}

/// Inverse-CDF draw in ascending state order. Mass lost to rounding goes to
/// the last state with positive probability.
fn sample_next<R: Rng + ?Sized>(row: &TransitionRow, rng: &mut R) -> StateId {
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut last = None;
    for (j, p) in row.support() {
        cumulative += p;
        if u < cumulative {
            return j;
        }
        last = Some(j);
    }
    last.expect("validated rows have positive mass")
}

/// Runs one episode. The policy must already be validated against `mdp`.
pub fn simulate_episode<R: Rng + ?Sized>(
    mdp: &FiniteHorizonMdp,
    policy: &Policy,
    start: StateId,
    rng: &mut R,
) -> EpisodeTrace {
    let mut state = start;
    let mut total_reward = 0.0;
    let mut steps = Vec::with_capacity(policy.horizon().epochs());
    for epoch in 0..policy.horizon().epochs() {
        let action = policy.action(epoch, state);
        let a = &mdp.states()[state.index()].actions[action.index()];
        let next_state = sample_next(&a.row, rng);
        total_reward += a.reward;
        steps.push(EpisodeStep {
            epoch,
            state,
            action,
            reward: a.reward,
            next_state,
        });
        state = next_state;
    }
    EpisodeTrace {
        steps,
        total_reward,
    }
}

/// Same draws as [`simulate_episode`], without recording the trace.
fn episode_total<R: Rng + ?Sized>(
    mdp: &FiniteHorizonMdp,
    policy: &Policy,
    start: StateId,
    rng: &mut R,
) -> f64 {
    let mut state = start;
    let mut total = 0.0;
    for epoch in 0..policy.horizon().epochs() {
        let a = &mdp.states()[state.index()].actions[policy.action(epoch, state).index()];
        state = sample_next(&a.row, rng);
        total += a.reward;
    }
    total
}

/// Replays a single episode of a `simulate_policy` run.
pub fn trace_episode(
    mdp: &FiniteHorizonMdp,
    policy: &Policy,
    start: StateId,
    seed: u64,
    episode: u64,
) -> Result<EpisodeTrace> {
    policy.validate(mdp, policy.horizon())?;
    mdp.check_state(start)?;
    Ok(simulate_episode(
        mdp,
        policy,
        start,
        &mut episode_rng(seed, episode),
    ))
}

pub fn simulate_policy(
    mdp: &FiniteHorizonMdp,
    policy: &Policy,
    start: StateId,
    episodes: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    policy.validate(mdp, policy.horizon())?;
    mdp.check_state(start)?;
    if episodes == 0 {
        return Err(Error::invalid_argument("episode count must be at least 1"));
    }

    let totals: Vec<f64> = (0..episodes)
        .into_par_iter()
        .map(|e| episode_total(mdp, policy, start, &mut episode_rng(seed, e)))
        .collect();

    // Welford, in episode order
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &x) in totals.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    let standard_error = if episodes > 1 {
        (m2 / (episodes - 1) as f64).sqrt() / (episodes as f64).sqrt()
    } else {
        0.0
    };

    Ok(MonteCarloEstimate {
        start_state: start,
        episode_count: episodes,
        mean,
        standard_error,
        seed,
    })
}
