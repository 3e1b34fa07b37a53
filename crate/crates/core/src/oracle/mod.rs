//! Independent checks on the solver: exhaustive enumeration of Markov
//! policies for tiny instances and Monte Carlo simulation for full-size ones.

mod enumerate;
mod random;
mod simulate;

pub use enumerate::{
    enumerate_optimal, enumerate_optimal_with_cap, policy_count, DEFAULT_ENUMERATION_CAP,
};
pub use random::{random_instance, RandomModelConfig};
pub use simulate::{
    episode_rng, simulate_episode, simulate_policy, trace_episode, EpisodeStep, EpisodeTrace,
    MonteCarloEstimate,
};
