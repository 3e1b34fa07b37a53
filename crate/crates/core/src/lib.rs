//! Finite-horizon Markov decision processes.
//!
//! * [`model`]: validated models with per-state action sets.
//! * [`solver`]: backward induction, one-step lookahead and policy evaluation.
//! * [`oracle`]: brute-force enumeration and Monte Carlo simulation used to
//!   cross-check the solver.
//! * [`io`]: TOML model and fixture files, text/CSV/JSON reports.
//! * [`dataset`]: the bundled spiral-drilling feed-rate model.
//!
//! ```
//! use fhmdp::{dataset, solve_backward_induction};
//!
//! let mdp = dataset::drilling();
//! let result = solve_backward_induction(&mdp, dataset::DRILLING_HORIZON, None).unwrap();
//! assert!((result.value_table.row(0)[0] - 89233.27).abs() < 0.01);
//! ```

pub mod dataset;
pub mod error;
pub mod io;
pub mod model;
pub mod oracle;
pub mod solver;

pub use error::{Error, Result, RowError};
pub use model::{
    Action, ActionId, ActionSpec, FiniteHorizonMdp, Horizon, ModelSpec, RowCheck, State, StateId,
    StateSpec, TransitionRow, PROB_TOLERANCE,
};
pub use solver::{
    evaluate_policy, one_step_lookahead, solve_backward_induction, Policy, SolveResult, ValueTable,
};
