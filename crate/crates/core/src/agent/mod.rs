//! The episodic double Q-learning trader.
//!
//! [`wallet`] holds the money pools, trade execution, reward and the savings
//! terminal states; [`schedule`] the exploration and learning-rate schedules;
//! [`double_q`] the pair of networks and their TD updates; [`runner`] wires
//! them to a filtered price series one block at a time.

pub mod double_q;
pub mod runner;
pub mod schedule;
pub mod wallet;

pub use double_q::{argmax_last, DoubleQ};
pub use runner::{run_random_baseline, Agent, RunSummary, StepRecord, MIN_SERIES_LEN};
pub use schedule::{select_action, Schedules, EPS_RESET_COUNTER};
pub use wallet::{
    apply_terminal, check_terminal, compute_reward, execute_action, Action, ActionOutcome,
    Terminal, Wallet, N_ACTIONS,
};
