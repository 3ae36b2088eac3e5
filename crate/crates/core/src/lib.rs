//! Online double Q-learning trading agent built on a fast learning network
//! (random fixed hidden layer in parallel with a linear input path), with a
//! savings terminal-state mechanism and a seeded Monte-Carlo backtest harness.
//!
//! The pipeline is:
//!
//! 1. [`data_ingest`] parses 1-minute kline CSVs and keeps only prices that
//!    moved more than a relative threshold since the last kept price.
//! 2. [`features`] turns each block of 5 filtered prices into a 27-component
//!    state vector (RSI, volume averages, relative-movement cascade, wallet).
//! 3. [`fln`] approximates the action values for the 19 trade actions.
//! 4. [`agent`] runs the episodic double Q-learning loop with the wallet and
//!    savings mechanism.
//! 5. [`harness`] executes many independently seeded runs and aggregates them.

pub mod agent;
pub mod config;
pub mod data_ingest;
pub mod error;
pub mod features;
pub mod fln;
pub mod harness;
pub mod synthetic;

pub use config::Config;
pub use error::{Error, Result};
