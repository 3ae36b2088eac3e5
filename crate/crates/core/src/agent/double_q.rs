//! Two independent networks trained with double Q-learning: the network
//! being updated picks the greedy next action, the other one values it.

use rand::Rng;

use crate::error::Result;
use crate::fln::{Activation, FlnNetwork, UpdateOutcome};

/// Index of the largest entry; ties resolve to the last maximal position.
pub fn argmax_last(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v >= values[best] {
            best = i;
        }
    }
    best
}

/// Per-network activations of one state.
#[derive(Debug, Clone, PartialEq)]
pub struct PairActivation(pub [Activation; 2]);

#[derive(Debug, Clone, PartialEq)]
pub struct PairValues(pub [Vec<f64>; 2]);

impl PairValues {
    pub fn average(&self) -> Vec<f64> {
        self.0[0]
            .iter()
            .zip(&self.0[1])
            .map(|(a, b)| (a + b) / 2.0)
            .collect()
    }
}

/// The result of one TD update, for tracing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdUpdate {
    /// 0 or 1.
    pub network: usize,
    pub target: f64,
    /// `gamma * Q_other(s', argmax_a Q_this(s', a))`, absent for terminals.
    pub bootstrap: Option<f64>,
    pub outcome: UpdateOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleQ {
    pub nets: [FlnNetwork; 2],
}

impl DoubleQ {
    pub fn new(first: FlnNetwork, second: FlnNetwork) -> Self {
        Self {
            nets: [first, second],
        }
    }

    /// Two networks with independently drawn hidden and output weights.
    pub fn init<R: Rng + ?Sized>(inputs: usize, hidden: usize, outputs: usize, rng: &mut R) -> Self {
        let a = FlnNetwork::init(inputs, hidden, outputs, rng);
        let b = FlnNetwork::init(inputs, hidden, outputs, rng);
        Self::new(a, b)
    }

    pub fn activate(&self, features: &[f64]) -> PairActivation {
        PairActivation([self.nets[0].activate(features), self.nets[1].activate(features)])
    }

    pub fn values(&self, act: &PairActivation) -> PairValues {
        PairValues([self.nets[0].q_values(&act.0[0]), self.nets[1].q_values(&act.0[1])])
    }

    /// Picks which network to train: the first when a uniform draw is ≤ ½.
    pub fn coin<R: Rng + ?Sized>(rng: &mut R) -> usize {
        let draw: f64 = rng.random();
        if draw <= 0.5 {
            0
        } else {
            1
        }
    }

    /// Update toward `reward` alone.
    pub fn update_terminal(
        &mut self,
        network: usize,
        action: usize,
        alpha: f64,
        reward: f64,
        current: &PairActivation,
        current_q: &PairValues,
    ) -> Result<TdUpdate> {
        let outcome = self.nets[network].sgd_update(
            action,
            alpha,
            reward,
            current_q.0[network][action],
            &current.0[network],
        )?;
        Ok(TdUpdate {
            network,
            target: reward,
            bootstrap: None,
            outcome,
        })
    }

    /// Update toward `reward + gamma * Q_other(s', argmax Q_this(s', ·))`.
    #[allow(clippy::too_many_arguments)]
    pub fn update_bootstrap(
        &mut self,
        network: usize,
        action: usize,
        alpha: f64,
        reward: f64,
        gamma: f64,
        current: &PairActivation,
        current_q: &PairValues,
        next_q: &PairValues,
    ) -> Result<TdUpdate> {
        let other = 1 - network;
        let greedy = argmax_last(&next_q.0[network]);
        let bootstrap = gamma * next_q.0[other][greedy];
        let target = reward + bootstrap;
        let outcome = self.nets[network].sgd_update(
            action,
            alpha,
            target,
            current_q.0[network][action],
            &current.0[network],
        )?;
        Ok(TdUpdate {
            network,
            target,
            bootstrap: Some(bootstrap),
            outcome,
        })
    }
}
