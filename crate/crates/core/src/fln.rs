//! Fast learning network: a random, fixed logistic hidden layer in parallel
//! with a direct linear path from the input to the outputs.
//!
//! Output `k` is the dot product of row `k` of the output weights with the
//! extended input `[x | g(W_hidden x)]`, so each action value is linear in
//! its own output row and the gradient with respect to that row is the
//! extended input itself. Only output rows are trained; after an update a
//! row longer than 1 is divided by the largest row norm the network has ever
//! seen (`maxw`, one scalar shared by all rows).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct FlnNetwork {
    inputs: usize,
    hidden: usize,
    outputs: usize,
    /// `hidden x inputs`, row-major; every row has unit norm.
    w_hidden: Vec<f64>,
    /// `outputs x (inputs + hidden)`, row-major.
    w_out: Vec<f64>,
    maxw: f64,
}

/// Extended input `[x | g(W_hidden x)]` for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct Activation(pub Vec<f64>);

impl Activation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// What an SGD step did to the trained row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateOutcome {
    /// Row norm right after the gradient step, before any rescale.
    pub raw_norm: f64,
    pub renormalized: bool,
}

pub fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl FlnNetwork {
    /// Draws every weight uniformly from [-1, 1], then scales each hidden
    /// row to unit length. Output rows are left as drawn.
    pub fn init<R: Rng + ?Sized>(inputs: usize, hidden: usize, outputs: usize, rng: &mut R) -> Self {
        let mut w_hidden: Vec<f64> = (0..hidden * inputs)
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        for row in w_hidden.chunks_mut(inputs) {
            let n = norm(row);
            if n > 0.0 {
                row.iter_mut().for_each(|w| *w /= n);
            }
        }
        let w_out = (0..outputs * (inputs + hidden))
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        Self {
            inputs,
            hidden,
            outputs,
            w_hidden,
            w_out,
            maxw: 1.0,
        }
    }

    /// Builds a network from explicit weights; `maxw` starts at 1.
    pub fn from_weights(
        inputs: usize,
        hidden: usize,
        outputs: usize,
        w_hidden: Vec<f64>,
        w_out: Vec<f64>,
    ) -> Result<Self> {
        if w_hidden.len() != hidden * inputs || w_out.len() != outputs * (inputs + hidden) {
            return Err(Error::Config(format!(
                "weight shapes do not match {inputs} inputs, {hidden} hidden, {outputs} outputs"
            )));
        }
        Ok(Self {
            inputs,
            hidden,
            outputs,
            w_hidden,
            w_out,
            maxw: 1.0,
        })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    /// Length of one output row (and of the extended input).
    pub fn extended_len(&self) -> usize {
        self.inputs + self.hidden
    }

    pub fn maxw(&self) -> f64 {
        self.maxw
    }

    pub fn hidden_weights(&self) -> &[f64] {
        &self.w_hidden
    }

    pub fn hidden_row(&self, j: usize) -> &[f64] {
        &self.w_hidden[j * self.inputs..(j + 1) * self.inputs]
    }

    pub fn output_row(&self, k: usize) -> &[f64] {
        let len = self.extended_len();
        &self.w_out[k * len..(k + 1) * len]
    }

    pub fn output_row_mut(&mut self, k: usize) -> &mut [f64] {
        let len = self.extended_len();
        &mut self.w_out[k * len..(k + 1) * len]
    }

    pub fn activate(&self, features: &[f64]) -> Activation {
        assert_eq!(features.len(), self.inputs, "feature length mismatch");
        let mut ext = Vec::with_capacity(self.extended_len());
        ext.extend_from_slice(features);
        ext.extend(
            self.w_hidden
                .chunks(self.inputs)
                .map(|row| logistic(dot(row, features))),
        );
        Activation(ext)
    }

    pub fn q_values(&self, act: &Activation) -> Vec<f64> {
        self.w_out
            .chunks(self.extended_len())
            .map(|row| dot(row, &act.0))
            .collect()
    }

    pub fn q_value(&self, action: usize, act: &Activation) -> f64 {
        dot(self.output_row(action), &act.0)
    }

    /// One semi-gradient step on the chosen action's row toward `td_target`,
    /// followed by the max-norm rescale.
    pub fn sgd_update(
        &mut self,
        action: usize,
        alpha: f64,
        td_target: f64,
        q_sa: f64,
        act: &Activation,
    ) -> Result<UpdateOutcome> {
        if !td_target.is_finite() {
            return Err(Error::NonFinite("TD target"));
        }
        let step = alpha * (td_target - q_sa);
        if !step.is_finite() {
            return Err(Error::NonFinite("TD step"));
        }
        let row = self.output_row_mut(action);
        for (w, g) in row.iter_mut().zip(&act.0) {
            *w += step * g;
        }
        let raw_norm = norm(row);
        if !raw_norm.is_finite() {
            return Err(Error::NonFinite("output weights"));
        }
        self.maxw = self.maxw.max(raw_norm);
        let renormalized = raw_norm > 1.0;
        if renormalized {
            let maxw = self.maxw;
            self.output_row_mut(action).iter_mut().for_each(|w| *w /= maxw);
        }
        Ok(UpdateOutcome {
            raw_norm,
            renormalized,
        })
    }

    pub fn snapshot(&self, seed: Option<u64>) -> NetworkSnapshot {
        NetworkSnapshot {
            version: SNAPSHOT_VERSION,
            seed,
            inputs: self.inputs,
            hidden: self.hidden,
            outputs: self.outputs,
            maxw: self.maxw,
            w_hidden: self.w_hidden.clone(),
            w_out: self.w_out.clone(),
        }
    }

    pub fn from_snapshot(s: &NetworkSnapshot) -> Result<Self> {
        if s.version != SNAPSHOT_VERSION {
            return Err(Error::Config(format!(
                "unsupported snapshot version {}",
                s.version
            )));
        }
        let mut net = Self::from_weights(
            s.inputs,
            s.hidden,
            s.outputs,
            s.w_hidden.clone(),
            s.w_out.clone(),
        )?;
        net.maxw = s.maxw;
        Ok(net)
    }
}

/// Flat row-major dump of a network for debugging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSnapshot {
    pub version: u32,
    pub seed: Option<u64>,
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
    pub maxw: f64,
    pub w_hidden: Vec<f64>,
    pub w_out: Vec<f64>,
}
