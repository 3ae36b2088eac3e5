//! Exploration and learning-rate schedules, and ε-greedy action choice.
//!
//! ε decays as `1 / ln(5 i + 2)` with a small per-step chance of jumping the
//! counter back to 30 (ε ≈ 0.2) once it has passed that point. α follows a
//! cosine between `alpha_max` and `alpha_min` with period `2 t_alpha`.

use std::f64::consts::PI;

use rand::Rng;

use super::double_q::argmax_last;
use super::wallet::{Action, N_ACTIONS};
use crate::Config;

/// `ceil((e^5 - 2) / 5)`: the ε counter value giving ε ≈ 0.2.
pub const EPS_RESET_COUNTER: u64 = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct Schedules {
    pub i_eps: u64,
    /// Incremented before use, so the first step sees 0.
    pub i_alpha: i64,
    pub prob_eps: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub t_alpha: u64,
}

impl Schedules {
    pub fn new(prob_eps: f64, alpha_min: f64, alpha_max: f64, t_alpha: u64) -> Self {
        Self {
            i_eps: 0,
            i_alpha: -1,
            prob_eps,
            alpha_min,
            alpha_max,
            t_alpha,
        }
    }

    pub fn from_config(cfg: &Config) -> Self {
        Self::new(cfg.prob_eps, cfg.alpha_min, cfg.alpha_max, cfg.t_alpha)
    }

    pub fn epsilon_step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        let draw: f64 = rng.random();
        self.epsilon_step_with(draw)
    }

    /// Same as [`Self::epsilon_step`] with the reset draw supplied.
    pub fn epsilon_step_with(&mut self, draw: f64) -> f64 {
        if draw <= self.prob_eps && self.i_eps >= EPS_RESET_COUNTER {
            self.i_eps = EPS_RESET_COUNTER;
        } else {
            self.i_eps += 1;
        }
        epsilon(self.i_eps)
    }

    pub fn alpha_step(&mut self) -> f64 {
        self.i_alpha += 1;
        self.alpha_at(self.i_alpha)
    }

    pub fn alpha_at(&self, i_alpha: i64) -> f64 {
        let phase = i_alpha as f64 / self.t_alpha as f64 * PI;
        self.alpha_min + 0.5 * (self.alpha_max - self.alpha_min) * (1.0 + phase.cos())
    }
}

pub fn epsilon(i_eps: u64) -> f64 {
    1.0 / (5.0 * i_eps as f64 + 2.0).ln()
}

/// ε-greedy over the averaged action values. Greedy ties go to the highest
/// action number; ε above 1 behaves as 1.
pub fn select_action<R: Rng + ?Sized>(q_avg: &[f64], eps: f64, rng: &mut R) -> Action {
    debug_assert_eq!(q_avg.len(), N_ACTIONS);
    let draw: f64 = rng.random();
    if draw <= eps.min(1.0) {
        Action::from_index(rng.random_range(0..N_ACTIONS))
    } else {
        Action::from_index(argmax_last(q_avg))
    }
}
