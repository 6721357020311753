//! Physical parameters and truncation policy.
//!
//! Everything is dimensionless in units of the trap frequency. The detuning
//! `delta` is the only bias input; the bias `epsilon = -delta / 2` and the
//! coupling `g = eta / 2` are derived.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidParam {
        field,
        reason: reason.into(),
    }
}

/// Rabi frequency, Lamb-Dicke parameter and detuning of the driven ion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    omega: f64,
    eta: f64,
    delta: f64,
    g: f64,
    epsilon: f64,
}

impl ModelParams {
    pub fn new(omega: f64, eta: f64, delta: f64) -> Result<Self, ModelError> {
        if !omega.is_finite() {
            return Err(invalid("omega", "must be finite"));
        }
        if omega <= 0.0 {
            return Err(invalid("omega", format!("must be > 0, got {omega}")));
        }
        if !eta.is_finite() {
            return Err(invalid("eta", "must be finite"));
        }
        if eta < 0.0 {
            return Err(invalid("eta", format!("must be >= 0, got {eta}")));
        }
        if !delta.is_finite() {
            return Err(invalid("delta", "must be finite"));
        }
        Ok(Self {
            omega,
            eta,
            delta,
            g: eta / 2.0,
            epsilon: -delta / 2.0,
        })
    }

    /// Re-checks the inputs and recomputes the derived fields.
    pub fn validate(&self) -> Result<Self, ModelError> {
        Self::new(self.omega, self.eta, self.delta)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Spin-dependent displacement `eta / 2`.
    pub fn g(&self) -> f64 {
        self.g
    }

    /// Bias `-delta / 2`.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self, ModelError> {
        Self::new(self.omega, eta, self.delta)
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self, ModelError> {
        Self::new(self.omega, self.eta, delta)
    }
}

/// Adaptive truncation schedule and convergence thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub n_start: usize,
    pub n_step: usize,
    pub n_max_hard: usize,
    /// Upper bound on the probability carried by the last basis indices.
    pub tail_tol: f64,
    /// Upper bound on the energy change between successive truncations.
    pub drift_tol: f64,
    pub levels_requested: usize,
}

impl Default for BasisSpec {
    fn default() -> Self {
        Self {
            n_start: 40,
            n_step: 20,
            n_max_hard: 400,
            tail_tol: 1e-10,
            drift_tol: 1e-10,
            levels_requested: 10,
        }
    }
}

impl BasisSpec {
    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels_requested = levels;
        if self.n_start < levels {
            self.n_start = levels;
        }
        if self.n_max_hard < self.n_start {
            self.n_max_hard = self.n_start;
        }
        self
    }

    pub fn validate(&self) -> Result<Self, ModelError> {
        if self.n_start == 0 {
            return Err(invalid("n_start", "must be > 0"));
        }
        if self.n_start > self.n_max_hard {
            return Err(invalid(
                "n_start",
                format!("{} exceeds n_max_hard {}", self.n_start, self.n_max_hard),
            ));
        }
        if self.n_step == 0 {
            return Err(invalid("n_step", "must be >= 1"));
        }
        if !(self.tail_tol > 0.0) || !self.tail_tol.is_finite() {
            return Err(invalid("tail_tol", "must be finite and > 0"));
        }
        if !(self.drift_tol > 0.0) || !self.drift_tol.is_finite() {
            return Err(invalid("drift_tol", "must be finite and > 0"));
        }
        if self.levels_requested == 0 {
            return Err(invalid("levels_requested", "must be >= 1"));
        }
        if self.levels_requested > self.n_start {
            return Err(invalid(
                "levels_requested",
                format!("{} exceeds n_start {}", self.levels_requested, self.n_start),
            ));
        }
        Ok(*self)
    }

    /// Truncations visited by the adaptive solver, in order.
    pub fn schedule(&self) -> impl Iterator<Item = usize> + '_ {
        (self.n_start..=self.n_max_hard).step_by(self.n_step)
    }
}
