use serde::{Deserialize, Serialize};

use crate::circuits::ParamTensor;
use crate::error::{ensure_finite, Error, Result};

/// SGD with momentum and a floored exponential learning-rate schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub lr_init: f64,
    pub lr_min: f64,
    /// Multiplicative decay per update, in `(0, 1]`.
    pub decay: f64,
    pub momentum: f64,
    /// Componentwise gradient clip. `inf` disables clipping.
    pub grad_clip: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            lr_init: 0.1,
            lr_min: 0.01,
            decay: 1.0,
            momentum: 0.85,
            grad_clip: 0.5,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr_init.is_finite() && self.lr_init > 0.0) {
            return Err(Error::Config(format!(
                "optimizer.lr_init must be > 0, got {}",
                self.lr_init
            )));
        }
        if !(self.lr_min > 0.0 && self.lr_min <= self.lr_init) {
            return Err(Error::Config(format!(
                "optimizer.lr_min must lie in (0, lr_init], got {}",
                self.lr_min
            )));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::Config(format!(
                "optimizer.decay must lie in (0, 1], got {}",
                self.decay
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!(
                "optimizer.momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.grad_clip.is_nan() || self.grad_clip <= 0.0 {
            return Err(Error::Config(format!(
                "optimizer.grad_clip must be > 0, got {}",
                self.grad_clip
            )));
        }
        Ok(())
    }

    /// Learning rate used by update `k` (zero-based).
    pub fn lr_at(&self, k: usize) -> f64 {
        let k = i32::try_from(k).unwrap_or(i32::MAX);
        self.lr_min.max(self.lr_init * self.decay.powi(k))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    pub velocity: Vec<f64>,
    /// Rate the next update will use.
    pub lr: f64,
    pub step_count: usize,
}

impl OptimizerState {
    pub fn new(cfg: &OptimizerConfig, n_params: usize) -> Self {
        Self {
            velocity: vec![0.0; n_params],
            lr: cfg.lr_at(0),
            step_count: 0,
        }
    }

    /// One in-place update of `params`.
    pub fn step(&mut self, cfg: &OptimizerConfig, params: &mut [f64], grad: &[f64]) -> Result<()> {
        if params.len() != grad.len() || params.len() != self.velocity.len() {
            return Err(Error::Precondition(format!(
                "optimizer shapes differ: params {}, grad {}, velocity {}",
                params.len(),
                grad.len(),
                self.velocity.len()
            )));
        }
        ensure_finite(grad, || format!("gradient at update {}", self.step_count))?;
        let lr = self.lr;
        for ((p, v), g) in params.iter_mut().zip(self.velocity.iter_mut()).zip(grad) {
            let g = g.clamp(-cfg.grad_clip, cfg.grad_clip);
            *v = cfg.momentum * *v - lr * g;
            *p += *v;
        }
        self.step_count += 1;
        self.lr = cfg.lr_at(self.step_count);
        Ok(())
    }
}

pub fn sgd_momentum_update(
    theta: &ParamTensor,
    grad: &[f64],
    state: &OptimizerState,
    cfg: &OptimizerConfig,
) -> Result<(ParamTensor, OptimizerState)> {
    let mut theta = theta.clone();
    let mut state = state.clone();
    state.step(cfg, theta.values_mut(), grad)?;
    Ok((theta, state))
}
