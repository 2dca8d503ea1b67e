use serde::{Deserialize, Serialize};

use super::{check_dims, Plant};
use crate::circuits::ControlHead;
use crate::error::{Error, Result};

/// Reference-following map `x + α(u − x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetTrack {
    pub alpha: f64,
    #[serde(default = "default_dim")]
    pub dim: usize,
}

fn default_dim() -> usize {
    3
}

impl Default for TargetTrack {
    fn default() -> Self {
        Self { alpha: 0.1, dim: 3 }
    }
}

impl TargetTrack {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if self.dim == 0 {
            return Err(Error::Config("target-tracking dimension must be >= 1".into()));
        }
        Ok(())
    }
}

pub fn target_track_step(x: &[f64], u: &[f64], alpha: f64) -> Vec<f64> {
    x.iter().zip(u).map(|(xi, ui)| xi + alpha * (ui - xi)).collect()
}

impl Plant for TargetTrack {
    fn name(&self) -> &'static str {
        "target_track"
    }
    fn state_dim(&self) -> usize {
        self.dim
    }
    fn control_dim(&self) -> usize {
        self.dim
    }
    fn step(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        check_dims(self, x, u)?;
        Ok(target_track_step(x, u, self.alpha))
    }
    fn default_head(&self) -> ControlHead {
        ControlHead::identity((0..self.dim).collect())
    }
    fn default_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![-1.0; self.dim], vec![1.0; self.dim])
    }
}
