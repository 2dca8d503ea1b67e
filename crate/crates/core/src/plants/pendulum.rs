use serde::{Deserialize, Serialize};

use super::{check_dims, reduced_sin, require_positive, wrap_angle, Plant};
use crate::circuits::{Affine, ControlHead};
use crate::error::Result;

/// Torque-driven simple pendulum, state `(Θ, Θ̇)` measured from the downward
/// vertical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplePendulum {
    pub mass: f64,
    pub length: f64,
    pub gravity: f64,
    pub dt: f64,
    #[serde(default)]
    pub wrap_angles: bool,
}

impl Default for SimplePendulum {
    fn default() -> Self {
        Self {
            mass: 1.0,
            length: 1.0,
            gravity: 9.81,
            dt: 0.05,
            wrap_angles: false,
        }
    }
}

impl SimplePendulum {
    pub fn validate(&self) -> Result<()> {
        require_positive("pendulum.mass", self.mass)?;
        require_positive("pendulum.length", self.length)?;
        require_positive("pendulum.dt", self.dt)?;
        if !self.gravity.is_finite() {
            return Err(crate::Error::Config("pendulum.gravity must be finite".into()));
        }
        Ok(())
    }
}

/// Explicit Euler: the angle advances with the old rate, the rate with the
/// acceleration evaluated at the old angle.
pub fn pendulum_step(x: &[f64; 2], u: f64, p: &SimplePendulum) -> [f64; 2] {
    let [theta, omega] = *x;
    let accel = -p.gravity / p.length * reduced_sin(theta) + u / (p.mass * p.length * p.length);
    let mut next_theta = theta + omega * p.dt;
    if p.wrap_angles {
        next_theta = wrap_angle(next_theta);
    }
    [next_theta, omega + accel * p.dt]
}

impl Plant for SimplePendulum {
    fn name(&self) -> &'static str {
        "simple_pendulum"
    }
    fn state_dim(&self) -> usize {
        2
    }
    fn control_dim(&self) -> usize {
        1
    }
    fn step(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        check_dims(self, x, u)?;
        Ok(pendulum_step(&[x[0], x[1]], u[0], self).to_vec())
    }
    fn default_head(&self) -> ControlHead {
        ControlHead::new(vec![0], vec![Affine { gain: 2.0, offset: 0.0 }])
    }
    fn default_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![-2.0], vec![2.0])
    }
}
