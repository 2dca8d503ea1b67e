use serde::{Deserialize, Serialize};

use super::{check_dims, reduced_sin, require_positive, wrap_angle, Plant};
use crate::circuits::ControlHead;
use crate::error::Result;

/// Frictionless double pendulum with torques at both joints.
///
/// State `(Θ, Θ̇, φ, φ̇)`; both angles from the downward vertical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoublePendulum {
    pub m1: f64,
    pub m2: f64,
    pub l1: f64,
    pub l2: f64,
    pub gravity: f64,
    pub dt: f64,
    #[serde(default)]
    pub wrap_angles: bool,
}

impl Default for DoublePendulum {
    fn default() -> Self {
        Self {
            m1: 1.0,
            m2: 1.0,
            l1: 1.0,
            l2: 1.0,
            gravity: 9.81,
            dt: 0.05,
            wrap_angles: false,
        }
    }
}

impl DoublePendulum {
    pub fn validate(&self) -> Result<()> {
        require_positive("double_pendulum.m1", self.m1)?;
        require_positive("double_pendulum.m2", self.m2)?;
        require_positive("double_pendulum.l1", self.l1)?;
        require_positive("double_pendulum.l2", self.l2)?;
        require_positive("double_pendulum.dt", self.dt)?;
        if !self.gravity.is_finite() {
            return Err(crate::Error::Config("double_pendulum.gravity must be finite".into()));
        }
        Ok(())
    }
}

/// Symmetric mass matrix M(Θ, φ).
pub fn dp_mass_matrix(theta: f64, phi: f64, p: &DoublePendulum) -> [[f64; 2]; 2] {
    let off = p.m2 * p.l1 * p.l2 * (theta - phi).cos();
    [[(p.m1 + p.m2) * p.l1 * p.l1, off], [off, p.m2 * p.l2 * p.l2]]
}

/// Velocity-product and gravity terms C(x).
pub fn dp_coriolis(x: &[f64; 4], p: &DoublePendulum) -> [f64; 2] {
    let [theta, theta_dot, phi, phi_dot] = *x;
    let coupling = p.m2 * p.l1 * p.l2 * (theta - phi).sin();
    [
        coupling * phi_dot * phi_dot + (p.m1 + p.m2) * p.gravity * p.l1 * reduced_sin(theta),
        -coupling * theta_dot * theta_dot + p.m2 * p.gravity * p.l2 * reduced_sin(phi),
    ]
}

/// Solves `M·a = τ − C` by Cramer's rule. `det M = m₂ℓ₁²ℓ₂²(m₁ + m₂ sin²(Θ−φ))`
/// is strictly positive, so the solve never fails.
pub fn dp_accelerations(x: &[f64; 4], torque: &[f64; 2], p: &DoublePendulum) -> [f64; 2] {
    let [[a, b], [c, d]] = dp_mass_matrix(x[0], x[2], p);
    let cor = dp_coriolis(x, p);
    let r1 = torque[0] - cor[0];
    let r2 = torque[1] - cor[1];
    let det = a * d - b * c;
    [(r1 * d - b * r2) / det, (a * r2 - c * r1) / det]
}

pub fn double_pendulum_step(x: &[f64; 4], torque: &[f64; 2], p: &DoublePendulum) -> [f64; 4] {
    let [theta_dd, phi_dd] = dp_accelerations(x, torque, p);
    let [theta, theta_dot, phi, phi_dot] = *x;
    let mut next = [
        theta + theta_dot * p.dt,
        theta_dot + theta_dd * p.dt,
        phi + phi_dot * p.dt,
        phi_dot + phi_dd * p.dt,
    ];
    if p.wrap_angles {
        next[0] = wrap_angle(next[0]);
        next[2] = wrap_angle(next[2]);
    }
    next
}

impl Plant for DoublePendulum {
    fn name(&self) -> &'static str {
        "double_pendulum"
    }
    fn state_dim(&self) -> usize {
        4
    }
    fn control_dim(&self) -> usize {
        2
    }
    fn step(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        check_dims(self, x, u)?;
        Ok(double_pendulum_step(&[x[0], x[1], x[2], x[3]], &[u[0], u[1]], self).to_vec())
    }
    fn default_head(&self) -> ControlHead {
        ControlHead::identity(vec![0, 1])
    }
    fn default_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![-1.0, -1.0], vec![1.0, 1.0])
    }
}
