use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::{check_dims, require_positive, Plant};
use crate::circuits::{Affine, ControlHead};
use crate::error::{Error, Result};

/// Longitudinal/lateral vehicle model in a road-aligned frame.
///
/// State `(s, v, y, ϑ)`: arc-length position, speed, lateral offset from the
/// centreline and heading relative to the road tangent. Control
/// `(traction force [N], steering angle [rad])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vehicle {
    pub mass: f64,
    pub wheelbase: f64,
    pub drag_coefficient: f64,
    pub air_density: f64,
    pub frontal_area: f64,
    pub rolling_coefficient: f64,
    pub gravity: f64,
    /// Road curvature, constant along the track.
    pub curvature: f64,
    pub dt: f64,
}

impl Default for Vehicle {
    fn default() -> Self {
        Self {
            mass: 1500.0,
            wheelbase: 2.5,
            drag_coefficient: 0.3,
            air_density: 1.225,
            frontal_area: 2.5,
            rolling_coefficient: 0.01,
            gravity: 9.81,
            curvature: 0.0,
            dt: 0.1,
        }
    }
}

impl Vehicle {
    pub fn validate(&self) -> Result<()> {
        require_positive("vehicle.mass", self.mass)?;
        require_positive("vehicle.wheelbase", self.wheelbase)?;
        require_positive("vehicle.dt", self.dt)?;
        for (name, v) in [
            ("vehicle.drag_coefficient", self.drag_coefficient),
            ("vehicle.air_density", self.air_density),
            ("vehicle.frontal_area", self.frontal_area),
            ("vehicle.rolling_coefficient", self.rolling_coefficient),
            ("vehicle.gravity", self.gravity),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !self.curvature.is_finite() {
            return Err(Error::Config("vehicle.curvature must be finite".into()));
        }
        Ok(())
    }
}

// sign with sign(0) = 0, unlike f64::signum
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// One Euler step. Drag and rolling resistance oppose the direction of
/// motion and vanish at rest.
pub fn vehicle_step(x: &[f64; 4], u: &[f64; 2], p: &Vehicle) -> Result<[f64; 4]> {
    let [s, v, y, heading] = *x;
    let [traction, steer] = *u;
    if steer.abs() >= FRAC_PI_2 {
        return Err(Error::Singularity(format!(
            "steering angle {steer} rad reaches the tan singularity at ±π/2"
        )));
    }
    let drag = 0.5 * p.drag_coefficient * p.air_density * p.frontal_area * v * v;
    let rolling = p.rolling_coefficient * p.mass * p.gravity;
    let resist = sign(v) * (drag + rolling);
    let (sin_h, cos_h) = heading.sin_cos();
    Ok([
        s + v * cos_h * p.dt,
        v + (traction - resist) / p.mass * p.dt,
        y + v * sin_h * p.dt,
        heading + (v * steer.tan() / p.wheelbase - p.curvature * v) * p.dt,
    ])
}

impl Plant for Vehicle {
    fn name(&self) -> &'static str {
        "vehicle"
    }
    fn state_dim(&self) -> usize {
        4
    }
    fn control_dim(&self) -> usize {
        2
    }
    fn step(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        check_dims(self, x, u)?;
        let x = [x[0], x[1], x[2], x[3]];
        let u = [u[0], u[1]];
        vehicle_step(&x, &u, self).map(|next| next.to_vec())
    }
    fn default_head(&self) -> ControlHead {
        ControlHead::new(
            vec![0, 1],
            vec![
                Affine {
                    gain: 1500.0,
                    offset: 0.0,
                },
                Affine { gain: 0.5, offset: 0.0 },
            ],
        )
    }
    fn default_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![-1500.0, -0.5], vec![1500.0, 0.5])
    }
}
