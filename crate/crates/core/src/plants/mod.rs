//! Discrete-time benchmark plants `x_{k+1} = f(x_k, u_k)`.
//!
//! Every plant is an explicit Euler step of a small ODE. State units: angles
//! in rad, angular rates in rad/s, temperatures in °C, positions in m,
//! velocities in m/s.

mod building;
mod double_pendulum;
mod pendulum;
mod target;
mod vehicle;

pub use building::{building_step, Building};
pub use double_pendulum::{double_pendulum_step, dp_accelerations, dp_coriolis, dp_mass_matrix, DoublePendulum};
pub use pendulum::{pendulum_step, SimplePendulum};
pub use target::{target_track_step, TargetTrack};
pub use vehicle::{vehicle_step, Vehicle};

use serde::{Deserialize, Serialize};

use crate::circuits::ControlHead;
use crate::error::{ensure_finite, Error, Result};

/// Common interface of the benchmark systems.
pub trait Plant: Send + Sync {
    fn name(&self) -> &'static str;
    fn state_dim(&self) -> usize;
    fn control_dim(&self) -> usize;

    /// One Euler step. Output length always equals `state_dim`.
    fn step(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>>;

    /// Affine map from raw ⟨Z⟩ readouts to physical control units, reading
    /// wires `0..control_dim`.
    fn default_head(&self) -> ControlHead;

    /// Actuator limits `(u_min, u_max)`.
    fn default_bounds(&self) -> (Vec<f64>, Vec<f64>);
}

pub(crate) fn check_dims(plant: &dyn Plant, x: &[f64], u: &[f64]) -> Result<()> {
    if x.len() != plant.state_dim() || u.len() != plant.control_dim() {
        return Err(Error::Config(format!(
            "{} expects state/control dims {}/{}, got {}/{}",
            plant.name(),
            plant.state_dim(),
            plant.control_dim(),
            x.len(),
            u.len()
        )));
    }
    ensure_finite(x, || format!("{} state input", plant.name()))?;
    ensure_finite(u, || format!("{} control input", plant.name()))
}

pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be finite and > 0, got {value}")))
    }
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let wrapped = (theta + PI).rem_euclid(TAU) - PI;
    if wrapped == -PI {
        PI
    } else {
        wrapped
    }
}

/// `sin θ` after subtracting the nearest multiple of `π`, so that gravity
/// vanishes exactly at `θ = kπ` in floating point.
pub fn reduced_sin(theta: f64) -> f64 {
    let k = (theta / std::f64::consts::PI).round();
    let s = (theta - k * std::f64::consts::PI).sin();
    if k.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

/// Step-size for the central-difference control jacobian, in control units.
pub const CONTROL_FD_STEP: f64 = 1e-6;

/// `∂f/∂u` at `(x, u)` by central differences, `state_dim × control_dim`.
pub fn control_jacobian_fd(plant: &dyn Plant, x: &[f64], u: &[f64], h: f64) -> Result<Vec<Vec<f64>>> {
    let n = plant.state_dim();
    let m = plant.control_dim();
    let mut jac = vec![vec![0.0; m]; n];
    let mut probe = u.to_vec();
    for j in 0..m {
        probe[j] = u[j] + h;
        let plus = plant.step(x, &probe)?;
        probe[j] = u[j] - h;
        let minus = plant.step(x, &probe)?;
        probe[j] = u[j];
        for i in 0..n {
            jac[i][j] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Serializable choice of plant with its physical parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlantModel {
    TargetTrack(TargetTrack),
    Building(Building),
    Vehicle(Vehicle),
    SimplePendulum(SimplePendulum),
    DoublePendulum(DoublePendulum),
}

impl PlantModel {
    pub fn as_plant(&self) -> &dyn Plant {
        match self {
            PlantModel::TargetTrack(p) => p,
            PlantModel::Building(p) => p,
            PlantModel::Vehicle(p) => p,
            PlantModel::SimplePendulum(p) => p,
            PlantModel::DoublePendulum(p) => p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PlantModel::TargetTrack(p) => p.validate(),
            PlantModel::Building(p) => p.validate(),
            PlantModel::Vehicle(p) => p.validate(),
            PlantModel::SimplePendulum(p) => p.validate(),
            PlantModel::DoublePendulum(p) => p.validate(),
        }
    }
}

impl Plant for PlantModel {
    fn name(&self) -> &'static str {
        self.as_plant().name()
    }
    fn state_dim(&self) -> usize {
        self.as_plant().state_dim()
    }
    fn control_dim(&self) -> usize {
        self.as_plant().control_dim()
    }
    fn step(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        self.as_plant().step(x, u)
    }
    fn default_head(&self) -> ControlHead {
        self.as_plant().default_head()
    }
    fn default_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        self.as_plant().default_bounds()
    }
}
