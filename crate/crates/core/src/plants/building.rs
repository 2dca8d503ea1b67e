use serde::{Deserialize, Serialize};

use super::{check_dims, require_positive, Plant};
use crate::circuits::{Affine, ControlHead};
use crate::error::{Error, Result};

/// First-order RC thermal model of one or more independent rooms.
///
/// `u` is HVAC power in W, state is room temperature in °C. Rooms share
/// parameters and do not exchange heat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Building {
    /// Thermal resistance to outside, K/W.
    pub resistance: f64,
    /// Thermal capacitance, J/K.
    pub capacitance: f64,
    pub t_outdoor: f64,
    pub q_solar: f64,
    /// Occupant heat gain, treated as W.
    pub q_occupants: f64,
    pub dt: f64,
    /// HVAC power limit; actuation range is `[0, p_max]`.
    pub p_max: f64,
    pub n_rooms: usize,
}

impl Default for Building {
    fn default() -> Self {
        Self {
            resistance: 0.5,
            capacitance: 1.0,
            t_outdoor: 15.0,
            q_solar: 5.0,
            q_occupants: 3.0,
            dt: 0.1,
            p_max: 10.0,
            n_rooms: 3,
        }
    }
}

impl Building {
    pub fn validate(&self) -> Result<()> {
        require_positive("building.resistance", self.resistance)?;
        require_positive("building.capacitance", self.capacitance)?;
        require_positive("building.dt", self.dt)?;
        require_positive("building.p_max", self.p_max)?;
        if self.n_rooms == 0 {
            return Err(Error::Config("building.n_rooms must be >= 1".into()));
        }
        Ok(())
    }
}

/// One Euler step of the room heat balance for a single room.
pub fn building_step(x: f64, u: f64, p: &Building) -> f64 {
    let rc = p.resistance * p.capacitance;
    x + ((p.t_outdoor - x) / rc + u / p.capacitance + (p.q_solar + p.q_occupants) / p.capacitance) * p.dt
}

impl Plant for Building {
    fn name(&self) -> &'static str {
        "building"
    }
    fn state_dim(&self) -> usize {
        self.n_rooms
    }
    fn control_dim(&self) -> usize {
        self.n_rooms
    }
    fn step(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        check_dims(self, x, u)?;
        Ok(x.iter().zip(u).map(|(&xi, &ui)| building_step(xi, ui, self)).collect())
    }
    fn default_head(&self) -> ControlHead {
        // raw ∈ [−1, 1] onto [0, p_max]
        let half = self.p_max / 2.0;
        ControlHead::new(
            (0..self.n_rooms).collect(),
            vec![
                Affine {
                    gain: half,
                    offset: half
                };
                self.n_rooms
            ],
        )
    }
    fn default_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![0.0; self.n_rooms], vec![self.p_max; self.n_rooms])
    }
}
