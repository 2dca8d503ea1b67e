use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Componentwise projection onto `[u_min, u_max]`.
pub fn clip_controls(u: &[f64], u_min: &[f64], u_max: &[f64]) -> Vec<f64> {
    u.iter()
        .zip(u_min.iter().zip(u_max))
        .map(|(&v, (&lo, &hi))| lo.max(v.min(hi)))
        .collect()
}

/// Box constraint on the control vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlBounds {
    pub u_min: Vec<f64>,
    pub u_max: Vec<f64>,
}

impl ControlBounds {
    pub fn new(u_min: Vec<f64>, u_max: Vec<f64>) -> Result<Self> {
        let bounds = Self { u_min, u_max };
        bounds.validate()?;
        Ok(bounds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.u_min.len() != self.u_max.len() {
            return Err(Error::Config(format!(
                "u_min has {} entries but u_max has {}",
                self.u_min.len(),
                self.u_max.len()
            )));
        }
        for (i, (lo, hi)) in self.u_min.iter().zip(&self.u_max).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!(
                    "control bound {i} must satisfy u_min < u_max, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.u_min.len()
    }

    pub fn clip(&self, u: &[f64]) -> Vec<f64> {
        clip_controls(u, &self.u_min, &self.u_max)
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.dim()
            && u.iter()
                .zip(self.u_min.iter().zip(&self.u_max))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// Components of an unclipped control that the projection moves.
    pub fn pinned(&self, u: &[f64]) -> Vec<bool> {
        u.iter()
            .zip(self.u_min.iter().zip(&self.u_max))
            .map(|(v, (lo, hi))| v < lo || v > hi)
            .collect()
    }
}
