use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `physical = gain · raw + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Affine {
    pub gain: f64,
    pub offset: f64,
}

impl Affine {
    pub const IDENTITY: Affine = Affine { gain: 1.0, offset: 0.0 };

    pub fn apply(&self, raw: f64) -> f64 {
        self.gain * raw + self.offset
    }
}

/// Maps Pauli-Z readouts to physical controls, one wire per control dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlHead {
    pub readout_wires: Vec<usize>,
    pub scale: Vec<Affine>,
}

impl ControlHead {
    pub fn new(readout_wires: Vec<usize>, scale: Vec<Affine>) -> Self {
        Self { readout_wires, scale }
    }

    pub fn identity(readout_wires: Vec<usize>) -> Self {
        let scale = vec![Affine::IDENTITY; readout_wires.len()];
        Self { readout_wires, scale }
    }

    pub fn dim(&self) -> usize {
        self.readout_wires.len()
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.readout_wires.is_empty() {
            return Err(Error::Config("control head needs at least one readout wire".into()));
        }
        if self.scale.len() != self.readout_wires.len() {
            return Err(Error::Config(format!(
                "control head has {} readout wires but {} affine maps",
                self.readout_wires.len(),
                self.scale.len()
            )));
        }
        if let Some(w) = self.readout_wires.iter().find(|&&w| w >= n_qubits) {
            return Err(Error::Config(format!(
                "readout wire {w} out of range for {n_qubits} qubits"
            )));
        }
        for (i, a) in self.scale.iter().enumerate() {
            if !(a.gain.is_finite() && a.offset.is_finite()) || a.gain == 0.0 {
                return Err(Error::Config(format!(
                    "control head map {i} must have finite offset and finite non-zero gain, got {a:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn map(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter().zip(&self.scale).map(|(&r, a)| a.apply(r)).collect()
    }
}
