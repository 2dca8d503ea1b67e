use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::quantum::{Circuit, GateOp};

/// How classical features are written onto the register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderKind {
    /// RY(πx), RX(π(x + ½)), RZ(πx/2) on the feature's wire, in that order.
    RotationTriple,
    /// H on every feature wire, then RY(x) per wire.
    HadamardRy,
    /// RY(x) per wire.
    AngleRy,
}

/// Feature map: feature `i` is written onto wire `feature_wires[i]`. Wires not
/// listed stay in `|0⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncoderSpec {
    pub kind: EncoderKind,
    pub feature_wires: Vec<usize>,
}

impl EncoderSpec {
    pub fn new(kind: EncoderKind, feature_wires: Vec<usize>) -> Self {
        Self { kind, feature_wires }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.feature_wires.len() > n_qubits {
            return Err(Error::Config(format!(
                "encoder maps {} features onto a {n_qubits}-qubit register",
                self.feature_wires.len()
            )));
        }
        for (i, &w) in self.feature_wires.iter().enumerate() {
            if w >= n_qubits {
                return Err(Error::Config(format!(
                    "encoder wire {w} out of range for {n_qubits} qubits"
                )));
            }
            if self.feature_wires[..i].contains(&w) {
                return Err(Error::Config(format!("encoder wire {w} listed twice")));
            }
        }
        Ok(())
    }

    /// Gate sequence writing `x` onto an `n_qubits` register.
    pub fn build(&self, n_qubits: usize, x: &[f64]) -> Result<Circuit> {
        self.validate(n_qubits)?;
        if x.len() != self.feature_wires.len() {
            return Err(Error::Config(format!(
                "encoder expects {} features, got {}",
                self.feature_wires.len(),
                x.len()
            )));
        }
        ensure_finite(x, || "encoder features".into())?;
        let mut circuit = Circuit::new(n_qubits);
        match self.kind {
            EncoderKind::RotationTriple => {
                for (&wire, &xi) in self.feature_wires.iter().zip(x) {
                    circuit.push(GateOp::Ry { wire, angle: PI * xi })?;
                    circuit.push(GateOp::Rx {
                        wire,
                        angle: PI * (xi + 0.5),
                    })?;
                    circuit.push(GateOp::Rz {
                        wire,
                        angle: PI * xi / 2.0,
                    })?;
                }
            }
            EncoderKind::HadamardRy => {
                for &wire in &self.feature_wires {
                    circuit.push(GateOp::H { wire })?;
                }
                for (&wire, &xi) in self.feature_wires.iter().zip(x) {
                    circuit.push(GateOp::Ry { wire, angle: xi })?;
                }
            }
            EncoderKind::AngleRy => {
                for (&wire, &xi) in self.feature_wires.iter().zip(x) {
                    circuit.push(GateOp::Ry { wire, angle: xi })?;
                }
            }
        }
        Ok(circuit)
    }
}

pub fn build_encoder(spec: &EncoderSpec, n_qubits: usize, x: &[f64]) -> Result<Circuit> {
    spec.build(n_qubits, x)
}
