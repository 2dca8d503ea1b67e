use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{Circuit, GateOp, RotConvention};

/// Entangling pattern applied after each rotation layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entanglement {
    /// CNOT(i, i+1) for consecutive wires.
    Linear,
    /// `Linear` plus CNOT(n−1, 0).
    Ring,
}

impl Entanglement {
    pub fn pairs(self, n_qubits: usize) -> Vec<(usize, usize)> {
        let mut pairs: Vec<_> = (0..n_qubits.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if self == Entanglement::Ring && n_qubits > 1 {
            pairs.push((n_qubits - 1, 0));
        }
        pairs
    }
}

/// Layered hardware-efficient ansatz: per layer a `Rot` on every wire, then
/// the entangling CNOTs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub entanglement: Entanglement,
    #[serde(default)]
    pub rot_convention: RotConvention,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, n_layers: usize, entanglement: Entanglement) -> Self {
        Self {
            n_qubits,
            n_layers,
            entanglement,
            rot_convention: RotConvention::Zyz,
        }
    }

    pub fn n_params(&self) -> usize {
        self.n_layers * self.n_qubits * 3
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=crate::quantum::MAX_QUBITS).contains(&self.n_qubits) {
            return Err(Error::Config(format!(
                "ansatz qubit count {} outside 1..={}",
                self.n_qubits,
                crate::quantum::MAX_QUBITS
            )));
        }
        if self.n_layers == 0 {
            return Err(Error::Config("ansatz needs at least one layer".into()));
        }
        Ok(())
    }

    pub fn build(&self, params: &ParamTensor) -> Result<Circuit> {
        self.validate()?;
        params.check_shape(self)?;
        let mut circuit = Circuit::new(self.n_qubits);
        for layer in 0..self.n_layers {
            for wire in 0..self.n_qubits {
                circuit.push(GateOp::Rot {
                    wire,
                    angles: params.angles(layer, wire),
                    convention: self.rot_convention,
                })?;
            }
            for (control, target) in self.entanglement.pairs(self.n_qubits) {
                circuit.push(GateOp::Cnot { control, target })?;
            }
        }
        Ok(circuit)
    }
}

pub fn build_ansatz(spec: &AnsatzSpec, params: &ParamTensor) -> Result<Circuit> {
    spec.build(params)
}

/// Trainable angles, shape `(n_layers, n_qubits, 3)`, radians, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamTensor {
    n_layers: usize,
    n_qubits: usize,
    values: Vec<f64>,
}

impl ParamTensor {
    pub fn zeros(spec: &AnsatzSpec) -> Self {
        Self {
            n_layers: spec.n_layers,
            n_qubits: spec.n_qubits,
            values: vec![0.0; spec.n_params()],
        }
    }

    pub fn from_values(spec: &AnsatzSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.n_params() {
            return Err(Error::Config(format!(
                "ansatz has {} parameters, got {}",
                spec.n_params(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical {
                context: "ansatz parameters".into(),
            });
        }
        Ok(Self {
            n_layers: spec.n_layers,
            n_qubits: spec.n_qubits,
            values,
        })
    }

    /// Independent draws from U(−scale, scale).
    pub fn random_uniform<R: Rng + ?Sized>(spec: &AnsatzSpec, scale: f64, rng: &mut R) -> Self {
        let values = (0..spec.n_params())
            .map(|_| {
                if scale > 0.0 {
                    rng.random_range(-scale..scale)
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            n_layers: spec.n_layers,
            n_qubits: spec.n_qubits,
            values,
        }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n_layers, self.n_qubits, 3)
    }

    pub fn index(&self, layer: usize, qubit: usize, axis: usize) -> usize {
        (layer * self.n_qubits + qubit) * 3 + axis
    }

    pub fn get(&self, layer: usize, qubit: usize, axis: usize) -> f64 {
        self.values[self.index(layer, qubit, axis)]
    }

    pub fn angles(&self, layer: usize, qubit: usize) -> [f64; 3] {
        let i = self.index(layer, qubit, 0);
        [self.values[i], self.values[i + 1], self.values[i + 2]]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Copy with entry `index` moved by `delta`.
    pub fn shifted(&self, index: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.values[index] += delta;
        out
    }

    pub fn check_shape(&self, spec: &AnsatzSpec) -> Result<()> {
        if self.n_layers != spec.n_layers || self.n_qubits != spec.n_qubits || self.values.len() != spec.n_params() {
            return Err(Error::Config(format!(
                "parameter shape {:?} does not match ansatz ({}, {}, 3)",
                self.shape(),
                spec.n_layers,
                spec.n_qubits
            )));
        }
        Ok(())
    }
}
