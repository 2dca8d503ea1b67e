use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AnsatzSpec, ControlHead, EncoderSpec, ParamTensor};
use crate::error::{Error, Result};
use crate::quantum::{rot, GateOp, StateVector};

/// Shift used by the two-term parameter-shift rule for Pauli rotations.
pub const PARAMETER_SHIFT: f64 = FRAC_PI_2;

/// Raw ⟨Z⟩ readouts and the corresponding physical (pre-clip) controls.
#[derive(Debug, Clone, PartialEq)]
pub struct Controls {
    pub raw: Vec<f64>,
    pub physical: Vec<f64>,
}

/// Dense `rows × cols` jacobian, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Jacobian {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }
}

/// Encoder, ansatz and readout head bundled into a state-feedback policy
/// `x ↦ u(θ, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqcPolicy {
    pub encoder: EncoderSpec,
    pub ansatz: AnsatzSpec,
    pub head: ControlHead,
}

impl VqcPolicy {
    pub fn new(encoder: EncoderSpec, ansatz: AnsatzSpec, head: ControlHead) -> Self {
        Self { encoder, ansatz, head }
    }

    pub fn validate(&self) -> Result<()> {
        self.ansatz.validate()?;
        self.encoder.validate(self.ansatz.n_qubits)?;
        self.head.validate(self.ansatz.n_qubits)
    }

    pub fn n_qubits(&self) -> usize {
        self.ansatz.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.ansatz.n_params()
    }

    pub fn control_dim(&self) -> usize {
        self.head.dim()
    }

    fn encoded_state(&self, x: &[f64]) -> Result<StateVector> {
        let encoder = self.encoder.build(self.n_qubits(), x)?;
        let mut state = StateVector::zero(self.n_qubits())?;
        state.apply_circuit(&encoder)?;
        Ok(state)
    }

    fn final_state(&self, theta: &ParamTensor, x: &[f64]) -> Result<StateVector> {
        let ansatz = self.ansatz.build(theta)?;
        let mut state = self.encoded_state(x)?;
        state.apply_circuit(&ansatz)?;
        Ok(state)
    }

    /// Exact ⟨Z⟩ on each readout wire.
    pub fn raw_expectations(&self, theta: &ParamTensor, x: &[f64]) -> Result<Vec<f64>> {
        let state = self.final_state(theta, x)?;
        self.head
            .readout_wires
            .iter()
            .map(|&w| state.expectation_z(w))
            .collect()
    }

    /// Readouts and physical controls. With `shots`, each readout is the mean
    /// of that many sampled ±1 outcomes; readout `i` draws from a stream
    /// derived from `(seed, i)`.
    pub fn evaluate(&self, theta: &ParamTensor, x: &[f64], shots: Option<u64>, seed: u64) -> Result<Controls> {
        let state = self.final_state(theta, x)?;
        let raw = self
            .head
            .readout_wires
            .iter()
            .enumerate()
            .map(|(i, &w)| match shots {
                None => state.expectation_z(w),
                Some(shots) => state.sample_expectation_z(w, shots, readout_seed(seed, i)),
            })
            .collect::<Result<Vec<_>>>()?;
        let physical = self.head.map(&raw);
        Ok(Controls { raw, physical })
    }

    /// ∂raw_i/∂θ_j by the parameter-shift rule.
    pub fn jacobian(&self, theta: &ParamTensor, x: &[f64]) -> Result<Jacobian> {
        self.jacobian_impl(theta, x, true)
    }

    /// Same as [`jacobian`](Self::jacobian) without the thread pool.
    pub fn jacobian_sequential(&self, theta: &ParamTensor, x: &[f64]) -> Result<Jacobian> {
        self.jacobian_impl(theta, x, false)
    }

    fn jacobian_impl(&self, theta: &ParamTensor, x: &[f64], parallel: bool) -> Result<Jacobian> {
        let circuit = self.ansatz.build(theta)?;
        let ops = circuit.ops();
        let readouts = &self.head.readout_wires;

        // Rot gates appear in parameter order, three parameters each.
        let mut rot_ops = Vec::with_capacity(theta.len() / 3);
        let mut prefixes = Vec::with_capacity(theta.len() / 3);
        let mut state = self.encoded_state(x)?;
        for (idx, op) in ops.iter().enumerate() {
            if matches!(op, GateOp::Rot { .. }) {
                rot_ops.push(idx);
                prefixes.push(state.clone());
            }
            state.apply(op)?;
        }
        let cones: Vec<Vec<bool>> = readouts.iter().map(|&w| backward_light_cone(ops, w)).collect();

        let column = |j: usize| -> Result<Vec<f64>> {
            let k = j / 3;
            let op_idx = rot_ops[k];
            let rows: Vec<usize> = (0..readouts.len()).filter(|&r| cones[r][op_idx]).collect();
            let mut col = vec![0.0; readouts.len()];
            if rows.is_empty() {
                return Ok(col);
            }
            let GateOp::Rot {
                wire,
                angles,
                convention,
            } = ops[op_idx]
            else {
                unreachable!("rot_ops only indexes Rot gates")
            };
            let shifted_readout = |delta: f64| -> Result<Vec<f64>> {
                let mut a = angles;
                a[j % 3] += delta;
                let mut s = prefixes[k].clone();
                s.apply_single_qubit(wire, &rot(a, convention))?;
                for op in &ops[op_idx + 1..] {
                    s.apply(op)?;
                }
                rows.iter().map(|&r| s.expectation_z(readouts[r])).collect()
            };
            let plus = shifted_readout(PARAMETER_SHIFT)?;
            let minus = shifted_readout(-PARAMETER_SHIFT)?;
            for (i, &r) in rows.iter().enumerate() {
                col[r] = (plus[i] - minus[i]) / 2.0;
            }
            Ok(col)
        };

        let columns: Vec<Vec<f64>> = if parallel {
            (0..theta.len()).into_par_iter().map(column).collect::<Result<_>>()?
        } else {
            (0..theta.len()).map(column).collect::<Result<_>>()?
        };

        let mut jac = Jacobian::zeros(readouts.len(), theta.len());
        for (j, col) in columns.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                jac.set(r, j, *v);
            }
        }
        Ok(jac)
    }
}

fn readout_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// `cone[p]` is true when gate `p` can influence ⟨Z⟩ on `wire`, i.e. when
/// some chain of later two-qubit gates connects its wire to the readout.
fn backward_light_cone(ops: &[GateOp], wire: usize) -> Vec<bool> {
    let mut reach = vec![wire];
    let mut cone = vec![false; ops.len()];
    for (p, op) in ops.iter().enumerate().rev() {
        let wires = op.wires();
        if wires.iter().any(|w| reach.contains(w)) {
            cone[p] = true;
            for w in wires {
                if !reach.contains(&w) {
                    reach.push(w);
                }
            }
        }
    }
    cone
}

pub fn evaluate_controls(
    policy: &VqcPolicy,
    theta: &ParamTensor,
    x: &[f64],
    shots: Option<u64>,
    seed: u64,
) -> Result<Controls> {
    policy.evaluate(theta, x, shots, seed)
}

/// Parameter-shift jacobian. Only defined on exact expectations.
pub fn parameter_shift_jacobian(
    policy: &VqcPolicy,
    theta: &ParamTensor,
    x: &[f64],
    shots: Option<u64>,
) -> Result<Jacobian> {
    if let Some(shots) = shots {
        return Err(Error::UnsupportedMode(format!(
            "parameter-shift jacobian requires exact expectations, got shots = {shots}"
        )));
    }
    policy.jacobian(theta, x)
}
