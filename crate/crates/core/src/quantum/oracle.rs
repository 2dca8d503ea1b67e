//! Explicit-matrix reference for small circuits.
//!
//! Builds the full `2^n × 2^n` unitary of a circuit by Kronecker products of
//! per-gate matrices. It shares nothing with the in-place amplitude updates
//! of [`StateVector`](super::StateVector) and exists to cross-check them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use super::gate::{Circuit, GateOp, Mat2, RotConvention};
use crate::error::{Error, Result};

/// Largest register the oracle will expand.
pub const ORACLE_MAX_QUBITS: usize = 6;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    fn from_mat2(m: &Mat2) -> Self {
        Self {
            dim: 2,
            data: vec![m[0][0], m[0][1], m[1][0], m[1][1]],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        let dim = self.dim * other.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        data[(i * other.dim + k) * dim + j * other.dim + l] = a * other.get(k, l);
                    }
                }
            }
        }
        DenseMatrix { dim, data }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        DenseMatrix { dim: n, data }
    }

    fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        DenseMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// First column, i.e. the image of `|0…0⟩`.
    pub fn apply_to_zero(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, 0)).collect()
    }
}

/// Tensor product of per-wire factors, wire 0 leftmost.
fn embed(n_qubits: usize, factors: impl Fn(usize) -> DenseMatrix) -> DenseMatrix {
    (1..n_qubits).fold(factors(0), |acc, w| acc.kron(&factors(w)))
}

fn gate_unitary(n_qubits: usize, op: &GateOp) -> DenseMatrix {
    let id = DenseMatrix::identity(2);
    match *op {
        GateOp::Cnot { control, target } => {
            let c = Complex64::new(1.0, 0.0);
            let z = Complex64::new(0.0, 0.0);
            let p0 = DenseMatrix::from_mat2(&[[c, z], [z, z]]);
            let p1 = DenseMatrix::from_mat2(&[[z, z], [z, c]]);
            let x = DenseMatrix::from_mat2(&[[z, c], [c, z]]);
            // |0⟩⟨0|_c ⊗ I + |1⟩⟨1|_c ⊗ X_t
            let off = embed(n_qubits, |w| if w == control { p0.clone() } else { id.clone() });
            let on = embed(n_qubits, |w| {
                if w == control {
                    p1.clone()
                } else if w == target {
                    x.clone()
                } else {
                    id.clone()
                }
            });
            off.add(&on)
        }
        _ => {
            let wire = op.wires()[0];
            let m = DenseMatrix::from_mat2(&op.matrix().expect("single-qubit gate"));
            embed(n_qubits, |w| if w == wire { m.clone() } else { id.clone() })
        }
    }
}

/// Full unitary of `circuit` as the ordered product of its gate unitaries.
pub fn dense_unitary_oracle(circuit: &Circuit) -> Result<DenseMatrix> {
    let n = circuit.n_qubits();
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::OracleSize {
            max: ORACLE_MAX_QUBITS,
            got: n,
        });
    }
    if n == 0 {
        return Err(Error::Config("oracle needs at least one qubit".into()));
    }
    Ok(circuit.ops().iter().fold(DenseMatrix::identity(1 << n), |acc, op| {
        gate_unitary(n, op).matmul(&acc)
    }))
}

/// Uniformly mixed circuit of `n_gates` gates drawn from every gate kind,
/// angles in `[-2π, 2π)`. CNOTs are skipped on a single qubit.
pub fn random_circuit<R: Rng + ?Sized>(n_qubits: usize, n_gates: usize, rng: &mut R) -> Result<Circuit> {
    let mut circuit = Circuit::new(n_qubits);
    let angle = |rng: &mut R| rng.random_range(-2.0 * PI..2.0 * PI);
    let kinds = if n_qubits > 1 { 6 } else { 5 };
    for _ in 0..n_gates {
        let wire = rng.random_range(0..n_qubits);
        let op = match rng.random_range(0..kinds) {
            0 => GateOp::Rx {
                wire,
                angle: angle(rng),
            },
            1 => GateOp::Ry {
                wire,
                angle: angle(rng),
            },
            2 => GateOp::Rz {
                wire,
                angle: angle(rng),
            },
            3 => GateOp::H { wire },
            4 => GateOp::Rot {
                wire,
                angles: [angle(rng), angle(rng), angle(rng)],
                convention: if rng.random_bool(0.5) {
                    RotConvention::Zyz
                } else {
                    RotConvention::Zyx
                },
            },
            _ => {
                let target = (wire + rng.random_range(1..n_qubits)) % n_qubits;
                GateOp::Cnot { control: wire, target }
            }
        };
        circuit.push(op)?;
    }
    Ok(circuit)
}
