use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2×2 complex matrix in row-major order.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Axis order of the composite `Rot` gate. Angles are applied left to right
/// in time: `Zyz` applies RZ(φ1), then RY(φ2), then RZ(φ3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotConvention {
    #[default]
    Zyz,
    /// RZ(φ1), then RY(φ2), then RX(φ3).
    Zyx,
}

/// A single gate application on a register.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp {
    Rx {
        wire: usize,
        angle: f64,
    },
    Ry {
        wire: usize,
        angle: f64,
    },
    Rz {
        wire: usize,
        angle: f64,
    },
    Rot {
        wire: usize,
        angles: [f64; 3],
        convention: RotConvention,
    },
    H {
        wire: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

pub fn rx(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let mis = Complex64::new(0.0, -s);
    [[c.into(), mis], [mis, c.into()]]
}

pub fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[c.into(), (-s).into()], [s.into(), c.into()]]
}

pub fn rz(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[Complex64::new(c, -s), ZERO], [ZERO, Complex64::new(c, s)]]
}

pub fn hadamard() -> Mat2 {
    let h = Complex64::from(FRAC_1_SQRT_2);
    [[h, h], [h, -h]]
}

/// Matrix product `a · b`.
pub fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Unitary of the composite rotation, with `angles[0]` acting first.
pub fn rot(angles: [f64; 3], convention: RotConvention) -> Mat2 {
    let last = match convention {
        RotConvention::Zyz => rz(angles[2]),
        RotConvention::Zyx => rx(angles[2]),
    };
    matmul2(&last, &matmul2(&ry(angles[1]), &rz(angles[0])))
}

impl GateOp {
    /// Wires touched by this gate; for CNOT the order is (control, target).
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            GateOp::Rx { wire, .. }
            | GateOp::Ry { wire, .. }
            | GateOp::Rz { wire, .. }
            | GateOp::Rot { wire, .. }
            | GateOp::H { wire } => vec![wire],
            GateOp::Cnot { control, target } => vec![control, target],
        }
    }

    /// The 2×2 unitary for single-qubit gates, `None` for CNOT.
    pub fn matrix(&self) -> Option<Mat2> {
        match *self {
            GateOp::Rx { angle, .. } => Some(rx(angle)),
            GateOp::Ry { angle, .. } => Some(ry(angle)),
            GateOp::Rz { angle, .. } => Some(rz(angle)),
            GateOp::Rot { angles, convention, .. } => Some(rot(angles, convention)),
            GateOp::H { .. } => Some(hadamard()),
            GateOp::Cnot { .. } => None,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let wires = self.wires();
        if let Some(&w) = wires.iter().find(|&&w| w >= n_qubits) {
            return Err(Error::Precondition(format!(
                "wire {w} out of range for {n_qubits}-qubit register in {self:?}"
            )));
        }
        if let GateOp::Cnot { control, target } = *self {
            if control == target {
                return Err(Error::Precondition(format!(
                    "CNOT control and target coincide on wire {control}"
                )));
            }
        }
        let finite = match *self {
            GateOp::Rx { angle, .. } | GateOp::Ry { angle, .. } | GateOp::Rz { angle, .. } => angle.is_finite(),
            GateOp::Rot { angles, .. } => angles.iter().all(|a| a.is_finite()),
            GateOp::H { .. } | GateOp::Cnot { .. } => true,
        };
        if !finite {
            return Err(Error::Numerical {
                context: format!("gate angle of {self:?}"),
            });
        }
        Ok(())
    }
}

/// Ordered list of gates on a fixed-size register.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn from_ops(n_qubits: usize, ops: Vec<GateOp>) -> Result<Self> {
        let mut circuit = Self::new(n_qubits);
        for op in ops {
            circuit.push(op)?;
        }
        Ok(circuit)
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.n_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    /// Appends every gate of `other`, which must act on the same register size.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::Config(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.n_qubits, self.n_qubits
            )));
        }
        self.ops.extend_from_slice(&other.ops);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn rotations_are_unitary() {
        for m in [
            rx(0.7),
            ry(-1.3),
            rz(2.9),
            hadamard(),
            rot([0.1, 0.2, 0.3], RotConvention::Zyx),
        ] {
            let dagger = [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]];
            let id = [[Complex64::from(1.0), ZERO], [ZERO, Complex64::from(1.0)]];
            assert!(close(&matmul2(&m, &dagger), &id, 1e-14));
        }
    }

    #[test]
    fn rot_zyz_is_time_ordered_product() {
        let (a, b, c) = (0.4, -1.1, 2.2);
        let expected = matmul2(&rz(c), &matmul2(&ry(b), &rz(a)));
        assert!(close(&rot([a, b, c], RotConvention::Zyz), &expected, 1e-15));
        let expected = matmul2(&rx(c), &matmul2(&ry(b), &rz(a)));
        assert!(close(&rot([a, b, c], RotConvention::Zyx), &expected, 1e-15));
    }

    #[test]
    fn cnot_with_equal_wires_is_rejected() {
        let err = GateOp::Cnot { control: 1, target: 1 }.validate(3).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn out_of_range_wire_is_rejected() {
        let mut c = Circuit::new(2);
        assert!(c.push(GateOp::H { wire: 2 }).is_err());
        assert!(c.push(GateOp::Cnot { control: 0, target: 5 }).is_err());
        assert!(c.is_empty());
    }
}
