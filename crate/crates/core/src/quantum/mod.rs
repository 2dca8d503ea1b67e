//! Dense statevector simulation of small registers.
//!
//! Basis index bit ordering: qubit 0 is the most significant bit, so on a
//! 3-qubit register `|100⟩` has index 4 and corresponds to qubit 0 in `|1⟩`.

mod gate;
pub mod oracle;

pub use gate::{hadamard, matmul2, rot, rx, ry, rz, Circuit, GateOp, Mat2, RotConvention};
pub use oracle::{dense_unitary_oracle, random_circuit, DenseMatrix};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 12;

/// Pure state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// `|0…0⟩` on `n_qubits` wires.
pub fn new_zero_state(n_qubits: usize) -> Result<StateVector> {
    StateVector::zero(n_qubits)
}

/// Returns `op` applied to a copy of `state`.
pub fn apply_gate(state: &StateVector, op: &GateOp) -> Result<StateVector> {
    let mut next = state.clone();
    next.apply(op)?;
    Ok(next)
}

pub fn expectation_z(state: &StateVector, wire: usize) -> Result<f64> {
    state.expectation_z(wire)
}

pub fn sample_expectation_z(state: &StateVector, wire: usize, shots: u64, rng_seed: u64) -> Result<f64> {
    state.sample_expectation_z(wire, shots, rng_seed)
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::Config(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps raw amplitudes. The length must be a power of two and the vector
    /// must be normalised to within 1e-10.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() || len > 1 << MAX_QUBITS {
            return Err(Error::Config(format!(
                "amplitude count {len} is not 2^n for n in 1..={MAX_QUBITS}"
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Precondition(format!("amplitudes have norm {norm}, expected 1")));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn mask(&self, wire: usize) -> usize {
        1 << (self.n_qubits - 1 - wire)
    }

    fn check_wire(&self, wire: usize) -> Result<()> {
        if wire >= self.n_qubits {
            return Err(Error::Precondition(format!(
                "wire {wire} out of range for {}-qubit register",
                self.n_qubits
            )));
        }
        Ok(())
    }

    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.n_qubits)?;
        match *op {
            GateOp::Cnot { control, target } => self.apply_cnot_unchecked(control, target),
            _ => {
                let wire = op.wires()[0];
                // matrix() is Some for every single-qubit variant
                let m = op.matrix().expect("single-qubit gate");
                self.apply_matrix_unchecked(wire, &m);
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::Precondition(format!(
                "{}-qubit circuit applied to {}-qubit state",
                circuit.n_qubits(),
                self.n_qubits
            )));
        }
        // ops were validated on push
        for op in circuit.ops() {
            match *op {
                GateOp::Cnot { control, target } => self.apply_cnot_unchecked(control, target),
                _ => self.apply_matrix_unchecked(op.wires()[0], &op.matrix().expect("single-qubit gate")),
            }
        }
        Ok(())
    }

    /// Applies an arbitrary 2×2 matrix to `wire`. The caller guarantees it is
    /// unitary.
    pub fn apply_single_qubit(&mut self, wire: usize, m: &Mat2) -> Result<()> {
        self.check_wire(wire)?;
        self.apply_matrix_unchecked(wire, m);
        Ok(())
    }

    fn apply_matrix_unchecked(&mut self, wire: usize, m: &Mat2) {
        let mask = self.mask(wire);
        let dim = self.amplitudes.len();
        for block in (0..dim).step_by(2 * mask) {
            for i in block..block + mask {
                let j = i | mask;
                let a = self.amplitudes[i];
                let b = self.amplitudes[j];
                self.amplitudes[i] = m[0][0] * a + m[0][1] * b;
                self.amplitudes[j] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    fn apply_cnot_unchecked(&mut self, control: usize, target: usize) {
        let cmask = self.mask(control);
        let tmask = self.mask(target);
        for i in 0..self.amplitudes.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amplitudes.swap(i, i | tmask);
            }
        }
    }

    /// Probability that a computational-basis measurement of `wire` yields 1.
    pub fn probability_one(&self, wire: usize) -> Result<f64> {
        self.check_wire(wire)?;
        let mask = self.mask(wire);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(b, _)| b & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Exact ⟨Z⟩ on `wire`.
    pub fn expectation_z(&self, wire: usize) -> Result<f64> {
        self.check_wire(wire)?;
        let mask = self.mask(wire);
        let z: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(b, a)| if b & mask == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum();
        Ok(z.clamp(-1.0, 1.0))
    }

    /// Mean of `shots` simulated ±1 readouts of Z on `wire`.
    ///
    /// The number of `+1` outcomes is drawn from a binomial with success
    /// probability `(1 + ⟨Z⟩) / 2`, which is exactly the distribution of
    /// `shots` independent projective measurements.
    pub fn sample_expectation_z(&self, wire: usize, shots: u64, rng_seed: u64) -> Result<f64> {
        if shots == 0 {
            return Err(Error::Precondition("shots must be at least 1".into()));
        }
        let z = self.expectation_z(wire)?;
        let p_plus = ((1.0 + z) / 2.0).clamp(0.0, 1.0);
        let dist = Binomial::new(shots, p_plus)
            .map_err(|e| Error::Precondition(format!("binomial({shots}, {p_plus}): {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let plus = dist.sample(&mut rng);
        Ok((2.0 * plus as f64 - shots as f64) / shots as f64)
    }
}
