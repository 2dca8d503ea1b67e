//! Model predictive control driven by a simulated variational quantum circuit.
//!
//! The crate is split the same way the control loop is:
//!
//! - [`quantum`]: dense statevector simulation, Pauli-Z readout, shot sampling.
//! - [`circuits`]: state encoders, the layered Rot/CNOT ansatz, the affine
//!   control head, parameter-shift jacobians and loss gradients.
//! - [`plants`]: the five Euler-discretised benchmark systems.
//! - [`control`]: clipping, stage losses, SGD with momentum, the Hoeffding
//!   shot bound and the online receding-horizon loop.
//!
//! Qubit 0 is the most significant bit of a basis index everywhere.

pub mod circuits;
pub mod control;
pub mod error;
pub mod gradcheck;
pub mod plants;
pub mod quantum;

pub use error::{Error, Result};
