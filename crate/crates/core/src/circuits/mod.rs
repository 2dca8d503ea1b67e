//! Encoder and ansatz construction, control readout, and gradients with
//! respect to the ansatz parameters.

mod ansatz;
mod encoder;
mod gradient;
mod head;
mod policy;

pub use ansatz::{build_ansatz, AnsatzSpec, Entanglement, ParamTensor};
pub use encoder::{build_encoder, EncoderKind, EncoderSpec};
pub use gradient::{control_gradient, loss_gradient, LossGradient};
pub use head::{Affine, ControlHead};
pub use policy::{evaluate_controls, parameter_shift_jacobian, Controls, Jacobian, VqcPolicy, PARAMETER_SHIFT};
