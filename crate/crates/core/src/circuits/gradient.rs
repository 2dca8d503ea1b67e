use super::{Controls, ParamTensor, VqcPolicy};
use crate::control::{control_sensitivity, ControlBounds, LossSpec};
use crate::error::{ensure_finite, Result};
use crate::plants::Plant;

/// Stage cost at the exact circuit output and its gradient in θ.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGradient {
    pub grad: Vec<f64>,
    pub loss: f64,
    pub controls: Controls,
    pub clipped: Vec<f64>,
    pub next_state: Vec<f64>,
}

/// `∇_θ J` for one stage, with `u` evaluated from exact expectations.
pub fn loss_gradient(
    policy: &VqcPolicy,
    theta: &ParamTensor,
    x: &[f64],
    plant: &dyn Plant,
    loss: &LossSpec,
    bounds: &ControlBounds,
    u_prev: &[f64],
) -> Result<LossGradient> {
    let controls = policy.evaluate(theta, x, None, 0)?;
    let clipped = bounds.clip(&controls.physical);
    let next_state = plant.step(x, &clipped)?;
    let value = loss.value(&next_state, &clipped, u_prev, theta.values())?;
    let grad = control_gradient(
        policy,
        theta,
        x,
        plant,
        loss,
        bounds,
        &controls.physical,
        &clipped,
        &next_state,
        u_prev,
    )?;
    Ok(LossGradient {
        grad,
        loss: value,
        controls,
        clipped,
        next_state,
    })
}

/// `∇_θ J` at an already applied control. `physical` is the pre-clip head
/// output; the circuit jacobian always comes from exact expectations.
#[allow(clippy::too_many_arguments)]
pub fn control_gradient(
    policy: &VqcPolicy,
    theta: &ParamTensor,
    x: &[f64],
    plant: &dyn Plant,
    loss: &LossSpec,
    bounds: &ControlBounds,
    physical: &[f64],
    clipped: &[f64],
    x_next: &[f64],
    u_prev: &[f64],
) -> Result<Vec<f64>> {
    let dj_du = control_sensitivity(plant, loss, bounds, x, physical, clipped, x_next, u_prev)?;
    let mut grad = loss.grad_params(theta.values());
    if dj_du.iter().any(|g| *g != 0.0) {
        let jac = policy.jacobian(theta, x)?;
        for (i, (g, affine)) in dj_du.iter().zip(&policy.head.scale).enumerate() {
            let w = g * affine.gain;
            for (out, d) in grad.iter_mut().zip(jac.row(i)) {
                *out += w * d;
            }
        }
    }
    ensure_finite(&grad, || "parameter gradient".into())?;
    Ok(grad)
}
