//! Randomised comparison of analytic gradients against central finite
//! differences.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuits::{
    loss_gradient, AnsatzSpec, ControlHead, EncoderKind, EncoderSpec, Entanglement, ParamTensor, VqcPolicy,
};
use crate::control::{ControlBounds, LossSpec, LossTerms};
use crate::error::{Error, Result};
use crate::plants::{DoublePendulum, Plant, TargetTrack};
use crate::quantum::RotConvention;

pub const JACOBIAN_TOLERANCE: f64 = 1e-6;
pub const LOSS_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckConfig {
    /// Circuits use between 1 and this many qubits.
    pub max_qubits: usize,
    pub layers: usize,
    pub trials: usize,
    pub seed: u64,
    pub fd_step: f64,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        Self {
            max_qubits: 5,
            layers: 2,
            trials: 100,
            seed: 0,
            fd_step: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub n_qubits: usize,
    pub plant: &'static str,
    pub jacobian_rel_error: f64,
    pub loss_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradCheckReport {
    pub trials: Vec<TrialReport>,
    pub max_jacobian_rel_error: f64,
    pub max_loss_rel_error: f64,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_jacobian_rel_error < JACOBIAN_TOLERANCE && self.max_loss_rel_error < LOSS_TOLERANCE
    }
}

/// `‖a − b‖∞ / max(‖b‖∞, 1e-8)`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = b.iter().map(|y| y.abs()).fold(0.0, f64::max);
    diff / scale.max(1e-8)
}

fn random_policy(rng: &mut ChaCha8Rng, n: usize, layers: usize, readouts: Vec<usize>, features: usize) -> VqcPolicy {
    let mut ansatz = AnsatzSpec::new(
        n,
        layers,
        if rng.random_bool(0.5) {
            Entanglement::Ring
        } else {
            Entanglement::Linear
        },
    );
    if rng.random_bool(0.5) {
        ansatz.rot_convention = RotConvention::Zyx;
    }
    let kind = match rng.random_range(0..3) {
        0 => EncoderKind::RotationTriple,
        1 => EncoderKind::HadamardRy,
        _ => EncoderKind::AngleRy,
    };
    VqcPolicy::new(
        EncoderSpec::new(kind, (0..features).collect()),
        ansatz,
        ControlHead::identity(readouts),
    )
}

fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, half_width: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-half_width..half_width)).collect()
}

/// One trial: parameter-shift jacobian and composed stage-loss gradient of
/// a random circuit, each against central differences.
fn trial(cfg: &GradCheckConfig, index: usize, rng: &mut ChaCha8Rng) -> Result<TrialReport> {
    let n = rng.random_range(1..=cfg.max_qubits);
    let h = cfg.fd_step;

    // The double pendulum needs four encoded features and two readouts.
    let use_dp = n >= 4 && rng.random_bool(0.5);
    let (plant, policy, loss): (Box<dyn Plant>, VqcPolicy, LossSpec) = if use_dp {
        let policy = random_policy(rng, n, cfg.layers, vec![0, 1], 4);
        let terms = LossTerms::DoublePendulum {
            lambda_state: rng.random_range(0.0..1.0),
            lambda_u: rng.random_range(0.0..1.0),
            lambda_theta: rng.random_range(0.0..1.0),
        };
        let target = uniform_vec(rng, 4, 1.0);
        (
            Box::new(DoublePendulum::default()),
            policy,
            LossSpec::new(terms, target),
        )
    } else {
        let policy = random_policy(rng, n, cfg.layers, (0..n).collect(), n);
        let terms = LossTerms::QuadraticEffort {
            lambda: rng.random_range(0.0..1.0),
        };
        let target = uniform_vec(rng, n, 1.0);
        let plant = TargetTrack {
            alpha: rng.random_range(0.05..1.0),
            dim: n,
        };
        (Box::new(plant), policy, LossSpec::new(terms, target))
    };
    let m = policy.control_dim();
    let theta_values = uniform_vec(rng, policy.n_params(), PI);
    let theta = ParamTensor::from_values(&policy.ansatz, theta_values)?;
    let x = uniform_vec(rng, plant.state_dim(), 1.0);
    let u_prev = uniform_vec(rng, m, 1.0);
    // |⟨Z⟩| ≤ 1 under an identity head, so these bounds never pin.
    let bounds = ControlBounds::new(vec![-2.0; m], vec![2.0; m])?;

    let jac = policy.jacobian(&theta, &x)?;
    let mut ps = Vec::with_capacity(m * theta.len());
    let mut fd = Vec::with_capacity(m * theta.len());
    let mut loss_fd = Vec::with_capacity(theta.len());
    let composed = |t: &ParamTensor| -> Result<f64> {
        let u = bounds.clip(&policy.raw_expectations(t, &x)?);
        let x_next = plant.step(&x, &u)?;
        loss.value(&x_next, &u, &u_prev, t.values())
    };
    for j in 0..theta.len() {
        let plus = theta.shifted(j, h);
        let minus = theta.shifted(j, -h);
        let ep = policy.raw_expectations(&plus, &x)?;
        let em = policy.raw_expectations(&minus, &x)?;
        for r in 0..m {
            ps.push(jac.get(r, j));
            fd.push((ep[r] - em[r]) / (2.0 * h));
        }
        loss_fd.push((composed(&plus)? - composed(&minus)?) / (2.0 * h));
    }
    let analytic = loss_gradient(&policy, &theta, &x, plant.as_ref(), &loss, &bounds, &u_prev)?;

    Ok(TrialReport {
        trial: index,
        n_qubits: n,
        plant: plant.name(),
        jacobian_rel_error: relative_error(&ps, &fd),
        loss_rel_error: relative_error(&analytic.grad, &loss_fd),
    })
}

pub fn run_grad_check(cfg: &GradCheckConfig) -> Result<GradCheckReport> {
    if cfg.max_qubits == 0 || cfg.max_qubits > crate::quantum::MAX_QUBITS {
        return Err(Error::Config(format!(
            "grad-check qubits must lie in 1..={}, got {}",
            crate::quantum::MAX_QUBITS,
            cfg.max_qubits
        )));
    }
    if cfg.layers == 0 || cfg.trials == 0 {
        return Err(Error::Config(
            "grad-check needs at least one layer and one trial".into(),
        ));
    }
    if !(cfg.fd_step.is_finite() && cfg.fd_step > 0.0) {
        return Err(Error::Config(format!("fd step must be > 0, got {}", cfg.fd_step)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let trials = (0..cfg.trials)
        .map(|i| trial(cfg, i, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let max_jacobian_rel_error = trials.iter().map(|t| t.jacobian_rel_error).fold(0.0, f64::max);
    let max_loss_rel_error = trials.iter().map(|t| t.loss_rel_error).fold(0.0, f64::max);
    Ok(GradCheckReport {
        trials,
        max_jacobian_rel_error,
        max_loss_rel_error,
    })
}
