use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ControlBounds, LossSpec, OptimizerConfig, OptimizerState};
use crate::circuits::{control_gradient, ParamTensor, VqcPolicy};
use crate::error::{ensure_finite, Error, Result};
use crate::plants::{control_jacobian_fd, Plant, CONTROL_FD_STEP};

/// Online receding-horizon settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpcConfig {
    /// Timesteps per episode.
    pub total_steps: usize,
    /// Maximum number of episodes; each restarts from `initial_state` and
    /// keeps the trained parameters.
    #[serde(default = "one")]
    pub horizon: usize,
    /// Predicted stages summed into each update. 1 is the plain online loop.
    #[serde(default = "one")]
    pub lookahead: usize,
    pub u_min: Vec<f64>,
    pub u_max: Vec<f64>,
    pub initial_state: Vec<f64>,
    /// Stop once `‖x − x*‖ < tolerance`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Sample each readout from this many shots instead of using ⟨Z⟩.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    /// Half-width of the uniform initial parameter distribution.
    #[serde(default = "default_init_scale")]
    pub init_scale: f64,
}

fn one() -> usize {
    1
}

fn default_init_scale() -> f64 {
    0.1
}

impl MpcConfig {
    pub fn bounds(&self) -> ControlBounds {
        ControlBounds {
            u_min: self.u_min.clone(),
            u_max: self.u_max.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_steps == 0 {
            return Err(Error::Config("mpc.total_steps must be >= 1".into()));
        }
        if self.horizon == 0 {
            return Err(Error::Config("mpc.horizon must be >= 1".into()));
        }
        if self.lookahead == 0 {
            return Err(Error::Config("mpc.lookahead must be >= 1".into()));
        }
        self.bounds().validate()?;
        if let Some(eps) = self.tolerance {
            if eps.is_nan() || eps <= 0.0 {
                return Err(Error::Config(format!("mpc.tolerance must be > 0, got {eps}")));
            }
        }
        if self.shots == Some(0) {
            return Err(Error::Config("mpc.shots must be >= 1".into()));
        }
        if !(self.init_scale.is_finite() && self.init_scale >= 0.0) {
            return Err(Error::Config(format!(
                "mpc.init_scale must be >= 0, got {}",
                self.init_scale
            )));
        }
        if self.initial_state.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("mpc.initial_state must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    /// State the control was computed from.
    pub state: Vec<f64>,
    pub raw_control: Vec<f64>,
    pub clipped_control: Vec<f64>,
    pub loss: f64,
    pub lr: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryLog {
    pub records: Vec<StepRecord>,
    pub final_state: Vec<f64>,
    /// `None` for the classical baseline.
    pub final_params: Option<ParamTensor>,
    pub converged: bool,
    /// Parameter (or control) updates performed.
    pub updates: usize,
}

impl TrajectoryLog {
    fn empty(x0: &[f64]) -> Self {
        Self {
            records: Vec::new(),
            final_state: x0.to_vec(),
            final_params: None,
            converged: false,
            updates: 0,
        }
    }

    pub fn initial_loss(&self) -> Option<f64> {
        self.records.first().map(|r| r.loss)
    }

    pub fn final_loss(&self) -> Option<f64> {
        self.records.last().map(|r| r.loss)
    }

    /// Records whose clipped control leaves `bounds`.
    pub fn bound_violations(&self, bounds: &ControlBounds) -> usize {
        self.records
            .iter()
            .filter(|r| !bounds.contains(&r.clipped_control))
            .count()
    }
}

/// A run stopped by an error, with everything logged up to that point.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("run aborted after {} steps: {cause}", partial.records.len())]
pub struct RunFailure {
    pub partial: Box<TrajectoryLog>,
    pub cause: Error,
}

impl From<Error> for RunFailure {
    fn from(cause: Error) -> Self {
        Self {
            partial: Box::new(TrajectoryLog::empty(&[])),
            cause,
        }
    }
}

/// `∂J/∂ũ` at an applied control: the plant sensitivity by central
/// differences plus the direct control penalty. Components where the
/// unclipped control lies outside the bounds get zero.
#[allow(clippy::too_many_arguments)]
pub fn control_sensitivity(
    plant: &dyn Plant,
    loss: &LossSpec,
    bounds: &ControlBounds,
    x: &[f64],
    unclipped: &[f64],
    clipped: &[f64],
    x_next: &[f64],
    u_prev: &[f64],
) -> Result<Vec<f64>> {
    let dfdu = control_jacobian_fd(plant, x, clipped, CONTROL_FD_STEP)?;
    let gx = loss.grad_state(x_next);
    let gu = loss.grad_control(clipped, u_prev);
    let pinned = bounds.pinned(unclipped);
    let out: Vec<f64> = (0..clipped.len())
        .map(|i| {
            if pinned[i] {
                0.0
            } else {
                gu[i] + gx.iter().zip(&dfdu).map(|(g, row)| g * row[i]).sum::<f64>()
            }
        })
        .collect();
    ensure_finite(&out, || "control sensitivity".into())?;
    Ok(out)
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|g| g * g).sum::<f64>().sqrt()
}

fn check_consistency(plant: &dyn Plant, loss: &LossSpec, mpc: &MpcConfig, opt: &OptimizerConfig) -> Result<()> {
    mpc.validate()?;
    opt.validate()?;
    loss.validate()?;
    loss.check_dims(plant.state_dim(), plant.control_dim())?;
    if mpc.initial_state.len() != plant.state_dim() {
        return Err(Error::Config(format!(
            "mpc.initial_state has {} entries but {} has {} states",
            mpc.initial_state.len(),
            plant.name(),
            plant.state_dim()
        )));
    }
    if mpc.u_min.len() != plant.control_dim() {
        return Err(Error::Config(format!(
            "mpc bounds have {} entries but {} has {} controls",
            mpc.u_min.len(),
            plant.name(),
            plant.control_dim()
        )));
    }
    Ok(())
}

struct Stage<'a> {
    plant: &'a dyn Plant,
    loss: &'a LossSpec,
    bounds: ControlBounds,
    target: &'a [f64],
    tolerance: Option<f64>,
}

impl Stage<'_> {
    fn converged(&self, x: &[f64]) -> bool {
        self.tolerance.is_some_and(|eps| distance(x, self.target) < eps)
    }
}

/// Online QI-MPC: at every timestep evaluate the circuit on the current
/// state, clip, step the plant, score `x_{k+1}` and take one optimizer step
/// on the circuit parameters.
pub fn run_qimpc(
    plant: &dyn Plant,
    policy: &VqcPolicy,
    loss: &LossSpec,
    mpc: &MpcConfig,
    opt: &OptimizerConfig,
    seed: u64,
) -> std::result::Result<TrajectoryLog, RunFailure> {
    check_consistency(plant, loss, mpc, opt)?;
    policy.validate()?;
    if policy.control_dim() != plant.control_dim() {
        return Err(Error::Config(format!(
            "policy reads {} controls but {} takes {}",
            policy.control_dim(),
            plant.name(),
            plant.control_dim()
        ))
        .into());
    }
    if policy.encoder.feature_wires.len() != plant.state_dim() {
        return Err(Error::Config(format!(
            "encoder has {} feature wires but {} has {} states",
            policy.encoder.feature_wires.len(),
            plant.name(),
            plant.state_dim()
        ))
        .into());
    }

    let stage = Stage {
        plant,
        loss,
        bounds: mpc.bounds(),
        target: &loss.target,
        tolerance: mpc.tolerance,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = ParamTensor::random_uniform(&policy.ansatz, mpc.init_scale, &mut rng);
    let mut state = OptimizerState::new(opt, theta.len());
    let mut log = TrajectoryLog::empty(&mpc.initial_state);
    let m = plant.control_dim();

    let outcome = (|| -> Result<()> {
        for _episode in 0..mpc.horizon {
            let mut x = mpc.initial_state.clone();
            let mut u_prev = vec![0.0; m];
            for _ in 0..mpc.total_steps {
                let sample_seed = rng.random::<u64>();
                let controls = policy.evaluate(&theta, &x, mpc.shots, sample_seed)?;
                let clipped = stage.bounds.clip(&controls.physical);
                let x_next = plant.step(&x, &clipped)?;
                ensure_finite(&x_next, || {
                    format!("{} state at step {}", plant.name(), log.records.len() + 1)
                })?;
                let value = loss.value(&x_next, &clipped, &u_prev, theta.values())?;

                let mut grad = control_gradient(
                    policy,
                    &theta,
                    &x,
                    plant,
                    loss,
                    &stage.bounds,
                    &controls.physical,
                    &clipped,
                    &x_next,
                    &u_prev,
                )?;
                if mpc.lookahead > 1 {
                    let tail = lookahead_gradient(&stage, policy, &theta, &x_next, &clipped, mpc.lookahead - 1)?;
                    for (g, t) in grad.iter_mut().zip(tail) {
                        *g += t;
                    }
                }
                let grad_norm = norm(&grad);
                let lr = state.lr;
                state.step(opt, theta.values_mut(), &grad)?;
                log.updates += 1;

                log.records.push(StepRecord {
                    step: log.records.len(),
                    state: std::mem::replace(&mut x, x_next),
                    raw_control: controls.raw,
                    clipped_control: clipped.clone(),
                    loss: value,
                    lr,
                    grad_norm,
                });
                log.final_state.clone_from(&x);
                u_prev = clipped;
                if stage.converged(&x) {
                    log.converged = true;
                    return Ok(());
                }
            }
        }
        Ok(())
    })();

    log.final_params = Some(theta);
    match outcome {
        Ok(()) => Ok(log),
        Err(cause) => Err(RunFailure {
            partial: Box::new(log),
            cause,
        }),
    }
}

/// Truncated gradient of `stages` further predicted stage costs, each
/// differentiated through its own control only.
fn lookahead_gradient(
    stage: &Stage<'_>,
    policy: &VqcPolicy,
    theta: &ParamTensor,
    x1: &[f64],
    u0: &[f64],
    stages: usize,
) -> Result<Vec<f64>> {
    let mut total = vec![0.0; theta.len()];
    let mut x = x1.to_vec();
    let mut u_prev = u0.to_vec();
    for _ in 0..stages {
        let controls = policy.evaluate(theta, &x, None, 0)?;
        let clipped = stage.bounds.clip(&controls.physical);
        let x_next = stage.plant.step(&x, &clipped)?;
        let g = control_gradient(
            policy,
            theta,
            &x,
            stage.plant,
            stage.loss,
            &stage.bounds,
            &controls.physical,
            &clipped,
            &x_next,
            &u_prev,
        )?;
        for (t, gi) in total.iter_mut().zip(g) {
            *t += gi;
        }
        x = x_next;
        u_prev = clipped;
    }
    Ok(total)
}

/// Same loop with the control vector itself as the decision variable,
/// started at the centre of the bounds.
pub fn run_classical_baseline(
    plant: &dyn Plant,
    loss: &LossSpec,
    mpc: &MpcConfig,
    opt: &OptimizerConfig,
) -> std::result::Result<TrajectoryLog, RunFailure> {
    check_consistency(plant, loss, mpc, opt)?;
    let stage = Stage {
        plant,
        loss,
        bounds: mpc.bounds(),
        target: &loss.target,
        tolerance: mpc.tolerance,
    };
    let m = plant.control_dim();
    let mut u: Vec<f64> = mpc
        .u_min
        .iter()
        .zip(&mpc.u_max)
        .map(|(lo, hi)| 0.5 * (lo + hi))
        .collect();
    let mut state = OptimizerState::new(opt, m);
    let mut log = TrajectoryLog::empty(&mpc.initial_state);

    let outcome = (|| -> Result<()> {
        for _episode in 0..mpc.horizon {
            let mut x = mpc.initial_state.clone();
            let mut u_prev = vec![0.0; m];
            for _ in 0..mpc.total_steps {
                let clipped = stage.bounds.clip(&u);
                let x_next = plant.step(&x, &clipped)?;
                ensure_finite(&x_next, || {
                    format!("{} state at step {}", plant.name(), log.records.len() + 1)
                })?;
                let value = loss.value(&x_next, &clipped, &u_prev, &[])?;
                let grad = control_sensitivity(plant, loss, &stage.bounds, &x, &u, &clipped, &x_next, &u_prev)?;
                let grad_norm = norm(&grad);
                let lr = state.lr;
                let raw = u.clone();
                state.step(opt, &mut u, &grad)?;
                // Projected descent: a pinned component gets no gradient and
                // would otherwise never return inside the bounds.
                u = stage.bounds.clip(&u);
                log.updates += 1;

                log.records.push(StepRecord {
                    step: log.records.len(),
                    state: std::mem::replace(&mut x, x_next),
                    raw_control: raw,
                    clipped_control: clipped.clone(),
                    loss: value,
                    lr,
                    grad_norm,
                });
                log.final_state.clone_from(&x);
                u_prev = clipped;
                if stage.converged(&x) {
                    log.converged = true;
                    return Ok(());
                }
            }
        }
        Ok(())
    })();

    match outcome {
        Ok(()) => Ok(log),
        Err(cause) => Err(RunFailure {
            partial: Box::new(log),
            cause,
        }),
    }
}
