use serde::{Deserialize, Serialize};

use crate::circuits::ParamTensor;
use crate::error::{ensure_finite, Error, Result};

/// Penalty weights of a stage cost. Tracking is always measured against
/// [`LossSpec::target`]; the vehicle cost tracks only lateral offset and
/// heading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LossTerms {
    /// `‖x′ − x*‖²`
    MseToTarget,
    /// `‖x′ − x*‖² + λ‖ũ‖²`
    QuadraticEffort { lambda: f64 },
    /// `‖x′ − x*‖² + λ_u‖u‖² + λ_du‖u − u_prev‖²`
    Building { lambda_u: f64, lambda_du: f64 },
    /// `(y′ − y*)² + (ϑ′ − ϑ*)² + Σ λ_ui u_i² + Σ λ_dui Δu_i²`
    Vehicle {
        lambda_u1: f64,
        lambda_u2: f64,
        lambda_du1: f64,
        lambda_du2: f64,
    },
    /// `λ_state‖x′ − x*‖² + λ_u‖u‖² + λ_theta‖θ‖²`
    DoublePendulum {
        lambda_state: f64,
        lambda_u: f64,
        lambda_theta: f64,
    },
}

/// Stage cost and its target state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossSpec {
    pub terms: LossTerms,
    pub target: Vec<f64>,
}

const VEHICLE_TRACKED: [usize; 2] = [2, 3];

impl LossSpec {
    pub fn new(terms: LossTerms, target: Vec<f64>) -> Self {
        Self { terms, target }
    }

    pub fn mse(target: Vec<f64>) -> Self {
        Self::new(LossTerms::MseToTarget, target)
    }

    fn weights(&self) -> Vec<(&'static str, f64)> {
        match self.terms {
            LossTerms::MseToTarget => vec![],
            LossTerms::QuadraticEffort { lambda } => vec![("lambda", lambda)],
            LossTerms::Building { lambda_u, lambda_du } => {
                vec![("lambda_u", lambda_u), ("lambda_du", lambda_du)]
            }
            LossTerms::Vehicle {
                lambda_u1,
                lambda_u2,
                lambda_du1,
                lambda_du2,
            } => vec![
                ("lambda_u1", lambda_u1),
                ("lambda_u2", lambda_u2),
                ("lambda_du1", lambda_du1),
                ("lambda_du2", lambda_du2),
            ],
            LossTerms::DoublePendulum {
                lambda_state,
                lambda_u,
                lambda_theta,
            } => vec![
                ("lambda_state", lambda_state),
                ("lambda_u", lambda_u),
                ("lambda_theta", lambda_theta),
            ],
        }
    }

    /// Weights in `[0, 1]`, finite target.
    pub fn validate(&self) -> Result<()> {
        for (name, w) in self.weights() {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::Config(format!("loss.terms.{name} must lie in [0, 1], got {w}")));
            }
        }
        if self.target.is_empty() || self.target.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("loss.target must be a non-empty finite vector".into()));
        }
        Ok(())
    }

    /// Checks target and weights against a plant's state and control dimensions.
    pub fn check_dims(&self, state_dim: usize, control_dim: usize) -> Result<()> {
        if self.target.len() != state_dim {
            return Err(Error::Config(format!(
                "loss.target has {} entries but the plant state has {state_dim}",
                self.target.len()
            )));
        }
        if matches!(self.terms, LossTerms::Vehicle { .. }) && (state_dim != 4 || control_dim != 2) {
            return Err(Error::Config(format!(
                "vehicle loss needs a 4-state, 2-control plant, got {state_dim} and {control_dim}"
            )));
        }
        Ok(())
    }

    fn check_inputs(&self, x_next: &[f64], u: &[f64], u_prev: &[f64]) -> Result<()> {
        if x_next.len() != self.target.len() {
            return Err(Error::Config(format!(
                "loss expects a {}-dimensional state, got {}",
                self.target.len(),
                x_next.len()
            )));
        }
        if u.len() != u_prev.len() {
            return Err(Error::Config(format!(
                "control has {} entries but previous control has {}",
                u.len(),
                u_prev.len()
            )));
        }
        if matches!(self.terms, LossTerms::Vehicle { .. }) && (x_next.len() != 4 || u.len() != 2) {
            return Err(Error::Config("vehicle loss needs a 4-state, 2-control plant".into()));
        }
        Ok(())
    }

    /// Weight on `‖x′ − x*‖²`, per state component.
    fn state_weights(&self) -> Vec<f64> {
        let n = self.target.len();
        match self.terms {
            LossTerms::Vehicle { .. } => (0..n)
                .map(|i| if VEHICLE_TRACKED.contains(&i) { 1.0 } else { 0.0 })
                .collect(),
            LossTerms::DoublePendulum { lambda_state, .. } => vec![lambda_state; n],
            _ => vec![1.0; n],
        }
    }

    /// Weights on `u_i²` and `(u_i − u_prev_i)²`.
    fn control_weights(&self, m: usize) -> (Vec<f64>, Vec<f64>) {
        match self.terms {
            LossTerms::MseToTarget => (vec![0.0; m], vec![0.0; m]),
            LossTerms::QuadraticEffort { lambda } => (vec![lambda; m], vec![0.0; m]),
            LossTerms::Building { lambda_u, lambda_du } => (vec![lambda_u; m], vec![lambda_du; m]),
            LossTerms::Vehicle {
                lambda_u1,
                lambda_u2,
                lambda_du1,
                lambda_du2,
            } => (vec![lambda_u1, lambda_u2], vec![lambda_du1, lambda_du2]),
            LossTerms::DoublePendulum { lambda_u, .. } => (vec![lambda_u; m], vec![0.0; m]),
        }
    }

    /// Weight on `‖θ‖²`.
    pub fn param_weight(&self) -> f64 {
        match self.terms {
            LossTerms::DoublePendulum { lambda_theta, .. } => lambda_theta,
            _ => 0.0,
        }
    }

    pub fn value(&self, x_next: &[f64], u: &[f64], u_prev: &[f64], theta: &[f64]) -> Result<f64> {
        self.check_inputs(x_next, u, u_prev)?;
        let tracking: f64 = self
            .state_weights()
            .iter()
            .zip(x_next.iter().zip(&self.target))
            .map(|(w, (x, t))| w * (x - t) * (x - t))
            .sum();
        let (wu, wdu) = self.control_weights(u.len());
        let effort: f64 = (0..u.len())
            .map(|i| wu[i] * u[i] * u[i] + wdu[i] * (u[i] - u_prev[i]).powi(2))
            .sum();
        let reg = self.param_weight() * theta.iter().map(|t| t * t).sum::<f64>();
        let value = tracking + effort + reg;
        ensure_finite(&[value], || "stage loss".into())?;
        Ok(value)
    }

    /// `∂J/∂x′`.
    pub fn grad_state(&self, x_next: &[f64]) -> Vec<f64> {
        self.state_weights()
            .iter()
            .zip(x_next.iter().zip(&self.target))
            .map(|(w, (x, t))| 2.0 * w * (x - t))
            .collect()
    }

    /// Direct `∂J/∂u` with `u_prev` held fixed.
    pub fn grad_control(&self, u: &[f64], u_prev: &[f64]) -> Vec<f64> {
        let (wu, wdu) = self.control_weights(u.len());
        (0..u.len())
            .map(|i| 2.0 * wu[i] * u[i] + 2.0 * wdu[i] * (u[i] - u_prev[i]))
            .collect()
    }

    /// Direct `∂J/∂θ` from the parameter regulariser.
    pub fn grad_params(&self, theta: &[f64]) -> Vec<f64> {
        let w = self.param_weight();
        theta.iter().map(|t| 2.0 * w * t).collect()
    }
}

pub fn stage_loss(spec: &LossSpec, x_next: &[f64], u: &[f64], u_prev: &[f64], theta: &ParamTensor) -> Result<f64> {
    spec.value(x_next, u, u_prev, theta.values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_kinds() -> Vec<LossTerms> {
        vec![
            LossTerms::MseToTarget,
            LossTerms::QuadraticEffort { lambda: 0.3 },
            LossTerms::Building {
                lambda_u: 0.01,
                lambda_du: 0.005,
            },
            LossTerms::Vehicle {
                lambda_u1: 0.1,
                lambda_u2: 0.1,
                lambda_du1: 0.01,
                lambda_du2: 0.01,
            },
            LossTerms::DoublePendulum {
                lambda_state: 1.0,
                lambda_u: 0.1,
                lambda_theta: 0.01,
            },
        ]
    }

    #[test]
    fn zero_at_target_for_every_kind() {
        let target = vec![0.5, -1.0, 0.25, 2.0];
        for terms in all_kinds() {
            let spec = LossSpec::new(terms, target.clone());
            let v = spec.value(&target, &[0.0, 0.0], &[0.0, 0.0], &[0.0; 6]).unwrap();
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn mse_by_hand() {
        let spec = LossSpec::mse(vec![0.0; 3]);
        assert_eq!(spec.value(&[1.0, 2.0, 2.0], &[5.0], &[1.0], &[3.0]).unwrap(), 9.0);
    }

    #[test]
    fn building_substitution() {
        let spec = LossSpec::new(
            LossTerms::Building {
                lambda_u: 0.01,
                lambda_du: 0.005,
            },
            vec![22.0],
        );
        let v = spec.value(&[21.0], &[2.0], &[0.0], &[]).unwrap();
        assert!((v - 1.06).abs() < 1e-12);
    }

    #[test]
    fn vehicle_ignores_position_and_speed() {
        let spec = LossSpec::new(all_kinds()[3].clone(), vec![0.0; 4]);
        let v = spec
            .value(&[100.0, 12.0, 0.5, -0.5], &[0.0, 0.0], &[0.0, 0.0], &[])
            .unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn regulariser_only_for_double_pendulum() {
        let spec = LossSpec::new(all_kinds()[4].clone(), vec![0.0; 4]);
        let theta = [1.0, 2.0];
        assert!((spec.value(&[0.0; 4], &[0.0; 2], &[0.0; 2], &theta).unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(spec.grad_params(&theta), vec![0.02, 0.04]);
        assert_eq!(LossSpec::mse(vec![0.0; 4]).grad_params(&theta), vec![0.0, 0.0]);
    }

    #[test]
    fn weights_outside_unit_interval_rejected() {
        let spec = LossSpec::new(LossTerms::QuadraticEffort { lambda: 1.5 }, vec![0.0]);
        let err = spec.validate().unwrap_err();
        assert!(err.to_string().contains("lambda"));
    }

    #[test]
    fn dimension_mismatch_is_config_error() {
        let spec = LossSpec::mse(vec![0.0; 3]);
        assert!(matches!(
            spec.value(&[0.0; 2], &[0.0], &[0.0], &[]),
            Err(Error::Config(_))
        ));
        assert!(spec.check_dims(2, 1).is_err());
    }

    #[test]
    fn gradients_match_finite_differences() {
        let h = 1e-6;
        let x = [0.3, -0.2, 0.7, 0.1];
        let u = [0.4, -0.6];
        let up = [0.1, 0.2];
        for terms in all_kinds() {
            let spec = LossSpec::new(terms, vec![0.1, 0.0, -0.3, 0.2]);
            let gx = spec.grad_state(&x);
            for i in 0..4 {
                let mut a = x;
                let mut b = x;
                a[i] += h;
                b[i] -= h;
                let fd = (spec.value(&a, &u, &up, &[]).unwrap() - spec.value(&b, &u, &up, &[]).unwrap()) / (2.0 * h);
                assert!((fd - gx[i]).abs() < 1e-8);
            }
            let gu = spec.grad_control(&u, &up);
            for i in 0..2 {
                let mut a = u;
                let mut b = u;
                a[i] += h;
                b[i] -= h;
                let fd = (spec.value(&x, &a, &up, &[]).unwrap() - spec.value(&x, &b, &up, &[]).unwrap()) / (2.0 * h);
                assert!((fd - gu[i]).abs() < 1e-8);
            }
        }
    }

    proptest! {
        #[test]
        fn nonnegative(
            kind in 0usize..5,
            x in prop::collection::vec(-50.0..50.0f64, 4),
            u in prop::collection::vec(-50.0..50.0f64, 2),
            up in prop::collection::vec(-50.0..50.0f64, 2),
            theta in prop::collection::vec(-5.0..5.0f64, 0..8),
        ) {
            let spec = LossSpec::new(all_kinds()[kind].clone(), vec![0.0; 4]);
            prop_assert!(spec.value(&x, &u, &up, &theta).unwrap() >= 0.0);
        }
    }
}
