//! Stage costs, actuator clipping, the optimizer and the online QI-MPC loop.

mod clip;
mod hoeffding;
mod loss;
mod mpc;
mod optimizer;

pub use clip::{clip_controls, ControlBounds};
pub use hoeffding::hoeffding_shot_bound;
pub use loss::{stage_loss, LossSpec, LossTerms};
pub use mpc::{
    control_sensitivity, run_classical_baseline, run_qimpc, MpcConfig, RunFailure, StepRecord, TrajectoryLog,
};
pub use optimizer::{sgd_momentum_update, OptimizerConfig, OptimizerState};
