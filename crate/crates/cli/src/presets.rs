//! The five built-in experiments. `presets/*.toml` in the repository are
//! serialized copies of these.

use qimpc_core::circuits::{AnsatzSpec, EncoderKind, EncoderSpec, Entanglement, VqcPolicy};
use qimpc_core::control::{LossSpec, LossTerms, MpcConfig, OptimizerConfig};
use qimpc_core::plants::{Building, DoublePendulum, Plant, PlantModel, SimplePendulum, TargetTrack, Vehicle};

use crate::config::{ExperimentConfig, ExperimentId, PlotOptions};

pub const PRESET_NAMES: [&str; 5] = ["target-tracking", "building", "vehicle", "pendulum", "double-pendulum"];

const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

fn mpc_for(plant: &dyn Plant, total_steps: usize, initial_state: Vec<f64>) -> MpcConfig {
    let (u_min, u_max) = plant.default_bounds();
    MpcConfig {
        total_steps,
        horizon: 1,
        lookahead: 1,
        u_min,
        u_max,
        initial_state,
        tolerance: None,
        shots: None,
        init_scale: 0.1,
    }
}

fn policy_for(plant: &dyn Plant, kind: EncoderKind, n_qubits: usize) -> VqcPolicy {
    VqcPolicy::new(
        EncoderSpec::new(kind, (0..plant.state_dim()).collect()),
        AnsatzSpec::new(n_qubits, 2, Entanglement::Ring),
        plant.default_head(),
    )
}

fn assemble(
    experiment: ExperimentId,
    plant: PlantModel,
    policy: VqcPolicy,
    loss: LossSpec,
    mpc: MpcConfig,
    optimizer: OptimizerConfig,
    log_loss: bool,
) -> ExperimentConfig {
    ExperimentConfig {
        experiment,
        seeds: SEEDS.to_vec(),
        output_dir: None,
        plant,
        policy,
        loss,
        mpc,
        optimizer,
        plot: PlotOptions { log_loss },
    }
}

pub fn target_tracking() -> ExperimentConfig {
    let plant = TargetTrack { alpha: 0.1, dim: 3 };
    assemble(
        ExperimentId::TargetTracking,
        PlantModel::TargetTrack(plant.clone()),
        policy_for(&plant, EncoderKind::RotationTriple, 10),
        LossSpec::mse(vec![0.0; 3]),
        mpc_for(&plant, 50, vec![0.8, -0.5, 0.3]),
        OptimizerConfig::default(),
        false,
    )
}

pub fn building() -> ExperimentConfig {
    let plant = Building {
        resistance: 0.5,
        capacitance: 1.0,
        t_outdoor: 15.0,
        q_solar: 5.0,
        q_occupants: 3.0,
        dt: 0.1,
        p_max: 10.0,
        n_rooms: 3,
    };
    assemble(
        ExperimentId::Building,
        PlantModel::Building(plant.clone()),
        policy_for(&plant, EncoderKind::RotationTriple, 6),
        LossSpec::new(
            LossTerms::Building {
                lambda_u: 0.01,
                lambda_du: 0.005,
            },
            vec![22.0; 3],
        ),
        mpc_for(&plant, 200, vec![20.0; 3]),
        OptimizerConfig::default(),
        false,
    )
}

pub fn vehicle() -> ExperimentConfig {
    let plant = Vehicle {
        mass: 1500.0,
        wheelbase: 2.5,
        drag_coefficient: 0.3,
        air_density: 1.225,
        frontal_area: 2.5,
        rolling_coefficient: 0.01,
        gravity: 9.81,
        curvature: 0.0,
        dt: 0.1,
    };
    assemble(
        ExperimentId::Vehicle,
        PlantModel::Vehicle(plant.clone()),
        policy_for(&plant, EncoderKind::RotationTriple, 6),
        LossSpec::new(
            LossTerms::Vehicle {
                lambda_u1: 0.1,
                lambda_u2: 0.1,
                lambda_du1: 0.01,
                lambda_du2: 0.01,
            },
            vec![0.0; 4],
        ),
        mpc_for(&plant, 60, vec![0.0, 10.0, 1.0, 0.0]),
        OptimizerConfig::default(),
        false,
    )
}

pub fn pendulum() -> ExperimentConfig {
    let plant = SimplePendulum {
        mass: 1.0,
        length: 1.0,
        gravity: 9.81,
        dt: 0.05,
        wrap_angles: false,
    };
    assemble(
        ExperimentId::Pendulum,
        PlantModel::SimplePendulum(plant.clone()),
        policy_for(&plant, EncoderKind::HadamardRy, 2),
        LossSpec::new(LossTerms::QuadraticEffort { lambda: 0.05 }, vec![0.0, 0.0]),
        mpc_for(&plant, 50, vec![0.0, 1.0]),
        OptimizerConfig {
            lr_init: 0.3,
            lr_min: 0.01,
            decay: 0.95,
            momentum: 0.85,
            grad_clip: 0.5,
        },
        false,
    )
}

pub fn double_pendulum() -> ExperimentConfig {
    let plant = DoublePendulum {
        m1: 1.0,
        m2: 1.0,
        l1: 1.0,
        l2: 1.0,
        gravity: 9.81,
        dt: 0.05,
        wrap_angles: false,
    };
    assemble(
        ExperimentId::DoublePendulum,
        PlantModel::DoublePendulum(plant.clone()),
        policy_for(&plant, EncoderKind::RotationTriple, 4),
        LossSpec::new(
            LossTerms::DoublePendulum {
                lambda_state: 1.0,
                lambda_u: 0.1,
                lambda_theta: 0.01,
            },
            vec![0.79, 0.0, 0.52, 0.0],
        ),
        mpc_for(&plant, 50, vec![0.1, 0.0, 0.1, 0.0]),
        OptimizerConfig::default(),
        true,
    )
}

/// Looks a preset up by name. Underscores are accepted in place of dashes.
pub fn builtin(name: &str) -> Option<ExperimentConfig> {
    match name.replace('_', "-").as_str() {
        "target-tracking" => Some(target_tracking()),
        "building" => Some(building()),
        "vehicle" => Some(vehicle()),
        "pendulum" => Some(pendulum()),
        "double-pendulum" => Some(double_pendulum()),
        _ => None,
    }
}

pub fn all() -> Vec<ExperimentConfig> {
    PRESET_NAMES.iter().filter_map(|n| builtin(n)).collect()
}
