//! Runs every seed of an experiment and writes its artifacts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use qimpc_core::control::{run_classical_baseline, run_qimpc, TrajectoryLog};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::csvlog::write_csv;
use crate::output::{write_atomic, OutputError};
use crate::plot::emit_plots;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub experiment: String,
    pub seed: u64,
    pub initial_loss: f64,
    pub final_loss: f64,
    /// `(initial − final) / initial`, 0 when the initial loss is 0.
    pub reduction: f64,
    pub steps: usize,
    pub wall_ms: u64,
    pub converged: bool,
    pub bound_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedError {
    pub seed: u64,
    pub steps: usize,
    pub error: String,
}

/// Result of one seed. A failed seed still carries its partial log.
#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub seed: u64,
    pub log: TrajectoryLog,
    pub wall_ms: u64,
    pub error: Option<String>,
}

impl SeedOutcome {
    pub fn summary(&self, cfg: &ExperimentConfig) -> Option<RunSummary> {
        if self.error.is_some() {
            return None;
        }
        let initial = self.log.initial_loss()?;
        let last = self.log.final_loss()?;
        Some(RunSummary {
            experiment: cfg.experiment.to_string(),
            seed: self.seed,
            initial_loss: initial,
            final_loss: last,
            reduction: if initial == 0.0 {
                0.0
            } else {
                (initial - last) / initial
            },
            steps: self.log.records.len(),
            wall_ms: self.wall_ms,
            converged: self.log.converged,
            bound_violations: self.log.bound_violations(&cfg.mpc.bounds()),
        })
    }
}

/// Runs all seeds concurrently. Outcomes come back in seed-list order and a
/// failing seed never affects the others.
pub fn run_experiment(cfg: &ExperimentConfig) -> Vec<SeedOutcome> {
    let plant = cfg.plant.as_plant();
    cfg.seeds
        .par_iter()
        .map(|&seed| {
            let start = Instant::now();
            let result = run_qimpc(plant, &cfg.policy, &cfg.loss, &cfg.mpc, &cfg.optimizer, seed);
            let wall_ms = start.elapsed().as_millis() as u64;
            match result {
                Ok(log) => SeedOutcome {
                    seed,
                    log,
                    wall_ms,
                    error: None,
                },
                Err(failure) => SeedOutcome {
                    seed,
                    log: *failure.partial,
                    wall_ms,
                    error: Some(failure.cause.to_string()),
                },
            }
        })
        .collect()
}

/// Aggregate JSON written next to the CSVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub runs: Vec<RunSummary>,
    pub errors: Vec<SeedError>,
}

impl ExperimentReport {
    pub fn from_outcomes(cfg: &ExperimentConfig, outcomes: &[SeedOutcome]) -> Self {
        let runs = outcomes.iter().filter_map(|o| o.summary(cfg)).collect();
        let errors = outcomes
            .iter()
            .filter_map(|o| {
                o.error.as_ref().map(|e| SeedError {
                    seed: o.seed,
                    steps: o.log.records.len(),
                    error: e.clone(),
                })
            })
            .collect();
        Self { runs, errors }
    }

    /// True when every seed finished and no control left its bounds.
    pub fn ok(&self) -> bool {
        self.errors.is_empty() && self.runs.iter().all(|r| r.bound_violations == 0)
    }
}

pub fn seed_csv_path(out_dir: &Path, cfg: &ExperimentConfig, seed: u64) -> PathBuf {
    out_dir.join(format!("{}_seed{seed}.csv", cfg.experiment))
}

/// Writes per-seed CSVs, the aggregate summary, the effective config and
/// the three plots. Returns the summary and every path written.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    outcomes: &[SeedOutcome],
    out_dir: &Path,
) -> Result<(ExperimentReport, Vec<PathBuf>), OutputError> {
    let plant = cfg.plant.as_plant();
    let (s, m) = (plant.state_dim(), plant.control_dim());
    let mut written = Vec::new();
    for o in outcomes {
        let path = seed_csv_path(out_dir, cfg, o.seed);
        write_csv(&o.log, s, m, &path)?;
        written.push(path);
    }

    let report = ExperimentReport::from_outcomes(cfg, outcomes);
    let path = out_dir.join(format!("{}_summary.json", cfg.experiment));
    let json = serde_json::to_string_pretty(&report).expect("summary serializes");
    write_atomic(&path, format!("{json}\n").as_bytes())?;
    written.push(path);

    let path = out_dir.join(format!("{}_config.toml", cfg.experiment));
    write_atomic(&path, cfg.to_toml().as_bytes())?;
    written.push(path);

    let runs: Vec<&[_]> = outcomes.iter().map(|o| o.log.records.as_slice()).collect();
    written.extend(emit_plots(cfg.experiment.as_str(), &runs, out_dir, cfg.plot.log_loss)?);
    Ok((report, written))
}

/// Classical comparison run: one deterministic trajectory, written as
/// `<experiment>_baseline.csv` with its summary.
pub fn run_baseline(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(SeedOutcome, Vec<PathBuf>), OutputError> {
    let plant = cfg.plant.as_plant();
    let start = Instant::now();
    let result = run_classical_baseline(plant, &cfg.loss, &cfg.mpc, &cfg.optimizer);
    let wall_ms = start.elapsed().as_millis() as u64;
    let seed = cfg.seeds.first().copied().unwrap_or(0);
    let outcome = match result {
        Ok(log) => SeedOutcome {
            seed,
            log,
            wall_ms,
            error: None,
        },
        Err(f) => SeedOutcome {
            seed,
            log: *f.partial,
            wall_ms,
            error: Some(f.cause.to_string()),
        },
    };

    let csv = out_dir.join(format!("{}_baseline.csv", cfg.experiment));
    write_csv(&outcome.log, plant.state_dim(), plant.control_dim(), &csv)?;
    let report = ExperimentReport::from_outcomes(cfg, std::slice::from_ref(&outcome));
    let json_path = out_dir.join(format!("{}_baseline_summary.json", cfg.experiment));
    let json = serde_json::to_string_pretty(&report).expect("summary serializes");
    write_atomic(&json_path, format!("{json}\n").as_bytes())?;
    Ok((outcome, vec![csv, json_path]))
}
