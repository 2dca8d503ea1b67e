//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a seed failed, a control left its bounds, the
//! gradient check failed or an output could not be written, 2 usage or
//! config error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qimpc_core::gradcheck::{run_grad_check, GradCheckConfig, JACOBIAN_TOLERANCE, LOSS_TOLERANCE};

use crate::config::{load_config, ConfigError, ExperimentConfig};
use crate::csvlog::parse_csv;
use crate::plot::emit_plots;
use crate::presets;
use crate::runner::{run_baseline, run_experiment, write_outputs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qimpc", version, about = "Quantum-inspired MPC experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment for every configured seed.
    Run(RunArgs),
    /// List the built-in presets, or print one of them as TOML.
    List { preset: Option<String> },
    /// Compare analytic gradients against finite differences.
    GradCheck(GradCheckArgs),
    /// Redraw plots from the CSVs in a directory.
    Plot {
        #[arg(long = "in", value_name = "DIR")]
        input: PathBuf,
    },
    /// Run the classical projected-gradient baseline.
    Baseline {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Config file, or a preset name.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Replaces the seed list of the config.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
struct GradCheckArgs {
    /// Largest register size tried.
    #[arg(long, default_value_t = 5)]
    qubits: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn cli_main<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            return code;
        }
    };
    match cli.command {
        Command::Run(args) => cmd_run(args, stdout, stderr),
        Command::List { preset } => cmd_list(preset.as_deref(), stdout, stderr),
        Command::GradCheck(args) => cmd_grad_check(args, stdout, stderr),
        Command::Plot { input } => cmd_plot(&input, stdout, stderr),
        Command::Baseline { config, out } => cmd_baseline(&config, out.as_deref(), stdout, stderr),
    }
}

fn load(path: &Path, stderr: &mut dyn Write) -> Option<ExperimentConfig> {
    match load_config(path) {
        Ok(cfg) => Some(cfg),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            None
        }
    }
}

fn create_dir(dir: &Path, stderr: &mut dyn Write) -> bool {
    match std::fs::create_dir_all(dir) {
        Ok(()) => true,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {e}", dir.display());
            false
        }
    }
}

fn cmd_run(args: RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let Some(mut cfg) = load(&args.config, stderr) else {
        return EXIT_USAGE;
    };
    if let Some(seeds) = args.seeds {
        cfg.seeds = seeds;
        if let Err(e) = cfg.validate() {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    }
    let out_dir = cfg.resolve_output_dir(args.out.as_deref());
    if !create_dir(&out_dir, stderr) {
        return EXIT_FAILURE;
    }

    let outcomes = run_experiment(&cfg);
    let (report, _) = match write_outputs(&cfg, &outcomes, &out_dir) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_FAILURE;
        }
    };
    for r in &report.runs {
        let _ = writeln!(
            stdout,
            "{} seed {}: loss {:.6e} -> {:.6e} ({:+.1}%), {} steps, {} ms{}",
            r.experiment,
            r.seed,
            r.initial_loss,
            r.final_loss,
            -100.0 * r.reduction,
            r.steps,
            r.wall_ms,
            if r.bound_violations > 0 {
                format!(", {} bound violations", r.bound_violations)
            } else {
                String::new()
            }
        );
    }
    for e in &report.errors {
        let _ = writeln!(stderr, "seed {} failed after {} steps: {}", e.seed, e.steps, e.error);
    }
    let _ = writeln!(stdout, "wrote {}", out_dir.display());
    if report.ok() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

fn cmd_list(preset: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    if let Some(name) = preset {
        return match presets::builtin(name) {
            Some(cfg) => {
                let _ = write!(stdout, "{}", cfg.to_toml());
                EXIT_OK
            }
            None => {
                let _ = writeln!(stderr, "error: {}", ConfigError::UnknownPreset(name.to_string()));
                EXIT_USAGE
            }
        };
    }
    for cfg in presets::all() {
        let plant = &cfg.plant;
        let _ = writeln!(
            stdout,
            "{:<16} plant={:<16} qubits={:<2} steps={:<4} seeds={}",
            cfg.experiment.as_str(),
            qimpc_core::plants::Plant::name(plant),
            cfg.policy.n_qubits(),
            cfg.mpc.total_steps,
            cfg.seeds.len()
        );
    }
    EXIT_OK
}

fn cmd_grad_check(args: GradCheckArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cfg = GradCheckConfig {
        max_qubits: args.qubits,
        trials: args.trials,
        seed: args.seed,
        ..GradCheckConfig::default()
    };
    let report = match run_grad_check(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let _ = writeln!(
        stdout,
        "{} trials: max jacobian rel error {:.3e} (tol {JACOBIAN_TOLERANCE:.0e}), max loss-gradient rel error {:.3e} (tol {LOSS_TOLERANCE:.0e})",
        report.trials.len(),
        report.max_jacobian_rel_error,
        report.max_loss_rel_error
    );
    if report.passed() {
        let _ = writeln!(stdout, "ok");
        EXIT_OK
    } else {
        let _ = writeln!(stderr, "gradient check failed");
        EXIT_FAILURE
    }
}

fn cmd_plot(dir: &Path, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {e}", dir.display());
            return EXIT_FAILURE;
        }
    };
    // experiment -> seed -> path, so runs are plotted in seed order.
    let mut groups: BTreeMap<String, BTreeMap<u64, PathBuf>> = BTreeMap::new();
    for entry in entries.flatten() {
        let path = entry.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        let Some(stem) = name.strip_suffix(".csv") else {
            continue;
        };
        let Some((exp, seed)) = stem.rsplit_once("_seed") else {
            continue;
        };
        if let Ok(seed) = seed.parse::<u64>() {
            groups.entry(exp.to_string()).or_default().insert(seed, path);
        }
    }
    if groups.is_empty() {
        let _ = writeln!(stderr, "error: no *_seed<k>.csv files in {}", dir.display());
        return EXIT_FAILURE;
    }

    for (exp, files) in &groups {
        let mut runs = Vec::new();
        for path in files.values() {
            let parsed = std::fs::read_to_string(path)
                .map_err(|e| e.to_string())
                .and_then(|text| parse_csv(&text));
            match parsed {
                Ok(t) => runs.push(t.records),
                Err(e) => {
                    let _ = writeln!(stderr, "error: {}: {e}", path.display());
                    return EXIT_FAILURE;
                }
            }
        }
        let log_loss = match saved_log_loss(dir, exp) {
            Ok(v) => v,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_FAILURE;
            }
        };
        let slices: Vec<&[_]> = runs.iter().map(Vec::as_slice).collect();
        match emit_plots(exp, &slices, dir, log_loss) {
            Ok(paths) => {
                for p in paths {
                    let _ = writeln!(stdout, "wrote {}", p.display());
                }
            }
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_FAILURE;
            }
        }
    }
    EXIT_OK
}

/// Reads the plot options saved with a run. A missing config means the
/// default linear axis.
fn saved_log_loss(dir: &Path, exp: &str) -> Result<bool, ConfigError> {
    let path = dir.join(format!("{exp}_config.toml"));
    if !path.is_file() {
        return Ok(false);
    }
    Ok(load_config(&path)?.plot.log_loss)
}

fn cmd_baseline(config: &Path, out: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let Some(cfg) = load(config, stderr) else {
        return EXIT_USAGE;
    };
    let out_dir = cfg.resolve_output_dir(out);
    if !create_dir(&out_dir, stderr) {
        return EXIT_FAILURE;
    }
    let (outcome, paths) = match run_baseline(&cfg, &out_dir) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_FAILURE;
        }
    };
    if let Some(e) = &outcome.error {
        let _ = writeln!(stderr, "baseline failed after {} steps: {e}", outcome.log.records.len());
        return EXIT_FAILURE;
    }
    if let (Some(a), Some(b)) = (outcome.log.initial_loss(), outcome.log.final_loss()) {
        let _ = writeln!(
            stdout,
            "{} baseline: loss {a:.6e} -> {b:.6e}, {} steps",
            cfg.experiment,
            outcome.log.records.len()
        );
    }
    for p in paths {
        let _ = writeln!(stdout, "wrote {}", p.display());
    }
    EXIT_OK
}
