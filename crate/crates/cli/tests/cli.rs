use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use qimpc_cli::cli_main;
use qimpc_cli::config::{load_config, parse_config, ConfigError, ExperimentConfig, OUTPUT_ROOT_ENV};
use qimpc_cli::csvlog::parse_csv;
use qimpc_cli::presets::{self, PRESET_NAMES};
use qimpc_core::circuits::EncoderKind;
use qimpc_core::control::LossTerms;
use qimpc_core::plants::PlantModel;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qimpc").chain(args.iter().copied());
    let code = cli_main(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn presets_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

fn file_names(dir: &Path) -> BTreeSet<String> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect()
}

fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config(text, Path::new("test.toml"))
}

// ---------------------------------------------------------------- configs

#[test]
fn every_preset_round_trips_through_toml() {
    for cfg in presets::all() {
        assert_eq!(parse(&cfg.to_toml()).unwrap(), cfg, "{}", cfg.experiment);
    }
}

#[test]
fn shipped_preset_files_equal_builtins() {
    for name in PRESET_NAMES {
        let path = presets_dir().join(format!("{name}.toml"));
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(parse(&text).unwrap(), presets::builtin(name).unwrap(), "{name}");
    }
}

#[test]
fn load_config_accepts_path_without_extension_and_bare_preset_names() {
    let from_file = load_config(&presets_dir().join("pendulum")).unwrap();
    let by_name = load_config(Path::new("double_pendulum")).unwrap();
    assert_eq!(from_file, presets::pendulum());
    assert_eq!(by_name, presets::double_pendulum());
}

#[test]
fn unknown_top_level_key_is_named() {
    let err = parse("preset = \"pendulum\"\nbogus = 1\n").unwrap_err().to_string();
    assert!(err.contains("bogus"), "{err}");
}

#[test]
fn unknown_key_inside_tagged_plant_table_is_named() {
    let err = parse("preset = \"pendulum\"\n[plant]\nmas = 2.0\n")
        .unwrap_err()
        .to_string();
    assert!(err.contains("mas") && err.contains("plant"), "{err}");
}

#[test]
fn unknown_key_inside_loss_terms_is_named() {
    let err = parse("preset = \"pendulum\"\n[loss.terms]\nlamda = 0.1\n")
        .unwrap_err()
        .to_string();
    assert!(err.contains("lamda"), "{err}");
}

#[test]
fn unknown_key_in_optimizer_is_named() {
    let err = parse("preset = \"building\"\n[optimizer]\nlearning_rate = 0.1\n")
        .unwrap_err()
        .to_string();
    assert!(err.contains("learning_rate"), "{err}");
}

#[test]
fn dimension_mismatch_names_the_field() {
    let err = parse("preset = \"pendulum\"\n[mpc]\ninitial_state = [1.0]\n")
        .unwrap_err()
        .to_string();
    assert!(err.contains("mpc.initial_state"), "{err}");
}

#[test]
fn out_of_range_weight_names_the_field() {
    let err = parse("preset = \"building\"\n[loss.terms]\nlambda_u = 2.0\n")
        .unwrap_err()
        .to_string();
    assert!(err.contains("lambda_u"), "{err}");
}

#[test]
fn unknown_preset_lists_the_valid_names() {
    let err = parse("preset = \"cartpole\"\n").unwrap_err().to_string();
    assert!(err.contains("cartpole") && err.contains("double-pendulum"), "{err}");
}

#[test]
fn duplicate_seeds_are_rejected() {
    let err = parse("preset = \"pendulum\"\nseeds = [1, 1]\n")
        .unwrap_err()
        .to_string();
    assert!(err.contains("distinct"), "{err}");
}

#[test]
fn overlay_with_a_different_plant_kind_replaces_the_table() {
    let cfg = parse(
        "preset = \"pendulum\"\n[plant]\nkind = \"simple_pendulum\"\nmass = 2.0\nlength = 1.0\ngravity = 9.81\ndt = 0.01\n",
    )
    .unwrap();
    let PlantModel::SimplePendulum(p) = cfg.plant else {
        panic!()
    };
    assert_eq!((p.mass, p.dt), (2.0, 0.01));
    assert_eq!(cfg.optimizer, presets::pendulum().optimizer);
}

// ------------------------------------------------------- preset fidelity

/// (preset, parameter, configured value, published value)
fn fidelity_table() -> Vec<(&'static str, &'static str, f64, f64)> {
    let mut rows = Vec::new();

    let c = presets::target_tracking();
    let PlantModel::TargetTrack(p) = &c.plant else { panic!() };
    rows.extend([
        ("target-tracking", "alpha", p.alpha, 0.1),
        ("target-tracking", "qubits", c.policy.n_qubits() as f64, 10.0),
        ("target-tracking", "controls", c.policy.control_dim() as f64, 3.0),
        ("target-tracking", "iterations", c.mpc.total_steps as f64, 50.0),
    ]);

    let c = presets::building();
    let PlantModel::Building(p) = &c.plant else { panic!() };
    let LossTerms::Building { lambda_u, lambda_du } = c.loss.terms else {
        panic!()
    };
    rows.extend([
        ("building", "R", p.resistance, 0.5),
        ("building", "C", p.capacitance, 1.0),
        ("building", "P_max", p.p_max, 10.0),
        ("building", "P_max bound", c.mpc.u_max[0], 10.0),
        ("building", "P_min bound", c.mpc.u_min[0], 0.0),
        ("building", "T_outdoor", p.t_outdoor, 15.0),
        ("building", "Q_solar", p.q_solar, 5.0),
        ("building", "Q_occupants", p.q_occupants, 3.0),
        ("building", "decay", p.dt, 0.1),
        ("building", "iterations", c.mpc.total_steps as f64, 200.0),
        ("building", "lambda_1", lambda_u, 0.01),
        ("building", "lambda_2", lambda_du, 0.005),
        ("building", "set point", c.loss.target[0], 22.0),
        ("building", "rooms", p.n_rooms as f64, 3.0),
        ("building", "qubits", c.policy.n_qubits() as f64, 6.0),
    ]);

    let c = presets::vehicle();
    let PlantModel::Vehicle(p) = &c.plant else { panic!() };
    let LossTerms::Vehicle {
        lambda_u1,
        lambda_u2,
        lambda_du1,
        lambda_du2,
    } = c.loss.terms
    else {
        panic!()
    };
    rows.extend([
        ("vehicle", "m", p.mass, 1500.0),
        ("vehicle", "L", p.wheelbase, 2.5),
        ("vehicle", "dt", p.dt, 0.1),
        ("vehicle", "g", p.gravity, 9.81),
        ("vehicle", "C_d", p.drag_coefficient, 0.3),
        ("vehicle", "rho", p.air_density, 1.225),
        ("vehicle", "A", p.frontal_area, 2.5),
        ("vehicle", "C_r", p.rolling_coefficient, 0.01),
        ("vehicle", "kappa", p.curvature, 0.0),
        ("vehicle", "lambda_1", lambda_u1, 0.1),
        ("vehicle", "lambda_2", lambda_u2, 0.1),
        ("vehicle", "lambda_3", lambda_du1, 0.01),
        ("vehicle", "lambda_4", lambda_du2, 0.01),
        ("vehicle", "iterations", c.mpc.total_steps as f64, 60.0),
        ("vehicle", "qubits", c.policy.n_qubits() as f64, 6.0),
    ]);

    let c = presets::pendulum();
    let PlantModel::SimplePendulum(p) = &c.plant else {
        panic!()
    };
    let LossTerms::QuadraticEffort { lambda } = c.loss.terms else {
        panic!()
    };
    rows.extend([
        ("pendulum", "l", p.length, 1.0),
        ("pendulum", "m", p.mass, 1.0),
        ("pendulum", "g", p.gravity, 9.81),
        ("pendulum", "iterations", c.mpc.total_steps as f64, 50.0),
        ("pendulum", "lambda", lambda, 0.05),
        ("pendulum", "u_min", c.mpc.u_min[0], -2.0),
        ("pendulum", "u_max", c.mpc.u_max[0], 2.0),
        ("pendulum", "lr initial", c.optimizer.lr_init, 0.3),
        ("pendulum", "lr minimum", c.optimizer.lr_min, 0.01),
        ("pendulum", "lr decay", c.optimizer.decay, 0.95),
        ("pendulum", "momentum", c.optimizer.momentum, 0.85),
        ("pendulum", "gradient clip", c.optimizer.grad_clip, 0.5),
        ("pendulum", "qubits", c.policy.n_qubits() as f64, 2.0),
    ]);

    let c = presets::double_pendulum();
    let PlantModel::DoublePendulum(p) = &c.plant else {
        panic!()
    };
    let LossTerms::DoublePendulum {
        lambda_state,
        lambda_u,
        lambda_theta,
    } = c.loss.terms
    else {
        panic!()
    };
    rows.extend([
        ("double-pendulum", "m1", p.m1, 1.0),
        ("double-pendulum", "m2", p.m2, 1.0),
        ("double-pendulum", "l1", p.l1, 1.0),
        ("double-pendulum", "l2", p.l2, 1.0),
        ("double-pendulum", "g", p.gravity, 9.81),
        ("double-pendulum", "dt", p.dt, 0.05),
        ("double-pendulum", "lambda_1", lambda_state, 1.0),
        ("double-pendulum", "lambda_2", lambda_u, 0.1),
        ("double-pendulum", "lambda_3", lambda_theta, 0.01),
    ]);
    let x0 = [0.1, 0.0, 0.1, 0.0];
    let target = [0.79, 0.0, 0.52, 0.0];
    for i in 0..4 {
        rows.push(("double-pendulum", "x0", c.mpc.initial_state[i], x0[i]));
        rows.push(("double-pendulum", "x_target", c.loss.target[i], target[i]));
    }
    rows
}

#[test]
fn preset_parameters_match_published_values() {
    let mismatches: Vec<_> = fidelity_table()
        .into_iter()
        .filter(|(_, _, got, want)| got != want)
        .collect();
    assert!(mismatches.is_empty(), "{mismatches:?}");
}

#[test]
fn repository_chosen_defaults() {
    let c = presets::target_tracking();
    assert_eq!(c.mpc.initial_state, vec![0.8, -0.5, 0.3]);
    assert_eq!(c.loss.target, vec![0.0; 3]);
    assert_eq!(c.policy.encoder.kind, EncoderKind::RotationTriple);
    assert_eq!(presets::pendulum().policy.encoder.kind, EncoderKind::HadamardRy);
    assert!(presets::double_pendulum().plot.log_loss);
    for cfg in presets::all() {
        assert_eq!(cfg.seeds, vec![0, 1, 2, 3, 4], "{}", cfg.experiment);
        assert_eq!(cfg.mpc.shots, None);
    }
}

// -------------------------------------------------------------- commands

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let (code, _, err) = cli(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"), "{err}");
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    assert_eq!(cli(&["run"]).0, 2);
}

#[test]
fn help_and_version_exit_zero() {
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("grad-check"));
    assert_eq!(cli(&["--version"]).0, 0);
}

#[test]
fn missing_config_file_is_a_usage_error() {
    let (code, _, err) = cli(&["run", "--config", "/nonexistent/nowhere.toml"]);
    assert_eq!(code, 2);
    assert!(err.contains("nowhere"), "{err}");
}

#[test]
fn list_prints_every_preset() {
    let (code, out, _) = cli(&["list"]);
    assert_eq!(code, 0);
    for name in PRESET_NAMES {
        assert!(out.contains(name), "{out}");
    }
}

#[test]
fn list_with_name_prints_the_shipped_file() {
    for name in PRESET_NAMES {
        let (code, out, _) = cli(&["list", name]);
        assert_eq!(code, 0);
        assert_eq!(
            out,
            fs::read_to_string(presets_dir().join(format!("{name}.toml"))).unwrap()
        );
    }
    assert_eq!(cli(&["list", "cartpole"]).0, 2);
}

#[test]
fn grad_check_passes_on_four_qubits() {
    let (code, out, _) = cli(&["grad-check", "--qubits", "4", "--trials", "100"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("ok"));
}

#[test]
fn run_pendulum_writes_csvs_plots_summary_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = presets_dir().join("pendulum");
    let (code, _, err) = cli(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");

    let mut expected: BTreeSet<String> = (0..5).map(|s| format!("pendulum_seed{s}.csv")).collect();
    for f in ["summary.json", "config.toml", "controls.svg", "states.svg", "loss.svg"] {
        expected.insert(format!("pendulum_{f}"));
    }
    assert_eq!(file_names(dir.path()), expected);

    let csv = parse_csv(&fs::read_to_string(dir.path().join("pendulum_seed0.csv")).unwrap()).unwrap();
    assert_eq!((csv.state_dim, csv.control_dim, csv.records.len()), (2, 1, 50));

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("pendulum_summary.json")).unwrap()).unwrap();
    let runs = json["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 5);
    assert!(json["errors"].as_array().unwrap().is_empty());
    let keys: BTreeSet<&str> = runs[0].as_object().unwrap().keys().map(String::as_str).collect();
    let want: BTreeSet<&str> = [
        "experiment",
        "seed",
        "initial_loss",
        "final_loss",
        "reduction",
        "steps",
        "wall_ms",
        "converged",
        "bound_violations",
    ]
    .into();
    assert_eq!(keys, want);
    for r in runs {
        assert_eq!(r["bound_violations"], 0);
        assert_eq!(r["steps"], 50);
    }

    let saved = load_config(&dir.path().join("pendulum_config.toml")).unwrap();
    assert_eq!(saved, presets::pendulum());
}

#[test]
fn seeds_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = cli(&[
        "run",
        "--config",
        "pendulum",
        "--seeds",
        "7,11",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let names = file_names(dir.path());
    assert!(names.contains("pendulum_seed7.csv") && names.contains("pendulum_seed11.csv"));
    assert!(!names.contains("pendulum_seed0.csv"));
    assert_eq!(cli(&["run", "--config", "pendulum", "--seeds", "3,3"]).0, 2);
}

#[test]
fn reruns_produce_identical_csv_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        assert_eq!(
            cli(&["run", "--config", "building", "--out", dir.path().to_str().unwrap()]).0,
            0
        );
    }
    for s in 0..5 {
        let name = format!("building_seed{s}.csv");
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap()
        );
    }
    for plot in ["controls", "states", "loss"] {
        let name = format!("building_{plot}.svg");
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap()
        );
    }
}

const SINGULAR_SEED_CONFIG: &str = r#"
preset = "vehicle"
seeds = [5, 6, 7, 8, 9]

[[policy.head.scale]]
gain = 1500.0
offset = 0.0

[[policy.head.scale]]
gain = 1.0
offset = 1.2

[mpc]
total_steps = 5
u_min = [-1500.0, -3.0]
u_max = [1500.0, 3.0]
init_scale = 3.0
"#;

#[test]
fn a_failing_seed_does_not_abort_its_siblings() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("singular.toml");
    fs::write(&config, SINGULAR_SEED_CONFIG).unwrap();
    let out = dir.path().join("out");
    let (code, _, err) = cli(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("seed 9 failed"), "{err}");

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("vehicle_summary.json")).unwrap()).unwrap();
    let seeds: Vec<u64> = json["runs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["seed"].as_u64().unwrap())
        .collect();
    assert_eq!(seeds, vec![5, 6, 7, 8]);
    let errors = json["errors"].as_array().unwrap();
    assert_eq!(errors.len(), 1);
    assert_eq!(errors[0]["seed"], 9);
    assert!(errors[0]["error"].as_str().unwrap().contains("singularity"));

    // The partial trajectory is still logged.
    let partial = parse_csv(&fs::read_to_string(out.join("vehicle_seed9.csv")).unwrap()).unwrap();
    assert_eq!(partial.records.len() as u64, errors[0]["steps"].as_u64().unwrap());
    assert!(partial.records.len() < 5);
}

#[test]
fn output_directory_leaves_no_temporaries() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        cli(&[
            "run",
            "--config",
            "double-pendulum",
            "--out",
            dir.path().to_str().unwrap()
        ])
        .0,
        0
    );
    assert_eq!(
        cli(&[
            "run",
            "--config",
            "double-pendulum",
            "--out",
            dir.path().to_str().unwrap()
        ])
        .0,
        0
    );
    assert!(file_names(dir.path()).iter().all(|n| n.starts_with("double-pendulum_")));
    assert_eq!(file_names(dir.path()).len(), 5 + 5);
}

#[test]
fn unwritable_output_is_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let (code, _, err) = cli(&[
        "run",
        "--config",
        "pendulum",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("sub"), "{err}");
}

#[test]
fn output_root_env_var_sets_the_default_directory() {
    let dir = tempfile::tempdir().unwrap();
    std::env::set_var(OUTPUT_ROOT_ENV, dir.path());
    let resolved = presets::pendulum().resolve_output_dir(None);
    let (code, _, _) = cli(&["run", "--config", "pendulum", "--seeds", "0"]);
    std::env::remove_var(OUTPUT_ROOT_ENV);
    assert_eq!(resolved, dir.path().join("pendulum"));
    assert_eq!(code, 0);
    assert!(dir.path().join("pendulum/pendulum_seed0.csv").is_file());
    assert_eq!(
        presets::pendulum().resolve_output_dir(Some(Path::new("x"))),
        PathBuf::from("x")
    );
}

#[test]
fn plot_redraws_identical_svgs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        cli(&[
            "run",
            "--config",
            "double-pendulum",
            "--out",
            dir.path().to_str().unwrap()
        ])
        .0,
        0
    );
    let before = fs::read(dir.path().join("double-pendulum_loss.svg")).unwrap();
    fs::remove_file(dir.path().join("double-pendulum_loss.svg")).unwrap();
    let (code, out, _) = cli(&["plot", "--in", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("double-pendulum_loss.svg"));
    assert_eq!(fs::read(dir.path().join("double-pendulum_loss.svg")).unwrap(), before);
}

#[test]
fn plot_on_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(&["plot", "--in", dir.path().to_str().unwrap()]).0, 1);
}

#[test]
fn baseline_writes_its_own_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = cli(&[
        "baseline",
        "--config",
        "building",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("baseline"));
    let csv = parse_csv(&fs::read_to_string(dir.path().join("building_baseline.csv")).unwrap()).unwrap();
    assert_eq!(csv.records.len(), 200);
    assert!(dir.path().join("building_baseline_summary.json").is_file());
}
