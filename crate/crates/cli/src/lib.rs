//! Experiment runner for `qimpc-core`: TOML configs and presets, per-seed
//! CSV logs, JSON summaries and SVG plots.

pub mod cli;
pub mod config;
pub mod csvlog;
pub mod output;
pub mod plot;
pub mod presets;
pub mod runner;

pub use cli::cli_main;
