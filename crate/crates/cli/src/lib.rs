//! Deterministic experiment runner for process-vector correlators.
//!
//! A JSON [`config::ExperimentConfig`] selects a field model, the region
//! times and sites, the causal branch (or superposition), insertions and
//! contraction strategy. The [`commands`] turn it into a verification table
//! or fixed-format CSV.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod experiment;

use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use experiment::Experiment;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Correlate,
    Superpose,
    Bench,
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub strategy: Option<String>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    pub passed: bool,
    pub out: Option<PathBuf>,
}

pub fn load_config(overrides: &Overrides) -> CliResult<ExperimentConfig> {
    let mut cfg = match &overrides.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = overrides.seed {
        cfg.set_seed(seed);
    }
    if let Some(s) = &overrides.strategy {
        cfg.strategy = s.clone();
    }
    if let Some(out) = &overrides.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

pub fn execute(command: Command, config: ExperimentConfig) -> CliResult<Outcome> {
    let exp = Experiment::new(config)?;
    let out = exp.config.output.clone();
    let (text, passed) = match command {
        Command::Verify => {
            let report = commands::verify::run(&exp)?;
            (report.render(), report.failures() == 0)
        }
        Command::Correlate => (commands::correlate::run(&exp)?, true),
        Command::Superpose => (commands::superpose::run(&exp)?, true),
        Command::Bench => (commands::bench::run(&exp)?, true),
    };
    Ok(Outcome { text, passed, out })
}

pub fn write_output(outcome: &Outcome) -> CliResult<()> {
    match &outcome.out {
        Some(path) => write_file(path, &outcome.text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.text.as_bytes())?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}
