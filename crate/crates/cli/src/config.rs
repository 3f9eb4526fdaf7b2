//! JSON experiment configuration.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

use icf_core::field::{ModelSpec, OscillatorChain};
use icf_core::C64;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// A complex number written as `[re, im]`.
pub type ComplexSpec = [f64; 2];

/// A complex matrix written row by row.
pub type MatrixSpec = Vec<Vec<ComplexSpec>>;

pub fn complex(c: ComplexSpec) -> C64 {
    C64::new(c[0], c[1])
}

pub fn matrix(spec: &MatrixSpec, dim: usize, what: &str) -> CliResult<DMatrix<C64>> {
    if spec.len() != dim || spec.iter().any(|row| row.len() != dim) {
        return Err(CliError::Config(format!("{what} must be a {dim}x{dim} matrix")));
    }
    if spec.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::Config(format!("{what} has non-finite entries")));
    }
    Ok(DMatrix::from_fn(dim, dim, |r, c| complex(spec[r][c])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BranchSpec {
    YToX {},
    XToY {},
    /// Weights for `[W_{x→y}, W_{y→x}]`.
    Superposition {
        weights: Vec<ComplexSpec>,
    },
}

impl Default for BranchSpec {
    fn default() -> Self {
        BranchSpec::YToX {}
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InsertionSpec {
    /// The model's field operator at `site_x` and `site_y`.
    #[default]
    Field,
    /// Explicit Hermitian operators on the model register.
    Matrices { phi_x: MatrixSpec, phi_y: MatrixSpec },
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        (0..self.points).map(|k| self.start + span * k as f64 / (self.points - 1) as f64).collect()
    }

    fn validate(&self, what: &str) -> CliResult<()> {
        if self.points == 0 || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Config(format!("{what}: need finite bounds and at least one point")));
        }
        Ok(())
    }
}

fn default_sweep() -> Grid {
    Grid { start: -PI, stop: PI, points: 33 }
}

fn default_theta() -> Grid {
    Grid { start: 0.0, stop: FRAC_PI_2, points: 9 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    #[serde(default = "default_bench_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// Dense runs whose estimated working set exceeds this are skipped.
    #[serde(default = "default_budget")]
    pub memory_budget_mib: usize,
}

fn default_bench_dims() -> Vec<usize> {
    vec![2, 4, 6, 8, 12, 16]
}

fn default_repeats() -> usize {
    3
}

fn default_budget() -> usize {
    256
}

impl Default for BenchSpec {
    fn default() -> Self {
        Self { dims: default_bench_dims(), repeats: default_repeats(), memory_budget_mib: default_budget() }
    }
}

fn default_strategy() -> String {
    "both".into()
}

fn default_epsilon() -> f64 {
    icf_core::causal::DEFAULT_EPSILON
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub t_x: f64,
    #[serde(default)]
    pub t_y: f64,
    #[serde(default)]
    pub site_x: usize,
    #[serde(default)]
    pub site_y: usize,
    #[serde(default)]
    pub branch: BranchSpec,
    #[serde(default)]
    pub insertion: InsertionSpec,
    /// A registered strategy name, or `both` for dense and factored side by side.
    #[serde(default = "default_strategy")]
    pub strategy: String,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Replaces `U(t_x − t_y)` in `W_{y→x}`; `W_{x→y}` then uses its adjoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<MatrixSpec>,
    /// Time step of `V` in `W_{x→y}`; defaults to `t_y − t_x`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_dt: Option<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Δt grid of `correlate`, with `t_x = t_y + Δt`.
    #[serde(default = "default_sweep")]
    pub sweep: Grid,
    /// Mixing angles of `superpose`.
    #[serde(default = "default_theta")]
    pub theta: Grid,
    #[serde(default)]
    pub bench: BenchSpec,
}

impl Default for ExperimentConfig {
    /// One free oscillator, `d = 4`, `ω = 1`, `t_x = π/2`, `t_y = 0`.
    fn default() -> Self {
        Self {
            model: ModelSpec::OscillatorChain(OscillatorChain {
                sites: 1,
                truncation: 4,
                frequency: 1.0,
                coupling: 0.0,
                periodic: false,
            }),
            t_x: FRAC_PI_2,
            t_y: 0.0,
            site_x: 0,
            site_y: 0,
            branch: BranchSpec::default(),
            insertion: InsertionSpec::default(),
            strategy: default_strategy(),
            output: None,
            seed: 0,
            unitary: None,
            v_dt: None,
            epsilon: default_epsilon(),
            sweep: default_sweep(),
            theta: default_theta(),
            bench: BenchSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks that need no model; model-dependent checks happen in
    /// [`crate::experiment::Experiment::new`].
    pub fn validate(&self) -> CliResult<()> {
        for (t, what) in [(self.t_x, "t_x"), (self.t_y, "t_y"), (self.v_dt.unwrap_or(0.0), "v_dt")] {
            if !t.is_finite() {
                return Err(CliError::Config(format!("{what} must be finite")));
            }
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(CliError::Config("epsilon must be positive".into()));
        }
        if let BranchSpec::Superposition { weights } = &self.branch {
            if weights.len() != 2 {
                return Err(CliError::Config(format!("superposition needs 2 weights, got {}", weights.len())));
            }
            if weights.iter().flatten().any(|x| !x.is_finite()) {
                return Err(CliError::Config("weights must be finite".into()));
            }
        }
        self.sweep.validate("sweep")?;
        self.theta.validate("theta")?;
        if self.bench.repeats == 0 || self.bench.dims.contains(&0) {
            return Err(CliError::Config("bench: repeats and dims must be positive".into()));
        }
        Ok(())
    }

    /// Applies `--seed`: the experiment seed and, for random models, the model seed.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        if let ModelSpec::RandomQudit(m) = &mut self.model {
            m.seed = seed;
        }
    }

    /// SHA-256 of the canonical JSON form, output path excluded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&Self { output: None, ..self.clone() }).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}
