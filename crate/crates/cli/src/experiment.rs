//! A validated configuration bound to its model and strategies.

use std::sync::Arc;

use icf_core::causal::HERMITIAN_TOLERANCE;
use icf_core::field::{FieldModel, FieldSystem, MAX_PROCESS_DIM};
use icf_core::linalg::{hermiticity_residual, unitarity_residual};
use icf_core::oracle::{heisenberg_two_point, CorrelatorRequest};
use icf_core::process::{
    build_definite_x_to_y, build_definite_y_to_x, superpose, InsertionQuadruple, ProcessVector, UNITARITY_TOLERANCE,
};
use icf_core::strategy::{self, ContractionStrategy};
use icf_core::tensor::LabeledOperator;
use icf_core::C64;

use crate::config::{complex, matrix, BranchSpec, ExperimentConfig, InsertionSpec};
use crate::error::{CliError, CliResult};

/// Largest disagreement tolerated between strategies when `both` is selected.
pub const STRATEGY_TOLERANCE: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub model: Arc<dyn FieldModel>,
    pub system: FieldSystem,
    pub phi_x: LabeledOperator,
    pub phi_y: LabeledOperator,
    unitary: Option<LabeledOperator>,
    strategies: Vec<Arc<dyn ContractionStrategy>>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> CliResult<Self> {
        config.validate()?;
        let model = config.model.build().map_err(|e| CliError::Config(format!("model: {e}")))?;
        let system = FieldSystem::new(model.clone());
        let dim = system.dim();
        for (site, what) in [(config.site_x, "site_x"), (config.site_y, "site_y")] {
            if site >= model.sites() {
                return Err(CliError::Config(format!("{what} = {site} but the model has {} sites", model.sites())));
            }
        }

        let (phi_x, phi_y) = match &config.insertion {
            InsertionSpec::Field => (system.field_operator(config.site_x)?, system.field_operator(config.site_y)?),
            InsertionSpec::Matrices { phi_x, phi_y } => {
                let mut ops = Vec::new();
                for (spec, what) in [(phi_x, "phi_x"), (phi_y, "phi_y")] {
                    let m = matrix(spec, dim, what)?;
                    let residual = hermiticity_residual(&m);
                    if residual > HERMITIAN_TOLERANCE {
                        return Err(CliError::Config(format!(
                            "{what} is not Hermitian (residual {residual:.3e} > {HERMITIAN_TOLERANCE:e})"
                        )));
                    }
                    ops.push(LabeledOperator::on(system.register(), m)?);
                }
                let phi_y = ops.pop().expect("two operators");
                (ops.pop().expect("two operators"), phi_y)
            }
        };

        let unitary = match &config.unitary {
            None => None,
            Some(spec) => {
                let m = matrix(spec, dim, "unitary")?;
                let residual = unitarity_residual(&m);
                if residual > UNITARITY_TOLERANCE {
                    return Err(CliError::Config(format!(
                        "unitary: unitarity residual {residual:.3e} exceeds {UNITARITY_TOLERANCE:e}"
                    )));
                }
                Some(LabeledOperator::on(system.register(), m)?)
            }
        };

        let names: Vec<&str> =
            if config.strategy == "both" { vec!["dense", "factored"] } else { vec![&config.strategy] };
        let strategies = names
            .into_iter()
            .map(|n| {
                strategy::get(n).map_err(|_| {
                    CliError::Config(format!("unknown strategy {n:?}; known: both, {}", strategy::names().join(", ")))
                })
            })
            .collect::<CliResult<Vec<_>>>()?;

        if dim > MAX_PROCESS_DIM && strategies.iter().any(|s| s.name() == "dense") {
            return Err(CliError::Config(format!(
                "D = {dim} exceeds the dense limit {MAX_PROCESS_DIM}; use --strategy factored"
            )));
        }

        Ok(Self { config, model, system, phi_x, phi_y, unitary, strategies })
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn strategies(&self) -> &[Arc<dyn ContractionStrategy>] {
        &self.strategies
    }

    /// True when both branches are built from the model's own evolution and
    /// the insertions are the model's field, so the oracle applies.
    pub fn model_consistent(&self) -> bool {
        self.unitary.is_none() && self.config.v_dt.is_none() && self.config.insertion == InsertionSpec::Field
    }

    pub fn y_to_x(&self, t_x: f64, t_y: f64) -> CliResult<ProcessVector> {
        let u = match &self.unitary {
            Some(u) => u.clone(),
            None => self.system.evolution(t_x - t_y),
        };
        Ok(build_definite_y_to_x(&self.system.schrodinger_state(t_x), &self.system.schrodinger_state(t_y), &u)?)
    }

    pub fn x_to_y(&self, t_x: f64, t_y: f64) -> CliResult<ProcessVector> {
        let v = match (&self.unitary, self.config.v_dt) {
            (_, Some(dt)) => self.system.evolution(dt),
            (Some(u), None) => icf_core::tensor::adjoint(u),
            (None, None) => self.system.evolution(t_y - t_x),
        };
        Ok(build_definite_x_to_y(&self.system.schrodinger_state(t_x), &self.system.schrodinger_state(t_y), &v)?)
    }

    /// `[W_{x→y}, W_{y→x}]`, the branch order of the superposition weights.
    pub fn branch_pair(&self, t_x: f64, t_y: f64) -> CliResult<[ProcessVector; 2]> {
        Ok([self.x_to_y(t_x, t_y)?, self.y_to_x(t_x, t_y)?])
    }

    /// The configured process vector at the given times.
    pub fn process(&self, t_x: f64, t_y: f64) -> CliResult<ProcessVector> {
        match &self.config.branch {
            BranchSpec::YToX {} => self.y_to_x(t_x, t_y),
            BranchSpec::XToY {} => self.x_to_y(t_x, t_y),
            BranchSpec::Superposition { weights } => {
                let w: Vec<C64> = weights.iter().map(|&c| complex(c)).collect();
                Ok(superpose(&w, &self.branch_pair(t_x, t_y)?)?)
            }
        }
    }

    /// Evaluates with every selected strategy; returns the first value after
    /// checking the others against it.
    pub fn evaluate(&self, w: &ProcessVector, ins: &InsertionQuadruple) -> CliResult<C64> {
        self.cross_term(w, w, ins)
    }

    pub fn cross_term(&self, bra: &ProcessVector, ket: &ProcessVector, ins: &InsertionQuadruple) -> CliResult<C64> {
        let first = self.strategies[0].cross_term(bra, ket, ins)?;
        for other in &self.strategies[1..] {
            let v = other.cross_term(bra, ket, ins)?;
            let diff = (v - first).norm();
            if diff.is_nan() || diff > STRATEGY_TOLERANCE {
                return Err(CliError::Check(format!(
                    "{} and {} disagree by {diff:.3e}",
                    self.strategies[0].name(),
                    other.name()
                )));
            }
        }
        Ok(first)
    }

    /// Ordinary `⟨φ(x)φ(y)⟩` at the given times, from the oracle.
    pub fn oracle(&self, t_x: f64, t_y: f64) -> CliResult<C64> {
        let req = CorrelatorRequest::new(self.model.clone(), t_x, t_y, self.config.site_x, self.config.site_y);
        Ok(heisenberg_two_point(&req)?)
    }

    /// Ordinary `⟨φ(y)φ(x)⟩`.
    pub fn oracle_reversed(&self, t_x: f64, t_y: f64) -> CliResult<C64> {
        let req = CorrelatorRequest::new(self.model.clone(), t_x, t_y, self.config.site_x, self.config.site_y);
        Ok(heisenberg_two_point(&req.swapped())?)
    }
}
