//! Δt sweep of forward, reverse and commutator values against the oracle.

use icf_core::process::InsertionQuadruple;
use rayon::prelude::*;

use crate::config::BranchSpec;
use crate::csv::Table;
use crate::error::CliResult;
use crate::experiment::Experiment;

pub const COLUMNS: [&str; 8] = [
    "dt",
    "re_forward",
    "im_forward",
    "re_reverse",
    "im_reverse",
    "re_commutator",
    "im_commutator",
    "oracle_abs_error",
];

fn row(exp: &Experiment, dt: f64) -> CliResult<[f64; 8]> {
    let t_y = exp.config.t_y;
    let t_x = t_y + dt;
    let w = exp.process(t_x, t_y)?;
    let forward = exp.evaluate(&w, &InsertionQuadruple::forward(&exp.phi_x, &exp.phi_y)?)?;
    let reverse = exp.evaluate(&w, &InsertionQuadruple::reverse(&exp.phi_x, &exp.phi_y)?)?;
    let commutator = forward - reverse;

    // a y→x vector reproduces ⟨φ(x)φ(y)⟩; an x→y vector the opposite ordering
    let oracle_error = match (&exp.config.branch, exp.model_consistent()) {
        (BranchSpec::YToX {}, true) => {
            ((forward - exp.oracle(t_x, t_y)?).norm()).max((reverse - exp.oracle_reversed(t_x, t_y)?).norm())
        }
        (BranchSpec::XToY {}, true) => {
            ((forward - exp.oracle_reversed(t_x, t_y)?).norm()).max((reverse - exp.oracle(t_x, t_y)?).norm())
        }
        _ => f64::NAN,
    };
    Ok([dt, forward.re, forward.im, reverse.re, reverse.im, commutator.re, commutator.im, oracle_error])
}

/// The correlate CSV; rows follow the grid order whatever the evaluation order.
pub fn run(exp: &Experiment) -> CliResult<String> {
    let grid = exp.config.sweep.values();
    let rows: Vec<[f64; 8]> = grid.par_iter().map(|&dt| row(exp, dt)).collect::<CliResult<_>>()?;
    let mut table = Table::new(&exp.config, "correlate", &COLUMNS);
    for r in &rows {
        table.float_row(r);
    }
    Ok(table.finish())
}
