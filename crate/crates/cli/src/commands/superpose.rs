//! Mixing-angle sweep of `cos θ·W_{x→y} + sin θ·W_{y→x}`.

use icf_core::causal::{spread_report, SpreadReport};
use icf_core::C64;
use rayon::prelude::*;

use crate::csv::Table;
use crate::error::{CliError, CliResult};
use crate::experiment::{Experiment, STRATEGY_TOLERANCE};

/// Tolerance of the sesquilinear consistency residual.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-12;

pub const COLUMNS: [&str; 11] = [
    "theta",
    "abs_forward_branch1",
    "abs_forward_branch2",
    "abs_forward_superposed",
    "abs_commutator",
    "re_normalization",
    "im_normalization",
    "abs_e12",
    "abs_e21",
    "consistency_residual",
    "max_strategy_diff",
];

/// Spread report at one angle, computed with every selected strategy.
pub fn report(exp: &Experiment, theta: f64) -> CliResult<(SpreadReport, f64)> {
    let weights = [C64::new(theta.cos(), 0.0), C64::new(theta.sin(), 0.0)];
    let branches = exp.branch_pair(exp.config.t_x, exp.config.t_y)?;
    let strategies = exp.strategies();
    let first = spread_report(strategies[0].as_ref(), &weights, &branches, &exp.phi_x, &exp.phi_y)?;
    let mut diff = 0.0f64;
    for s in &strategies[1..] {
        let other = spread_report(s.as_ref(), &weights, &branches, &exp.phi_x, &exp.phi_y)?;
        let pairs = first
            .cross_terms
            .iter()
            .flatten()
            .zip(other.cross_terms.iter().flatten())
            .chain([(&first.superposed_forward, &other.superposed_forward)])
            .chain([(&first.superposed_reverse, &other.superposed_reverse)])
            .chain([(&first.normalization, &other.normalization)]);
        for (a, b) in pairs {
            diff = diff.max((a - b).norm());
        }
    }
    Ok((first, diff))
}

pub fn run(exp: &Experiment) -> CliResult<String> {
    let grid = exp.config.theta.values();
    let reports: Vec<(SpreadReport, f64)> = grid.par_iter().map(|&t| report(exp, t)).collect::<CliResult<_>>()?;
    let mut table = Table::new(&exp.config, "superpose", &COLUMNS);
    let mut worst = (0.0f64, 0.0f64);
    for (theta, (r, diff)) in grid.iter().zip(&reports) {
        let mags = r.branch_magnitudes();
        table.float_row(&[
            *theta,
            mags[0],
            mags[1],
            r.superposed_magnitude(),
            r.superposed_commutator().norm(),
            r.normalization.re,
            r.normalization.im,
            r.cross_terms[0][1].norm(),
            r.cross_terms[1][0].norm(),
            r.consistency_residual(),
            *diff,
        ]);
        worst = (worst.0.max(r.consistency_residual()), worst.1.max(*diff));
    }
    let text = table.finish();
    if worst.0.is_nan() || worst.0 > CONSISTENCY_TOLERANCE {
        return Err(CliError::Check(format!("consistency residual {:.3e} exceeds {CONSISTENCY_TOLERANCE:e}", worst.0)));
    }
    if worst.1.is_nan() || worst.1 > STRATEGY_TOLERANCE {
        return Err(CliError::Check(format!("strategies disagree by {:.3e}", worst.1)));
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentConfig, Grid};
    use crate::csv::column;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn end_angles_select_single_branches() {
        let mut cfg = ExperimentConfig::default();
        cfg.theta = Grid { start: 0.0, stop: FRAC_PI_2, points: 3 };
        let text = run(&Experiment::new(cfg).unwrap()).unwrap();
        let b1 = column(&text, "abs_forward_branch1").unwrap();
        let b2 = column(&text, "abs_forward_branch2").unwrap();
        let s = column(&text, "abs_forward_superposed").unwrap();
        assert!((s[0] - b1[0]).abs() < 1e-12);
        assert!((s[2] - b2[2]).abs() < 1e-12);
        let n = column(&text, "re_normalization").unwrap();
        assert!((n[0] - 1.0).abs() < 1e-12 && (n[2] - 1.0).abs() < 1e-12);
    }
}
