//! Dense vs factored timings over a grid of register dimensions.

use std::sync::Arc;
use std::time::{Duration, Instant};

use icf_core::field::{FieldSystem, RandomQudit};
use icf_core::process::{build_definite_x_to_y, build_definite_y_to_x, superpose, InsertionQuadruple};
use icf_core::strategy::{ContractionStrategy, DenseStrategy, FactoredStrategy};
use icf_core::C64;

use crate::csv::{float, Table};
use crate::error::{CliError, CliResult};
use crate::experiment::{Experiment, STRATEGY_TOLERANCE};

pub const COLUMNS: [&str; 6] = ["dim", "factored_seconds", "dense_seconds", "speedup", "abs_diff", "dense_status"];

/// Bytes per amplitude times the copies held during a dense sweep.
const DENSE_BYTES_PER_AMPLITUDE: usize = 16 * 4;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub dim: usize,
    pub factored: Duration,
    pub dense: Option<Duration>,
    pub abs_diff: Option<f64>,
}

fn best_of<T>(repeats: usize, mut f: impl FnMut() -> CliResult<T>) -> CliResult<(T, Duration)> {
    let mut best = Duration::MAX;
    let mut last = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let v = f()?;
        best = best.min(start.elapsed());
        last = Some(v);
    }
    Ok((last.expect("repeats > 0"), best))
}

pub fn measure(exp: &Experiment) -> CliResult<Vec<BenchRow>> {
    let spec = &exp.config.bench;
    let budget = spec.memory_budget_mib * 1024 * 1024 / DENSE_BYTES_PER_AMPLITUDE;
    let (t_x, t_y) = (exp.config.t_x, exp.config.t_y);
    let mut rows = Vec::new();
    for &dim in &spec.dims {
        let model = RandomQudit::new(dim, exp.config.seed)?;
        let sys = FieldSystem::new(Arc::new(model));
        let (ox, oy) = (sys.schrodinger_state(t_x), sys.schrodinger_state(t_y));
        let pair = [
            build_definite_x_to_y(&ox, &oy, &sys.evolution(t_y - t_x))?,
            build_definite_y_to_x(&ox, &oy, &sys.evolution(t_x - t_y))?,
        ];
        let w = superpose(&[C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2], &pair)?;
        let ins = InsertionQuadruple::forward(&sys.field_operator(0)?, &sys.field_operator(1)?)?;

        let (fact, factored) = best_of(spec.repeats, || Ok(FactoredStrategy.evaluate(&w, &ins)?))?;
        let (dense, abs_diff) = if dim.pow(6) <= budget {
            let strategy = DenseStrategy::with_budget(budget);
            let (value, t) = best_of(spec.repeats, || Ok(strategy.evaluate(&w, &ins)?))?;
            let diff = (value - fact).norm();
            if diff.is_nan() || diff > STRATEGY_TOLERANCE {
                return Err(CliError::Check(format!("D={dim}: dense and factored disagree by {diff:.3e}")));
            }
            (Some(t), Some(diff))
        } else {
            log::info!("D={dim}: dense skipped, {} amplitudes over budget {budget}", dim.pow(6));
            (None, None)
        };
        rows.push(BenchRow { dim, factored, dense, abs_diff });
    }
    Ok(rows)
}

/// Timings are wall-clock and vary between runs; everything else is fixed.
pub fn run(exp: &Experiment) -> CliResult<String> {
    let rows = measure(exp)?;
    let mut table = Table::new(&exp.config, "bench", &COLUMNS);
    for r in rows {
        let f = r.factored.as_secs_f64();
        let (dense, speedup, diff, status) = match (r.dense, r.abs_diff) {
            (Some(d), Some(diff)) => {
                let d = d.as_secs_f64();
                (float(d), float(d / f.max(f64::MIN_POSITIVE)), float(diff), "ran")
            }
            _ => ("NaN".into(), "NaN".into(), "NaN".into(), "skipped"),
        };
        table.row(&[r.dim.to_string(), float(f), dense, speedup, diff, status.into()]);
    }
    Ok(table.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn small_dims_agree_and_budget_skips() {
        let mut cfg = ExperimentConfig::default();
        cfg.bench.dims = vec![2, 3, 16];
        cfg.bench.repeats = 1;
        let rows = measure(&Experiment::new(cfg).unwrap()).unwrap();
        assert!(rows[0].abs_diff.unwrap() < 1e-12);
        assert!(rows[1].abs_diff.unwrap() < 1e-11);
        assert!(rows[2].dense.is_none());
    }
}
