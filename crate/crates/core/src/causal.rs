//! Causal indicators and correlation-spreading reports built on the
//! generalized state.
//!
//! The indicator is the commutator `⟨φ(x)φ(y)⟩ − ⟨φ(y)φ(x)⟩` read off the
//! forward and reverse insertions. Reports are descriptive only: no rule for
//! turning a superposed process vector into probabilities exists here.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::hermiticity_residual;
use crate::process::{superpose, InsertionQuadruple, ProcessVector};
use crate::strategy::ContractionStrategy;
use crate::tensor::{LabeledOperator, C64};

/// Threshold on `|commutator|` used when none is given.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Hermiticity tolerance for field operators fed to [`causal_verdict`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    CausallyRelated,
    NoDetectedRelation,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Relation::CausallyRelated => "causally_related",
            Relation::NoDetectedRelation => "no_detected_relation",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalVerdict {
    pub forward: C64,
    pub reverse: C64,
    pub commutator: C64,
    pub anticommutator: C64,
    pub relation: Relation,
    pub epsilon: f64,
}

impl CausalVerdict {
    /// Classifies from the two orderings; `commutator` and `anticommutator`
    /// are stored exactly as `forward ∓ reverse`.
    pub fn from_values(forward: C64, reverse: C64, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        let commutator = forward - reverse;
        let relation =
            if commutator.norm() > epsilon { Relation::CausallyRelated } else { Relation::NoDetectedRelation };
        Ok(Self { forward, reverse, commutator, anticommutator: forward + reverse, relation, epsilon })
    }
}

fn check_hermitian(op: &LabeledOperator) -> Result<()> {
    let residual = hermiticity_residual(op.matrix());
    if residual > HERMITIAN_TOLERANCE {
        return Err(Error::NonHermitian { residual });
    }
    Ok(())
}

/// Forward/reverse two-points of `w` and the commutator test `|[φ(x), φ(y)]| > ε`.
pub fn causal_verdict(
    strategy: &dyn ContractionStrategy,
    w: &ProcessVector,
    phi_x: &LabeledOperator,
    phi_y: &LabeledOperator,
    epsilon: f64,
) -> Result<CausalVerdict> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    check_hermitian(phi_x)?;
    check_hermitian(phi_y)?;
    let forward = strategy.evaluate(w, &InsertionQuadruple::forward(phi_x, phi_y)?)?;
    let reverse = strategy.evaluate(w, &InsertionQuadruple::reverse(phi_x, phi_y)?)?;
    CausalVerdict::from_values(forward, reverse, epsilon)
}

/// All-identity insertion value; equals 1 for a consistent definite-order vector.
pub fn normalization_value(strategy: &dyn ContractionStrategy, w: &ProcessVector) -> Result<C64> {
    strategy.evaluate(w, &InsertionQuadruple::identity(w.registers().dim()))
}

/// Forward correlations of a superposition next to those of its branches.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadReport {
    pub weights: Vec<C64>,
    /// Forward two-point of each branch alone (`Eᵢᵢ`).
    pub branch_forward: Vec<C64>,
    /// `Eᵢⱼ = ⟨Wᵢ|O_fwd|Wⱼ⟩`.
    pub cross_terms: Vec<Vec<C64>>,
    pub superposed_forward: C64,
    pub superposed_reverse: C64,
    /// All-identity value of the superposition.
    pub normalization: C64,
}

impl SpreadReport {
    pub fn branch_magnitudes(&self) -> Vec<f64> {
        self.branch_forward.iter().map(|c| c.norm()).collect()
    }

    pub fn superposed_magnitude(&self) -> f64 {
        self.superposed_forward.norm()
    }

    pub fn superposed_commutator(&self) -> C64 {
        self.superposed_forward - self.superposed_reverse
    }

    /// `Σᵢⱼ conj(wᵢ) wⱼ Eᵢⱼ`.
    pub fn sesquilinear_forward(&self) -> C64 {
        let mut total = C64::new(0.0, 0.0);
        for (i, wi) in self.weights.iter().enumerate() {
            for (j, wj) in self.weights.iter().enumerate() {
                total += wi.conj() * wj * self.cross_terms[i][j];
            }
        }
        total
    }

    /// `|superposed − Σᵢⱼ conj(wᵢ) wⱼ Eᵢⱼ|`.
    pub fn consistency_residual(&self) -> f64 {
        (self.superposed_forward - self.sesquilinear_forward()).norm()
    }

    /// Largest `|Eᵢⱼ|` with `i ≠ j`.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, row) in self.cross_terms.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if i != j {
                    best = best.max(e.norm());
                }
            }
        }
        best
    }
}

pub fn spread_report(
    strategy: &dyn ContractionStrategy,
    weights: &[C64],
    branches: &[ProcessVector],
    phi_x: &LabeledOperator,
    phi_y: &LabeledOperator,
) -> Result<SpreadReport> {
    let superposed = superpose(weights, branches)?;
    let fwd = InsertionQuadruple::forward(phi_x, phi_y)?;
    let rev = InsertionQuadruple::reverse(phi_x, phi_y)?;
    let mut cross_terms = Vec::with_capacity(branches.len());
    for bi in branches {
        let row = branches.iter().map(|bj| strategy.cross_term(bi, bj, &fwd)).collect::<Result<Vec<_>>>()?;
        cross_terms.push(row);
    }
    let branch_forward = (0..branches.len()).map(|i| cross_terms[i][i]).collect();
    Ok(SpreadReport {
        weights: weights.to_vec(),
        branch_forward,
        cross_terms,
        superposed_forward: strategy.evaluate(&superposed, &fwd)?,
        superposed_reverse: strategy.evaluate(&superposed, &rev)?,
        normalization: normalization_value(strategy, &superposed)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::build_definite_y_to_x;
    use crate::strategy::{DenseStrategy, FactoredStrategy};
    use crate::tensor::{LabeledVector, SpaceLabel};
    use nalgebra::DMatrix;

    fn reg(d: usize) -> SpaceLabel {
        SpaceLabel::new("field", d).unwrap()
    }

    fn trivial(d: usize, idx: usize) -> ProcessVector {
        let e = LabeledVector::basis(reg(d), idx).unwrap();
        build_definite_y_to_x(&e, &e, &LabeledOperator::identity(vec![reg(d)]).unwrap()).unwrap()
    }

    #[test]
    fn identity_dynamics_same_operator_has_no_relation() {
        let w = trivial(2, 0);
        let phi = LabeledOperator::on(
            reg(2),
            DMatrix::from_row_slice(
                2,
                2,
                &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            ),
        )
        .unwrap();
        let v = causal_verdict(&DenseStrategy::default(), &w, &phi, &phi, DEFAULT_EPSILON).unwrap();
        assert_eq!(v.relation, Relation::NoDetectedRelation);
        assert_eq!(v.commutator, v.forward - v.reverse);
        assert_eq!(v.anticommutator, v.forward + v.reverse);
    }

    #[test]
    fn rejects_non_hermitian_and_bad_epsilon() {
        let w = trivial(2, 0);
        let bad = LabeledOperator::on(
            reg(2),
            DMatrix::from_row_slice(
                2,
                2,
                &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
            ),
        )
        .unwrap();
        let id = LabeledOperator::identity(vec![reg(2)]).unwrap();
        assert!(matches!(causal_verdict(&FactoredStrategy, &w, &bad, &id, 1e-9), Err(Error::NonHermitian { .. })));
        assert!(matches!(causal_verdict(&FactoredStrategy, &w, &id, &id, 0.0), Err(Error::InvalidEpsilon(_))));
        assert!(CausalVerdict::from_values(C64::new(0.0, 0.0), C64::new(0.0, 0.0), f64::NAN).is_err());
    }

    #[test]
    fn raising_epsilon_never_creates_a_relation() {
        let pairs = [(C64::new(0.3, 0.1), C64::new(0.3, -0.1)), (C64::new(1.0, 0.0), C64::new(1.0, 0.0))];
        for (f, r) in pairs {
            let mut last = Relation::CausallyRelated;
            for eps in [1e-12, 1e-9, 1e-3, 0.1, 0.5, 1.0] {
                let v = CausalVerdict::from_values(f, r, eps).unwrap();
                if last == Relation::NoDetectedRelation {
                    assert_eq!(v.relation, Relation::NoDetectedRelation);
                }
                last = v.relation;
            }
        }
    }

    #[test]
    fn orthogonal_vacua_normalize_to_zero() {
        let e0 = LabeledVector::basis(reg(2), 0).unwrap();
        let e1 = LabeledVector::basis(reg(2), 1).unwrap();
        let w = build_definite_y_to_x(&e0, &e1, &LabeledOperator::identity(vec![reg(2)]).unwrap()).unwrap();
        assert!(normalization_value(&DenseStrategy::default(), &w).unwrap().norm() < 1e-15);
        assert!((normalization_value(&FactoredStrategy, &trivial(3, 1)).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn single_branch_report() {
        let w = trivial(2, 0);
        let id = LabeledOperator::identity(vec![reg(2)]).unwrap();
        let r = spread_report(&FactoredStrategy, &[C64::new(1.0, 0.0)], &[w], &id, &id).unwrap();
        assert_eq!(r.superposed_forward, r.branch_forward[0]);
        assert!(r.consistency_residual() < 1e-15);
    }

    #[test]
    fn orthogonal_toy_report_is_average_of_cross_terms() {
        let a = trivial(2, 0);
        let b = trivial(2, 1);
        let phi = LabeledOperator::on(
            reg(2),
            DMatrix::from_row_slice(
                2,
                2,
                &[C64::new(1.0, 0.0), C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(-1.0, 0.0)],
            ),
        )
        .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = spread_report(&DenseStrategy::default(), &[C64::new(h, 0.0), C64::new(h, 0.0)], &[a, b], &phi, &phi)
            .unwrap();
        let e = &r.cross_terms;
        let want = (e[0][0] + e[0][1] + e[1][0] + e[1][1]) / 2.0;
        assert!((r.superposed_forward - want).norm() < 1e-14);
    }
}
