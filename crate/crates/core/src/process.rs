//! Process vectors over the six canonical registers and the generalized
//! state `w` they define.
//!
//! A process vector for the pair of regions `x`, `y` lives on
//! `x1, x2, ẋ, y1, y2, ẏ`. Field insertions enter through the six-factor
//! operator
//!
//! ```text
//! χₓ: x1→x2   χᵧ: y1→y2   id: ẋ→ẏ   ψₓ†: x2→x1   ψᵧ†: y2→y1   id: ẏ→ẋ
//! ```
//!
//! and `w(χ, ψ) = ⟨W|O|W⟩`. Callers pass `ψ` plain; the adjoint is taken here.
//!
//! The dynamics wire of a definite-order vector is stored as the Choi vector
//! of `Ū` on (dotted register, partner), so that the bra side of the
//! sandwich carries `U` itself and
//! `w(φ⊗φ, id) = ⟨Ω(tₓ)|φ U φ|Ω(t_y)⟩ · ⟨Ω(t_y)|U†|Ω(tₓ)⟩`.

use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::unitarity_residual;
use crate::strategy::{ContractionStrategy, DenseStrategy};
use crate::tensor::{
    adjoint, choi_vector, inner_product, maximally_entangled, tensor_product, LabeledOperator, LabeledVector,
    SpaceLabel, C64,
};

pub const X1: &str = "x1";
pub const X2: &str = "x2";
pub const X_DOT: &str = "xdot";
pub const Y1: &str = "y1";
pub const Y2: &str = "y2";
pub const Y_DOT: &str = "ydot";

/// Canonical storage order of the dense process vector.
pub const CANONICAL_ORDER: [&str; 6] = [X1, X2, X_DOT, Y1, Y2, Y_DOT];

/// Unitarity tolerance for the dynamics handed to the builders.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Deviation of `|⟨Ωₓ|U|Ω_y⟩|` from 1 above which a consistency warning is logged.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-8;

/// The six canonical registers, all of dimension `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegisterSet {
    dim: usize,
}

impl RegisterSet {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension { name: "register set".into() });
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self, name: &str) -> SpaceLabel {
        SpaceLabel::new(name, self.dim).expect("positive dimension")
    }

    pub fn labels(&self) -> Vec<SpaceLabel> {
        CANONICAL_ORDER.iter().map(|n| self.label(n)).collect()
    }

    /// Number of dense amplitudes, `D⁶`.
    pub fn amplitudes(&self) -> usize {
        self.dim.pow(6)
    }
}

/// One weighted product term of a process vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub weight: C64,
    pub factors: Vec<LabeledVector>,
}

impl Branch {
    fn expand(&self) -> Result<LabeledVector> {
        let mut acc = LabeledVector::scalar(self.weight);
        for f in &self.factors {
            acc = tensor_product(&acc, f)?;
        }
        acc.permuted(&CANONICAL_ORDER)
    }
}

/// A vector over the six canonical registers.
///
/// When built from products, the branch list records the construction and
/// the dense amplitudes are only materialized on first request.
#[derive(Debug, Clone)]
pub struct ProcessVector {
    registers: RegisterSet,
    branches: Option<Vec<Branch>>,
    dense: OnceLock<LabeledVector>,
}

impl ProcessVector {
    /// Wraps a dense vector; no branch metadata is attached.
    pub fn from_dense(registers: RegisterSet, vector: LabeledVector) -> Result<Self> {
        let vector = vector.permuted(&CANONICAL_ORDER)?;
        if vector.labels() != registers.labels().as_slice() {
            return Err(Error::RegisterMismatch);
        }
        let dense = OnceLock::new();
        let _ = dense.set(vector);
        Ok(Self { registers, branches: None, dense })
    }

    /// Sum of weighted product branches. Each branch's factors must cover
    /// the six registers exactly once.
    pub fn from_branches(registers: RegisterSet, branches: Vec<Branch>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::EmptySuperposition);
        }
        let mut want: Vec<String> = CANONICAL_ORDER.iter().map(|s| s.to_string()).collect();
        want.sort();
        for b in &branches {
            let mut got = Vec::new();
            for f in &b.factors {
                for l in f.labels() {
                    if l.dim() != registers.dim() {
                        return Err(Error::ConflictingDimension {
                            name: l.name().to_string(),
                            first: registers.dim(),
                            second: l.dim(),
                        });
                    }
                    got.push(l.name().to_string());
                }
            }
            got.sort();
            if got != want {
                return Err(Error::LabelSetMismatch { left: want, right: got });
            }
        }
        Ok(Self { registers, branches: Some(branches), dense: OnceLock::new() })
    }

    pub fn registers(&self) -> RegisterSet {
        self.registers
    }

    pub fn branches(&self) -> Option<&[Branch]> {
        self.branches.as_deref()
    }

    /// Dense amplitudes in canonical register order.
    pub fn vector(&self) -> &LabeledVector {
        self.dense.get_or_init(|| {
            let branches = self.branches.as_ref().expect("dense-only vectors are initialized eagerly");
            let mut acc: Option<LabeledVector> = None;
            for b in branches {
                let term = b.expand().expect("branch factors validated at construction");
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term).expect("same registers"),
                });
            }
            acc.expect("at least one branch")
        })
    }

    pub fn is_materialized(&self) -> bool {
        self.dense.get().is_some()
    }

    /// `⟨W|W⟩`, from the dense amplitudes.
    pub fn norm_sqr(&self) -> f64 {
        self.vector().norm_sqr()
    }
}

fn single_register_coeffs(v: &LabeledVector, dim: usize, what: &str) -> Result<Vec<C64>> {
    if v.labels().len() != 1 || v.labels()[0].dim() != dim {
        return Err(Error::DimensionMismatch(format!("{what} must be a single {dim}-dimensional register")));
    }
    Ok(v.coeffs().to_vec())
}

fn single_register_matrix(op: &LabeledOperator, what: &str) -> Result<DMatrix<C64>> {
    if op.domain().len() != 1 || op.image().len() != 1 || op.domain()[0].dim() != op.image()[0].dim() {
        return Err(Error::DimensionMismatch(format!("{what} must be square on a single register")));
    }
    Ok(op.matrix().clone())
}

fn check_unitary(u: &DMatrix<C64>) -> Result<()> {
    let residual = unitarity_residual(u);
    if residual > UNITARITY_TOLERANCE {
        return Err(Error::NonUnitary { residual });
    }
    Ok(())
}

/// `|⟨a|U|b⟩|` for plain coefficient vectors.
fn transfer_overlap(a: &[C64], u: &DMatrix<C64>, b: &[C64]) -> f64 {
    let ub = u * DMatrix::from_column_slice(b.len(), 1, b);
    a.iter().zip(ub.iter()).map(|(x, y)| x.conj() * y).sum::<C64>().norm()
}

/// Choi vector carrying `U` on the bra side, stored as `(Ū on dot)|+⟩^{dot,partner}`.
fn dynamics_wire(u: &DMatrix<C64>, dot: SpaceLabel, partner: SpaceLabel) -> Result<LabeledVector> {
    let conj = LabeledOperator::on(dot.clone(), u.map(|c| c.conj()))?;
    choi_vector(&conj, dot, partner)
}

struct DefiniteInputs {
    registers: RegisterSet,
    omega_x: Vec<C64>,
    omega_y: Vec<C64>,
    dynamics: DMatrix<C64>,
}

fn definite_inputs(omega_x: &LabeledVector, omega_y: &LabeledVector, u: &LabeledOperator) -> Result<DefiniteInputs> {
    let dynamics = single_register_matrix(u, "dynamics")?;
    let dim = dynamics.nrows();
    let registers = RegisterSet::new(dim)?;
    let omega_x = single_register_coeffs(omega_x, dim, "omega_x")?;
    let omega_y = single_register_coeffs(omega_y, dim, "omega_y")?;
    check_unitary(&dynamics)?;
    Ok(DefiniteInputs { registers, omega_x, omega_y, dynamics })
}

/// `|W_{y→x}⟩ = |+⟩^{x1ẋ} |Ω(t_y)⟩^{y1} |Ω(tₓ)⟩^{x2} |U⟩^{ẏy2}`.
///
/// `u` is the propagator `U(tₓ − t_y)`. Exact recovery of ordinary
/// correlators needs `|Ω(tₓ)⟩ = U|Ω(t_y)⟩`; a violation is logged, not rejected.
pub fn build_definite_y_to_x(
    omega_x: &LabeledVector,
    omega_y: &LabeledVector,
    u: &LabeledOperator,
) -> Result<ProcessVector> {
    let inp = definite_inputs(omega_x, omega_y, u)?;
    let overlap = transfer_overlap(&inp.omega_x, &inp.dynamics, &inp.omega_y);
    if (overlap - 1.0).abs() > CONSISTENCY_TOLERANCE {
        log::warn!("|<omega_x|U|omega_y>| = {overlap:.12} deviates from 1; correlators will not match ordinary QFT");
    }
    let r = inp.registers;
    let factors = vec![
        maximally_entangled(r.label(X1), r.label(X_DOT))?,
        LabeledVector::on(r.label(Y1), inp.omega_y)?,
        LabeledVector::on(r.label(X2), inp.omega_x)?,
        dynamics_wire(&inp.dynamics, r.label(Y_DOT), r.label(Y2))?,
    ];
    ProcessVector::from_branches(r, vec![Branch { weight: C64::new(1.0, 0.0), factors }])
}

/// `|W_{x→y}⟩ = |Ω(tₓ)⟩^{x1} |+⟩^{ẏy1} |V⟩^{x2ẋ} |Ω(t_y)⟩^{y2}`.
///
/// `v` propagates from `x` to `y`; consistency means `|Ω(t_y)⟩ = V|Ω(tₓ)⟩`.
pub fn build_definite_x_to_y(
    omega_x: &LabeledVector,
    omega_y: &LabeledVector,
    v: &LabeledOperator,
) -> Result<ProcessVector> {
    let inp = definite_inputs(omega_x, omega_y, v)?;
    let overlap = transfer_overlap(&inp.omega_y, &inp.dynamics, &inp.omega_x);
    if (overlap - 1.0).abs() > CONSISTENCY_TOLERANCE {
        log::warn!("|<omega_y|V|omega_x>| = {overlap:.12} deviates from 1; correlators will not match ordinary QFT");
    }
    let r = inp.registers;
    let factors = vec![
        LabeledVector::on(r.label(X1), inp.omega_x)?,
        maximally_entangled(r.label(Y_DOT), r.label(Y1))?,
        dynamics_wire(&inp.dynamics, r.label(X_DOT), r.label(X2))?,
        LabeledVector::on(r.label(Y2), inp.omega_y)?,
    ];
    ProcessVector::from_branches(r, vec![Branch { weight: C64::new(1.0, 0.0), factors }])
}

/// `Σₖ weights[k]·branches[k]`, without renormalization.
pub fn superpose(weights: &[C64], branches: &[ProcessVector]) -> Result<ProcessVector> {
    if branches.is_empty() {
        return Err(Error::EmptySuperposition);
    }
    if weights.len() != branches.len() {
        return Err(Error::WeightCount { weights: weights.len(), branches: branches.len() });
    }
    let registers = branches[0].registers;
    if branches.iter().any(|b| b.registers != registers) {
        return Err(Error::RegisterMismatch);
    }
    if branches.iter().all(|b| b.branches.is_some()) {
        let mut flat = Vec::new();
        for (w, pv) in weights.iter().zip(branches) {
            for b in pv.branches.as_ref().expect("checked") {
                flat.push(Branch { weight: w * b.weight, factors: b.factors.clone() });
            }
        }
        return ProcessVector::from_branches(registers, flat);
    }
    let mut acc = branches[0].vector().scaled(weights[0]);
    for (w, pv) in weights.iter().zip(branches).skip(1) {
        acc = acc.add(&pv.vector().scaled(*w))?;
    }
    ProcessVector::from_dense(registers, acc)
}

/// The four `D × D` insertions `(χₓ, χᵧ, ψₓ, ψᵧ)` of the generalized state.
#[derive(Debug, Clone, PartialEq)]
pub struct InsertionQuadruple {
    pub chi_x: DMatrix<C64>,
    pub chi_y: DMatrix<C64>,
    pub psi_x: DMatrix<C64>,
    pub psi_y: DMatrix<C64>,
}

impl InsertionQuadruple {
    pub fn new(
        chi_x: &LabeledOperator,
        chi_y: &LabeledOperator,
        psi_x: &LabeledOperator,
        psi_y: &LabeledOperator,
    ) -> Result<Self> {
        Self::from_matrices(
            single_register_matrix(chi_x, "chi_x")?,
            single_register_matrix(chi_y, "chi_y")?,
            single_register_matrix(psi_x, "psi_x")?,
            single_register_matrix(psi_y, "psi_y")?,
        )
    }

    pub fn from_matrices(
        chi_x: DMatrix<C64>,
        chi_y: DMatrix<C64>,
        psi_x: DMatrix<C64>,
        psi_y: DMatrix<C64>,
    ) -> Result<Self> {
        let d = chi_x.nrows();
        for (m, what) in [(&chi_x, "chi_x"), (&chi_y, "chi_y"), (&psi_x, "psi_x"), (&psi_y, "psi_y")] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "{what} is {}x{}, expected {d}x{d}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(Self { chi_x, chi_y, psi_x, psi_y })
    }

    /// All four insertions equal to the identity.
    pub fn identity(dim: usize) -> Self {
        let id = DMatrix::identity(dim, dim);
        Self { chi_x: id.clone(), chi_y: id.clone(), psi_x: id.clone(), psi_y: id }
    }

    /// `χ = (φₓ, φᵧ)`, `ψ = id`.
    pub fn forward(phi_x: &LabeledOperator, phi_y: &LabeledOperator) -> Result<Self> {
        let px = single_register_matrix(phi_x, "phi_x")?;
        let id = DMatrix::identity(px.nrows(), px.nrows());
        Self::from_matrices(px, single_register_matrix(phi_y, "phi_y")?, id.clone(), id)
    }

    /// `χ = id`, `ψ = (φₓ, φᵧ)`.
    pub fn reverse(phi_x: &LabeledOperator, phi_y: &LabeledOperator) -> Result<Self> {
        let px = single_register_matrix(phi_x, "phi_x")?;
        let id = DMatrix::identity(px.nrows(), px.nrows());
        Self::from_matrices(id.clone(), id, px, single_register_matrix(phi_y, "phi_y")?)
    }

    pub fn dim(&self) -> usize {
        self.chi_x.nrows()
    }

    /// The six register-placed factors of the insertion operator.
    pub fn placed_factors(&self, registers: RegisterSet) -> Result<Vec<LabeledOperator>> {
        if self.dim() != registers.dim() {
            return Err(Error::DimensionMismatch(format!(
                "insertions are {0}x{0}, registers have dimension {1}",
                self.dim(),
                registers.dim()
            )));
        }
        let r = |n: &str| registers.label(n);
        let psi_x = adjoint(&LabeledOperator::placed(r(X1), r(X2), self.psi_x.clone())?);
        let psi_y = adjoint(&LabeledOperator::placed(r(Y1), r(Y2), self.psi_y.clone())?);
        Ok(vec![
            LabeledOperator::placed(r(X1), r(X2), self.chi_x.clone())?,
            LabeledOperator::placed(r(Y1), r(Y2), self.chi_y.clone())?,
            LabeledOperator::wire(r(X_DOT), r(Y_DOT))?,
            psi_x,
            psi_y,
            LabeledOperator::wire(r(Y_DOT), r(X_DOT))?,
        ])
    }
}

/// `w(χ, ψ) = ⟨W|O|W⟩` on the dense reference path.
pub fn evaluate(w: &ProcessVector, ins: &InsertionQuadruple) -> Result<C64> {
    DenseStrategy::default().evaluate(w, ins)
}

/// `⟨W₁|O|W₂⟩` on the dense reference path.
pub fn cross_term(bra: &ProcessVector, ket: &ProcessVector, ins: &InsertionQuadruple) -> Result<C64> {
    DenseStrategy::default().cross_term(bra, ket, ins)
}

/// `w(φₓ⊗φᵧ, id)`, the ordinary `⟨φ(x)φ(y)⟩` on a consistent `W_{y→x}`.
pub fn two_point_forward(w: &ProcessVector, phi_x: &LabeledOperator, phi_y: &LabeledOperator) -> Result<C64> {
    evaluate(w, &InsertionQuadruple::forward(phi_x, phi_y)?)
}

/// `w(id, φₓ⊗φᵧ)` with the adjoint taken internally: `⟨φ(y)φ(x)⟩` on a consistent `W_{y→x}`.
pub fn two_point_reverse(w: &ProcessVector, phi_x: &LabeledOperator, phi_y: &LabeledOperator) -> Result<C64> {
    evaluate(w, &InsertionQuadruple::reverse(phi_x, phi_y)?)
}

/// `⟨a|b⟩` of the dense amplitudes.
pub fn overlap(a: &ProcessVector, b: &ProcessVector) -> Result<C64> {
    if a.registers != b.registers {
        return Err(Error::RegisterMismatch);
    }
    inner_product(a.vector(), b.vector())
}
