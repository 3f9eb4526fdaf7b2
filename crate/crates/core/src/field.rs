//! Finite-dimensional field models.
//!
//! A model supplies a Hamiltonian on a single global register of dimension
//! `D` and a Schrödinger-picture field operator per site. Everything else
//! (vacuum, propagators, evolved vacua) follows from the Hamiltonian's
//! spectrum, which [`FieldSystem`] computes once and caches.

use std::fmt::Debug;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{random_hermitian, Spectrum};
use crate::tensor::{LabeledOperator, LabeledVector, SpaceLabel, C64};

/// Name of the register every model operator acts on.
pub const MODEL_REGISTER: &str = "field";

/// Largest global dimension stored densely over the six registers.
pub const MAX_PROCESS_DIM: usize = 16;

/// A concrete finite-dimensional field theory.
pub trait FieldModel: Debug + Send + Sync {
    /// Registry name of the model family.
    fn kind(&self) -> &'static str;

    /// Global Hilbert-space dimension `D`.
    fn dim(&self) -> usize;

    fn sites(&self) -> usize;

    fn hamiltonian_matrix(&self) -> DMatrix<C64>;

    /// Field operator at `site`, as a `D × D` matrix.
    fn field_matrix(&self, site: usize) -> Result<DMatrix<C64>>;
}

/// Truncated bosonic chain, `H = Σ ω(a†a + ½) + (κ/2) Σ (x̂ᵢ − x̂ᵢ₊₁)²`,
/// with `x̂ = (a + a†)/√(2ω)` and the quadrature field `(a + a†)/√2`.
///
/// Site 0 is the most significant tensor factor of the global register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorChain {
    pub sites: usize,
    pub truncation: usize,
    pub frequency: f64,
    #[serde(default)]
    pub coupling: f64,
    #[serde(default)]
    pub periodic: bool,
}

impl OscillatorChain {
    pub fn new(sites: usize, truncation: usize, frequency: f64, coupling: f64) -> Result<Self> {
        let m = Self { sites, truncation, frequency, coupling, periodic: false };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites == 0 {
            return Err(Error::InvalidModel("chain needs at least one site".into()));
        }
        if self.truncation < 2 {
            return Err(Error::InvalidModel("truncation must be at least 2".into()));
        }
        if !(self.frequency.is_finite() && self.frequency > 0.0) {
            return Err(Error::InvalidModel(format!("frequency must be positive, got {}", self.frequency)));
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::InvalidModel(format!("coupling must be non-negative, got {}", self.coupling)));
        }
        self.truncation
            .checked_pow(self.sites as u32)
            .filter(|&d| d <= 1 << 14)
            .ok_or_else(|| Error::InvalidModel("global dimension too large".into()))?;
        Ok(())
    }

    fn lowering(&self) -> DMatrix<C64> {
        let d = self.truncation;
        DMatrix::from_fn(d, d, |i, j| if j == i + 1 { C64::new((j as f64).sqrt(), 0.0) } else { C64::new(0.0, 0.0) })
    }

    /// Embeds a single-site operator at `site`.
    fn embed(&self, op: &DMatrix<C64>, site: usize) -> DMatrix<C64> {
        let d = self.truncation;
        let mut out = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for s in 0..self.sites {
            out = if s == site { out.kronecker(op) } else { out.kronecker(&DMatrix::identity(d, d)) };
        }
        out
    }

    fn bonds(&self) -> Vec<(usize, usize)> {
        let mut b: Vec<(usize, usize)> = (0..self.sites.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if self.periodic && self.sites > 2 {
            b.push((self.sites - 1, 0));
        }
        b
    }
}

impl FieldModel for OscillatorChain {
    fn kind(&self) -> &'static str {
        "oscillator_chain"
    }

    fn dim(&self) -> usize {
        self.truncation.pow(self.sites as u32)
    }

    fn sites(&self) -> usize {
        self.sites
    }

    fn hamiltonian_matrix(&self) -> DMatrix<C64> {
        let d = self.truncation;
        let a = self.lowering();
        let number = a.adjoint() * &a;
        let local = (number + DMatrix::<C64>::identity(d, d).scale(0.5)).scale(self.frequency);
        let x = (&a + a.adjoint()).scale(1.0 / (2.0 * self.frequency).sqrt());

        let n = self.dim();
        let mut h = DMatrix::zeros(n, n);
        for s in 0..self.sites {
            h += self.embed(&local, s);
        }
        if self.coupling > 0.0 {
            for (i, j) in self.bonds() {
                let diff = self.embed(&x, i) - self.embed(&x, j);
                h += (&diff * &diff).scale(self.coupling / 2.0);
            }
        }
        h
    }

    fn field_matrix(&self, site: usize) -> Result<DMatrix<C64>> {
        if site >= self.sites {
            return Err(Error::SiteOutOfRange { site, sites: self.sites });
        }
        let a = self.lowering();
        let q = (&a + a.adjoint()).scale(std::f64::consts::FRAC_1_SQRT_2);
        Ok(self.embed(&q, site))
    }
}

fn default_random_sites() -> usize {
    2
}

/// Seeded random Hermitian Hamiltonian on one `D`-level register.
///
/// Field operators are independent seeded random Hermitian matrices, one per
/// site index, drawn from separate ChaCha streams of the same seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomQudit {
    pub dim: usize,
    pub seed: u64,
    #[serde(default = "default_random_sites")]
    pub sites: usize,
}

impl RandomQudit {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        let m = Self { dim, seed, sites: default_random_sites() };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > 1 << 12 {
            return Err(Error::InvalidModel(format!("random qudit dimension {} out of range", self.dim)));
        }
        if self.sites == 0 {
            return Err(Error::InvalidModel("random qudit needs at least one site".into()));
        }
        Ok(())
    }

    fn stream(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

impl FieldModel for RandomQudit {
    fn kind(&self) -> &'static str {
        "random_qudit"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn sites(&self) -> usize {
        self.sites
    }

    fn hamiltonian_matrix(&self) -> DMatrix<C64> {
        random_hermitian(self.dim, &mut self.stream(0))
    }

    fn field_matrix(&self, site: usize) -> Result<DMatrix<C64>> {
        if site >= self.sites {
            return Err(Error::SiteOutOfRange { site, sites: self.sites });
        }
        Ok(random_hermitian(self.dim, &mut self.stream(site as u64 + 1)))
    }
}

/// Serializable model selection, tagged by the registry name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    OscillatorChain(OscillatorChain),
    RandomQudit(RandomQudit),
}

impl ModelSpec {
    pub fn build(&self) -> Result<Arc<dyn FieldModel>> {
        match self {
            ModelSpec::OscillatorChain(m) => {
                m.validate()?;
                Ok(Arc::new(m.clone()))
            }
            ModelSpec::RandomQudit(m) => {
                m.validate()?;
                Ok(Arc::new(m.clone()))
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::OscillatorChain(_) => "oscillator_chain",
            ModelSpec::RandomQudit(_) => "random_qudit",
        }
    }
}

/// A model together with its cached spectrum.
#[derive(Debug, Clone)]
pub struct FieldSystem {
    model: Arc<dyn FieldModel>,
    spectrum: Arc<OnceLock<Spectrum>>,
}

impl FieldSystem {
    pub fn new(model: Arc<dyn FieldModel>) -> Self {
        Self { model, spectrum: Arc::new(OnceLock::new()) }
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        Ok(Self::new(spec.build()?))
    }

    pub fn model(&self) -> &dyn FieldModel {
        self.model.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn register(&self) -> SpaceLabel {
        SpaceLabel::new(MODEL_REGISTER, self.dim()).expect("models have positive dimension")
    }

    pub fn spectrum(&self) -> &Spectrum {
        self.spectrum.get_or_init(|| Spectrum::of_hermitian(&self.model.hamiltonian_matrix()))
    }

    pub fn hamiltonian(&self) -> LabeledOperator {
        LabeledOperator::on(self.register(), self.model.hamiltonian_matrix()).expect("square Hamiltonian")
    }

    pub fn ground_energy(&self) -> f64 {
        self.spectrum().values[0]
    }

    /// Normalized lowest eigenvector; its largest-magnitude component is real positive.
    ///
    /// A degenerate ground space is reported through the log and the first
    /// eigenvector (by index) is returned.
    pub fn ground_state(&self) -> LabeledVector {
        let s = self.spectrum();
        if s.values.len() > 1 {
            let gap = s.values[1] - s.values[0];
            if gap.abs() < 1e-9 * s.values[0].abs().max(1.0) {
                log::warn!("degenerate ground space (gap {gap:.3e}); returning the first eigenvector");
            }
        }
        let col: Vec<C64> = s.vectors.column(0).iter().copied().collect();
        let mut best = 0;
        for (k, c) in col.iter().enumerate() {
            if c.norm() > col[best].norm() + 1e-12 {
                best = k;
            }
        }
        let phase = col[best].conj() / col[best].norm();
        let norm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let coeffs = col.into_iter().map(|c| c * phase / norm).collect();
        LabeledVector::on(self.register(), coeffs).expect("ground state length")
    }

    /// `U(dt) = exp(−i·H·dt)` by spectral decomposition.
    pub fn evolution(&self, dt: f64) -> LabeledOperator {
        LabeledOperator::on(self.register(), self.spectrum().propagator(dt)).expect("square propagator")
    }

    pub fn field_operator(&self, site: usize) -> Result<LabeledOperator> {
        LabeledOperator::on(self.register(), self.model.field_matrix(site)?)
    }

    /// `|Ω(t)⟩ = U(t)|Ω⟩`, dynamical phase included.
    pub fn schrodinger_state(&self, t: f64) -> LabeledVector {
        crate::tensor::apply(&self.evolution(t), &self.ground_state()).expect("same register")
    }
}
