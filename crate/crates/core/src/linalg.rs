//! Small dense helpers shared by the model and oracle code.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::tensor::C64;

/// Largest entry of `|M†M − I|`.
pub fn unitarity_residual(m: &DMatrix<C64>) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let prod = m.adjoint() * m;
    max_abs_diff(&prod, &DMatrix::identity(n, n))
}

/// Largest entry of `|M − M†|`.
pub fn hermiticity_residual(m: &DMatrix<C64>) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Eigenpairs of a Hermitian matrix, sorted by ascending eigenvalue.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn of_hermitian(h: &DMatrix<C64>) -> Self {
        let eig = SymmetricEigen::new(h.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let n = h.nrows();
        let vectors = DMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
        Self { values, vectors }
    }

    /// `exp(−i·H·t)` assembled from the eigenbasis.
    pub fn propagator(&self, t: f64) -> DMatrix<C64> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, e) in self.values.iter().enumerate() {
            let phase = C64::from_polar(1.0, -e * t);
            for i in 0..n {
                scaled[(i, k)] *= phase;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// `(A + A†)/2` with `A`'s entries drawn as complex Gaussians, `Re, Im ~ N(0, 1/2)`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
    let mut a = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            a[(i, j)] = C64::new(normal.sample(rng), normal.sample(rng));
        }
    }
    (&a + a.adjoint()).scale(0.5)
}

/// Random unit vector (normalized complex Gaussian).
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    let v: Vec<C64> = (0..dim).map(|_| C64::new(normal.sample(rng), normal.sample(rng))).collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / norm).collect()
}

/// Haar-ish random unitary: the propagator of a random Hermitian matrix at unit time.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    Spectrum::of_hermitian(&random_hermitian(dim, rng)).propagator(1.0)
}
