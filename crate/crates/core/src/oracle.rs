//! Ordinary-QFT reference correlators computed by plain matrix algebra.
//!
//! Nothing here touches process vectors. Each two-point value is computed
//! twice, once with Heisenberg-picture operators built from a Taylor
//! scaling-and-squaring exponential and once as a Schrödinger-picture
//! sandwich built from the spectral propagator, and the two must agree.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::FieldModel;
use crate::linalg::Spectrum;
use crate::tensor::C64;

/// Maximum allowed disagreement between the two oracle routes.
pub const ROUTE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct CorrelatorRequest {
    pub model: Arc<dyn FieldModel>,
    pub t_x: f64,
    pub t_y: f64,
    pub site_x: usize,
    pub site_y: usize,
}

impl CorrelatorRequest {
    pub fn new(model: Arc<dyn FieldModel>, t_x: f64, t_y: f64, site_x: usize, site_y: usize) -> Self {
        Self { model, t_x, t_y, site_x, site_y }
    }

    /// The same request with `x` and `y` exchanged.
    pub fn swapped(&self) -> Self {
        Self { model: self.model.clone(), t_x: self.t_y, t_y: self.t_x, site_x: self.site_y, site_y: self.site_x }
    }
}

fn one_norm(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|c| c.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(−i·H·t)` by scaling and squaring a truncated Taylor series.
pub fn taylor_propagator(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let n = h.nrows();
    let a = h * C64::new(0.0, -t);
    let norm = one_norm(&a);
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as u32 } else { 0 };
    let b = &a * C64::new(0.5f64.powi(squarings as i32), 0.0);
    let mut sum = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    for k in 1..=40 {
        term = &term * &b * C64::new(1.0 / k as f64, 0.0);
        sum += &term;
        if one_norm(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn expectation(state: &[C64], m: &DMatrix<C64>, ket: &[C64]) -> C64 {
    let mk = m * DMatrix::from_column_slice(ket.len(), 1, ket);
    state.iter().zip(mk.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// `⟨Ω|φ_H(tₓ, x) φ_H(t_y, y)|Ω⟩` in the model's vacuum.
///
/// Fails with [`Error::RouteDisagreement`] when the Heisenberg and
/// Schrödinger routes differ by more than [`ROUTE_TOLERANCE`].
pub fn heisenberg_two_point(req: &CorrelatorRequest) -> Result<C64> {
    let h = req.model.hamiltonian_matrix();
    let phi_x = req.model.field_matrix(req.site_x)?;
    let phi_y = req.model.field_matrix(req.site_y)?;
    let spectrum = Spectrum::of_hermitian(&h);
    let vacuum: Vec<C64> = spectrum.vectors.column(0).iter().copied().collect();
    let e0 = spectrum.values[0];

    // Heisenberg route: φ_H(t) = U†(t) φ_S U(t)
    let ux = taylor_propagator(&h, req.t_x);
    let uy = taylor_propagator(&h, req.t_y);
    let heis_x = ux.adjoint() * &phi_x * &ux;
    let heis_y = uy.adjoint() * &phi_y * &uy;
    let heisenberg = expectation(&vacuum, &(heis_x * heis_y), &vacuum);

    // Schrödinger route: ⟨Ω(tₓ)| φₓ U(tₓ − t_y) φᵧ |Ω(t_y)⟩ with |Ω(t)⟩ = e^{−iE₀t}|Ω⟩
    let omega_x: Vec<C64> = vacuum.iter().map(|c| c * C64::from_polar(1.0, -e0 * req.t_x)).collect();
    let omega_y: Vec<C64> = vacuum.iter().map(|c| c * C64::from_polar(1.0, -e0 * req.t_y)).collect();
    let sandwich = &phi_x * spectrum.propagator(req.t_x - req.t_y) * &phi_y;
    let schrodinger = expectation(&omega_x, &sandwich, &omega_y);

    let difference = (heisenberg - schrodinger).norm();
    if difference > ROUTE_TOLERANCE {
        return Err(Error::RouteDisagreement { difference });
    }
    Ok(schrodinger)
}

/// `⟨[φ(x), φ(y)]⟩ = ⟨φ(x)φ(y)⟩ − ⟨φ(y)φ(x)⟩`.
pub fn commutator_oracle(req: &CorrelatorRequest) -> Result<C64> {
    Ok(heisenberg_two_point(req)? - heisenberg_two_point(&req.swapped())?)
}

/// `(1/2)·e^{−i·ω·Δt}`, the quadrature two-point function of one free oscillator.
pub fn analytic_single_oscillator(omega: f64, dt: f64) -> C64 {
    C64::from_polar(0.5, -omega * dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{OscillatorChain, RandomQudit};
    use crate::linalg::max_abs_diff;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn single(d: usize) -> Arc<dyn FieldModel> {
        Arc::new(OscillatorChain::new(1, d, 1.0, 0.0).unwrap())
    }

    #[test]
    fn equal_time_same_site() {
        let v = heisenberg_two_point(&CorrelatorRequest::new(single(4), 0.3, 0.3, 0, 0)).unwrap();
        assert!((v - C64::new(0.5, 0.0)).norm() < 1e-14);
        let c = commutator_oracle(&CorrelatorRequest::new(single(4), 0.3, 0.3, 0, 0)).unwrap();
        assert!(c.norm() < 1e-14);
    }

    #[test]
    fn quarter_period() {
        let req = CorrelatorRequest::new(single(3), FRAC_PI_2, 0.0, 0, 0);
        assert!((heisenberg_two_point(&req).unwrap() - C64::new(0.0, -0.5)).norm() < 1e-13);
        assert!((commutator_oracle(&req).unwrap() - C64::new(0.0, -1.0)).norm() < 1e-13);
    }

    #[test]
    fn uncoupled_sites_do_not_correlate() {
        let m: Arc<dyn FieldModel> = Arc::new(OscillatorChain::new(2, 3, 1.1, 0.0).unwrap());
        for &(tx, ty) in &[(0.0, 0.0), (1.0, -0.4), (2.5, 0.7)] {
            let req = CorrelatorRequest::new(m.clone(), tx, ty, 0, 1);
            assert!(heisenberg_two_point(&req).unwrap().norm() < 1e-13);
            assert!(commutator_oracle(&req).unwrap().norm() < 1e-13);
        }
    }

    #[test]
    fn analytic_values() {
        assert_eq!(analytic_single_oscillator(1.0, 0.0), C64::new(0.5, 0.0));
        assert!((analytic_single_oscillator(1.0, PI) - C64::new(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn analytic_matches_truncated_numerics() {
        for d in [2, 8, 40] {
            for k in 0..9 {
                let dt = -2.0 + 0.5 * k as f64;
                let req = CorrelatorRequest::new(single(d), dt + 0.25, 0.25, 0, 0);
                let v = heisenberg_two_point(&req).unwrap();
                assert!((v - analytic_single_oscillator(1.0, dt)).norm() < 1e-12, "d={d} dt={dt}");
            }
        }
    }

    #[test]
    fn routes_agree_on_seeded_random_models() {
        for seed in 0..100u64 {
            let dim = 2 + (seed as usize % 7);
            let m: Arc<dyn FieldModel> = Arc::new(RandomQudit::new(dim, seed).unwrap());
            let tx = -3.0 + 6.0 * ((seed * 37 % 101) as f64 / 100.0);
            let ty = -3.0 + 6.0 * ((seed * 53 % 97) as f64 / 96.0);
            let req = CorrelatorRequest::new(m, tx, ty, 0, 1);
            let fwd = heisenberg_two_point(&req).unwrap();
            let rev = heisenberg_two_point(&req.swapped()).unwrap();
            assert!((rev - fwd.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn taylor_matches_spectral_propagator() {
        let m = RandomQudit::new(6, 12).unwrap();
        let h = m.hamiltonian_matrix();
        let s = Spectrum::of_hermitian(&h);
        for &t in &[0.0, 0.01, 1.3, -4.0] {
            assert!(max_abs_diff(&taylor_propagator(&h, t), &s.propagator(t)) < 1e-12);
        }
    }

    #[test]
    fn invalid_site_is_an_error() {
        let req = CorrelatorRequest::new(single(2), 0.0, 0.0, 0, 3);
        assert!(matches!(heisenberg_two_point(&req), Err(Error::SiteOutOfRange { .. })));
    }
}
