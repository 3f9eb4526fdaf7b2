mod common;

use common::*;
use icf_core::linalg::random_hermitian;
use icf_core::oracle::{heisenberg_two_point, CorrelatorRequest};
use icf_core::process::{
    build_definite_y_to_x, cross_term, evaluate, superpose, two_point_forward, two_point_reverse, InsertionQuadruple,
};
use icf_core::strategy::{ContractionStrategy, DenseStrategy, FactoredStrategy};
use icf_core::C64;
use proptest::prelude::*;
use rand::Rng;

fn random_insertion(d: usize, r: &mut rand_chacha::ChaCha8Rng) -> InsertionQuadruple {
    let m = |r: &mut rand_chacha::ChaCha8Rng| {
        nalgebra::DMatrix::from_fn(d, d, |_, _| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
    };
    InsertionQuadruple::from_matrices(m(r), m(r), m(r), m(r)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn strategies_agree(seed in any::<u64>(), d in 1usize..7, two in any::<bool>()) {
        let mut r = rng(seed);
        let order: bool = r.random();
        let a = random_definite(d, &mut r, order);
        let w = if two {
            let order: bool = r.random();
            let b = random_definite(d, &mut r, order);
            superpose(&random_weights(&mut r), &[a, b]).unwrap()
        } else {
            a
        };
        let ins = random_insertion(d, &mut r);
        let dense = DenseStrategy::default().evaluate(&w, &ins).unwrap();
        let fact = FactoredStrategy.evaluate(&w, &ins).unwrap();
        prop_assert!((dense - fact).norm() < 1e-11, "{} vs {}", dense, fact);
    }

    #[test]
    fn chi_linear_psi_antilinear(seed in any::<u64>(), d in 1usize..5) {
        let mut r = rng(seed);
        let w = superpose(&random_weights(&mut r), &[random_definite(d, &mut r, true), random_definite(d, &mut r, false)]).unwrap();
        let a = random_insertion(d, &mut r);
        let b = random_insertion(d, &mut r);
        let (alpha, beta) = (C64::new(0.8, -0.3), C64::new(-0.2, 1.1));
        let s = FactoredStrategy;

        let mut mix = a.clone();
        mix.chi_y = a.chi_y.map(|x| x * alpha) + b.chi_y.map(|x| x * beta);
        let mut with_b = a.clone();
        with_b.chi_y = b.chi_y.clone();
        let lhs = s.evaluate(&w, &mix).unwrap();
        let rhs = alpha * s.evaluate(&w, &a).unwrap() + beta * s.evaluate(&w, &with_b).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));

        let mut mix = a.clone();
        mix.psi_x = a.psi_x.map(|x| x * alpha) + b.psi_x.map(|x| x * beta);
        let mut with_b = a.clone();
        with_b.psi_x = b.psi_x.clone();
        let lhs = s.evaluate(&w, &mix).unwrap();
        let rhs = alpha.conj() * s.evaluate(&w, &a).unwrap() + beta.conj() * s.evaluate(&w, &with_b).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn reverse_is_conjugate_of_forward(seed in any::<u64>(), d in 1usize..6) {
        let mut r = rng(seed);
        let w = superpose(&random_weights(&mut r), &[random_definite(d, &mut r, true), random_definite(d, &mut r, false)]).unwrap();
        let px = hermitian_op(d, &mut r);
        let py = hermitian_op(d, &mut r);
        let f = two_point_forward(&w, &px, &py).unwrap();
        let b = two_point_reverse(&w, &px, &py).unwrap();
        prop_assert!((b - f.conj()).norm() < 1e-12 * (1.0 + f.norm()));
        prop_assert!((f.norm_sqr() - b.norm_sqr()).abs() < 1e-12 * (1.0 + f.norm_sqr()));
    }

    #[test]
    fn sesquilinear_expansion(seed in any::<u64>(), d in 1usize..5) {
        let mut r = rng(seed);
        let w1 = random_definite(d, &mut r, true);
        let w2 = random_definite(d, &mut r, false);
        let [alpha, beta] = random_weights(&mut r);
        let ins = random_insertion(d, &mut r);
        let s = superpose(&[alpha, beta], &[w1.clone(), w2.clone()]).unwrap();
        let e = |a, b| cross_term(a, b, &ins).unwrap();
        let expanded = alpha.norm_sqr() * e(&w1, &w1)
            + alpha.conj() * beta * e(&w1, &w2)
            + beta.conj() * alpha * e(&w2, &w1)
            + beta.norm_sqr() * e(&w2, &w2);
        let direct = evaluate(&s, &ins).unwrap();
        prop_assert!((direct - expanded).norm() < 1e-12 * (1.0 + direct.norm()));
    }

    #[test]
    fn recovery_matches_heisenberg_oracle(seed in any::<u64>(), d in 2usize..9, tx in -3.0f64..3.0, ty in -3.0f64..3.0) {
        let sys = random_system(d, seed);
        let w = model_y_to_x(&sys, tx, ty);
        let px = sys.field_operator(0).unwrap();
        let py = sys.field_operator(1).unwrap();
        let req = CorrelatorRequest::new(std::sync::Arc::new(icf_core::field::RandomQudit::new(d, seed).unwrap()), tx, ty, 0, 1);
        let fwd = heisenberg_two_point(&req).unwrap();
        let rev = heisenberg_two_point(&req.swapped()).unwrap();
        prop_assert!((two_point_forward(&w, &px, &py).unwrap() - fwd).norm() < 1e-10);
        prop_assert!((two_point_reverse(&w, &px, &py).unwrap() - rev).norm() < 1e-10);
    }
}

#[test]
fn cross_term_basics() {
    let mut r = rng(77);
    let d = 3;
    let w1 = random_definite(d, &mut r, true);
    let w2 = random_definite(d, &mut r, false);
    let ins = random_insertion(d, &mut r);
    assert!((cross_term(&w1, &w1, &ins).unwrap() - evaluate(&w1, &ins).unwrap()).norm() < 1e-13);

    // with a self-adjoint insertion operator, swapping bra and ket conjugates
    let h = random_hermitian(d, &mut r);
    let id = nalgebra::DMatrix::identity(d, d);
    let herm = InsertionQuadruple::from_matrices(h.clone(), id.clone(), h, id).unwrap();
    let a = cross_term(&w1, &w2, &herm).unwrap();
    let b = cross_term(&w2, &w1, &herm).unwrap();
    assert!((a - b.conj()).norm() < 1e-12);
}

#[test]
fn inconsistent_blocks_still_build() {
    // orthogonal vacua: construction succeeds (warning only), normalization vanishes
    let d = 2;
    let e0 = icf_core::tensor::LabeledVector::basis(reg(d), 0).unwrap();
    let e1 = icf_core::tensor::LabeledVector::basis(reg(d), 1).unwrap();
    let id = icf_core::tensor::LabeledOperator::identity(vec![reg(d)]).unwrap();
    let w = build_definite_y_to_x(&e1, &e0, &id).unwrap();
    assert!(evaluate(&w, &InsertionQuadruple::identity(d)).unwrap().norm() < 1e-15);
}
