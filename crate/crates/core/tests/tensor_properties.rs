mod common;

use common::{random_vector, rng};
use icf_core::linalg::random_unitary;
use icf_core::tensor::{
    adjoint, apply, contract_expectation, inner_product, operator_tensor, tensor_product, LabeledOperator, SpaceLabel,
};
use icf_core::C64;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn lab(name: &str, d: usize) -> SpaceLabel {
    SpaceLabel::new(name, d).unwrap()
}

fn random_matrix(rows: usize, cols: usize, rng: &mut rand_chacha::ChaCha8Rng) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// A random operator on the registers `a, b` whose image is `b, a` (a register permutation
/// composed with a dense map), so domain and image sets coincide.
fn random_self_op(da: usize, db: usize, rng: &mut rand_chacha::ChaCha8Rng) -> LabeledOperator {
    let n = da * db;
    LabeledOperator::new(vec![lab("a", da), lab("b", db)], vec![lab("b", db), lab("a", da)], random_matrix(n, n, rng))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_product_is_conjugate_symmetric(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
        let mut r = rng(seed);
        let labels = [lab("a", da), lab("b", db)];
        let u = random_vector(&labels, &mut r);
        let v = random_vector(&labels, &mut r).permuted(&["b", "a"]).unwrap();
        let uv = inner_product(&u, &v).unwrap();
        let vu = inner_product(&v, &u).unwrap();
        prop_assert!((uv - vu.conj()).norm() < 1e-14);
    }

    #[test]
    fn tensor_product_norms_multiply(seed in any::<u64>(), da in 1usize..6, db in 1usize..6) {
        let mut r = rng(seed);
        let u = random_vector(&[lab("a", da)], &mut r);
        let v = random_vector(&[lab("b", db)], &mut r);
        let uv = tensor_product(&u, &v).unwrap();
        prop_assert!((uv.norm_sqr() - u.norm_sqr() * v.norm_sqr()).abs() < 1e-12 * (1.0 + uv.norm_sqr()));
    }

    #[test]
    fn apply_respects_composition(seed in any::<u64>(), d in 1usize..5, e in 1usize..4) {
        let mut r = rng(seed);
        let v = random_vector(&[lab("a", d), lab("r", e)], &mut r);
        let first = LabeledOperator::placed(lab("a", d), lab("b", d), random_matrix(d, d, &mut r)).unwrap();
        let second = LabeledOperator::placed(lab("b", d), lab("c", d), random_matrix(d, d, &mut r)).unwrap();
        let chained = apply(&second, &apply(&first, &v).unwrap()).unwrap();
        let composed = apply(&second.compose(&first).unwrap(), &v).unwrap();
        prop_assert_eq!(chained.labels(), composed.labels());
        for (x, y) in chained.coeffs().iter().zip(composed.coeffs()) {
            prop_assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn operator_tensor_acts_factorwise(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut r = rng(seed);
        let u = random_vector(&[lab("a", da)], &mut r);
        let v = random_vector(&[lab("b", db)], &mut r);
        let a = LabeledOperator::on(lab("a", da), random_matrix(da, da, &mut r)).unwrap();
        let b = LabeledOperator::on(lab("b", db), random_matrix(db, db, &mut r)).unwrap();
        let lhs = apply(&operator_tensor(&[a.clone(), b.clone()]).unwrap(), &tensor_product(&u, &v).unwrap()).unwrap();
        let rhs = tensor_product(&apply(&a, &u).unwrap(), &apply(&b, &v).unwrap()).unwrap();
        for (x, y) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            prop_assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn expectation_of_adjoint_is_conjugate(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut r = rng(seed);
        let w = random_vector(&[lab("a", da), lab("b", db)], &mut r);
        let o = random_self_op(da, db, &mut r);
        let direct = contract_expectation(&w, &o).unwrap();
        let adj = contract_expectation(&w, &adjoint(&o)).unwrap();
        prop_assert!((adj - direct.conj()).norm() < 1e-13);
    }

    #[test]
    fn expectation_is_linear(seed in any::<u64>(), d in 1usize..4) {
        let mut r = rng(seed);
        let w = random_vector(&[lab("a", d), lab("b", d)], &mut r);
        let o1 = random_self_op(d, d, &mut r);
        let o2 = random_self_op(d, d, &mut r);
        let (alpha, beta) = (C64::new(0.3, -1.2), C64::new(-0.7, 0.4));
        let combined = o1.scaled(alpha).add(&o2.scaled(beta)).unwrap();
        let lhs = contract_expectation(&w, &combined).unwrap();
        let rhs = alpha * contract_expectation(&w, &o1).unwrap() + beta * contract_expectation(&w, &o2).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn stored_label_order_does_not_matter(seed in any::<u64>(), da in 1usize..4, db in 1usize..4, dc in 1usize..3) {
        let mut r = rng(seed);
        let w = random_vector(&[lab("a", da), lab("b", db), lab("c", dc)], &mut r);
        let n = da * db * dc;
        let o = LabeledOperator::new(
            vec![lab("a", da), lab("b", db), lab("c", dc)],
            vec![lab("c", dc), lab("a", da), lab("b", db)],
            random_matrix(n, n, &mut r),
        ).unwrap();
        let base = contract_expectation(&w, &o).unwrap();
        for order in [["b", "c", "a"], ["c", "b", "a"], ["a", "c", "b"]] {
            let p = w.permuted(&order).unwrap();
            prop_assert!((contract_expectation(&p, &o).unwrap() - base).norm() < 1e-14 * (1.0 + base.norm()));
        }
    }

    #[test]
    fn unitary_preserves_norm_under_apply(seed in any::<u64>(), d in 1usize..6) {
        let mut r = rng(seed);
        let v = random_vector(&[lab("a", d), lab("b", 2)], &mut r);
        let u = LabeledOperator::on(lab("a", d), random_unitary(d, &mut r)).unwrap();
        prop_assert!((apply(&u, &v).unwrap().norm_sqr() - v.norm_sqr()).abs() < 1e-12);
    }
}
