#![allow(dead_code)]

use std::sync::Arc;

use icf_core::field::{FieldSystem, RandomQudit};
use icf_core::linalg::{random_hermitian, random_unit_vector, random_unitary};
use icf_core::process::{build_definite_x_to_y, build_definite_y_to_x, ProcessVector};
use icf_core::tensor::{LabeledOperator, LabeledVector, SpaceLabel};
use icf_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn reg(d: usize) -> SpaceLabel {
    SpaceLabel::new("field", d).unwrap()
}

pub fn random_vector(labels: &[SpaceLabel], rng: &mut ChaCha8Rng) -> LabeledVector {
    let n: usize = labels.iter().map(|l| l.dim()).product();
    let coeffs = (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    LabeledVector::new(labels.to_vec(), coeffs).unwrap()
}

pub fn hermitian_op(d: usize, rng: &mut ChaCha8Rng) -> LabeledOperator {
    LabeledOperator::on(reg(d), random_hermitian(d, rng)).unwrap()
}

pub fn unitary_op(d: usize, rng: &mut ChaCha8Rng) -> LabeledOperator {
    LabeledOperator::on(reg(d), random_unitary(d, rng)).unwrap()
}

/// Definite-order vector from arbitrary (inconsistent) random building blocks.
pub fn random_definite(d: usize, rng: &mut ChaCha8Rng, y_to_x: bool) -> ProcessVector {
    let ox = LabeledVector::on(reg(d), random_unit_vector(d, rng)).unwrap();
    let oy = LabeledVector::on(reg(d), random_unit_vector(d, rng)).unwrap();
    let u = unitary_op(d, rng);
    if y_to_x {
        build_definite_y_to_x(&ox, &oy, &u).unwrap()
    } else {
        build_definite_x_to_y(&ox, &oy, &u).unwrap()
    }
}

pub fn random_weights(rng: &mut ChaCha8Rng) -> [C64; 2] {
    [
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
    ]
}

/// Model-consistent `W_{y→x}` for a random qudit model.
pub fn model_y_to_x(system: &FieldSystem, t_x: f64, t_y: f64) -> ProcessVector {
    build_definite_y_to_x(&system.schrodinger_state(t_x), &system.schrodinger_state(t_y), &system.evolution(t_x - t_y))
        .unwrap()
}

pub fn random_system(dim: usize, seed: u64) -> FieldSystem {
    FieldSystem::new(Arc::new(RandomQudit::new(dim, seed).unwrap()))
}
