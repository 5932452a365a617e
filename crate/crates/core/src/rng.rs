//! Seeded randomness. Every sampler draws from ChaCha8 (`rand_chacha`)
//! seeded with `seed_from_u64(seed)`; independent streams for batch item `i`
//! use `set_stream(i)`, so batches are reproducible under any scheduling.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::padic::{FieldDescriptor, PadicElement, PadicMatrix};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for item `stream` of a batch seeded with `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform element of `Z_{p^m}` modulo `p^N`.
pub fn integral_element<R: Rng>(field: &Arc<FieldDescriptor>, rng: &mut R) -> PadicElement {
    let q = field.p().pow(field.precision());
    let coeffs: Vec<u64> = (0..field.degree()).map(|_| rng.random_range(0..q)).collect();
    PadicElement::from_residues(field, &coeffs)
}

pub fn unit_element<R: Rng>(field: &Arc<FieldDescriptor>, rng: &mut R) -> PadicElement {
    loop {
        let x = integral_element(field, rng);
        if x.is_unit() {
            return x;
        }
    }
}

pub fn integral_matrix<R: Rng>(
    field: &Arc<FieldDescriptor>,
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> PadicMatrix {
    PadicMatrix::from_fn(field, rows, cols, |_, _| integral_element(field, rng))
}

/// Random element of `GL_n(Z_{p^m})`: integral with unit determinant.
pub fn unimodular_matrix<R: Rng>(field: &Arc<FieldDescriptor>, n: usize, rng: &mut R) -> PadicMatrix {
    loop {
        let g = integral_matrix(field, n, n, rng);
        if g.det().is_unit() {
            return g;
        }
    }
}
