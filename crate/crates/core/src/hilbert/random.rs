use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, hermitize, CMatrix, CVector, DensityOperator, StateVector};
use crate::error::Result;

fn gaussian_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    CVector::from_fn(d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-distributed pure state: a normalized complex Gaussian vector.
pub fn haar_random_state<R: Rng + ?Sized>(shape: &[usize], rng: &mut R) -> Result<StateVector> {
    let d = shape.iter().product();
    StateVector::normalized(gaussian_vector(d, rng), shape.to_vec())
}

/// Hermitian matrix drawn from the Gaussian unitary ensemble.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    hermitize(&g)
}

/// Full-rank mixed state `G G† / Tr(G G†)` (Hilbert–Schmidt measure).
pub fn random_density_operator<R: Rng + ?Sized>(shape: &[usize], rng: &mut R) -> Result<DensityOperator> {
    let d: usize = shape.iter().product();
    let g = CMatrix::from_fn(d, d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let m = &g * g.adjoint();
    let tr = super::trace(&m).re;
    DensityOperator::new(hermitize(&(m * c(1.0 / tr, 0.0))), shape.to_vec())
}
