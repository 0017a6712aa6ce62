//! Outcome-indexed instrument maps on density matrices.
//!
//! The Lüders map `ρ ↦ P ρ P` is linear in `ρ`. The passive map
//! `ρ ↦ Tr[P ρ P] ρ` is not, and the size of the failure of linearity on a
//! convex combination is what [`nonlinearity_witness`] measures.

use crate::error::{Error, Result};
use crate::hilbert::{c, check_dim, frobenius_distance, hermitize, trace, CMatrix, DensityOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instrument {
    Luders,
    Passive,
}

fn branch_weight(rho: &DensityOperator, projector: &CMatrix) -> Result<(CMatrix, f64)> {
    check_dim(rho.dim(), projector.nrows())?;
    let compressed = projector * rho.matrix() * projector;
    let weight = trace(&compressed).re.max(0.0);
    Ok((compressed, weight))
}

/// `(P ρ P, Tr[P ρ P])`; the weight is the Born probability of `P`.
pub fn luders_map(rho: &DensityOperator, projector: &CMatrix) -> Result<(CMatrix, f64)> {
    branch_weight(rho, projector)
}

/// `(Tr[P ρ P] ρ, Tr[P ρ P])`.
pub fn p_instrument_map(rho: &DensityOperator, projector: &CMatrix) -> Result<(CMatrix, f64)> {
    let (_, weight) = branch_weight(rho, projector)?;
    Ok((rho.matrix() * c(weight, 0.0), weight))
}

impl Instrument {
    pub fn apply(&self, rho: &DensityOperator, projector: &CMatrix) -> Result<(CMatrix, f64)> {
        match self {
            Instrument::Luders => luders_map(rho, projector),
            Instrument::Passive => p_instrument_map(rho, projector),
        }
    }
}

/// Frobenius distance between `ω(λρ₁ + (1-λ)ρ₂)` and
/// `λω(ρ₁) + (1-λ)ω(ρ₂)` for the chosen instrument branch `ω`.
pub fn instrument_nonlinearity(
    instrument: Instrument,
    rho1: &DensityOperator,
    rho2: &DensityOperator,
    lambda: f64,
    projector: &CMatrix,
) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidArgument(format!("mixing weight {lambda} outside (0, 1)")));
    }
    check_dim(rho1.dim(), rho2.dim())?;
    let l = c(lambda, 0.0);
    let m = c(1.0 - lambda, 0.0);
    let mixed = DensityOperator::from_parts_unchecked(
        hermitize(&(rho1.matrix() * l + rho2.matrix() * m)),
        rho1.shape().to_vec(),
    );
    let (lhs, _) = instrument.apply(&mixed, projector)?;
    let (w1, _) = instrument.apply(rho1, projector)?;
    let (w2, _) = instrument.apply(rho2, projector)?;
    let rhs = w1 * l + w2 * m;
    Ok(frobenius_distance(&lhs, &rhs))
}

/// Non-linearity of the passive instrument branch for `projector`.
pub fn nonlinearity_witness(
    rho1: &DensityOperator,
    rho2: &DensityOperator,
    lambda: f64,
    projector: &CMatrix,
) -> Result<f64> {
    instrument_nonlinearity(Instrument::Passive, rho1, rho2, lambda, projector)
}
