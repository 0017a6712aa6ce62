use num_complex::Complex64;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::hilbert::{check_dim, fidelity, QuantumState, StateVector, Tensor, UnitaryOperator};
use crate::measurement::{Mode, PSystem};
use crate::tomography::{reconstruct_single_copy, ICSet};

#[derive(Debug, Clone)]
pub struct CloneResult {
    pub clone: PSystem,
    pub fidelity: f64,
}

/// Reconstructs the state of `sys` from that one system and prepares a new
/// passive system in the estimate. `sys` keeps its state.
pub fn clone_via_reconstruction(sys: &mut PSystem, shots: usize) -> Result<CloneResult> {
    let shape = sys.state().shape().to_vec();
    let ic = ICSet::standard(sys.dim())?;
    let rec = reconstruct_single_copy(sys, &ic, shots)?;
    let estimate = QuantumState::Mixed(rec.estimate.with_shape(shape)?);
    let fidelity = fidelity(sys.state(), &estimate)?;
    let seed = sys.rng_mut().next_u64();
    Ok(CloneResult {
        clone: PSystem::new(estimate, Mode::Passive, seed),
        fidelity,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoCloningReport {
    pub overlap: Complex64,
    /// `|⟨ψ|φ⟩| - |⟨ψ|φ⟩|²`: positive exactly when the two rays are neither
    /// equal nor orthogonal, in which case no unitary copies both.
    pub obstruction: f64,
    pub fidelity_psi: f64,
    pub fidelity_phi: f64,
    pub clones_both: bool,
}

fn copy_fidelity(u: &UnitaryOperator, psi: &StateVector) -> Result<f64> {
    let blank = StateVector::basis(psi.shape(), 0)?;
    let out = psi.tensor(&blank).evolve(u)?;
    Ok(out.inner(&psi.tensor(psi))?.norm_sqr())
}

/// How well `u` (on `H ⊗ H`, blank `|0>` in the second slot) copies the
/// two test states.
pub fn no_cloning_check(u: &UnitaryOperator, psi: &StateVector, phi: &StateVector) -> Result<NoCloningReport> {
    check_dim(psi.dim(), phi.dim())?;
    check_dim(psi.dim() * psi.dim(), u.dim())?;
    if psi.shape().len() != 1 {
        return Err(Error::InvalidShape("test states must be single systems".into()));
    }
    let overlap = psi.inner(phi)?;
    let r = overlap.norm().min(1.0);
    let fidelity_psi = copy_fidelity(u, psi)?;
    let fidelity_phi = copy_fidelity(u, phi)?;
    Ok(NoCloningReport {
        overlap,
        obstruction: r - r * r,
        fidelity_psi,
        fidelity_phi,
        clones_both: fidelity_psi > 1.0 - 1e-12 && fidelity_phi > 1.0 - 1e-12,
    })
}
