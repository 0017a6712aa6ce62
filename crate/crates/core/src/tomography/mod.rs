//! State reconstruction from one system.
//!
//! A passive measurement leaves the state alone, so every observable of an
//! informationally complete set can be measured as often as needed on the
//! same copy. The estimated expectation values are mapped back to a
//! Hermitian matrix with the set's dual frame and then pulled onto the set
//! of density operators.

mod icset;
mod simplex;

pub use icset::ICSet;
pub use simplex::{project_to_physical, project_to_simplex};

use crate::error::{Error, Result};
use crate::hilbert::{c, check_dim, fidelity, hermitize, CMatrix, DensityOperator, QuantumState, StateVector};
use crate::measurement::{Observable, PSystem};

/// z-value for the reported confidence half-widths (95% normal interval).
pub const CONFIDENCE_Z: f64 = 1.96;

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationEstimate {
    pub observable: String,
    pub mean: f64,
    pub half_width: f64,
    /// Empirical frequency of each eigenvalue, in eigenvalue order.
    pub frequencies: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub estimate: DensityOperator,
    pub raw_estimate: CMatrix,
    pub shots_per_observable: usize,
    pub diagnostics: Vec<ExpectationEstimate>,
}

fn summarize(obs: &Observable, outcomes: &[f64]) -> ExpectationEstimate {
    let n = outcomes.len() as f64;
    let mean = outcomes.iter().sum::<f64>() / n;
    let var = if outcomes.len() > 1 {
        outcomes.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let frequencies = obs
        .eigenvalues()
        .iter()
        .map(|&a| (a, outcomes.iter().filter(|&&x| x == a).count() as f64 / n))
        .collect();
    ExpectationEstimate {
        observable: obs.name().to_string(),
        mean,
        half_width: CONFIDENCE_Z * (var / n).sqrt(),
        frequencies,
    }
}

/// Mean of `shots` passive measurements of `obs` on the one system `sys`.
pub fn estimate_expectation(sys: &mut PSystem, obs: &Observable, shots: usize) -> Result<ExpectationEstimate> {
    sys.require_passive("single-copy estimation")?;
    if shots == 0 {
        return Err(Error::InvalidArgument("at least one shot per observable is needed".into()));
    }
    check_dim(obs.dim(), sys.dim())?;
    let rec = sys.repeated_measure(obs, shots)?;
    Ok(summarize(obs, &rec.outcomes))
}

/// [`estimate_expectation`] for every observable of `ic`, in order.
pub fn estimate_expectations(sys: &mut PSystem, ic: &ICSet, shots: usize) -> Result<Vec<ExpectationEstimate>> {
    sys.require_passive("single-copy estimation")?;
    check_dim(ic.system_dim(), sys.dim())?;
    ic.observables().iter().map(|obs| estimate_expectation(sys, obs, shots)).collect()
}

/// Applies the dual frame: `ρ̂ = offset + Σ_k ⟨O_k⟩ D_k`. Unit trace by
/// construction, not necessarily positive.
pub fn linear_inversion(means: &[f64], ic: &ICSet) -> Result<CMatrix> {
    if means.len() != ic.len() {
        return Err(Error::MissingEstimates {
            expected: ic.len(),
            found: means.len(),
        });
    }
    let mut m = ic.offset().clone();
    for (&e, dual) in means.iter().zip(ic.dual_frame()) {
        m += dual * c(e, 0.0);
    }
    Ok(hermitize(&m))
}

/// Estimate, invert, project. The system's state is untouched.
pub fn reconstruct_single_copy(sys: &mut PSystem, ic: &ICSet, shots: usize) -> Result<ReconstructionResult> {
    let diagnostics = estimate_expectations(sys, ic, shots)?;
    let means: Vec<f64> = diagnostics.iter().map(|e| e.mean).collect();
    let raw_estimate = linear_inversion(&means, ic)?;
    let estimate = project_to_physical(&raw_estimate)?.with_shape(ic.target_shape().to_vec())?;
    Ok(ReconstructionResult {
        estimate,
        raw_estimate,
        shots_per_observable: shots,
        diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discrimination {
    pub index: usize,
    pub fidelities: Vec<f64>,
}

/// Which of the candidate rays the system is in: reconstruct, then take the
/// candidate of highest fidelity with the estimate.
pub fn discriminate(sys: &mut PSystem, candidates: &[StateVector], ic: &ICSet, shots: usize) -> Result<Discrimination> {
    if candidates.len() < 2 {
        return Err(Error::Precondition("discrimination needs at least two candidates".into()));
    }
    for cand in candidates {
        check_dim(ic.target_dim(), cand.dim())?;
    }
    for (i, a) in candidates.iter().enumerate() {
        for (j, b) in candidates.iter().enumerate().skip(i + 1) {
            if a.ray_eq(b) {
                return Err(Error::Precondition(format!("candidates {i} and {j} are the same ray")));
            }
        }
    }
    let rec = reconstruct_single_copy(sys, ic, shots)?;
    let estimate = QuantumState::Mixed(rec.estimate.clone());
    let fidelities = candidates
        .iter()
        .map(|cand| fidelity(&cand.clone().into(), &estimate))
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..fidelities.len()).collect();
    order.sort_by(|&a, &b| fidelities[b].total_cmp(&fidelities[a]));
    if fidelities[order[0]] - fidelities[order[1]] <= 1e-9 {
        return Err(Error::InsufficientShots(format!(
            "candidates {} and {} tie at fidelity {:.12}",
            order[0], order[1], fidelities[order[0]]
        )));
    }
    Ok(Discrimination {
        index: order[0],
        fidelities,
    })
}

/// Distinct eigenvalues seen in `shots` passive measurements of `obs`,
/// ascending. An eigenvalue of Born weight `p` is missed with probability
/// `(1 - p)^shots`.
pub fn estimate_spectrum(sys: &mut PSystem, obs: &Observable, shots: usize) -> Result<Vec<f64>> {
    sys.require_passive("spectrum estimation")?;
    let rec = sys.repeated_measure(obs, shots)?;
    let mut seen: Vec<f64> = rec.outcomes;
    seen.sort_by(f64::total_cmp);
    seen.dedup();
    Ok(seen)
}
