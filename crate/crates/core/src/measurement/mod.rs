//! Projective measurements under the two competing update rules.
//!
//! In [`Mode::Quantum`] an observed outcome `a_r` projects the state onto
//! the eigenspace of `a_r` (Lüders form). In [`Mode::Passive`] the outcome is
//! drawn from the same Born distribution but the state is left exactly as
//! it was.

mod instrument;
mod system;

pub use instrument::{instrument_nonlinearity, luders_map, nonlinearity_witness, p_instrument_map, Instrument};
pub use system::{draw_uniform, sample_outcome, Ensemble, MeasurementRecord, PSystem};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    self, c, check_dim, embed_operator, gates, identity, spectral_decompose, CMatrix, DensityOperator, QuantumState,
    SpectralDecomposition, StateVector, DEFAULT_DEGENERACY_TOL,
};

/// Outcome probabilities below this are treated as exactly zero.
pub const ZERO_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Quantum,
    Passive,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Quantum => "quantum",
            Mode::Passive => "passive",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantum" => Ok(Mode::Quantum),
            "passive" => Ok(Mode::Passive),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?} (expected quantum|passive)"))),
        }
    }
}

/// Hermitian operator with its spectral decomposition cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    name: String,
    matrix: CMatrix,
    decomposition: SpectralDecomposition,
}

impl Observable {
    pub fn new(name: impl Into<String>, matrix: CMatrix) -> Result<Self> {
        Self::with_degeneracy_tol(name, matrix, DEFAULT_DEGENERACY_TOL)
    }

    pub fn with_degeneracy_tol(name: impl Into<String>, matrix: CMatrix, tol: f64) -> Result<Self> {
        let decomposition = spectral_decompose(&matrix, tol)?;
        Ok(Self {
            name: name.into(),
            matrix,
            decomposition,
        })
    }

    /// Observable defined directly by its eigenvalues and projectors.
    pub fn from_decomposition(name: impl Into<String>, decomposition: SpectralDecomposition) -> Self {
        Self {
            name: name.into(),
            matrix: decomposition.reconstruct(),
            decomposition,
        }
    }

    /// Pauli string such as `"Z"` or `"ZX"`; eigenvalues ±1 with projectors
    /// `(I ∓ σ)/2`. An all-identity string is the trivial observable.
    pub fn pauli(label: &str) -> Result<Self> {
        let sigma = gates::pauli_string(label)?;
        let d = sigma.nrows();
        let name = format!("pauli:{label}");
        if label.chars().all(|ch| ch == 'I') {
            let sd = SpectralDecomposition::from_parts(vec![1.0], vec![identity(d)])?;
            return Ok(Self::from_decomposition(name, sd));
        }
        let half = c(0.5, 0.0);
        let minus = (identity(d) - &sigma) * half;
        let plus = (identity(d) + &sigma) * half;
        let decomposition = SpectralDecomposition::from_parts(vec![-1.0, 1.0], vec![minus, plus])?;
        Ok(Self {
            name,
            matrix: sigma,
            decomposition,
        })
    }

    /// Non-degenerate observable `Σ_k k |k><k|` on the computational basis,
    /// so the outcome value is the basis index.
    pub fn computational_basis(d: usize) -> Self {
        let projectors = (0..d)
            .map(|k| {
                let mut p = CMatrix::zeros(d, d);
                p[(k, k)] = c(1.0, 0.0);
                p
            })
            .collect();
        let sd = SpectralDecomposition::from_parts((0..d).map(|k| k as f64).collect(), projectors)
            .expect("basis projectors are a resolution of the identity");
        Self::from_decomposition(format!("basis:{d}"), sd)
    }

    /// `I ⊗ .. ⊗ A ⊗ .. ⊗ I` keeping the spectrum of `A`: each projector
    /// `P_r` becomes the embedded `I ⊗ P_r ⊗ I`.
    pub fn embed(&self, subsystem: usize, shape: &[usize]) -> Result<Self> {
        let matrix = embed_operator(&self.matrix, subsystem, shape)?;
        let projectors = self
            .decomposition
            .projectors()
            .iter()
            .map(|p| embed_operator(p, subsystem, shape))
            .collect::<Result<Vec<_>>>()?;
        let decomposition = SpectralDecomposition::from_parts(self.decomposition.eigenvalues().to_vec(), projectors)?;
        Ok(Self {
            name: format!("{}@{subsystem}", self.name),
            matrix,
            decomposition,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.decomposition.eigenvalues()
    }

    pub fn projectors(&self) -> &[CMatrix] {
        self.decomposition.projectors()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn outcome_count(&self) -> usize {
        self.decomposition.len()
    }

    /// True when every eigenvalue is ±1.
    pub fn is_dichotomic(&self) -> bool {
        self.eigenvalues().iter().all(|a| (a.abs() - 1.0).abs() < 1e-9)
    }
}

/// Born probabilities of an observable's outcomes, in eigenvalue order.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    outcomes: Vec<(f64, f64)>,
}

impl OutcomeDistribution {
    pub fn new(outcomes: Vec<(f64, f64)>) -> Self {
        Self { outcomes }
    }

    pub fn outcomes(&self) -> &[(f64, f64)] {
        &self.outcomes
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.outcomes.iter().map(|&(_, p)| p).collect()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.outcomes.iter().map(|&(a, _)| a).collect()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.outcomes[index].1
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.outcomes.iter().map(|&(a, p)| a * p).sum()
    }

    /// Probability that two independent draws coincide, `Σ p_r²`.
    pub fn collision_probability(&self) -> f64 {
        self.outcomes.iter().map(|&(_, p)| p * p).sum()
    }
}

pub(crate) fn projector_probabilities(projectors: &[CMatrix], state: &QuantumState) -> Result<Vec<f64>> {
    projectors
        .iter()
        .map(|p| state.expectation(p).map(|x| x.max(0.0)))
        .collect()
}

/// `p(a_r) = ⟨ψ|P_r|ψ⟩`, or `Tr(P_r ρ)` for mixed states. The same numbers
/// apply in both modes.
pub fn born_distribution(obs: &Observable, state: &QuantumState) -> Result<OutcomeDistribution> {
    check_dim(obs.dim(), state.dim())?;
    let probs = projector_probabilities(obs.projectors(), state)?;
    Ok(OutcomeDistribution::new(
        obs.eigenvalues().iter().copied().zip(probs).collect(),
    ))
}

fn realizable_probability(state: &QuantumState, projector: &CMatrix, index: usize) -> Result<f64> {
    let p = state.expectation(projector)?;
    if p <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome { index, probability: p });
    }
    Ok(p)
}

fn projector_at(obs: &Observable, index: usize) -> Result<&CMatrix> {
    obs.projectors().get(index).ok_or(Error::OutcomeOutOfRange {
        index,
        count: obs.outcome_count(),
    })
}

pub(crate) fn collapse_onto(state: &QuantumState, projector: &CMatrix, index: usize) -> Result<QuantumState> {
    check_dim(projector.nrows(), state.dim())?;
    realizable_probability(state, projector, index)?;
    Ok(match state {
        QuantumState::Pure(psi) => {
            let v = projector * psi.amplitudes();
            QuantumState::Pure(StateVector::normalized(v, psi.shape().to_vec())?)
        }
        QuantumState::Mixed(rho) => {
            let m = projector * rho.matrix() * projector;
            let tr = hilbert::trace(&m).re;
            let m = hilbert::hermitize(&(m * c(1.0 / tr, 0.0)));
            QuantumState::Mixed(DensityOperator::from_parts_unchecked(m, rho.shape().to_vec()))
        }
    })
}

/// Projection postulate: `ψ → P_r ψ / ‖P_r ψ‖`, `ρ → P_r ρ P_r / Tr(P_r ρ P_r)`.
pub fn collapse_update(state: &QuantumState, obs: &Observable, outcome_index: usize) -> Result<QuantumState> {
    check_dim(obs.dim(), state.dim())?;
    collapse_onto(state, projector_at(obs, outcome_index)?, outcome_index)
}

pub(crate) fn passive_onto(state: &QuantumState, projector: &CMatrix, index: usize) -> Result<QuantumState> {
    check_dim(projector.nrows(), state.dim())?;
    realizable_probability(state, projector, index)?;
    Ok(state.clone())
}

/// No-update rule: the returned state is the input, bit for bit. The
/// claimed outcome must still be realizable.
pub fn passive_update(state: &QuantumState, obs: &Observable, outcome_index: usize) -> Result<QuantumState> {
    check_dim(obs.dim(), state.dim())?;
    passive_onto(state, projector_at(obs, outcome_index)?, outcome_index)
}

/// Mode-dispatched state update.
pub fn update(mode: Mode, state: &QuantumState, obs: &Observable, outcome_index: usize) -> Result<QuantumState> {
    match mode {
        Mode::Quantum => collapse_update(state, obs, outcome_index),
        Mode::Passive => passive_update(state, obs, outcome_index),
    }
}

/// Mean and variance of the outcome distribution.
pub fn expectation_variance(obs: &Observable, state: &QuantumState) -> Result<(f64, f64)> {
    let dist = born_distribution(obs, state)?;
    let mean = dist.mean();
    let second: f64 = dist.outcomes().iter().map(|&(a, p)| a * a * p).sum();
    Ok((mean, (second - mean * mean).max(0.0)))
}

fn complex_expectation(m: &CMatrix, state: &QuantumState) -> Complex64 {
    match state {
        QuantumState::Pure(psi) => psi.amplitudes().dotc(&(m * psi.amplitudes())),
        QuantumState::Mixed(rho) => hilbert::trace(&(m * rho.matrix())),
    }
}

/// Right-hand side of the Robertson relation, `|⟨[A, B]⟩| / 2`.
pub fn robertson_bound(a: &Observable, b: &Observable, state: &QuantumState) -> Result<f64> {
    check_dim(a.dim(), state.dim())?;
    check_dim(b.dim(), state.dim())?;
    let commutator = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    Ok(complex_expectation(&commutator, state).norm() / 2.0)
}
