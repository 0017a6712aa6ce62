use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::hilbert::{
    c, gates, hermitize, trace, CMatrix, QuantumState, StateVector, Tensor, UnitaryOperator,
};
use crate::measurement::{Mode, PSystem};

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportationResult {
    /// `(m0, m1)` read off qubits 0 and 1 in each trial.
    pub outcomes: Vec<(u8, u8)>,
    /// Fidelity of Bob's corrected qubit with the input, per trial.
    pub fidelities: Vec<f64>,
    pub mean_fidelity: f64,
    /// Passive mode: Bob's qubit computed from the unmeasured reduced state,
    /// one value per trial. Empty in quantum mode.
    pub analytic_fidelities: Vec<f64>,
}

fn correction(m0: u8, m1: u8) -> CMatrix {
    let x = if m1 == 1 { gates::pauli_x() } else { crate::hilbert::identity(2) };
    let z = if m0 == 1 { gates::pauli_z() } else { crate::hilbert::identity(2) };
    z * x
}

fn normalized_fidelity(psi: &StateVector, rho: &CMatrix) -> f64 {
    let v = psi.amplitudes();
    v.dotc(&(rho * v)).re / v.norm_squared()
}

/// Bob's reduced state, renormalized to unit trace.
fn bob_state(state: &QuantumState) -> Result<CMatrix> {
    let rho = state.partial_trace(2)?;
    let tr = trace(rho.matrix()).re;
    Ok(hermitize(&(rho.matrix() * c(1.0 / tr, 0.0))))
}

/// Runs the three-qubit teleportation circuit `trials` times on
/// `input ⊗ Φ⁺`: CNOT(0→1), H(0), computational-basis measurement of qubits
/// 0 and 1, then `Z^m0 X^m1` on qubit 2.
///
/// Under collapse Bob ends with the input. Passive measurement leaves the
/// three qubits entangled and Bob's qubit stays maximally mixed whatever
/// correction he applies.
pub fn teleportation_demo(input: &StateVector, mode: Mode, trials: usize, seed: u64) -> Result<TeleportationResult> {
    if input.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: input.dim(),
        });
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is needed".into()));
    }
    let input = input.clone().with_shape(vec![2])?;
    let shape = [2, 2, 2];
    let initial = input.tensor(&StateVector::phi_plus());
    let cnot = UnitaryOperator::new(gates::cnot().matrix().tensor(&crate::hilbert::identity(2)))?;
    let h0 = gates::hadamard().embed(0, &shape)?;
    let register: Vec<CMatrix> = (0..4)
        .map(|m| {
            let mut p = CMatrix::zeros(4, 4);
            p[(m, m)] = c(1.0, 0.0);
            p.tensor(&crate::hilbert::identity(2))
        })
        .collect();
    let bob_reference = bob_state(&QuantumState::Pure(initial.clone()))?;

    let mut outcomes = Vec::with_capacity(trials);
    let mut fidelities = Vec::with_capacity(trials);
    let mut analytic_fidelities = Vec::new();
    let mut seeds = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let mut sys = PSystem::new(initial.clone(), mode, seeds.random());
        sys.evolve(&cnot)?;
        sys.evolve(&h0)?;
        let m = sys.measure_projectors("bell", &register)?;
        let (m0, m1) = ((m >> 1) as u8, (m & 1) as u8);
        let fix = correction(m0, m1);
        sys.evolve(&UnitaryOperator::new(fix.clone())?.embed(2, &shape)?)?;
        let bob = bob_state(sys.state())?;
        fidelities.push(normalized_fidelity(&input, &bob));
        outcomes.push((m0, m1));
        if mode == Mode::Passive {
            let corrected = &fix * &bob_reference * fix.adjoint();
            analytic_fidelities.push(normalized_fidelity(&input, &corrected));
        }
    }
    let mean_fidelity = fidelities.iter().sum::<f64>() / trials as f64;
    Ok(TeleportationResult {
        outcomes,
        fidelities,
        mean_fidelity,
        analytic_fidelities,
    })
}
