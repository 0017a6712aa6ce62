use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::ProtocolReport;
use crate::composite::{lift_local, LocalSetting};
use crate::error::{Error, Result};
use crate::harness::stats::{empirical, tv_distance};
use crate::hilbert::{c, hermitize, trace, CVector, QuantumState, StateVector};
use crate::measurement::{Ensemble, Mode, Observable, PSystem};
use crate::tomography::{reconstruct_single_copy, ICSet};

/// Post-selection gives up after this many fresh copies per accepted one.
const MAX_ATTEMPTS_PER_SHOT: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct QtSimulation {
    pub outcome: f64,
    pub outcome_index: usize,
    pub replacement: QuantumState,
    /// Follow-up outcome frequencies on the replacement, in eigenvalue order.
    pub follow_up_simulated: Vec<f64>,
    /// The same frequencies from quantum-mode runs that saw the same outcome.
    pub follow_up_quantum: Vec<f64>,
    pub tv: f64,
    pub report: ProtocolReport,
}

/// One passive system per non-degenerate eigenvalue of `obs`, prepared in
/// its eigenvector. Degenerate eigenvalues get no entry.
pub fn eigenstate_library(obs: &Observable, shape: &[usize], seed: u64) -> Result<Vec<Option<PSystem>>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    obs.projectors()
        .iter()
        .map(|p| {
            let rank = trace(p).re.round() as usize;
            if rank != 1 {
                return Ok(None);
            }
            let col = (0..p.ncols())
                .max_by(|&a, &b| p.column(a).norm().total_cmp(&p.column(b).norm()))
                .expect("nonempty projector");
            let v: CVector = p.column(col).into_owned();
            let psi = StateVector::normalized(v, shape.to_vec())?;
            Ok(Some(PSystem::new(psi, Mode::Passive, rng.random())))
        })
        .collect()
}

fn follow_up_quantum(
    original: &QuantumState,
    measured: &Observable,
    outcome_index: usize,
    follow_up: &Observable,
    shots: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut ensemble = Ensemble::new(original.clone(), seed);
    let mut counts = vec![0u64; follow_up.outcome_count()];
    let mut accepted = 0;
    while accepted < shots {
        if ensemble.copies_consumed() as usize >= MAX_ATTEMPTS_PER_SHOT * shots {
            return Err(Error::InsufficientShots("outcome too rare to post-select on".into()));
        }
        let mut sys = ensemble.fresh_copy();
        let r = sys.measure_projectors(measured.name(), measured.projectors())?;
        if r != outcome_index {
            continue;
        }
        let b = sys.measure_projectors(follow_up.name(), follow_up.projectors())?;
        counts[b] += 1;
        accepted += 1;
    }
    Ok(empirical(&counts))
}

fn follow_up_passive(sys: &mut PSystem, follow_up: &Observable, shots: usize) -> Result<Vec<f64>> {
    let rec = sys.repeated_measure(follow_up, shots)?;
    let mut counts = vec![0u64; follow_up.outcome_count()];
    for v in rec.outcomes {
        counts[follow_up.decomposition().index_of(v)] += 1;
    }
    Ok(empirical(&counts))
}

fn finish(
    sys: &mut PSystem,
    original: &QuantumState,
    measured: &Observable,
    outcome_index: usize,
    follow_up: &Observable,
    shots: usize,
    seed: u64,
    mut report: ProtocolReport,
) -> Result<QtSimulation> {
    let follow_up_simulated = follow_up_passive(sys, follow_up, shots)?;
    let follow_up_quantum = follow_up_quantum(original, measured, outcome_index, follow_up, shots, seed)?;
    let tv = tv_distance(&follow_up_simulated, &follow_up_quantum)?;
    report.resources.shots += shots as u64;
    report.step(format!("follow-up {} on replacement, TV to quantum run {tv:.4}", follow_up.name()));
    Ok(QtSimulation {
        outcome: measured.eigenvalues()[outcome_index],
        outcome_index,
        replacement: sys.state().clone(),
        follow_up_simulated,
        follow_up_quantum,
        tv,
        report,
    })
}

/// Passive measurement of `obs` on `sys`, after which `sys` is swapped for
/// the library system prepared in the matching eigenstate. The follow-up
/// statistics of `follow_up` on the swapped-in system are compared with
/// quantum-mode runs that saw the same outcome.
pub fn simulate_qt_single(
    sys: &mut PSystem,
    obs: &Observable,
    mut library: Vec<Option<PSystem>>,
    follow_up: &Observable,
    shots: usize,
    seed: u64,
) -> Result<QtSimulation> {
    sys.require_passive("collapse simulation")?;
    let original = sys.state().clone();
    let mut report = ProtocolReport::new("simulate-qt", Mode::Passive);
    let value = sys.measure(obs)?;
    let r = obs.decomposition().index_of(value);
    report.resources.shots = 1;
    report.step(format!("passive {} gave {value}", obs.name()));
    let replacement = library
        .get_mut(r)
        .and_then(Option::take)
        .ok_or_else(|| Error::Precondition(format!("no library system for outcome {value}")))?;
    *sys = replacement;
    report.resources.copies_consumed = 1;
    report.step("swapped in library eigenstate");
    finish(sys, &original, obs, r, follow_up, shots, seed, report)
}

/// Bipartite variant: after the passive measurement of the local setting,
/// the global state is reconstructed from the one system, collapsed by
/// `P_r ⊗ I` (or `I ⊗ P_r`) and a fresh system in the result replaces `sys`.
pub fn simulate_qt_bipartite(
    sys: &mut PSystem,
    setting: &LocalSetting,
    tomography_shots: usize,
    follow_up: &Observable,
    shots: usize,
    seed: u64,
) -> Result<QtSimulation> {
    sys.require_passive("collapse simulation")?;
    let shape = sys.state().shape().to_vec();
    let lifted = lift_local(setting, &shape)?;
    let original = sys.state().clone();
    let mut report = ProtocolReport::new("simulate-qt", Mode::Passive);
    let value = sys.measure(&lifted)?;
    let r = lifted.decomposition().index_of(value);
    report.step(format!("passive {} gave {value}", lifted.name()));

    let ic = ICSet::standard(sys.dim())?;
    let rec = reconstruct_single_copy(sys, &ic, tomography_shots)?;
    report.resources.shots = 1 + (tomography_shots * ic.len()) as u64;
    let eig = hermitize(rec.estimate.matrix()).symmetric_eigen();
    let top = eig.eigenvalues.imax();
    let estimate: CVector = eig.eigenvectors.column(top).into_owned();
    let collapsed = &lifted.projectors()[r] * estimate;
    if collapsed.norm() < 1e-6 {
        return Err(Error::InsufficientShots(format!(
            "reconstructed state has no weight on outcome {value}"
        )));
    }
    let mut collapsed = collapsed.unscale(collapsed.norm());
    // Fix the global phase so the largest amplitude is real and positive.
    let lead = collapsed.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("nonempty");
    collapsed *= c(lead.norm(), 0.0) / lead;
    let psi = StateVector::normalized(collapsed, shape)?;
    report.step(format!("reconstructed global state, principal weight {:.4}", eig.eigenvalues[top]));
    let mut seeds = ChaCha20Rng::seed_from_u64(seed);
    *sys = PSystem::new(psi, Mode::Passive, seeds.random());
    report.resources.copies_consumed = 1;
    finish(sys, &original, &lifted, r, follow_up, shots, seeds.random(), report)
}
