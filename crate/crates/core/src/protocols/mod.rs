//! End-to-end scenarios that behave differently under collapse and under
//! passive measurement.

mod cloning;
mod mixtures;
mod oracle;
mod simulation;
mod teleportation;

pub use cloning::{clone_via_reconstruction, no_cloning_check, CloneResult, NoCloningReport};
pub use mixtures::{proper_vs_improper, MixtureKind, MixtureReport, MixtureSource};
pub use oracle::{deutsch_jozsa_verdict, function_recovery, oracle_unitary, FunctionRecovery, OracleSpec, Promise};
pub use simulation::{eigenstate_library, simulate_qt_bipartite, simulate_qt_single, QtSimulation};
pub use teleportation::{teleportation_demo, TeleportationResult};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::QuantumState;
use crate::measurement::{born_distribution, Ensemble, Mode, Observable, PSystem};

/// Exact resource counts of one protocol run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Resources {
    pub oracle_calls: u64,
    pub copies_consumed: u64,
    pub shots: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub protocol: String,
    pub mode: Mode,
    pub resources: Resources,
    pub verdicts: BTreeMap<String, String>,
    pub fidelities: BTreeMap<String, f64>,
    pub log: Vec<String>,
}

impl ProtocolReport {
    pub(crate) fn new(protocol: &str, mode: Mode) -> Self {
        Self {
            protocol: protocol.to_string(),
            mode,
            resources: Resources::default(),
            verdicts: BTreeMap::new(),
            fidelities: BTreeMap::new(),
            log: Vec::new(),
        }
    }

    pub(crate) fn step(&mut self, line: impl Into<String>) {
        self.log.push(line.into());
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Repeatability {
    pub trials: u64,
    pub agreements: u64,
    pub rate: f64,
    /// 1 under collapse, `Σ p_r²` for passive measurements.
    pub expected_rate: f64,
    pub copies_consumed: u64,
}

/// Measures `obs` twice in a row, `trials` times, and counts how often the
/// two outcomes agree. Quantum mode takes a fresh copy per trial; passive
/// mode reuses one system throughout.
pub fn repeatability_experiment(
    state: &QuantumState,
    obs: &Observable,
    mode: Mode,
    trials: u64,
    seed: u64,
) -> Result<Repeatability> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is needed".into()));
    }
    let collision = born_distribution(obs, state)?.collision_probability();
    let mut agreements = 0;
    let copies_consumed = match mode {
        Mode::Quantum => {
            let mut ensemble = Ensemble::new(state.clone(), seed);
            for _ in 0..trials {
                let mut sys = ensemble.fresh_copy();
                if sys.measure(obs)? == sys.measure(obs)? {
                    agreements += 1;
                }
            }
            ensemble.copies_consumed()
        }
        Mode::Passive => {
            let mut sys = PSystem::new(state.clone(), Mode::Passive, seed);
            for _ in 0..trials {
                if sys.measure(obs)? == sys.measure(obs)? {
                    agreements += 1;
                }
            }
            1
        }
    };
    Ok(Repeatability {
        trials,
        agreements,
        rate: agreements as f64 / trials as f64,
        expected_rate: match mode {
            Mode::Quantum => 1.0,
            Mode::Passive => collision,
        },
        copies_consumed,
    })
}

#[cfg(test)]
mod tests;
