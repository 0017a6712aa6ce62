use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{purify, DensityOperator, QuantumState, StateVector};
use crate::measurement::{draw_uniform, sample_outcome, Mode, PSystem};
use crate::tomography::{reconstruct_single_copy, ICSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixtureKind {
    Proper,
    Improper,
}

/// How a mixed state is handed over: as a classical ensemble of pure
/// states, or as half of a pure bipartite state.
#[derive(Debug, Clone)]
pub enum MixtureSource {
    Proper(Vec<(StateVector, f64)>),
    Improper(StateVector),
}

impl MixtureSource {
    /// The improper presentation of the same average state, via its
    /// standard purification.
    pub fn purification_of(components: &[(StateVector, f64)]) -> Result<Self> {
        Ok(Self::Improper(purify(&DensityOperator::mixture(components)?)))
    }

    pub fn average_state(&self) -> Result<DensityOperator> {
        match self {
            Self::Proper(components) => DensityOperator::mixture(components),
            Self::Improper(psi) => {
                if psi.shape().len() != 2 {
                    return Err(Error::InvalidShape("a purification must be bipartite".into()));
                }
                QuantumState::Pure(psi.clone()).partial_trace(0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureReport {
    pub verdict: MixtureKind,
    pub purities: Vec<f64>,
    pub trial_verdicts: Vec<MixtureKind>,
    pub mean_purity: f64,
    /// Midpoint between 1 and the purity of the average state.
    pub threshold: f64,
    pub average_purity: f64,
}

/// Reconstructs one system per trial and decides from the purity of the
/// estimates whether the mixture was proper or improper.
///
/// Each trial of a proper mixture draws one member state at random and
/// hands over a system in that pure state; each trial of an improper one
/// hands over subsystem A of the purification.
pub fn proper_vs_improper(source: &MixtureSource, trials: usize, shots: usize, seed: u64) -> Result<MixtureReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is needed".into()));
    }
    let average = source.average_state()?;
    let average_purity = average.purity();
    if average_purity > 1.0 - 1e-9 {
        return Err(Error::Precondition(
            "the average state is pure, so the two presentations cannot differ".into(),
        ));
    }
    let threshold = (1.0 + average_purity) / 2.0;
    let d = average.dim();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut purities = Vec::with_capacity(trials);
    for _ in 0..trials {
        let (state, ic) = match source {
            MixtureSource::Proper(components) => {
                let weights: Vec<f64> = components.iter().map(|c| c.1).collect();
                let pick = sample_outcome(&weights, draw_uniform(&mut rng));
                (QuantumState::Pure(components[pick].0.clone()), ICSet::standard(d)?)
            }
            MixtureSource::Improper(psi) => (
                QuantumState::Pure(psi.clone()),
                ICSet::standard(d)?.local(0, psi.shape())?,
            ),
        };
        let mut sys = PSystem::new(state, Mode::Passive, rng.random());
        purities.push(reconstruct_single_copy(&mut sys, &ic, shots)?.estimate.purity());
    }
    let classify = |p: f64| if p >= threshold { MixtureKind::Proper } else { MixtureKind::Improper };
    let mean_purity = purities.iter().sum::<f64>() / trials as f64;
    Ok(MixtureReport {
        verdict: classify(mean_purity),
        trial_verdicts: purities.iter().map(|&p| classify(p)).collect(),
        purities,
        mean_purity,
        threshold,
        average_purity,
    })
}
