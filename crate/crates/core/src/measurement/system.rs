use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::{collapse_onto, passive_onto, projector_probabilities, Mode, Observable, ZERO_PROBABILITY};
use crate::error::{Error, Result};
use crate::hilbert::{check_dim, CMatrix, QuantumState};

/// One uniform draw in `[0, 1)`: the top 53 bits of the next `u64` from the
/// stream, scaled by `2^-53`. With [`ChaCha20Rng`] this is identical on
/// every platform.
pub fn draw_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}

/// Inverse-CDF selection over `probs` in their given order. Entries at or
/// below [`ZERO_PROBABILITY`] are never selected; `u` is scaled by the
/// total so small normalization drift cannot push it past the end.
pub fn sample_outcome(probs: &[f64], u: f64) -> usize {
    let total: f64 = probs.iter().filter(|&&p| p > ZERO_PROBABILITY).sum();
    let target = u * total;
    let mut cumulative = 0.0;
    let mut last_live = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= ZERO_PROBABILITY {
            continue;
        }
        cumulative += p;
        last_live = i;
        if target < cumulative {
            return i;
        }
    }
    last_live
}

/// Outcomes of consecutive measurements of one observable on one system.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub observable: String,
    pub mode: Mode,
    pub outcomes: Vec<f64>,
}

impl MeasurementRecord {
    pub fn shots(&self) -> usize {
        self.outcomes.len()
    }

    pub fn frequency_of(&self, value: f64) -> f64 {
        let hits = self.outcomes.iter().filter(|&&a| (a - value).abs() < 1e-9).count();
        hits as f64 / self.outcomes.len().max(1) as f64
    }

    pub fn mean(&self) -> f64 {
        self.outcomes.iter().sum::<f64>() / self.outcomes.len().max(1) as f64
    }
}

/// A single simulated system: its current state, the measurement rule it
/// obeys, and its own random stream.
///
/// Not `Sync`-shared: a system has exactly one owner at a time.
#[derive(Debug, Clone)]
pub struct PSystem {
    state: QuantumState,
    mode: Mode,
    rng: ChaCha20Rng,
    history: Vec<MeasurementRecord>,
}

impl PSystem {
    pub fn new(state: impl Into<QuantumState>, mode: Mode, seed: u64) -> Self {
        Self::with_rng(state, mode, ChaCha20Rng::seed_from_u64(seed))
    }

    pub fn with_rng(state: impl Into<QuantumState>, mode: Mode, rng: ChaCha20Rng) -> Self {
        Self {
            state: state.into(),
            mode,
            rng,
            history: Vec::new(),
        }
    }

    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    pub fn history(&self) -> &[MeasurementRecord] {
        &self.history
    }

    pub fn clear_history(&mut self) {
        self.history.clear();
    }

    pub(crate) fn rng_mut(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    /// Unitary dynamics, the one state change both modes share.
    pub fn evolve(&mut self, u: &crate::hilbert::UnitaryOperator) -> Result<()> {
        self.state = self.state.evolve(u)?;
        Ok(())
    }

    pub fn require_passive(&self, operation: &'static str) -> Result<()> {
        match self.mode {
            Mode::Passive => Ok(()),
            Mode::Quantum => Err(Error::RequiresPassiveMode(operation)),
        }
    }

    fn log(&mut self, name: &str, value: f64) {
        match self.history.last_mut() {
            Some(rec) if rec.observable == name && rec.mode == self.mode => rec.outcomes.push(value),
            _ => self.history.push(MeasurementRecord {
                observable: name.to_string(),
                mode: self.mode,
                outcomes: vec![value],
            }),
        }
    }

    /// Measures an arbitrary projector family (which must resolve the
    /// identity) and applies this system's update rule. Returns the index of
    /// the observed projector.
    pub fn measure_projectors(&mut self, name: &str, projectors: &[CMatrix]) -> Result<usize> {
        let d = self.dim();
        for p in projectors {
            check_dim(d, p.nrows())?;
        }
        let probs = projector_probabilities(projectors, &self.state)?;
        let r = sample_outcome(&probs, draw_uniform(&mut self.rng));
        self.state = match self.mode {
            Mode::Quantum => collapse_onto(&self.state, &projectors[r], r)?,
            Mode::Passive => passive_onto(&self.state, &projectors[r], r)?,
        };
        self.log(name, r as f64);
        Ok(r)
    }

    /// Samples one outcome and applies the mode's update rule. Returns the
    /// observed eigenvalue.
    pub fn measure(&mut self, obs: &Observable) -> Result<f64> {
        check_dim(obs.dim(), self.dim())?;
        let probs = projector_probabilities(obs.projectors(), &self.state)?;
        let r = sample_outcome(&probs, draw_uniform(&mut self.rng));
        self.state = match self.mode {
            Mode::Quantum => collapse_onto(&self.state, &obs.projectors()[r], r)?,
            Mode::Passive => passive_onto(&self.state, &obs.projectors()[r], r)?,
        };
        let value = obs.eigenvalues()[r];
        self.log(obs.name(), value);
        Ok(value)
    }

    /// `n` consecutive measurements of `obs` on this one system.
    ///
    /// Equivalent to calling [`PSystem::measure`] `n` times (same draws, same
    /// outcomes); in passive mode the distribution is computed once since the
    /// state cannot change.
    pub fn repeated_measure(&mut self, obs: &Observable, n: usize) -> Result<MeasurementRecord> {
        if n == 0 {
            return Err(Error::InvalidArgument("repeated_measure needs at least one shot".into()));
        }
        check_dim(obs.dim(), self.dim())?;
        let outcomes = match self.mode {
            Mode::Quantum => (0..n).map(|_| self.measure(obs)).collect::<Result<Vec<_>>>()?,
            Mode::Passive => {
                let indices = self.sample_passive(obs.projectors(), n)?;
                let values: Vec<f64> = indices.iter().map(|&r| obs.eigenvalues()[r]).collect();
                for &v in &values {
                    self.log(obs.name(), v);
                }
                values
            }
        };
        Ok(MeasurementRecord {
            observable: obs.name().to_string(),
            mode: self.mode,
            outcomes,
        })
    }

    /// Draws `n` outcome indices of a projector family without touching the
    /// state or the history. Passive mode only.
    pub(crate) fn sample_passive(&mut self, projectors: &[CMatrix], n: usize) -> Result<Vec<usize>> {
        self.require_passive("repeated sampling on one copy")?;
        let probs = projector_probabilities(projectors, &self.state)?;
        Ok((0..n).map(|_| sample_outcome(&probs, draw_uniform(&mut self.rng))).collect())
    }
}

/// Source of freshly prepared copies of one state, for quantum-mode
/// statistics that need an ensemble.
#[derive(Debug, Clone)]
pub struct Ensemble {
    preparation: QuantumState,
    rng: ChaCha20Rng,
    consumed: u64,
}

impl Ensemble {
    pub fn new(preparation: impl Into<QuantumState>, seed: u64) -> Self {
        Self::with_rng(preparation, ChaCha20Rng::seed_from_u64(seed))
    }

    pub fn with_rng(preparation: impl Into<QuantumState>, rng: ChaCha20Rng) -> Self {
        Self {
            preparation: preparation.into(),
            rng,
            consumed: 0,
        }
    }

    pub fn preparation(&self) -> &QuantumState {
        &self.preparation
    }

    /// A new quantum-mode system in the prepared state, with its own stream
    /// seeded from the ensemble's stream.
    pub fn fresh_copy(&mut self) -> PSystem {
        self.consumed += 1;
        let seed = self.rng.next_u64();
        PSystem::new(self.preparation.clone(), Mode::Quantum, seed)
    }

    pub fn copies_consumed(&self) -> u64 {
        self.consumed
    }
}
