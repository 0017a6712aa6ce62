//! Experiment configuration: the JSON schema, preset names, and the
//! conversion of config entries into states and observables.

use serde::{Deserialize, Serialize};

use crate::composite::JointSource;
use crate::error::{Error, Result};
use crate::hilbert::{
    c, check_hermitian, gates, haar_random_state, hermitize, validate_shape, BellState, CMatrix, CVector,
    DensityOperator, QuantumState, StateVector, UnitaryOperator,
};
use crate::measurement::{Mode, Observable};
use crate::protocols::{MixtureKind, Promise};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Smallest norm an explicit amplitude list may have before rescaling.
pub const MIN_STATE_NORM: f64 = 1e-6;
/// Tolerance on the Hermiticity of explicit observable matrices.
pub const MATRIX_HERMITIAN_TOL: f64 = 1e-8;

/// Protocol identifiers accepted in the `protocol` field, with a one-line
/// description each.
pub const PROTOCOLS: &[(&str, &str)] = &[
    ("born-sampling", "repeated measurement of one observable against its Born distribution"),
    ("chsh", "CHSH value from global or local-passive joint sampling"),
    ("clone", "copy a system by single-copy reconstruction"),
    ("deutsch-jozsa", "constant-or-balanced decision for a promised oracle"),
    ("discriminate", "identify which candidate ray a single system is in"),
    ("entanglement", "product-or-entangled decision from one bipartite copy"),
    ("function-recovery", "learn a full oracle truth table"),
    ("global-joint", "joint outcome table of a global measurement"),
    ("local-joint", "joint outcome table of two local passive measurements"),
    ("no-cloning", "copy fidelities of a candidate cloning unitary"),
    ("proper-vs-improper", "tell a proper mixture from a reduced state"),
    ("reconstruct", "single-copy state reconstruction"),
    ("repeatability", "agreement of consecutive outcomes"),
    ("signalling", "effect of one party's measurement on the other's statistics"),
    ("simulate-qt", "emulate collapse by swapping in a prepared system"),
    ("spectrum", "eigenvalues of an observable seen on one system"),
    ("teleportation", "three-qubit teleportation circuit"),
];

/// A preset name or explicit amplitudes as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Preset(String),
    Amplitudes(Vec<[f64; 2]>),
}

/// A preset name, or matrix entries as `[re, im]` pairs, either flat in
/// row-major order or as a list of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableSpec {
    Preset(String),
    Flat(Vec<[f64; 2]>),
    Rows(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureEntry {
    pub state: StateSpec,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionSpec {
    None,
    PassiveMeasure,
    QuantumMeasureNonselective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IcSpec {
    Standard,
    Pauli,
    GellMann,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub protocol: String,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observables: Vec<ObservableSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ic: Option<IcSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsystem: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<JointSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_table: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub promise: Option<Promise>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mixture: Vec<MixtureEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<MixtureKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<ObservableSpec>,
}

fn default_mode() -> Mode {
    Mode::Passive
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { "<document>".to_string() } else { path };
        Error::config(field, e.into_inner().to_string())
    })?;
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every field the protocol uses, resolving presets and explicit
    /// entries exactly as a run would.
    pub fn validate(&self) -> Result<()> {
        if !PROTOCOLS.iter().any(|(id, _)| *id == self.protocol) {
            return Err(Error::config("protocol", format!("unknown protocol `{}`", self.protocol)));
        }
        if self.name.trim().is_empty() {
            return Err(Error::config("name", "must not be empty"));
        }
        if self.shots == Some(0) {
            return Err(Error::config("shots", "must be at least 1"));
        }
        if self.trials == Some(0) {
            return Err(Error::config("trials", "must be at least 1"));
        }
        self.declared_shape()?;
        if self.initial_state.is_some() {
            self.state()?;
        }
        for i in 0..self.observables.len() {
            self.observable(i)?;
        }
        for i in 0..self.candidates.len() {
            self.candidate(i)?;
        }
        if !self.mixture.is_empty() {
            self.mixture_components()?;
        }
        if self.unitary.is_some() {
            self.unitary_operator()?;
        }
        crate::harness::run::check_requirements(self)
    }

    /// Shape from `shape` or `dimension`, if either is given.
    pub fn declared_shape(&self) -> Result<Option<Vec<usize>>> {
        match (&self.shape, self.dimension) {
            (Some(_), Some(_)) => Err(Error::config("dimension", "give either `shape` or `dimension`, not both")),
            (Some(s), None) => {
                validate_shape(s, s.iter().product()).map_err(|e| Error::config("shape", e.to_string()))?;
                Ok(Some(s.clone()))
            }
            (None, Some(d)) => {
                validate_shape(&[d], d).map_err(|e| Error::config("dimension", e.to_string()))?;
                Ok(Some(vec![d]))
            }
            (None, None) => Ok(None),
        }
    }

    pub fn state(&self) -> Result<QuantumState> {
        let spec = self
            .initial_state
            .as_ref()
            .ok_or_else(|| Error::config("initial_state", "required by this protocol"))?;
        resolve_state(spec, self.declared_shape()?.as_deref()).map_err(|r| Error::config("initial_state", r))
    }

    /// Shape of the system the protocol acts on.
    pub fn system_shape(&self) -> Result<Vec<usize>> {
        match self.declared_shape()? {
            Some(s) => Ok(s),
            None if self.initial_state.is_some() => Ok(self.state()?.shape().to_vec()),
            None => Ok(vec![2]),
        }
    }

    pub fn observable(&self, index: usize) -> Result<Observable> {
        let field = format!("observables[{index}]");
        let spec = self
            .observables
            .get(index)
            .ok_or_else(|| Error::config(&field, "required by this protocol"))?;
        resolve_observable(spec).map_err(|r| Error::config(field, r))
    }

    pub fn candidate(&self, index: usize) -> Result<StateVector> {
        let field = format!("candidates[{index}]");
        let shape = self.declared_shape()?;
        let state = resolve_state(&self.candidates[index], shape.as_deref()).map_err(|r| Error::config(&field, r))?;
        state
            .as_pure()
            .cloned()
            .ok_or_else(|| Error::config(field, "candidates must be pure states"))
    }

    pub fn candidates(&self) -> Result<Vec<StateVector>> {
        (0..self.candidates.len()).map(|i| self.candidate(i)).collect()
    }

    pub fn mixture_components(&self) -> Result<Vec<(StateVector, f64)>> {
        let shape = self.declared_shape()?;
        let mut out = Vec::with_capacity(self.mixture.len());
        for (i, entry) in self.mixture.iter().enumerate() {
            let field = format!("mixture[{i}]");
            if !(entry.weight > 0.0 && entry.weight.is_finite()) {
                return Err(Error::config(format!("{field}.weight"), "must be positive"));
            }
            let state =
                resolve_state(&entry.state, shape.as_deref()).map_err(|r| Error::config(format!("{field}.state"), r))?;
            let psi = state
                .as_pure()
                .cloned()
                .ok_or_else(|| Error::config(format!("{field}.state"), "mixture members must be pure"))?;
            out.push((psi, entry.weight));
        }
        let total: f64 = out.iter().map(|e| e.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::config("mixture", format!("weights sum to {total}, not 1")));
        }
        Ok(out)
    }

    pub fn unitary_operator(&self) -> Result<UnitaryOperator> {
        let spec = self
            .unitary
            .as_ref()
            .ok_or_else(|| Error::config("unitary", "required by this protocol"))?;
        resolve_unitary(spec).map_err(|r| Error::config("unitary", r))
    }
}

fn explicit_amplitudes(pairs: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(pairs.len(), pairs.iter().map(|p| c(p[0], p[1])))
}

/// Resolves a state entry. `shape` is the declared shape, if any.
pub fn resolve_state(spec: &StateSpec, shape: Option<&[usize]>) -> std::result::Result<QuantumState, String> {
    let qubit = [2usize];
    match spec {
        StateSpec::Amplitudes(pairs) => {
            let v = explicit_amplitudes(pairs);
            let shape = shape.map(<[usize]>::to_vec).unwrap_or_else(|| vec![pairs.len()]);
            if pairs.len() != shape.iter().product::<usize>() {
                return Err(format!("{} amplitudes do not fit shape {shape:?}", pairs.len()));
            }
            if pairs.iter().flatten().any(|x| !x.is_finite()) {
                return Err("amplitudes must be finite".into());
            }
            if v.norm() < MIN_STATE_NORM {
                return Err(format!("norm {:e} is too small to normalize", v.norm()));
            }
            StateVector::normalized(v, shape).map(Into::into).map_err(|e| e.to_string())
        }
        StateSpec::Preset(name) => {
            let shape = shape.unwrap_or(&qubit);
            let (kind, arg) = match name.split_once(':') {
                Some((k, a)) => (k, Some(a)),
                None => (name.as_str(), None),
            };
            let state: QuantumState = match (kind, arg) {
                ("basis", Some(k)) => {
                    let k: usize = k.parse().map_err(|_| format!("bad basis index `{k}`"))?;
                    StateVector::basis(shape, k).map_err(|e| e.to_string())?.into()
                }
                ("plus", None) => {
                    let d: usize = shape.iter().product();
                    StateVector::normalized(CVector::from_element(d, c(1.0, 0.0)), shape.to_vec())
                        .map_err(|e| e.to_string())?
                        .into()
                }
                ("minus", None) if shape == [2] => StateVector::minus().into(),
                ("bell", Some(which)) => {
                    if shape != [2, 2] {
                        return Err(format!("bell states live on shape [2, 2], not {shape:?}"));
                    }
                    let which = match which {
                        "phi+" => BellState::PhiPlus,
                        "phi-" => BellState::PhiMinus,
                        "psi+" => BellState::PsiPlus,
                        "psi-" => BellState::PsiMinus,
                        other => return Err(format!("unknown bell state `{other}`")),
                    };
                    StateVector::bell(which).into()
                }
                ("maximally-mixed", None) => DensityOperator::maximally_mixed(shape).map_err(|e| e.to_string())?.into(),
                ("random-pure", Some(seed)) => {
                    let seed: u64 = seed.parse().map_err(|_| format!("bad seed `{seed}`"))?;
                    haar_random_state(shape, &mut ChaCha20Rng::seed_from_u64(seed))
                        .map_err(|e| e.to_string())?
                        .into()
                }
                _ => return Err(format!("unknown state preset `{name}`")),
            };
            Ok(state)
        }
    }
}

fn explicit_matrix(spec: &ObservableSpec) -> std::result::Result<Option<CMatrix>, String> {
    let entries: Vec<[f64; 2]> = match spec {
        ObservableSpec::Preset(_) => return Ok(None),
        ObservableSpec::Flat(e) => e.clone(),
        ObservableSpec::Rows(rows) => {
            if rows.iter().any(|r| r.len() != rows.len()) {
                return Err("matrix rows must all have as many entries as there are rows".into());
            }
            rows.concat()
        }
    };
    let d = (entries.len() as f64).sqrt().round() as usize;
    if d < 2 || d * d != entries.len() {
        return Err(format!("{} entries do not form a square matrix of size at least 2", entries.len()));
    }
    if entries.iter().flatten().any(|x| !x.is_finite()) {
        return Err("matrix entries must be finite".into());
    }
    Ok(Some(CMatrix::from_fn(d, d, |i, j| {
        let e = entries[i * d + j];
        c(e[0], e[1])
    })))
}

pub fn resolve_observable(spec: &ObservableSpec) -> std::result::Result<Observable, String> {
    match explicit_matrix(spec)? {
        Some(m) => {
            check_hermitian(&m, MATRIX_HERMITIAN_TOL).map_err(|e| e.to_string())?;
            Observable::new("explicit", hermitize(&m)).map_err(|e| e.to_string())
        }
        None => {
            let ObservableSpec::Preset(name) = spec else { unreachable!() };
            match name.split_once(':') {
                Some(("pauli", label)) if !label.is_empty() => Observable::pauli(label).map_err(|e| e.to_string()),
                Some(("basis", d)) => {
                    let d: usize = d.parse().map_err(|_| format!("bad dimension `{d}`"))?;
                    if !(2..=crate::hilbert::MAX_DIM).contains(&d) {
                        return Err(format!("dimension {d} out of range"));
                    }
                    Ok(Observable::computational_basis(d))
                }
                _ => Err(format!("unknown observable preset `{name}`")),
            }
        }
    }
}

pub fn resolve_unitary(spec: &ObservableSpec) -> std::result::Result<UnitaryOperator, String> {
    match explicit_matrix(spec)? {
        Some(m) => UnitaryOperator::new(m).map_err(|e| e.to_string()),
        None => {
            let ObservableSpec::Preset(name) = spec else { unreachable!() };
            match name.as_str() {
                "cnot" => Ok(gates::cnot()),
                "identity:4" => Ok(UnitaryOperator::identity(4)),
                "swap" => Ok(UnitaryOperator::new(gates::permutation_matrix(&[0, 2, 1, 3])).expect("swap")),
                _ => match name.split_once(':') {
                    Some(("copier", d)) => {
                        let d: usize = d.parse().map_err(|_| format!("bad dimension `{d}`"))?;
                        if !(2..=8).contains(&d) {
                            return Err(format!("copier dimension {d} out of range 2..=8"));
                        }
                        Ok(gates::basis_copier(d))
                    }
                    _ => Err(format!("unknown unitary preset `{name}`")),
                },
            }
        }
    }
}
