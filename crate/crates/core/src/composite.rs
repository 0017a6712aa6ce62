//! Two-party systems: local and global measurements, joint statistics,
//! CHSH, entanglement detection on one copy and signalling checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::stats::tv_distance;
use crate::hilbert::{c, check_dim, hermitize, trace, CMatrix, DensityOperator, QuantumState, Tensor};
use crate::measurement::{
    born_distribution, draw_uniform, passive_update, projector_probabilities, sample_outcome, Ensemble,
    Observable, PSystem,
};
use crate::tomography::{reconstruct_single_copy, ICSet};

/// Purity at or above which the reduced state counts as pure.
pub const PRODUCT_PURITY: f64 = 0.95;
/// Purity at or below which the reduced state counts as mixed.
pub const ENTANGLED_PURITY: f64 = 0.90;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::A => 0,
            Side::B => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LocalSetting {
    pub side: Side,
    pub observable: Observable,
}

impl LocalSetting {
    pub fn new(side: Side, observable: Observable) -> Self {
        Self { side, observable }
    }

    pub fn a(observable: Observable) -> Self {
        Self::new(Side::A, observable)
    }

    pub fn b(observable: Observable) -> Self {
        Self::new(Side::B, observable)
    }
}

fn require_bipartite(shape: &[usize]) -> Result<()> {
    if shape.len() != 2 {
        return Err(Error::InvalidShape(format!("expected a bipartite shape, got {shape:?}")));
    }
    Ok(())
}

/// `A ⊗ I` or `I ⊗ B`, with projectors `P_r ⊗ I` / `I ⊗ P_r`.
pub fn lift_local(setting: &LocalSetting, shape: &[usize]) -> Result<Observable> {
    require_bipartite(shape)?;
    check_dim(shape[setting.side.index()], setting.observable.dim())?;
    setting.observable.embed(setting.side.index(), shape)
}

/// Outcome counts over the full grid of `(a, b)` eigenvalue pairs, `a`
/// major, both ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct JointFrequencyTable {
    pub rows: Vec<(f64, f64, u64)>,
    pub total: u64,
}

/// Exact joint probabilities on the same grid as [`JointFrequencyTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub rows: Vec<(f64, f64, f64)>,
}

fn grid<T: Copy>(a: &Observable, b: &Observable, values: impl Fn(usize, usize) -> T) -> Vec<(f64, f64, T)> {
    let mut rows = Vec::with_capacity(a.outcome_count() * b.outcome_count());
    for (i, &x) in a.eigenvalues().iter().enumerate() {
        for (j, &y) in b.eigenvalues().iter().enumerate() {
            rows.push((x, y, values(i, j)));
        }
    }
    rows
}

impl JointFrequencyTable {
    fn from_indices(a: &Observable, b: &Observable, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let nb = b.outcome_count();
        let mut counts = vec![0u64; a.outcome_count() * nb];
        for (i, j) in pairs {
            counts[i * nb + j] += 1;
        }
        let total = counts.iter().sum();
        Self {
            rows: grid(a, b, |i, j| counts[i * nb + j]),
            total,
        }
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.2 as f64 / self.total.max(1) as f64).collect()
    }

    /// Rows with a nonzero count.
    pub fn observed(&self) -> Vec<(f64, f64, u64)> {
        self.rows.iter().copied().filter(|r| r.2 > 0).collect()
    }

    pub fn frequency(&self, a: f64, b: f64) -> f64 {
        self.rows
            .iter()
            .find(|r| r.0 == a && r.1 == b)
            .map_or(0.0, |r| r.2 as f64 / self.total.max(1) as f64)
    }

    fn marginal(&self, pick: impl Fn(&(f64, f64, u64)) -> f64) -> Vec<(f64, f64)> {
        let mut values: Vec<f64> = self.rows.iter().map(&pick).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        values
            .into_iter()
            .map(|v| {
                let k: u64 = self.rows.iter().filter(|r| pick(r) == v).map(|r| r.2).sum();
                (v, k as f64 / self.total.max(1) as f64)
            })
            .collect()
    }

    pub fn marginal_a(&self) -> Vec<(f64, f64)> {
        self.marginal(|r| r.0)
    }

    pub fn marginal_b(&self) -> Vec<(f64, f64)> {
        self.marginal(|r| r.1)
    }

    /// Product of the empirical marginals, laid out on the table's grid.
    pub fn product_of_marginals(&self) -> Vec<f64> {
        let ma = self.marginal_a();
        let mb = self.marginal_b();
        let lookup = |m: &[(f64, f64)], v: f64| m.iter().find(|e| e.0 == v).map_or(0.0, |e| e.1);
        self.rows.iter().map(|r| lookup(&ma, r.0) * lookup(&mb, r.1)).collect()
    }
}

impl JointDistribution {
    pub fn probabilities(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.2).collect()
    }

    pub fn probability(&self, a: f64, b: f64) -> f64 {
        self.rows.iter().find(|r| r.0 == a && r.1 == b).map_or(0.0, |r| r.2)
    }
}

fn normalize(mut p: Vec<f64>) -> Vec<f64> {
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        p.iter_mut().for_each(|x| *x /= total);
    }
    p
}

fn joint_projectors(a: &Observable, b: &Observable) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(a.outcome_count() * b.outcome_count());
    for p in a.projectors() {
        for q in b.projectors() {
            out.push(p.tensor(q));
        }
    }
    out
}

fn check_pair(shape: &[usize], a: &Observable, b: &Observable) -> Result<()> {
    require_bipartite(shape)?;
    check_dim(shape[0], a.dim())?;
    check_dim(shape[1], b.dim())
}

/// `p(a, b) = Tr[(P_a ⊗ Q_b) ρ]`.
pub fn global_joint_distribution(state: &QuantumState, a: &Observable, b: &Observable) -> Result<JointDistribution> {
    check_pair(state.shape(), a, b)?;
    let probs = normalize(projector_probabilities(&joint_projectors(a, b), state)?);
    let nb = b.outcome_count();
    Ok(JointDistribution {
        rows: grid(a, b, |i, j| probs[i * nb + j]),
    })
}

/// Reduced state of one side, renormalized to unit trace.
pub fn reduced_state(state: &QuantumState, side: Side) -> Result<DensityOperator> {
    require_bipartite(state.shape())?;
    let rho = state.partial_trace(side.index())?;
    let tr = trace(rho.matrix()).re;
    let m = hermitize(&(rho.matrix() * c(1.0 / tr, 0.0)));
    Ok(DensityOperator::from_parts_unchecked(m, rho.shape().to_vec()))
}

fn local_marginal(state: &QuantumState, setting: &LocalSetting) -> Result<Vec<f64>> {
    let rho = QuantumState::Mixed(reduced_state(state, setting.side)?);
    Ok(normalize(born_distribution(&setting.observable, &rho)?.probabilities()))
}

/// Independent-marginal model for simultaneous local passive measurements:
/// `p(a, b) = p_A(a) p_B(b)`, each marginal taken from the reduced state.
pub fn local_passive_joint_distribution(
    state: &QuantumState,
    a: &LocalSetting,
    b: &LocalSetting,
) -> Result<JointDistribution> {
    lift_local(a, state.shape())?;
    lift_local(b, state.shape())?;
    let pa = local_marginal(state, a)?;
    let pb = local_marginal(state, b)?;
    Ok(JointDistribution {
        rows: grid(&a.observable, &b.observable, |i, j| pa[i] * pb[j]),
    })
}

/// `shots` global measurements of the joint family `{P_a ⊗ Q_b}` on the
/// one passive system `sys`.
pub fn global_joint_sample(
    sys: &mut PSystem,
    a: &Observable,
    b: &Observable,
    shots: usize,
) -> Result<JointFrequencyTable> {
    if sys.mode() == crate::measurement::Mode::Quantum {
        return Err(Error::EnsembleRequired);
    }
    check_pair(sys.state().shape(), a, b)?;
    let nb = b.outcome_count();
    let indices = sys.sample_passive(&joint_projectors(a, b), shots)?;
    Ok(JointFrequencyTable::from_indices(a, b, indices.into_iter().map(|k| (k / nb, k % nb))))
}

/// Quantum-mode counterpart of [`global_joint_sample`]: one fresh copy per
/// shot, each collapsed by its measurement.
pub fn global_joint_sample_ensemble(
    ensemble: &mut Ensemble,
    a: &Observable,
    b: &Observable,
    shots: usize,
) -> Result<JointFrequencyTable> {
    check_pair(ensemble.preparation().shape(), a, b)?;
    let nb = b.outcome_count();
    let projectors = joint_projectors(a, b);
    let name = format!("{}x{}", a.name(), b.name());
    let mut pairs = Vec::with_capacity(shots);
    for _ in 0..shots {
        let k = ensemble.fresh_copy().measure_projectors(&name, &projectors)?;
        pairs.push((k / nb, k % nb));
    }
    Ok(JointFrequencyTable::from_indices(a, b, pairs))
}

/// Per shot, `a` is drawn from the Born distribution of `A ⊗ I` and then
/// `b` independently from that of `I ⊗ B`. Passive mode only.
pub fn local_passive_joint_sample(
    sys: &mut PSystem,
    a: &LocalSetting,
    b: &LocalSetting,
    shots: usize,
) -> Result<JointFrequencyTable> {
    sys.require_passive("local joint sampling")?;
    let shape = sys.state().shape().to_vec();
    let la = lift_local(a, &shape)?;
    let lb = lift_local(b, &shape)?;
    let pa = projector_probabilities(la.projectors(), sys.state())?;
    let pb = projector_probabilities(lb.projectors(), sys.state())?;
    let rng = sys.rng_mut();
    let pairs: Vec<(usize, usize)> = (0..shots)
        .map(|_| {
            let i = sample_outcome(&pa, draw_uniform(rng));
            let j = sample_outcome(&pb, draw_uniform(rng));
            (i, j)
        })
        .collect();
    Ok(JointFrequencyTable::from_indices(&a.observable, &b.observable, pairs))
}

fn dichotomic(v: f64) -> Result<f64> {
    if (v.abs() - 1.0).abs() > 1e-9 {
        return Err(Error::NonDichotomic(v));
    }
    Ok(v.signum())
}

/// `E(a, b) = Σ a b count / total` for ±1-valued outcomes.
pub fn correlator(table: &JointFrequencyTable) -> Result<f64> {
    if table.total == 0 {
        return Err(Error::InvalidArgument("empty table".into()));
    }
    let mut sum = 0i64;
    for &(a, b, k) in &table.rows {
        let sign = dichotomic(a)? * dichotomic(b)?;
        sum += sign as i64 * k as i64;
    }
    Ok(sum as f64 / table.total as f64)
}

pub fn exact_correlator(dist: &JointDistribution) -> Result<f64> {
    dist.rows
        .iter()
        .map(|&(a, b, p)| Ok(dichotomic(a)? * dichotomic(b)? * p))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JointSource {
    LocalPassive,
    Global,
}

/// Two dichotomic settings per side.
#[derive(Debug, Clone)]
pub struct ChshSettings {
    pub a: [Observable; 2],
    pub b: [Observable; 2],
}

impl ChshSettings {
    pub fn new(a: [Observable; 2], b: [Observable; 2]) -> Result<Self> {
        for o in a.iter().chain(&b) {
            if !o.is_dichotomic() {
                let bad = o.eigenvalues().iter().copied().find(|v| (v.abs() - 1.0).abs() > 1e-9);
                return Err(Error::NonDichotomic(bad.unwrap_or(f64::NAN)));
            }
        }
        Ok(Self { a, b })
    }

    /// A: Z, X; B: (Z + X)/√2, (Z - X)/√2.
    pub fn tsirelson() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = crate::hilbert::gates::pauli_z();
        let x = crate::hilbert::gates::pauli_x();
        let b1 = Observable::new("(Z+X)/sqrt2", (&z + &x) * c(s, 0.0)).expect("Hermitian");
        let b2 = Observable::new("(Z-X)/sqrt2", (&z - &x) * c(s, 0.0)).expect("Hermitian");
        Self {
            a: [Observable::pauli("Z").expect("Z"), Observable::pauli("X").expect("X")],
            b: [b1, b2],
        }
    }

    fn pairs(&self) -> [(&Observable, &Observable); 4] {
        [
            (&self.a[0], &self.b[0]),
            (&self.a[0], &self.b[1]),
            (&self.a[1], &self.b[0]),
            (&self.a[1], &self.b[1]),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshResult {
    pub value: f64,
    /// `E(A1B1), E(A1B2), E(A2B1), E(A2B2)`.
    pub correlators: [f64; 4],
}

fn combine(e: [f64; 4]) -> ChshResult {
    ChshResult {
        value: e[0] + e[1] + e[2] - e[3],
        correlators: e,
    }
}

/// `S = E(A1B1) + E(A1B2) + E(A2B1) - E(A2B2)`, each term from `shots`
/// passive samples of the chosen source on the one system `sys`.
pub fn chsh_value(sys: &mut PSystem, settings: &ChshSettings, source: JointSource, shots: usize) -> Result<ChshResult> {
    let mut e = [0.0; 4];
    for (slot, (a, b)) in e.iter_mut().zip(settings.pairs()) {
        let table = match source {
            JointSource::Global => global_joint_sample(sys, a, b, shots)?,
            JointSource::LocalPassive => {
                local_passive_joint_sample(sys, &LocalSetting::a(a.clone()), &LocalSetting::b(b.clone()), shots)?
            }
        };
        *slot = correlator(&table)?;
    }
    Ok(combine(e))
}

/// Exact CHSH value of `state` for the chosen source.
pub fn exact_chsh_value(state: &QuantumState, settings: &ChshSettings, source: JointSource) -> Result<ChshResult> {
    let mut e = [0.0; 4];
    for (slot, (a, b)) in e.iter_mut().zip(settings.pairs()) {
        let dist = match source {
            JointSource::Global => global_joint_distribution(state, a, b)?,
            JointSource::LocalPassive => {
                local_passive_joint_distribution(state, &LocalSetting::a(a.clone()), &LocalSetting::b(b.clone()))?
            }
        };
        *slot = exact_correlator(&dist)?;
    }
    Ok(combine(e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntanglementVerdict {
    Product,
    Entangled,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementReport {
    pub verdict: EntanglementVerdict,
    pub reduced_estimate: DensityOperator,
    pub purity: f64,
}

/// Reconstructs side A of a pure bipartite state from one copy and
/// classifies it by purity.
pub fn detect_entanglement_single_copy(sys: &mut PSystem, shots: usize) -> Result<EntanglementReport> {
    sys.require_passive("single-copy entanglement detection")?;
    let shape = sys.state().shape().to_vec();
    require_bipartite(&shape)?;
    if sys.state().as_pure().is_none() {
        return Err(Error::Precondition("entanglement detection expects a pure bipartite state".into()));
    }
    let ic = ICSet::standard(shape[0])?.local(0, &shape)?;
    let rec = reconstruct_single_copy(sys, &ic, shots)?;
    let purity = rec.estimate.purity();
    let verdict = if purity >= PRODUCT_PURITY {
        EntanglementVerdict::Product
    } else if purity <= ENTANGLED_PURITY {
        EntanglementVerdict::Entangled
    } else {
        EntanglementVerdict::Inconclusive
    };
    Ok(EntanglementReport {
        verdict,
        reduced_estimate: rec.estimate,
        purity,
    })
}

/// What side A does before B measures.
#[derive(Debug, Clone)]
pub enum AliceAction {
    None,
    PassiveMeasure(Observable),
    QuantumNonSelective(Observable),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignallingReport {
    pub without_action: Vec<f64>,
    pub with_action: Vec<f64>,
    pub tv: f64,
}

/// B's exact outcome distribution with and without A's action.
pub fn signalling_check(state: &QuantumState, action: &AliceAction, b_obs: &Observable) -> Result<SignallingReport> {
    let shape = state.shape().to_vec();
    let lifted_b = lift_local(&LocalSetting::b(b_obs.clone()), &shape)?;
    let after = match action {
        AliceAction::None => state.clone(),
        AliceAction::PassiveMeasure(obs) => {
            let lifted = lift_local(&LocalSetting::a(obs.clone()), &shape)?;
            let probs = born_distribution(&lifted, state)?.probabilities();
            let r = probs
                .iter()
                .position(|&p| p > crate::measurement::ZERO_PROBABILITY)
                .ok_or_else(|| Error::Precondition("no realizable outcome".into()))?;
            passive_update(state, &lifted, r)?
        }
        AliceAction::QuantumNonSelective(obs) => {
            let lifted = lift_local(&LocalSetting::a(obs.clone()), &shape)?;
            let rho = state.to_density();
            let d = rho.dim();
            let m = lifted
                .projectors()
                .iter()
                .fold(CMatrix::zeros(d, d), |acc, p| acc + p * rho.matrix() * p);
            QuantumState::Mixed(DensityOperator::from_parts_unchecked(hermitize(&m), shape.clone()))
        }
    };
    let without_action = born_distribution(&lifted_b, state)?.probabilities();
    let with_action = born_distribution(&lifted_b, &after)?.probabilities();
    let tv = tv_distance(&without_action, &with_action)?;
    Ok(SignallingReport {
        without_action,
        with_action,
        tv,
    })
}
