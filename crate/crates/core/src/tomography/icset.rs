use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hilbert::{c, identity, trace_product, CMatrix, MAX_DIM};
use crate::measurement::Observable;

/// Largest target dimension for the general Gram-inverse dual frame.
const GENERAL_DUAL_MAX_DIM: usize = 16;

/// Informationally complete observable set plus the linear map from its
/// expectation values back to a state: `ρ = offset + Σ_k ⟨O_k⟩ D_k`.
///
/// The observables may act on a larger system than the reconstructed
/// state (see [`ICSet::local`]); the dual frame always lives on the target
/// space.
#[derive(Debug, Clone)]
pub struct ICSet {
    observables: Vec<Observable>,
    dual: Vec<CMatrix>,
    offset: CMatrix,
    target_shape: Vec<usize>,
    condition_number: f64,
}

fn pauli_labels(n: usize) -> Vec<String> {
    const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];
    (1..4usize.pow(n as u32))
        .map(|mut k| {
            let mut label = vec!['I'; n];
            for slot in label.iter_mut().rev() {
                *slot = LETTERS[k % 4];
                k /= 4;
            }
            label.into_iter().collect()
        })
        .collect()
}

/// Generalized Gell-Mann matrices normalized to `Tr(G_j G_k) = δ_jk`:
/// symmetric, then antisymmetric, then diagonal.
pub(crate) fn gell_mann_basis(d: usize) -> Vec<(String, CMatrix)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = c(s, 0.0);
            m[(k, j)] = c(s, 0.0);
            out.push((format!("gm:sym:{j}{k}"), m));
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = c(0.0, -s);
            m[(k, j)] = c(0.0, s);
            out.push((format!("gm:asym:{j}{k}"), m));
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(d, d);
        for i in 0..l {
            m[(i, i)] = c(norm, 0.0);
        }
        m[(l, l)] = c(-(l as f64) * norm, 0.0);
        out.push((format!("gm:diag:{l}"), m));
    }
    out
}

impl ICSet {
    /// All `4^n - 1` non-identity Pauli strings on `n` qubits, with the
    /// Bloch-expansion dual `ρ = 2^-n (I + Σ ⟨σ_k⟩ σ_k)`.
    pub fn pauli(n_qubits: usize) -> Result<Self> {
        if !(1..=6).contains(&n_qubits) {
            return Err(Error::SizeLimit(format!("Pauli sets support 1 to 6 qubits, got {n_qubits}")));
        }
        let d = 1usize << n_qubits;
        let scale = c(1.0 / d as f64, 0.0);
        let observables = pauli_labels(n_qubits)
            .iter()
            .map(|l| Observable::pauli(l))
            .collect::<Result<Vec<_>>>()?;
        let dual = observables.iter().map(|o| o.matrix() * scale).collect();
        Ok(Self {
            observables,
            dual,
            offset: identity(d) * scale,
            target_shape: vec![2; n_qubits],
            condition_number: 1.0,
        })
    }

    /// Generalized Gell-Mann basis; orthonormal, so the dual frame is the
    /// basis itself: `ρ = I/d + Σ ⟨G_k⟩ G_k`.
    pub fn hermitian_basis(d: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&d) {
            return Err(Error::SizeLimit(format!("dimension {d} outside 2..={MAX_DIM}")));
        }
        let (observables, dual): (Vec<_>, Vec<_>) = gell_mann_basis(d)
            .into_iter()
            .map(|(name, m)| Observable::new(name, m.clone()).map(|o| (o, m)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        Ok(Self {
            observables,
            dual,
            offset: identity(d) * c(1.0 / d as f64, 0.0),
            target_shape: vec![d],
            // Gram of {I, G_k} is diag(d, 1, ..., 1).
            condition_number: d as f64,
        })
    }

    /// Pauli strings when `d` is a power of two, Gell-Mann otherwise.
    pub fn standard(d: usize) -> Result<Self> {
        if d.is_power_of_two() && d >= 2 {
            Self::pauli(d.trailing_zeros() as usize)
        } else {
            Self::hermitian_basis(d)
        }
    }

    /// Canonical dual frame for `d² - 1` arbitrary observables, obtained by
    /// inverting the Gram matrix of `{I, O_1, ..., O_{d²-1}}` under
    /// `Tr(AB)`. Fails if the set does not span the Hermitian matrices.
    pub fn from_observables(observables: Vec<Observable>) -> Result<Self> {
        let d = observables
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty observable set".into()))?
            .dim();
        if d > GENERAL_DUAL_MAX_DIM {
            return Err(Error::SizeLimit(format!(
                "general dual frames support d <= {GENERAL_DUAL_MAX_DIM}, got {d}"
            )));
        }
        if observables.len() != d * d - 1 {
            return Err(Error::InvalidArgument(format!(
                "{} observables cannot form a basis with the identity in dimension {d} (need {})",
                observables.len(),
                d * d - 1
            )));
        }
        let mut basis = vec![identity(d)];
        for o in &observables {
            if o.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: o.dim() });
            }
            basis.push(o.matrix().clone());
        }
        let n = basis.len();
        let gram = DMatrix::<f64>::from_fn(n, n, |i, j| trace_product(&basis[i], &basis[j]));
        let eig = gram.clone().symmetric_eigenvalues();
        let (lo, hi) = eig
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x.abs()), hi.max(x.abs())));
        if !(lo > 1e-10 * hi) {
            return Err(Error::InvalidArgument("observables are not informationally complete".into()));
        }
        let inv = gram
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("singular Gram matrix".into()))?;
        // ρ = Σ_j c_j B_j with c = G⁻¹ (1, e_1, ...): D_k = Σ_j (G⁻¹)_{jk} B_j.
        let combine = |k: usize| {
            basis
                .iter()
                .enumerate()
                .fold(CMatrix::zeros(d, d), |acc, (j, b)| acc + b * c(inv[(j, k)], 0.0))
        };
        let offset = combine(0);
        let dual = (1..n).map(combine).collect();
        Ok(Self {
            observables,
            dual,
            offset,
            target_shape: vec![d],
            condition_number: hi / lo,
        })
    }

    /// The same set applied to subsystem `subsystem` of a composite system.
    /// Reconstruction then yields that subsystem's reduced state.
    pub fn local(&self, subsystem: usize, shape: &[usize]) -> Result<Self> {
        let observables = self
            .observables
            .iter()
            .map(|o| o.embed(subsystem, shape))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            observables,
            ..self.clone()
        })
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn dual_frame(&self) -> &[CMatrix] {
        &self.dual
    }

    pub fn offset(&self) -> &CMatrix {
        &self.offset
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    /// Dimension of the space the observables act on.
    pub fn system_dim(&self) -> usize {
        self.observables[0].dim()
    }

    /// Dimension of the reconstructed state.
    pub fn target_dim(&self) -> usize {
        self.offset.nrows()
    }

    pub fn target_shape(&self) -> &[usize] {
        &self.target_shape
    }

    /// Condition number of the Gram matrix of `{I} ∪ observables`.
    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }
}
