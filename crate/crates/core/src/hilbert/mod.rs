//! Finite-dimensional complex Hilbert spaces: pure states, density operators,
//! unitaries, tensor structure, partial traces and fidelities.
//!
//! Everything here is dense. Subsystem ordering is big-endian: for a shape
//! `[d0, d1, ...]` the basis index of `|i0, i1, ...>` is
//! `i0 * (d1 * d2 ...) + i1 * (d2 ...) + ...`, so subsystem 0 is the most
//! significant digit.

pub mod gates;
mod random;
mod spectral;

pub use random::{haar_random_state, random_density_operator, random_hermitian};
pub use spectral::{spectral_decompose, SpectralDecomposition};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-10;
pub const RAY_TOL: f64 = 1e-10;
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;
/// Largest total dimension handled by the dense representation (six qubits).
pub const MAX_DIM: usize = 64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    assert!(m.is_square());
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn check_hermitian(m: &CMatrix, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidShape(format!(
            "expected a square matrix, found {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = hermitian_deviation(m);
    if dev > tol {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// `(m + m†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().sum()
}

pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `⟨v|M|v⟩`, real part only; callers pass Hermitian `M`.
pub(crate) fn expectation_in(v: &CVector, m: &CMatrix) -> f64 {
    v.dotc(&(m * v)).re
}

/// `Tr(A B)` for Hermitian `A`, `B`, computed without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

pub(crate) fn validate_shape(shape: &[usize], dim: usize) -> Result<()> {
    if shape.is_empty() {
        return Err(Error::InvalidShape("shape must list at least one subsystem".into()));
    }
    if let Some(bad) = shape.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidShape(format!("subsystem dimension {bad} < 2")));
    }
    let product: usize = shape.iter().product();
    if product != dim {
        return Err(Error::InvalidShape(format!(
            "shape {shape:?} has product {product} but the space has dimension {dim}"
        )));
    }
    if dim > MAX_DIM {
        return Err(Error::SizeLimit(format!("dimension {dim} exceeds {MAX_DIM}")));
    }
    Ok(())
}

/// Kronecker product, for states, density operators and raw matrices alike.
pub trait Tensor {
    fn tensor(&self, rhs: &Self) -> Self;
}

impl Tensor for CMatrix {
    fn tensor(&self, rhs: &Self) -> Self {
        self.kronecker(rhs)
    }
}

/// Unit vector in `C^d` together with its subsystem shape.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    shape: Vec<usize>,
}

impl StateVector {
    /// Validating constructor: the squared norm must be 1 within [`NORM_TOL`].
    pub fn new(amplitudes: CVector, shape: Vec<usize>) -> Result<Self> {
        validate_shape(&shape, amplitudes.len())?;
        let norm_sqr = amplitudes.norm_squared();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self { amplitudes, shape })
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(amplitudes: CVector, shape: Vec<usize>) -> Result<Self> {
        validate_shape(&shape, amplitudes.len())?;
        let norm = amplitudes.norm();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        let amplitudes = amplitudes.unscale(norm);
        Ok(Self { amplitudes, shape })
    }

    /// Single-subsystem state from a plain list of amplitudes.
    pub fn from_amplitudes(amps: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps), vec![amps.len()])
    }

    pub(crate) fn from_parts_unchecked(amplitudes: CVector, shape: Vec<usize>) -> Self {
        debug_assert_eq!(shape.iter().product::<usize>(), amplitudes.len());
        Self { amplitudes, shape }
    }

    /// Computational basis vector `|k>` in a space of the given shape.
    pub fn basis(shape: &[usize], k: usize) -> Result<Self> {
        let d: usize = shape.iter().product();
        if k >= d {
            return Err(Error::InvalidArgument(format!("basis index {k} out of range for dimension {d}")));
        }
        let mut v = CVector::zeros(d);
        v[k] = c(1.0, 0.0);
        Self::new(v, shape.to_vec())
    }

    pub fn zero() -> Self {
        Self::basis(&[2], 0).expect("qubit |0>")
    }

    pub fn one() -> Self {
        Self::basis(&[2], 1).expect("qubit |1>")
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_parts_unchecked(CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]), vec![2])
    }

    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_parts_unchecked(CVector::from_vec(vec![c(h, 0.0), c(-h, 0.0)]), vec![2])
    }

    /// Bell state `(|00> + |11>)/√2`.
    pub fn phi_plus() -> Self {
        Self::bell(BellState::PhiPlus)
    }

    pub fn bell(which: BellState) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (a00, a01, a10, a11) = match which {
            BellState::PhiPlus => (h, 0.0, 0.0, h),
            BellState::PhiMinus => (h, 0.0, 0.0, -h),
            BellState::PsiPlus => (0.0, h, h, 0.0),
            BellState::PsiMinus => (0.0, h, -h, 0.0),
        };
        let v = CVector::from_vec(vec![c(a00, 0.0), c(a01, 0.0), c(a10, 0.0), c(a11, 0.0)]);
        Self::from_parts_unchecked(v, vec![2, 2])
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Reinterprets the subsystem structure without touching amplitudes.
    pub fn with_shape(mut self, shape: Vec<usize>) -> Result<Self> {
        validate_shape(&shape, self.dim())?;
        self.shape = shape;
        Ok(self)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|ψ><ψ|`.
    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::from_parts_unchecked(self.projector(), self.shape.clone())
    }

    /// Equality of rays: `|⟨φ|ψ⟩|² = 1` within [`RAY_TOL`].
    pub fn ray_eq(&self, other: &StateVector) -> bool {
        match self.inner(other) {
            Ok(ip) => (ip.norm_sqr() - 1.0).abs() <= RAY_TOL,
            Err(_) => false,
        }
    }

    pub fn evolve(&self, u: &UnitaryOperator) -> Result<Self> {
        check_dim(u.dim(), self.dim())?;
        Ok(Self::from_parts_unchecked(u.matrix() * &self.amplitudes, self.shape.clone()))
    }
}

impl Tensor for StateVector {
    fn tensor(&self, rhs: &Self) -> Self {
        let amps = self.amplitudes.kronecker(&rhs.amplitudes);
        let mut shape = self.shape.clone();
        shape.extend_from_slice(&rhs.shape);
        Self::from_parts_unchecked(amps, shape)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

/// Positive semidefinite, unit-trace Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    shape: Vec<usize>,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix, shape: Vec<usize>) -> Result<Self> {
        check_hermitian(&matrix, HERMITIAN_TOL)?;
        validate_shape(&shape, matrix.nrows())?;
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let min_eig = hermitize(&matrix)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { matrix, shape })
    }

    pub(crate) fn from_parts_unchecked(matrix: CMatrix, shape: Vec<usize>) -> Self {
        debug_assert_eq!(shape.iter().product::<usize>(), matrix.nrows());
        Self { matrix, shape }
    }

    pub fn maximally_mixed(shape: &[usize]) -> Result<Self> {
        let d: usize = shape.iter().product();
        validate_shape(shape, d)?;
        Ok(Self::from_parts_unchecked(identity(d) * c(1.0 / d as f64, 0.0), shape.to_vec()))
    }

    /// Convex combination `Σ w_i |ψ_i><ψ_i|`; weights must be non-negative
    /// and sum to one.
    pub fn mixture(components: &[(StateVector, f64)]) -> Result<Self> {
        let (first, _) = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let shape = first.shape().to_vec();
        let d = first.dim();
        let mut m = CMatrix::zeros(d, d);
        let mut total = 0.0;
        for (psi, w) in components {
            check_dim(d, psi.dim())?;
            if *w < 0.0 || !w.is_finite() {
                return Err(Error::InvalidArgument(format!("mixture weight {w} is not a probability")));
            }
            m += psi.projector() * c(*w, 0.0);
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("mixture weights sum to {total}")));
        }
        Self::new(hermitize(&m), shape)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn with_shape(mut self, shape: Vec<usize>) -> Result<Self> {
        validate_shape(&shape, self.dim())?;
        self.shape = shape;
        Ok(self)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        trace_product(&self.matrix, &self.matrix)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = hermitize(&self.matrix).symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn evolve(&self, u: &UnitaryOperator) -> Result<Self> {
        check_dim(u.dim(), self.dim())?;
        let m = u.matrix() * &self.matrix * u.matrix().adjoint();
        Ok(Self::from_parts_unchecked(m, self.shape.clone()))
    }

    /// Reduced operator on subsystem `keep`, all other subsystems traced out.
    pub fn partial_trace(&self, keep: usize) -> Result<DensityOperator> {
        let n = self.shape.len();
        if n < 2 {
            return Err(Error::InvalidShape("partial trace needs at least two subsystems".into()));
        }
        if keep >= n {
            return Err(Error::InvalidSubsystem { index: keep, count: n });
        }
        let dk = self.shape[keep];
        let stride: usize = self.shape[keep + 1..].iter().product();
        let d = self.dim();
        let mut out = CMatrix::zeros(dk, dk);
        // Split a full index into (kept digit, environment index).
        let split = |i: usize| {
            let digit = (i / stride) % dk;
            let env = (i / (stride * dk)) * stride + i % stride;
            (digit, env)
        };
        for i in 0..d {
            let (ik, ie) = split(i);
            for j in 0..d {
                let (jk, je) = split(j);
                if ie == je {
                    out[(ik, jk)] += self.matrix[(i, j)];
                }
            }
        }
        Ok(DensityOperator::from_parts_unchecked(out, vec![dk]))
    }
}

impl Tensor for DensityOperator {
    fn tensor(&self, rhs: &Self) -> Self {
        let mut shape = self.shape.clone();
        shape.extend_from_slice(&rhs.shape);
        Self::from_parts_unchecked(self.matrix.kronecker(&rhs.matrix), shape)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidShape("unitary must be square".into()));
        }
        let d = matrix.nrows();
        let dev = max_abs_diff(&(matrix.adjoint() * &matrix), &identity(d));
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: identity(d) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &UnitaryOperator) -> Result<Self> {
        check_dim(self.dim(), first.dim())?;
        Ok(Self {
            matrix: &self.matrix * &first.matrix,
        })
    }

    /// Acts with `self` on subsystem `index` of a space with the given shape.
    pub fn embed(&self, index: usize, shape: &[usize]) -> Result<Self> {
        Ok(Self {
            matrix: embed_operator(&self.matrix, index, shape)?,
        })
    }
}

impl Tensor for UnitaryOperator {
    fn tensor(&self, rhs: &Self) -> Self {
        Self {
            matrix: self.matrix.kronecker(&rhs.matrix),
        }
    }
}

/// `I ⊗ ... ⊗ op ⊗ ... ⊗ I` with `op` on subsystem `index`.
pub fn embed_operator(op: &CMatrix, index: usize, shape: &[usize]) -> Result<CMatrix> {
    if index >= shape.len() {
        return Err(Error::InvalidSubsystem {
            index,
            count: shape.len(),
        });
    }
    check_dim(shape[index], op.nrows())?;
    let left: usize = shape[..index].iter().product();
    let right: usize = shape[index + 1..].iter().product();
    Ok(identity(left).kronecker(op).kronecker(&identity(right)))
}

/// A pure or mixed state, as held by a simulated system.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(StateVector),
    Mixed(DensityOperator),
}

impl From<StateVector> for QuantumState {
    fn from(s: StateVector) -> Self {
        QuantumState::Pure(s)
    }
}

impl From<DensityOperator> for QuantumState {
    fn from(r: DensityOperator) -> Self {
        QuantumState::Mixed(r)
    }
}

impl QuantumState {
    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(s) => s.dim(),
            QuantumState::Mixed(r) => r.dim(),
        }
    }

    pub fn shape(&self) -> &[usize] {
        match self {
            QuantumState::Pure(s) => s.shape(),
            QuantumState::Mixed(r) => r.shape(),
        }
    }

    pub fn to_density(&self) -> DensityOperator {
        match self {
            QuantumState::Pure(s) => s.to_density(),
            QuantumState::Mixed(r) => r.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&StateVector> {
        match self {
            QuantumState::Pure(s) => Some(s),
            QuantumState::Mixed(_) => None,
        }
    }

    pub fn purity(&self) -> f64 {
        match self {
            QuantumState::Pure(_) => 1.0,
            QuantumState::Mixed(r) => r.purity(),
        }
    }

    /// `Tr(M ρ)` for Hermitian `M`.
    pub fn expectation(&self, m: &CMatrix) -> Result<f64> {
        check_dim(self.dim(), m.nrows())?;
        Ok(match self {
            QuantumState::Pure(s) => expectation_in(s.amplitudes(), m),
            QuantumState::Mixed(r) => trace_product(m, r.matrix()),
        })
    }

    pub fn evolve(&self, u: &UnitaryOperator) -> Result<Self> {
        Ok(match self {
            QuantumState::Pure(s) => QuantumState::Pure(s.evolve(u)?),
            QuantumState::Mixed(r) => QuantumState::Mixed(r.evolve(u)?),
        })
    }

    pub fn partial_trace(&self, keep: usize) -> Result<DensityOperator> {
        self.to_density().partial_trace(keep)
    }

    pub fn with_shape(self, shape: Vec<usize>) -> Result<Self> {
        Ok(match self {
            QuantumState::Pure(s) => QuantumState::Pure(s.with_shape(shape)?),
            QuantumState::Mixed(r) => QuantumState::Mixed(r.with_shape(shape)?),
        })
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Principal square root of a positive semidefinite Hermitian matrix.
fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let eig = hermitize(m).symmetric_eigen();
    let roots = eig.eigenvalues.map(|l| c(l.max(0.0).sqrt(), 0.0));
    let v = &eig.eigenvectors;
    v * CMatrix::from_diagonal(&roots) * v.adjoint()
}

/// Uhlmann fidelity, squared convention: `|⟨x|y⟩|²` for pure pairs,
/// `⟨x|ρ|x⟩` for pure-mixed, `(Tr√(√ρ σ √ρ))²` for mixed pairs.
pub fn fidelity(x: &QuantumState, y: &QuantumState) -> Result<f64> {
    check_dim(x.dim(), y.dim())?;
    let f = match (x, y) {
        (QuantumState::Pure(a), QuantumState::Pure(b)) => a.inner(b)?.norm_sqr(),
        (QuantumState::Pure(a), QuantumState::Mixed(r)) | (QuantumState::Mixed(r), QuantumState::Pure(a)) => {
            expectation_in(a.amplitudes(), r.matrix())
        }
        (QuantumState::Mixed(r), QuantumState::Mixed(s)) => {
            let sr = psd_sqrt(r.matrix());
            let inner = hermitize(&(&sr * s.matrix() * &sr));
            let t: f64 = inner.symmetric_eigenvalues().iter().map(|l| l.max(0.0).sqrt()).sum();
            t * t
        }
    };
    Ok(f.clamp(0.0, 1.0))
}

/// Standard purification `Σ √λ_i |e_i> ⊗ |i>` on a `[d, d]` space.
pub fn purify(rho: &DensityOperator) -> StateVector {
    let d = rho.dim();
    let eig = hermitize(rho.matrix()).symmetric_eigen();
    let mut amps = CVector::zeros(d * d);
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        let w = lambda.max(0.0).sqrt();
        if w == 0.0 {
            continue;
        }
        let e = eig.eigenvectors.column(i);
        for a in 0..d {
            amps[a * d + i] += e[a] * w;
        }
    }
    StateVector::normalized(amps, vec![d, d]).expect("purification of a unit-trace operator")
}

#[cfg(test)]
mod tests;
