use super::{c, check_hermitian, hermitize, identity, max_abs, max_abs_diff, CMatrix};
use crate::error::{Error, Result};

const PROJECTOR_TOL: f64 = 1e-10;

/// `A = Σ_r a_r P_r` with distinct ascending eigenvalues `a_r` and
/// orthogonal projectors `P_r` that resolve the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    projectors: Vec<CMatrix>,
}

impl SpectralDecomposition {
    /// Builds a decomposition from known parts, checking every projector
    /// property. Eigenvalues must be strictly ascending.
    pub fn from_parts(eigenvalues: Vec<f64>, projectors: Vec<CMatrix>) -> Result<Self> {
        if eigenvalues.is_empty() || eigenvalues.len() != projectors.len() {
            return Err(Error::InvalidArgument(format!(
                "{} eigenvalues for {} projectors",
                eigenvalues.len(),
                projectors.len()
            )));
        }
        if eigenvalues.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("eigenvalues must be strictly ascending".into()));
        }
        let d = projectors[0].nrows();
        let mut sum = CMatrix::zeros(d, d);
        for (r, p) in projectors.iter().enumerate() {
            check_hermitian(p, PROJECTOR_TOL)?;
            if p.nrows() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.nrows() });
            }
            if max_abs_diff(&(p * p), p) > PROJECTOR_TOL {
                return Err(Error::InvalidArgument(format!("projector {r} is not idempotent")));
            }
            for q in &projectors[r + 1..] {
                if max_abs(&(p * q)) > PROJECTOR_TOL {
                    return Err(Error::InvalidArgument(format!("projector {r} is not orthogonal to its successors")));
                }
            }
            sum += p;
        }
        if max_abs_diff(&sum, &identity(d)) > PROJECTOR_TOL {
            return Err(Error::InvalidArgument("projectors do not sum to the identity".into()));
        }
        Ok(Self { eigenvalues, projectors })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    /// `Σ_r a_r P_r`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.dim();
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(CMatrix::zeros(d, d), |acc, (&a, p)| acc + p * c(a, 0.0))
    }

    /// Index of the outcome whose eigenvalue is closest to `value`.
    pub fn index_of(&self, value: f64) -> usize {
        let mut best = 0;
        for (i, &a) in self.eigenvalues.iter().enumerate() {
            if (a - value).abs() < (self.eigenvalues[best] - value).abs() {
                best = i;
            }
        }
        best
    }
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues closer than
/// `degeneracy_tol` merged into one outcome. Sorted ascending.
pub fn spectral_decompose(h: &CMatrix, degeneracy_tol: f64) -> Result<SpectralDecomposition> {
    check_hermitian(h, 1e-10)?;
    if !(degeneracy_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("degeneracy tolerance {degeneracy_tol}")));
    }
    let eig = hermitize(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    // Chain consecutive eigenvalues into groups.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if eig.eigenvalues[i] - eig.eigenvalues[*g.last().unwrap()] <= degeneracy_tol => g.push(i),
            _ => groups.push(vec![i]),
        }
    }

    let d = h.nrows();
    let mut eigenvalues = Vec::with_capacity(groups.len());
    let mut projectors = Vec::with_capacity(groups.len());
    for g in groups {
        let mean = g.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / g.len() as f64;
        let mut p = CMatrix::zeros(d, d);
        for &i in &g {
            let v = eig.eigenvectors.column(i);
            p += &v * v.adjoint();
        }
        eigenvalues.push(mean);
        projectors.push(hermitize(&p));
    }
    Ok(SpectralDecomposition { eigenvalues, projectors })
}
