use crate::error::{Error, Result};
use crate::hilbert::{c, check_hermitian, hermitize, trace, CMatrix, CVector, DensityOperator};

/// Euclidean projection of `v` onto the probability simplex.
///
/// Sort descending as `u`, take the largest `k` with
/// `u_k + (1 - Σ_{i≤k} u_i)/k > 0`, shift every entry by that `k`'s
/// `(1 - Σ_{i≤k} u_i)/k` and clip at zero.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    let mut shift = 0.0;
    for (i, &uk) in u.iter().enumerate() {
        prefix += uk;
        let candidate = (1.0 - prefix) / (i + 1) as f64;
        if uk + candidate > 0.0 {
            shift = candidate;
        }
    }
    v.iter().map(|&x| (x + shift).max(0.0)).collect()
}

/// Closest density operator in Frobenius norm to a Hermitian matrix of
/// roughly unit trace: project the spectrum onto the simplex and keep the
/// eigenvectors.
pub fn project_to_physical(h: &CMatrix) -> Result<DensityOperator> {
    check_hermitian(h, 1e-8)?;
    let tr = trace(h).re;
    if (tr - 1.0).abs() > 0.1 {
        return Err(Error::InvalidArgument(format!("trace {tr} is too far from 1 to project")));
    }
    let eig = hermitize(h).symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let projected = project_to_simplex(&values);
    let diag = CVector::from_iterator(projected.len(), projected.iter().map(|&x| c(x, 0.0)));
    let v = &eig.eigenvectors;
    let m = hermitize(&(v * CMatrix::from_diagonal(&diag) * v.adjoint()));
    DensityOperator::new(m, vec![h.nrows()])
}
