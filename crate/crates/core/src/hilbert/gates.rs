//! Fixed operators used throughout: Paulis, Hadamard, CNOT, Pauli strings.

use super::{c, identity, CMatrix, UnitaryOperator};
use crate::error::{Error, Result};

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

pub fn pauli(letter: char) -> Result<CMatrix> {
    match letter {
        'I' => Ok(identity(2)),
        'X' => Ok(pauli_x()),
        'Y' => Ok(pauli_y()),
        'Z' => Ok(pauli_z()),
        other => Err(Error::InvalidArgument(format!("unknown Pauli letter {other:?}"))),
    }
}

/// Tensor product of single-qubit Paulis, leftmost letter on qubit 0.
pub fn pauli_string(label: &str) -> Result<CMatrix> {
    if label.is_empty() {
        return Err(Error::InvalidArgument("empty Pauli string".into()));
    }
    let mut m = CMatrix::identity(1, 1);
    for ch in label.chars() {
        m = m.kronecker(&pauli(ch)?);
    }
    Ok(m)
}

pub fn hadamard() -> UnitaryOperator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    UnitaryOperator::new(CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]))
        .expect("Hadamard is unitary")
}

pub fn x() -> UnitaryOperator {
    UnitaryOperator::new(pauli_x()).expect("X is unitary")
}

pub fn y() -> UnitaryOperator {
    UnitaryOperator::new(pauli_y()).expect("Y is unitary")
}

pub fn z() -> UnitaryOperator {
    UnitaryOperator::new(pauli_z()).expect("Z is unitary")
}

/// Controlled-NOT with control on qubit 0 of a two-qubit register.
pub fn cnot() -> UnitaryOperator {
    UnitaryOperator::new(permutation_matrix(&[0, 1, 3, 2])).expect("CNOT is unitary")
}

/// Generalized copy gate `|i, j> -> |i, i + j mod d>`; CNOT for `d = 2`.
pub fn basis_copier(d: usize) -> UnitaryOperator {
    let perm: Vec<usize> = (0..d * d).map(|k| (k / d) * d + (k / d + k % d) % d).collect();
    UnitaryOperator::new(permutation_matrix(&perm)).expect("permutation matrices are unitary")
}

/// Matrix sending basis vector `k` to `perm[k]`.
pub fn permutation_matrix(perm: &[usize]) -> CMatrix {
    let d = perm.len();
    let mut m = CMatrix::zeros(d, d);
    for (k, &target) in perm.iter().enumerate() {
        m[(target, k)] = c(1.0, 0.0);
    }
    m
}
