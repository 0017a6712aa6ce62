use super::gates::*;
use super::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn assert_mat_close(a: &CMatrix, b: &CMatrix, tol: f64) {
    let dev = max_abs_diff(a, b);
    assert!(dev <= tol, "matrices differ by {dev:e}\n{a}\n{b}");
}

fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&v| c(v, 0.0))))
}

/// Reference contraction over explicit (a, b, a', b') indices of a 2x2-dim
/// bipartite operator.
fn oracle_trace_out_a(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    let mut out = CMatrix::zeros(db, db);
    for b in 0..db {
        for bp in 0..db {
            for a in 0..da {
                out[(b, bp)] += m[(a * db + b, a * db + bp)];
            }
        }
    }
    out
}

fn oracle_trace_out_b(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    let mut out = CMatrix::zeros(da, da);
    for a in 0..da {
        for ap in 0..da {
            for b in 0..db {
                out[(a, ap)] += m[(a * db + b, ap * db + b)];
            }
        }
    }
    out
}

#[test]
fn tensor_of_basis_vectors() {
    let s = StateVector::zero().tensor(&StateVector::one());
    let expected = [0.0, 1.0, 0.0, 0.0];
    for (a, e) in s.amplitudes().iter().zip(expected) {
        assert_eq!(*a, c(e, 0.0));
    }
    assert_eq!(s.shape(), &[2, 2]);
}

#[test]
fn tensor_of_identities() {
    assert_eq!(identity(2).tensor(&identity(2)), identity(4));
}

#[test]
fn tensor_of_plus_states_is_uniform() {
    let s = StateVector::plus().tensor(&StateVector::plus());
    for a in s.amplitudes().iter() {
        assert!((a - c(0.5, 0.0)).norm() < 1e-15);
    }
}

#[test]
fn spectral_pauli_z() {
    let sd = spectral_decompose(&pauli_z(), DEFAULT_DEGENERACY_TOL).unwrap();
    assert_eq!(sd.len(), 2);
    assert!((sd.eigenvalues()[0] + 1.0).abs() < 1e-14);
    assert!((sd.eigenvalues()[1] - 1.0).abs() < 1e-14);
    assert_mat_close(&sd.projectors()[0], &StateVector::one().projector(), 1e-14);
    assert_mat_close(&sd.projectors()[1], &StateVector::zero().projector(), 1e-14);
}

#[test]
fn spectral_identity_merges_to_one_outcome() {
    let sd = spectral_decompose(&identity(2), DEFAULT_DEGENERACY_TOL).unwrap();
    assert_eq!(sd.len(), 1);
    assert!((sd.eigenvalues()[0] - 1.0).abs() < 1e-14);
    assert_mat_close(&sd.projectors()[0], &identity(2), 1e-14);
}

#[test]
fn spectral_near_degenerate_merge() {
    let h = diag(&[2.0, 2.0 + 1e-12, 5.0]);
    let sd = spectral_decompose(&h, 1e-9).unwrap();
    assert_eq!(sd.len(), 2);
    assert!((sd.eigenvalues()[0] - 2.0).abs() < 1e-11);
    assert!((sd.eigenvalues()[1] - 5.0).abs() < 1e-14);
    let p = &sd.projectors()[0];
    assert_mat_close(&(p * p), p, 1e-10);
    assert!((trace(p).re - 2.0).abs() < 1e-12, "merged projector has rank 2");
    assert_mat_close(&sd.reconstruct(), &h, 1e-9);
}

#[test]
fn spectral_rejects_non_hermitian() {
    let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    assert!(matches!(spectral_decompose(&m, 1e-9), Err(Error::NotHermitian(_))));
}

#[test]
fn partial_trace_of_bell_state_is_maximally_mixed() {
    let rho = StateVector::phi_plus().to_density();
    let a = rho.partial_trace(0).unwrap();
    assert_mat_close(a.matrix(), &(identity(2) * c(0.5, 0.0)), 1e-15);
}

#[test]
fn partial_trace_of_product_state() {
    let rho = StateVector::zero().tensor(&StateVector::plus()).to_density();
    let a = rho.partial_trace(0).unwrap();
    assert_mat_close(a.matrix(), &StateVector::zero().projector(), 1e-15);
}

#[test]
fn partial_trace_of_mixture_matches_contraction_oracle() {
    let s00 = StateVector::zero().tensor(&StateVector::zero());
    let s1p = StateVector::one().tensor(&StateVector::plus());
    let rho = DensityOperator::mixture(&[(s00, 0.5), (s1p, 0.5)]).unwrap();
    let oracle = oracle_trace_out_a(rho.matrix(), 2, 2);
    let expected = StateVector::zero().projector() * c(0.5, 0.0) + StateVector::plus().projector() * c(0.5, 0.0);
    assert_mat_close(&oracle, &expected, 1e-15);
    let b = rho.partial_trace(1).unwrap();
    assert_mat_close(b.matrix(), &oracle, 1e-15);
}

#[test]
fn partial_trace_rejects_bad_index_and_single_system() {
    let rho = StateVector::phi_plus().to_density();
    assert!(matches!(rho.partial_trace(2), Err(Error::InvalidSubsystem { index: 2, count: 2 })));
    let single = StateVector::zero().to_density();
    assert!(matches!(single.partial_trace(0), Err(Error::InvalidShape(_))));
}

#[test]
fn partial_trace_three_subsystems_middle() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let a = haar_random_state(&[2], &mut rng).unwrap();
    let b = haar_random_state(&[3], &mut rng).unwrap();
    let cst = haar_random_state(&[2], &mut rng).unwrap();
    let rho = a.tensor(&b).tensor(&cst).to_density();
    let mid = rho.partial_trace(1).unwrap();
    assert_mat_close(mid.matrix(), &b.projector(), 1e-14);
}

#[test]
fn fidelity_examples() {
    let z = QuantumState::from(StateVector::zero());
    let o = QuantumState::from(StateVector::one());
    let p = QuantumState::from(StateVector::plus());
    assert!((fidelity(&z, &z).unwrap() - 1.0).abs() < 1e-15);
    assert!(fidelity(&z, &o).unwrap().abs() < 1e-15);
    assert!((fidelity(&z, &p).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn fidelity_routes_agree() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    for _ in 0..10 {
        let a = haar_random_state(&[3], &mut rng).unwrap();
        let b = haar_random_state(&[3], &mut rng).unwrap();
        let pp = fidelity(&a.clone().into(), &b.clone().into()).unwrap();
        let pm = fidelity(&a.clone().into(), &b.to_density().into()).unwrap();
        let mm = fidelity(&a.to_density().into(), &b.to_density().into()).unwrap();
        assert!((pp - pm).abs() < 1e-12);
        assert!((pp - mm).abs() < 1e-7, "{pp} vs {mm}");
    }
}

#[test]
fn fidelity_dimension_mismatch() {
    let err = fidelity(&StateVector::zero().into(), &StateVector::phi_plus().into()).unwrap_err();
    assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 4 });
}

#[test]
fn evolve_examples() {
    let plus = StateVector::zero().evolve(&hadamard()).unwrap();
    assert!(plus.ray_eq(&StateVector::plus()));
    let rho = StateVector::plus().to_density();
    assert_eq!(rho.evolve(&UnitaryOperator::identity(2)).unwrap(), rho);
    let minus = StateVector::plus().evolve(&z()).unwrap();
    assert!(minus.ray_eq(&StateVector::minus()));
    assert!(StateVector::zero().evolve(&cnot()).is_err());
}

#[test]
fn ray_equality_ignores_global_phase() {
    let phased = StateVector::new(StateVector::plus().amplitudes() * c(0.0, 1.0), vec![2]).unwrap();
    assert!(phased.ray_eq(&StateVector::plus()));
    assert_ne!(&phased, &StateVector::plus());
    assert!(!StateVector::zero().ray_eq(&StateVector::plus()));
}

#[test]
fn constructors_validate() {
    assert!(matches!(
        StateVector::from_amplitudes(&[c(1.0, 0.0), c(1.0, 0.0)]),
        Err(Error::NotNormalized(_))
    ));
    let s = StateVector::normalized(CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]), vec![2]).unwrap();
    assert!(s.ray_eq(&StateVector::plus()));
    assert!(StateVector::new(CVector::zeros(4), vec![3]).is_err());
    assert!(DensityOperator::new(diag(&[1.2, -0.2]), vec![2]).is_err());
    assert!(DensityOperator::new(diag(&[0.6, 0.6]), vec![2]).is_err());
    assert!(UnitaryOperator::new(diag(&[1.0, 2.0])).is_err());
}

#[test]
fn purification_reduces_to_original() {
    let rho = DensityOperator::mixture(&[(StateVector::zero(), 0.5), (StateVector::plus(), 0.5)]).unwrap();
    let psi = purify(&rho);
    let reduced = psi.to_density().partial_trace(0).unwrap();
    assert_mat_close(reduced.matrix(), rho.matrix(), 1e-14);
    assert!((rho.purity() - 0.75).abs() < 1e-14);
}

#[test]
fn basis_copier_is_cnot_for_qubits() {
    assert_eq!(basis_copier(2), cnot());
    assert!(UnitaryOperator::new(basis_copier(3).matrix().clone()).is_ok());
}

#[test]
fn embed_places_operator_on_subsystem() {
    let zi = embed_operator(&pauli_z(), 0, &[2, 2]).unwrap();
    assert_eq!(zi, pauli_string("ZI").unwrap());
    let ix = embed_operator(&pauli_x(), 1, &[2, 2]).unwrap();
    assert_eq!(ix, pauli_string("IX").unwrap());
    assert!(embed_operator(&pauli_x(), 1, &[2, 3]).is_err());
}

fn arb_density(d: usize) -> impl Strategy<Value = DensityOperator> {
    any::<u64>().prop_map(move |seed| {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        random_density_operator(&[d], &mut rng).unwrap()
    })
}

proptest! {
    #[test]
    fn spectral_projectors_resolve_identity(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let h = random_hermitian(d, &mut rng);
        let sd = spectral_decompose(&h, DEFAULT_DEGENERACY_TOL).unwrap();
        let sum = sd.projectors().iter().fold(CMatrix::zeros(d, d), |acc, p| acc + p);
        prop_assert!(max_abs_diff(&sum, &identity(d)) < 1e-10);
        for (r, p) in sd.projectors().iter().enumerate() {
            prop_assert!(max_abs_diff(&(p * p), p) < 1e-10);
            for q in &sd.projectors()[r + 1..] {
                prop_assert!(max_abs(&(p * q)) < 1e-10);
            }
        }
        prop_assert!(max_abs_diff(&sd.reconstruct(), &h) < 1e-9);
        prop_assert!(sd.eigenvalues().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn partial_trace_is_valid_and_matches_oracle(a in arb_density(2), b in arb_density(3), seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        // Correlated state: mix a product with a random pure state.
        let prod = a.tensor(&b);
        let pure = haar_random_state(&[2, 3], &mut rng).unwrap().to_density();
        let m = hermitize(&(prod.matrix() * c(0.5, 0.0) + pure.matrix() * c(0.5, 0.0)));
        let rho = DensityOperator::new(m, vec![2, 3]).unwrap();
        let ra = rho.partial_trace(0).unwrap();
        let rb = rho.partial_trace(1).unwrap();
        prop_assert!(DensityOperator::new(ra.matrix().clone(), vec![2]).is_ok());
        prop_assert!(DensityOperator::new(rb.matrix().clone(), vec![3]).is_ok());
        prop_assert!(max_abs_diff(ra.matrix(), &oracle_trace_out_b(rho.matrix(), 2, 3)) < 1e-14);
        prop_assert!(max_abs_diff(rb.matrix(), &oracle_trace_out_a(rho.matrix(), 2, 3)) < 1e-14);
        // Tr[(X ⊗ I) ρ] = Tr[X ρ_A] for a random Hermitian X.
        let x = random_hermitian(2, &mut rng);
        let lhs = trace_product(&embed_operator(&x, 0, &[2, 3]).unwrap(), rho.matrix());
        let rhs = trace_product(&x, ra.matrix());
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn tensor_then_trace_recovers_factors(a in arb_density(2), b in arb_density(3)) {
        let prod = a.tensor(&b);
        prop_assert!(max_abs_diff(prod.partial_trace(0).unwrap().matrix(), a.matrix()) < 1e-12);
        prop_assert!(max_abs_diff(prod.partial_trace(1).unwrap().matrix(), b.matrix()) < 1e-12);
    }

    #[test]
    fn evolution_preserves_norm_trace_and_positivity(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let h = random_hermitian(3, &mut rng);
        let eig = h.symmetric_eigen();
        let phases = eig.eigenvalues.map(|l| c(l.cos(), l.sin()));
        let u = &eig.eigenvectors * CMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint();
        let u = UnitaryOperator::new(u).unwrap();
        let psi = haar_random_state(&[3], &mut rng).unwrap();
        let out = psi.evolve(&u).unwrap();
        prop_assert!((out.amplitudes().norm_squared() - 1.0).abs() < 1e-12);
        let rho = random_density_operator(&[3], &mut rng).unwrap();
        let out = rho.evolve(&u).unwrap();
        prop_assert!((trace(out.matrix()).re - 1.0).abs() < 1e-12);
        prop_assert!(out.eigenvalues()[0] > -1e-12);
        prop_assert!(hermitian_deviation(out.matrix()) < 1e-12);
    }
}
