use super::*;
use crate::composite::{LocalSetting, Side};
use crate::hilbert::{c, gates, haar_random_state, identity, max_abs_diff, CMatrix, StateVector, UnitaryOperator};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

fn pauli(l: &str) -> Observable {
    Observable::pauli(l).unwrap()
}

fn spec(n: usize, table: &[u8], promise: Promise) -> OracleSpec {
    OracleSpec::new(n, table.to_vec(), promise).unwrap()
}

fn random_unitary(d: usize, rng: &mut ChaCha20Rng) -> UnitaryOperator {
    let g = CMatrix::from_fn(d, d, |_, _| {
        c(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))
    });
    UnitaryOperator::new(g.qr().q()).unwrap()
}

#[test]
fn oracle_spec_validation() {
    assert!(OracleSpec::new(2, vec![0, 1, 1], Promise::None).is_err());
    assert!(OracleSpec::new(1, vec![0, 2], Promise::None).is_err());
    assert!(OracleSpec::new(6, vec![0; 64], Promise::None).is_err());
    assert!(OracleSpec::new(2, vec![0, 0, 0, 1], Promise::Balanced).is_err());
    assert!(OracleSpec::new(2, vec![0, 0, 0, 1], Promise::None).is_ok());
}

#[test]
fn oracle_unitary_examples() {
    let u = oracle_unitary(&spec(2, &[0, 0, 0, 0], Promise::Constant)).unwrap();
    assert_eq!(u.matrix(), &identity(8));
    let u = oracle_unitary(&spec(1, &[0, 1], Promise::Balanced)).unwrap();
    assert_eq!(u.matrix(), gates::cnot().matrix());
}

#[test]
fn oracle_matrix_elements() {
    let s = spec(3, &[1, 0, 0, 1, 1, 1, 0, 0], Promise::Balanced);
    let u = oracle_unitary(&s).unwrap();
    for x in 0..8usize {
        for y in 0..2usize {
            let col = 2 * x + y;
            let row = 2 * x + (y ^ s.truth_table()[x] as usize);
            assert_eq!(u.matrix()[(row, col)], c(1.0, 0.0));
        }
    }
}

#[test]
fn passive_recovery_reads_full_table_with_one_call() {
    for table in [[1u8, 1, 1, 1], [0, 0, 1, 1]] {
        let s = spec(2, &table, Promise::None);
        let r = function_recovery(&s, Mode::Passive, 10_000, 42).unwrap();
        assert_eq!(r.truth_table, table.to_vec());
        assert_eq!(r.report.resources.oracle_calls, 1);
        assert_eq!(r.report.resources.copies_consumed, 1);
        assert_eq!(r.report.resources.shots, 63 * 10_000);
    }
}

#[test]
fn quantum_recovery_follows_coupon_collector() {
    let s = spec(2, &[0, 1, 1, 0], Promise::Balanced);
    let runs = 1000;
    let mut total = 0u64;
    for seed in 0..runs {
        let r = function_recovery(&s, Mode::Quantum, 1, seed).unwrap();
        assert_eq!(r.truth_table, vec![0, 1, 1, 0]);
        assert_eq!(r.report.resources.oracle_calls, r.report.resources.copies_consumed);
        assert!(r.report.resources.oracle_calls >= 4);
        total += r.report.resources.oracle_calls;
    }
    let harmonic: f64 = (1..=4).map(|k| 1.0 / k as f64).sum();
    let expected = 4.0 * harmonic;
    let mean = total as f64 / runs as f64;
    assert!((mean - expected).abs() <= 0.1 * expected, "{mean} vs {expected}");
}

#[test]
fn deutsch_jozsa_in_both_modes() {
    let constant = [spec(2, &[0, 0, 0, 0], Promise::Constant), spec(2, &[1, 1, 1, 1], Promise::Constant)];
    let balanced: Vec<OracleSpec> = (0u8..16)
        .filter(|b| b.count_ones() == 2)
        .map(|b| spec(2, &[(b >> 3) & 1, (b >> 2) & 1, (b >> 1) & 1, b & 1], Promise::Balanced))
        .collect();
    assert_eq!(balanced.len(), 6);
    for (specs, want) in [(constant.to_vec(), Promise::Constant), (balanced, Promise::Balanced)] {
        for s in &specs {
            for mode in [Mode::Quantum, Mode::Passive] {
                let (v, report) = deutsch_jozsa_verdict(s, mode, 5000, 7).unwrap();
                assert_eq!(v, want, "{:?} {mode}", s.truth_table());
                assert_eq!(report.resources.oracle_calls, 1);
            }
        }
    }
    assert!(deutsch_jozsa_verdict(&spec(1, &[0, 1], Promise::None), Mode::Quantum, 1, 1).is_err());
}

#[test]
fn clone_examples() {
    let mut sys = PSystem::new(StateVector::plus(), Mode::Passive, 42);
    let before = sys.state().clone();
    let r = clone_via_reconstruction(&mut sys, 10_000).unwrap();
    assert!(r.fidelity >= 0.99);
    assert_eq!(sys.state(), &before);
    assert_eq!(r.clone.mode(), Mode::Passive);

    let mut sys = PSystem::new(StateVector::zero(), Mode::Passive, 42);
    assert!(clone_via_reconstruction(&mut sys, 10_000).unwrap().fidelity >= 0.999);

    let mut sys = PSystem::new(StateVector::zero(), Mode::Quantum, 42);
    assert!(clone_via_reconstruction(&mut sys, 100).is_err());
}

#[test]
fn no_cloning_examples() {
    let r = no_cloning_check(&gates::cnot(), &StateVector::zero(), &StateVector::plus()).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!((r.obstruction - (s - 0.5)).abs() < 1e-15);
    assert!(!r.clones_both);

    let r = no_cloning_check(&gates::cnot(), &StateVector::zero(), &StateVector::one()).unwrap();
    assert_eq!(r.obstruction, 0.0);
    assert!(r.clones_both);

    let r = no_cloning_check(&gates::cnot(), &StateVector::plus(), &StateVector::plus()).unwrap();
    assert!(r.obstruction.abs() < 1e-15);
}

#[test]
fn proper_and_improper_mixtures_are_told_apart() {
    let components = vec![(StateVector::zero(), 0.5), (StateVector::plus(), 0.5)];
    let proper = proper_vs_improper(&MixtureSource::Proper(components.clone()), 50, 10_000, 1).unwrap();
    assert_eq!(proper.verdict, MixtureKind::Proper);
    assert!(proper.trial_verdicts.iter().all(|&v| v == MixtureKind::Proper));
    assert!(proper.mean_purity >= 0.98);
    assert!((proper.average_purity - 0.75).abs() < 1e-12);
    assert!((proper.threshold - 0.875).abs() < 1e-12);

    let improper = proper_vs_improper(&MixtureSource::purification_of(&components).unwrap(), 50, 10_000, 2).unwrap();
    assert_eq!(improper.verdict, MixtureKind::Improper);
    assert!(improper.trial_verdicts.iter().all(|&v| v == MixtureKind::Improper));
    for p in &improper.purities {
        assert!((p - 0.75).abs() < 0.05, "{p}");
    }
}

#[test]
fn pure_average_state_is_rejected() {
    let pure = MixtureSource::Proper(vec![(StateVector::zero(), 1.0)]);
    assert!(matches!(proper_vs_improper(&pure, 5, 100, 1), Err(crate::Error::Precondition(_))));
    let product = MixtureSource::Improper(StateVector::basis(&[2, 2], 0).unwrap());
    assert!(proper_vs_improper(&product, 5, 100, 1).is_err());
}

#[test]
fn single_partite_collapse_simulation() {
    let z = pauli("Z");
    let mut sys = PSystem::new(StateVector::plus(), Mode::Passive, 42);
    let library = eigenstate_library(&z, &[2], 3).unwrap();
    let sim = simulate_qt_single(&mut sys, &z, library, &z, 10_000, 5).unwrap();
    let expected = if sim.outcome == 1.0 { StateVector::zero() } else { StateVector::one() };
    assert!(sim.replacement.as_pure().unwrap().ray_eq(&expected));
    assert_eq!(sim.tv, 0.0);
    assert!(sim.follow_up_simulated.contains(&1.0));

    let x = pauli("X");
    let mut sys = PSystem::new(StateVector::plus(), Mode::Passive, 42);
    let sim = simulate_qt_single(&mut sys, &z, eigenstate_library(&z, &[2], 3).unwrap(), &x, 10_000, 5).unwrap();
    assert!(sim.tv <= 5.0 / 100.0, "{}", sim.tv);
}

#[test]
fn missing_library_entry_is_an_error() {
    let z = pauli("Z");
    let mut sys = PSystem::new(StateVector::plus(), Mode::Passive, 42);
    let err = simulate_qt_single(&mut sys, &z, vec![None, None], &z, 10, 5).unwrap_err();
    assert!(matches!(err, crate::Error::Precondition(_)));
    let degenerate = Observable::new("d", identity(2)).unwrap();
    assert!(eigenstate_library(&degenerate, &[2], 1).unwrap()[0].is_none());
}

#[test]
fn bipartite_collapse_simulation() {
    let setting = LocalSetting::new(Side::A, pauli("Z"));
    let follow = crate::composite::lift_local(&LocalSetting::b(pauli("Z")), &[2, 2]).unwrap();
    let mut sys = PSystem::new(StateVector::phi_plus(), Mode::Passive, 42);
    let sim = simulate_qt_bipartite(&mut sys, &setting, 10_000, &follow, 10_000, 9).unwrap();
    let k = if sim.outcome == 1.0 { 0 } else { 3 };
    let expected = StateVector::basis(&[2, 2], k).unwrap();
    assert!(crate::hilbert::fidelity(&expected.into(), &sim.replacement).unwrap() > 0.99);
    assert!(sim.tv <= 0.02, "{}", sim.tv);
}

#[test]
fn teleportation_examples() {
    let q = teleportation_demo(&StateVector::zero(), Mode::Quantum, 20, 1).unwrap();
    for f in &q.fidelities {
        assert!((f - 1.0).abs() < 1e-12);
    }
    assert!(q.analytic_fidelities.is_empty());
    let outcomes: std::collections::BTreeSet<_> = q.outcomes.iter().collect();
    assert!(outcomes.len() > 1);

    let p = teleportation_demo(&StateVector::zero(), Mode::Passive, 20, 1).unwrap();
    assert!(p.analytic_fidelities.iter().all(|&f| f == 0.5));
    for f in &p.fidelities {
        assert!((f - 0.5).abs() < 1e-12);
    }

    let mut rng = ChaCha20Rng::seed_from_u64(100);
    let mean = (0..100)
        .map(|k| {
            let psi = haar_random_state(&[2], &mut rng).unwrap();
            teleportation_demo(&psi, Mode::Passive, 1, k).unwrap().mean_fidelity
        })
        .sum::<f64>()
        / 100.0;
    assert!((mean - 0.5).abs() <= 0.02);
}

#[test]
fn repeatability_examples() {
    let plus: crate::hilbert::QuantumState = StateVector::plus().into();
    let z = pauli("Z");
    let q = repeatability_experiment(&plus, &z, Mode::Quantum, 1000, 42).unwrap();
    assert_eq!(q.rate, 1.0);
    assert_eq!(q.copies_consumed, 1000);
    let p = repeatability_experiment(&plus, &z, Mode::Passive, 100_000, 42).unwrap();
    assert!((p.rate - 0.5).abs() <= 0.015, "{}", p.rate);
    assert!((p.expected_rate - 0.5).abs() < 1e-15);
    assert_eq!(p.copies_consumed, 1);
    let zero: crate::hilbert::QuantumState = StateVector::zero().into();
    assert_eq!(repeatability_experiment(&zero, &z, Mode::Passive, 1000, 42).unwrap().rate, 1.0);
    assert!(repeatability_experiment(&zero, &z, Mode::Passive, 0, 42).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn oracle_is_an_involution(n in 1usize..4, bits in any::<u32>()) {
        let table: Vec<u8> = (0..1 << n).map(|x| ((bits >> x) & 1) as u8).collect();
        let u = oracle_unitary(&spec(n, &table, Promise::None)).unwrap();
        let sq = u.matrix() * u.matrix();
        prop_assert!(max_abs_diff(&sq, &identity(2 << n)) == 0.0);
    }

    #[test]
    fn obstruction_vanishes_only_on_equal_or_orthogonal_rays(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let psi = haar_random_state(&[2], &mut rng).unwrap();
        let phi = haar_random_state(&[2], &mut rng).unwrap();
        let u = random_unitary(4, &mut rng);
        let r = no_cloning_check(&u, &psi, &phi).unwrap();
        let overlap = r.overlap.norm();
        prop_assert_eq!(r.obstruction > 0.0, overlap > 0.0 && overlap < 1.0);
        if r.obstruction > 1e-6 {
            prop_assert!(!r.clones_both);
        }
        let cnot = no_cloning_check(&gates::cnot(), &psi, &phi).unwrap();
        if cnot.obstruction > 1e-6 {
            prop_assert!(!cnot.clones_both);
        }
        let phased = StateVector::new(psi.amplitudes() * c(0.0, 1.0), vec![2]).unwrap();
        prop_assert!(no_cloning_check(&u, &psi, &phased).unwrap().obstruction.abs() < 1e-12);
    }

    #[test]
    fn passive_teleportation_is_exactly_one_half(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let psi = haar_random_state(&[2], &mut rng).unwrap();
        let r = teleportation_demo(&psi, Mode::Passive, 4, seed).unwrap();
        prop_assert!(r.analytic_fidelities.iter().all(|&f| f == 0.5));
        let q = teleportation_demo(&psi, Mode::Quantum, 4, seed).unwrap();
        prop_assert!(q.fidelities.iter().all(|f| (f - 1.0).abs() < 1e-12));
    }

    #[test]
    fn tensor_copy_fidelity_matches_overlap_formula(seed in any::<u64>()) {
        // CNOT sends ψ⊗|0> to a|00> + b|11>, so the overlap with ψ⊗ψ is a·conj(a)² + b·conj(b)².
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let psi = haar_random_state(&[2], &mut rng).unwrap();
        let r = no_cloning_check(&gates::cnot(), &psi, &psi).unwrap();
        let (a, b) = (psi.amplitudes()[0], psi.amplitudes()[1]);
        let amp = a.conj() * a.conj() * a + b.conj() * b.conj() * b;
        prop_assert!((r.fidelity_psi - amp.norm_sqr()).abs() < 1e-12);
    }
}
