//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::PathBuf;

use pqt::composite::{
    chsh_value, global_joint_distribution, local_passive_joint_distribution, signalling_check, AliceAction,
    ChshSettings, JointSource, LocalSetting, Side,
};
use pqt::harness::stats::tv_distance;
use pqt::harness::{parse_config, run};
use pqt::hilbert::{
    fidelity, haar_random_state, random_hermitian, DensityOperator, QuantumState, StateVector,
};
use pqt::measurement::{
    born_distribution, instrument_nonlinearity, nonlinearity_witness, Instrument, Mode, Observable, PSystem,
};
use pqt::protocols::{
    eigenstate_library, function_recovery, proper_vs_improper, repeatability_experiment, simulate_qt_bipartite,
    simulate_qt_single, teleportation_demo, MixtureKind, MixtureSource, OracleSpec, Promise,
};
use pqt::tomography::{estimate_spectrum, reconstruct_single_copy, ICSet};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn pauli(l: &str) -> Observable {
    Observable::pauli(l).expect("pauli label")
}

fn phi_plus() -> QuantumState {
    StateVector::phi_plus().into()
}

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn repeatability() -> Outcome {
    let plus: QuantumState = StateVector::plus().into();
    let q = repeatability_experiment(&plus, &pauli("Z"), Mode::Quantum, 1_000, 42).map_err(e)?;
    let p = repeatability_experiment(&plus, &pauli("Z"), Mode::Passive, 100_000, 42).map_err(e)?;
    check(
        q.rate == 1.0 && (0.485..=0.515).contains(&p.rate),
        format!("quantum {} over 10^3, passive {} over 10^5", q.rate, p.rate),
    )
}

fn born_convergence() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let psi = haar_random_state(&[2], &mut r).map_err(e)?;
        let obs = Observable::new("h", random_hermitian(2, &mut r)).map_err(e)?;
        let state: QuantumState = psi.into();
        let mut sys = PSystem::new(state.clone(), Mode::Passive, 100 + i);
        let rec = sys.repeated_measure(&obs, 100_000).map_err(e)?;
        let mut counts = vec![0.0; obs.outcome_count()];
        for &v in &rec.outcomes {
            counts[obs.decomposition().index_of(v)] += 1.0;
        }
        let freq: Vec<f64> = counts.iter().map(|c| c / 1e5).collect();
        let born = born_distribution(&obs, &state).map_err(e)?.probabilities();
        worst = worst.max(tv_distance(&freq, &born).map_err(e)?);
    }
    check(worst <= 0.01, format!("max TV {worst:.5} over 10 pairs"))
}

fn reconstruction() -> Outcome {
    let mut r = rng(3);
    let ic = ICSet::pauli(1).map_err(e)?;
    let mut total = 0.0;
    let mut unchanged = true;
    for i in 0..20 {
        let state: QuantumState = haar_random_state(&[2], &mut r).map_err(e)?.into();
        let mut sys = PSystem::new(state.clone(), Mode::Passive, 300 + i);
        let rec = reconstruct_single_copy(&mut sys, &ic, 10_000).map_err(e)?;
        unchanged &= sys.state() == &state;
        total += fidelity(&state, &rec.estimate.into()).map_err(e)?;
    }
    let mean = total / 20.0;
    check(mean >= 0.99 && unchanged, format!("mean fidelity {mean:.5}, states unchanged: {unchanged}"))
}

fn witness() -> Outcome {
    let r1 = StateVector::zero().to_density();
    let r2 = StateVector::one().to_density();
    let p0 = StateVector::zero().projector();
    let w = nonlinearity_witness(&r1, &r2, 0.5, &p0).map_err(e)?;
    let l = instrument_nonlinearity(Instrument::Luders, &r1, &r2, 0.5, &p0).map_err(e)?;
    let exact = 2f64.sqrt() / 4.0;
    check(
        (w - exact).abs() <= 1e-9 && format!("{w:.6}") == "0.353553" && l <= 1e-12,
        format!("passive {w:.12}, Lüders {l:e}"),
    )
}

fn chsh() -> Outcome {
    let settings = ChshSettings::tsirelson();
    let mut sys = PSystem::new(phi_plus(), Mode::Passive, 5);
    let g = chsh_value(&mut sys, &settings, JointSource::Global, 100_000).map_err(e)?;
    let l = chsh_value(&mut sys, &settings, JointSource::LocalPassive, 100_000).map_err(e)?;
    let target = 2.0 * 2f64.sqrt();
    check(
        (g.value - target).abs() <= 0.05 && l.value.abs() <= 0.05,
        format!("global S = {:.4}, local-passive S = {:.4}", g.value, l.value),
    )
}

fn local_indistinguishability() -> Outcome {
    let bell = phi_plus();
    let mixed: QuantumState = DensityOperator::maximally_mixed(&[2, 2]).map_err(e)?.into();
    let mut worst: f64 = 0.0;
    for a in ["X", "Y", "Z"] {
        for b in ["X", "Y", "Z"] {
            let (sa, sb) = (LocalSetting::new(Side::A, pauli(a)), LocalSetting::new(Side::B, pauli(b)));
            let p = local_passive_joint_distribution(&bell, &sa, &sb).map_err(e)?.probabilities();
            let q = local_passive_joint_distribution(&mixed, &sa, &sb).map_err(e)?.probabilities();
            worst = worst.max(tv_distance(&p, &q).map_err(e)?);
        }
    }
    let p = global_joint_distribution(&bell, &pauli("Z"), &pauli("Z")).map_err(e)?.probabilities();
    let q = global_joint_distribution(&mixed, &pauli("Z"), &pauli("Z")).map_err(e)?.probabilities();
    let global = tv_distance(&p, &q).map_err(e)?;
    check(
        worst == 0.0 && (global - 0.5).abs() <= 1e-12,
        format!("local max TV {worst}, global ZZ TV {global}"),
    )
}

fn no_signalling() -> Outcome {
    let bell = phi_plus();
    let (mut passive, mut quantum): (f64, f64) = (0.0, 0.0);
    for a in ["X", "Y", "Z"] {
        for b in ["X", "Y", "Z"] {
            let rp = signalling_check(&bell, &AliceAction::PassiveMeasure(pauli(a)), &pauli(b)).map_err(e)?;
            let rq = signalling_check(&bell, &AliceAction::QuantumNonSelective(pauli(a)), &pauli(b)).map_err(e)?;
            passive = passive.max(rp.tv);
            quantum = quantum.max(rq.tv);
        }
    }
    check(passive == 0.0 && quantum <= 1e-12, format!("passive max TV {passive}, quantum max TV {quantum:e}"))
}

fn oracle_cost() -> Outcome {
    let mut exact = true;
    let mut calls_one = true;
    for t in 0..16u8 {
        let table: Vec<u8> = (0..4).map(|x| (t >> x) & 1).collect();
        let spec = OracleSpec::new(2, table.clone(), Promise::None).map_err(e)?;
        let r = function_recovery(&spec, Mode::Passive, 10_000, 800 + t as u64).map_err(e)?;
        exact &= r.truth_table == table;
        calls_one &= r.report.resources.oracle_calls == 1;
    }
    let spec = OracleSpec::new(2, vec![0, 1, 1, 0], Promise::Balanced).map_err(e)?;
    let mut calls = 0u64;
    for run in 0..1_000u64 {
        let r = function_recovery(&spec, Mode::Quantum, 1, 10_000 + run).map_err(e)?;
        calls += r.report.resources.oracle_calls;
    }
    let mean = calls as f64 / 1e3;
    let target = 25.0 / 3.0;
    check(
        exact && calls_one && (mean - target).abs() <= 0.1 * target,
        format!("passive: all 16 tables exact {exact}, one call {calls_one}; quantum mean calls {mean:.3}"),
    )
}

fn proper_improper() -> Outcome {
    let components = vec![(StateVector::zero(), 0.5), (StateVector::plus(), 0.5)];
    let proper = proper_vs_improper(&MixtureSource::Proper(components.clone()), 50, 10_000, 9).map_err(e)?;
    let improper =
        proper_vs_improper(&MixtureSource::purification_of(&components).map_err(e)?, 50, 10_000, 10).map_err(e)?;
    let correct = proper.trial_verdicts.iter().filter(|&&v| v == MixtureKind::Proper).count()
        + improper.trial_verdicts.iter().filter(|&&v| v == MixtureKind::Improper).count();
    let near = |ps: &[f64], c: f64| ps.iter().all(|p| (p - c).abs() <= 0.05);
    check(
        correct == 100 && near(&proper.purities, 1.0) && near(&improper.purities, 0.75),
        format!(
            "{correct}/100 correct, mean purities {:.4} and {:.4}",
            proper.mean_purity, improper.mean_purity
        ),
    )
}

fn teleportation() -> Outcome {
    let mut r = rng(10);
    let mut worst_q: f64 = 0.0;
    for i in 0..10 {
        let psi = haar_random_state(&[2], &mut r).map_err(e)?;
        let t = teleportation_demo(&psi, Mode::Quantum, 1, 1_000 + i).map_err(e)?;
        worst_q = t.fidelities.iter().fold(worst_q, |w, f| w.max((1.0 - f).abs()));
    }
    let mut inputs = vec![StateVector::zero(), StateVector::one(), StateVector::plus(), StateVector::minus()];
    for _ in 0..50 {
        inputs.push(haar_random_state(&[2], &mut r).map_err(e)?);
    }
    let mut all_half = true;
    for (i, psi) in inputs.iter().enumerate() {
        let t = teleportation_demo(psi, Mode::Passive, 4, 2_000 + i as u64).map_err(e)?;
        all_half &= !t.analytic_fidelities.is_empty() && t.analytic_fidelities.iter().all(|&f| f == 0.5);
    }
    check(
        worst_q <= 1e-12 && all_half,
        format!("quantum max |1 - F| {worst_q:e}; passive analytic F = 0.5 exactly on {} inputs: {all_half}", inputs.len()),
    )
}

fn qt_simulation() -> Outcome {
    let state: QuantumState = haar_random_state(&[2], &mut rng(11)).map_err(e)?.into();
    let z = pauli("Z");
    let library = eigenstate_library(&z, &[2], 12).map_err(e)?;
    let mut sys = PSystem::new(state, Mode::Passive, 13);
    let single = simulate_qt_single(&mut sys, &z, library, &pauli("X"), 10_000, 14).map_err(e)?;
    let mut sys = PSystem::new(phi_plus(), Mode::Passive, 15);
    let bipartite =
        simulate_qt_bipartite(&mut sys, &LocalSetting::a(pauli("Z")), 10_000, &pauli("XX"), 10_000, 16).map_err(e)?;
    check(
        single.tv <= 0.02 && bipartite.tv <= 0.02,
        format!("single TV {:.4}, bipartite TV {:.4}", single.tv, bipartite.tv),
    )
}

fn spectrum() -> Outcome {
    let mut r = rng(12);
    let mut worst: f64 = 0.0;
    let mut complete = true;
    for i in 0..5 {
        let h = random_hermitian(3, &mut r);
        let eig = h.clone().symmetric_eigen();
        let mut reference: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        // Equal weight on every eigenvector.
        let psi = StateVector::normalized(eig.eigenvectors.column_sum(), vec![3]).map_err(e)?;
        let obs = Observable::new("h", h).map_err(e)?;
        let mut sys = PSystem::new(psi, Mode::Passive, 1_200 + i);
        let mut seen = estimate_spectrum(&mut sys, &obs, 1_000).map_err(e)?;
        seen.sort_by(f64::total_cmp);
        complete &= seen.len() == 3;
        for (s, t) in seen.iter().zip(&reference) {
            worst = worst.max((s - t).abs());
        }
    }
    check(complete && worst <= 1e-12, format!("all recovered {complete}, max error {worst:e}"))
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn determinism() -> Outcome {
    let mut compared = 0;
    for entry in std::fs::read_dir(configs_dir()).map_err(e)? {
        let path = entry.map_err(e)?.path();
        let cfg = parse_config(&std::fs::read_to_string(&path).map_err(e)?).map_err(e)?;
        let a = run(&cfg).map_err(e)?.to_json();
        let b = run(&cfg).map_err(e)?.to_json();
        if a != b {
            return Err(format!("{} differs between runs", path.display()));
        }
        compared += 1;
    }
    check(compared >= 17, format!("{compared} configs byte-identical on rerun"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("repeatability split", repeatability),
        ("Born convergence", born_convergence),
        ("single-copy reconstruction", reconstruction),
        ("instrument non-linearity witness", witness),
        ("CHSH split", chsh),
        ("local indistinguishability", local_indistinguishability),
        ("no-signalling", no_signalling),
        ("oracle cost", oracle_cost),
        ("proper vs improper", proper_improper),
        ("teleportation", teleportation),
        ("collapse simulation", qt_simulation),
        ("spectrum estimation", spectrum),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("AC{:<2} PASS  {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("AC{:<2} FAIL  {name}: {d}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
