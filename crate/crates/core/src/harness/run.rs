//! Protocol dispatch: config to resolved plan, plan to report.

use super::config::{ActionSpec, ExperimentConfig, IcSpec};
use super::report::{Cell, Report, Table};
use super::rng::stream_seed;
use super::stats::{chi_square_gof, empirical, tv_distance, wilson_interval};
use crate::composite::{
    self, global_joint_distribution, global_joint_sample, global_joint_sample_ensemble, local_passive_joint_distribution,
    local_passive_joint_sample, AliceAction, ChshSettings, JointFrequencyTable, JointSource, LocalSetting, Side,
};
use crate::error::{Error, Result};
use crate::hilbert::{fidelity, QuantumState, StateVector, UnitaryOperator};
use crate::measurement::{born_distribution, Ensemble, Mode, Observable, PSystem};
use crate::protocols::{
    self, MixtureKind, MixtureSource, OracleSpec, Promise, ProtocolReport,
};
use crate::tomography::{self, ICSet};

const WILSON_Z: f64 = 1.96;

enum Plan {
    Repeatability { state: QuantumState, obs: Observable, trials: u64 },
    BornSampling { state: QuantumState, obs: Observable, shots: usize },
    Reconstruct { state: QuantumState, ic: ICSet, target: QuantumState, shots: usize },
    Discriminate { state: QuantumState, candidates: Vec<StateVector>, ic: ICSet, shots: usize },
    Spectrum { state: QuantumState, obs: Observable, shots: usize },
    GlobalJoint { state: QuantumState, a: Observable, b: Observable, shots: usize },
    LocalJoint { state: QuantumState, a: Observable, b: Observable, shots: usize },
    Chsh { state: QuantumState, settings: ChshSettings, source: JointSource, shots: usize },
    Entanglement { state: QuantumState, shots: usize },
    Signalling { state: QuantumState, action: AliceAction, b: Observable },
    FunctionRecovery { spec: OracleSpec, shots: usize },
    DeutschJozsa { spec: OracleSpec, shots: usize },
    Clone { state: QuantumState, shots: usize },
    NoCloning { unitary: UnitaryOperator, psi: StateVector, phi: StateVector },
    Mixture { source: MixtureSource, trials: usize, shots: usize },
    SimulateQt { state: QuantumState, obs: Observable, subsystem: Option<usize>, follow_up: Option<Observable>, shots: usize },
    Teleportation { input: StateVector, trials: usize },
}

fn shots(cfg: &ExperimentConfig) -> Result<usize> {
    cfg.shots
        .map(|s| s as usize)
        .ok_or_else(|| Error::config("shots", "required by this protocol"))
}

fn trials(cfg: &ExperimentConfig) -> Result<u64> {
    cfg.trials.ok_or_else(|| Error::config("trials", "required by this protocol"))
}

fn matching(field: &str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::config(field, format!("dimension {found} does not match the system dimension {expected}")));
    }
    Ok(())
}

fn bipartite(cfg: &ExperimentConfig, state: &QuantumState) -> Result<()> {
    if state.shape().len() != 2 {
        return Err(Error::config(
            "initial_state",
            format!("this protocol needs a bipartite state, got shape {:?}", state.shape()),
        ));
    }
    let _ = cfg;
    Ok(())
}

fn local_pair(cfg: &ExperimentConfig, state: &QuantumState) -> Result<(Observable, Observable)> {
    bipartite(cfg, state)?;
    let a = cfg.observable(0)?;
    let b = cfg.observable(1)?;
    matching("observables[0]", state.shape()[0], a.dim())?;
    matching("observables[1]", state.shape()[1], b.dim())?;
    Ok((a, b))
}

fn oracle_spec(cfg: &ExperimentConfig) -> Result<OracleSpec> {
    let table = cfg
        .truth_table
        .clone()
        .ok_or_else(|| Error::config("truth_table", "required by this protocol"))?;
    if table.len() < 2 || !table.len().is_power_of_two() {
        return Err(Error::config("truth_table", "length must be a power of two, at least 2"));
    }
    let n = table.len().trailing_zeros() as usize;
    OracleSpec::new(n, table, cfg.promise.unwrap_or(Promise::None)).map_err(|e| Error::config("truth_table", e.to_string()))
}

fn ic_for(cfg: &ExperimentConfig, shape: &[usize]) -> Result<ICSet> {
    let build = |d: usize| -> Result<ICSet> {
        match cfg.ic.unwrap_or(IcSpec::Standard) {
            IcSpec::Standard => ICSet::standard(d),
            IcSpec::GellMann => ICSet::hermitian_basis(d),
            IcSpec::Pauli => {
                if !d.is_power_of_two() {
                    return Err(Error::InvalidArgument(format!("Pauli sets need a power-of-two dimension, got {d}")));
                }
                ICSet::pauli(d.trailing_zeros() as usize)
            }
        }
    };
    let ic = match cfg.subsystem {
        None => build(shape.iter().product())?,
        Some(k) if k < shape.len() => build(shape[k])?.local(k, shape)?,
        Some(k) => return Err(Error::config("subsystem", format!("index {k} out of range for shape {shape:?}"))),
    };
    Ok(ic)
}

fn plan(cfg: &ExperimentConfig) -> Result<Plan> {
    let p = match cfg.protocol.as_str() {
        "repeatability" => {
            let state = cfg.state()?;
            let obs = cfg.observable(0)?;
            matching("observables[0]", state.dim(), obs.dim())?;
            Plan::Repeatability { state, obs, trials: trials(cfg)? }
        }
        "born-sampling" => {
            let state = cfg.state()?;
            let obs = cfg.observable(0)?;
            matching("observables[0]", state.dim(), obs.dim())?;
            Plan::BornSampling { state, obs, shots: shots(cfg)? }
        }
        "reconstruct" => {
            let state = cfg.state()?;
            let ic = ic_for(cfg, state.shape()).map_err(|e| Error::config("ic", e.to_string()))?;
            let target = match cfg.subsystem {
                Some(k) => QuantumState::Mixed(state.partial_trace(k).map_err(|e| Error::config("subsystem", e.to_string()))?),
                None => state.clone(),
            };
            Plan::Reconstruct { state, ic, target, shots: shots(cfg)? }
        }
        "discriminate" => {
            let state = cfg.state()?;
            let candidates = cfg.candidates()?;
            if candidates.len() < 2 {
                return Err(Error::config("candidates", "at least two candidates are needed"));
            }
            for (i, cand) in candidates.iter().enumerate() {
                matching(&format!("candidates[{i}]"), state.dim(), cand.dim())?;
            }
            let ic = ic_for(cfg, state.shape()).map_err(|e| Error::config("ic", e.to_string()))?;
            Plan::Discriminate { state, candidates, ic, shots: shots(cfg)? }
        }
        "spectrum" => {
            let state = cfg.state()?;
            let obs = cfg.observable(0)?;
            matching("observables[0]", state.dim(), obs.dim())?;
            Plan::Spectrum { state, obs, shots: shots(cfg)? }
        }
        "global-joint" => {
            let state = cfg.state()?;
            let (a, b) = local_pair(cfg, &state)?;
            Plan::GlobalJoint { state, a, b, shots: shots(cfg)? }
        }
        "local-joint" => {
            let state = cfg.state()?;
            let (a, b) = local_pair(cfg, &state)?;
            Plan::LocalJoint { state, a, b, shots: shots(cfg)? }
        }
        "chsh" => {
            let state = cfg.state()?;
            bipartite(cfg, &state)?;
            let settings = match cfg.observables.len() {
                0 => ChshSettings::tsirelson(),
                4 => {
                    let o: Vec<Observable> = (0..4).map(|i| cfg.observable(i)).collect::<Result<_>>()?;
                    for (i, obs) in o.iter().enumerate() {
                        matching(&format!("observables[{i}]"), state.shape()[i / 2], obs.dim())?;
                    }
                    ChshSettings::new([o[0].clone(), o[1].clone()], [o[2].clone(), o[3].clone()])
                        .map_err(|e| Error::config("observables", e.to_string()))?
                }
                n => return Err(Error::config("observables", format!("give 0 or 4 settings (A1, A2, B1, B2), got {n}"))),
            };
            Plan::Chsh { state, settings, source: cfg.source.unwrap_or(JointSource::Global), shots: shots(cfg)? }
        }
        "entanglement" => {
            let state = cfg.state()?;
            bipartite(cfg, &state)?;
            Plan::Entanglement { state, shots: shots(cfg)? }
        }
        "signalling" => {
            let state = cfg.state()?;
            bipartite(cfg, &state)?;
            let action = cfg.action.unwrap_or(ActionSpec::PassiveMeasure);
            let b_index = if action == ActionSpec::None { 0 } else { 1 };
            let b = cfg.observable(b_index)?;
            matching(&format!("observables[{b_index}]"), state.shape()[1], b.dim())?;
            let action = match action {
                ActionSpec::None => AliceAction::None,
                ActionSpec::PassiveMeasure | ActionSpec::QuantumMeasureNonselective => {
                    let a = cfg.observable(0)?;
                    matching("observables[0]", state.shape()[0], a.dim())?;
                    if action == ActionSpec::PassiveMeasure {
                        AliceAction::PassiveMeasure(a)
                    } else {
                        AliceAction::QuantumNonSelective(a)
                    }
                }
            };
            Plan::Signalling { state, action, b }
        }
        "function-recovery" => Plan::FunctionRecovery { spec: oracle_spec(cfg)?, shots: shots(cfg)? },
        "deutsch-jozsa" => {
            let spec = oracle_spec(cfg)?;
            if spec.promise() == Promise::None {
                return Err(Error::config("promise", "must be `constant` or `balanced`"));
            }
            Plan::DeutschJozsa { spec, shots: shots(cfg)? }
        }
        "clone" => Plan::Clone { state: cfg.state()?, shots: shots(cfg)? },
        "no-cloning" => {
            let unitary = cfg.unitary_operator()?;
            let candidates = cfg.candidates()?;
            let [psi, phi] = <[StateVector; 2]>::try_from(candidates)
                .map_err(|_| Error::config("candidates", "give exactly two test states"))?;
            matching("candidates[1]", psi.dim(), phi.dim())?;
            matching("unitary", psi.dim() * psi.dim(), unitary.dim())?;
            Plan::NoCloning { unitary, psi, phi }
        }
        "proper-vs-improper" => {
            let components = cfg.mixture_components()?;
            if components.is_empty() {
                return Err(Error::config("mixture", "required by this protocol"));
            }
            let source = match cfg.presentation.unwrap_or(MixtureKind::Proper) {
                MixtureKind::Proper => MixtureSource::Proper(components),
                MixtureKind::Improper => MixtureSource::purification_of(&components)
                    .map_err(|e| Error::config("mixture", e.to_string()))?,
            };
            Plan::Mixture { source, trials: trials(cfg)? as usize, shots: shots(cfg)? }
        }
        "simulate-qt" => {
            let state = cfg.state()?;
            let obs = cfg.observable(0)?;
            let subsystem = if state.shape().len() == 2 {
                let k = cfg.subsystem.unwrap_or(0);
                if k > 1 {
                    return Err(Error::config("subsystem", "must be 0 or 1"));
                }
                matching("observables[0]", state.shape()[k], obs.dim())?;
                Some(k)
            } else {
                matching("observables[0]", state.dim(), obs.dim())?;
                None
            };
            let follow_up = if cfg.observables.len() > 1 {
                let f = cfg.observable(1)?;
                matching("observables[1]", state.dim(), f.dim())?;
                Some(f)
            } else {
                None
            };
            Plan::SimulateQt { state, obs, subsystem, follow_up, shots: shots(cfg)? }
        }
        "teleportation" => {
            let state = cfg.state()?;
            let input = state
                .as_pure()
                .cloned()
                .filter(|s| s.dim() == 2)
                .ok_or_else(|| Error::config("initial_state", "teleportation needs a pure qubit input"))?;
            Plan::Teleportation { input, trials: trials(cfg)? as usize }
        }
        other => return Err(Error::config("protocol", format!("unknown protocol `{other}`"))),
    };
    Ok(p)
}

/// Everything `run` would reject before sampling.
pub(crate) fn check_requirements(cfg: &ExperimentConfig) -> Result<()> {
    plan(cfg).map(|_| ())
}

/// Runs a validated config. Identical configs give identical reports.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let plan = plan(cfg)?;
    let mut report = Report::new(cfg);
    execute(cfg, plan, &mut report).map_err(|e| e.in_context(format!("protocol `{}`", cfg.protocol)))?;
    Ok(report)
}

fn seed_for(cfg: &ExperimentConfig, component: &str) -> u64 {
    stream_seed(cfg.seed, &format!("{}/{component}", cfg.protocol))
}

fn system(cfg: &ExperimentConfig, state: QuantumState) -> PSystem {
    PSystem::new(state, cfg.mode, seed_for(cfg, "system"))
}

fn merge(report: &mut Report, pr: ProtocolReport) {
    report.resources = Some(pr.resources);
    report.verdicts.extend(pr.verdicts);
    for (k, v) in pr.fidelities {
        report.exact(&format!("fidelity_{k}"), v);
    }
    report.log.extend(pr.log);
}

fn joint_table(sampled: &JointFrequencyTable, exact: &[f64]) -> Table {
    let mut t = Table::new(&["a", "b", "count", "frequency", "exact"]);
    for ((&(a, b, k), f), p) in sampled.rows.iter().zip(sampled.frequencies()).zip(exact) {
        t.push(vec![a.into(), b.into(), k.into(), f.into(), (*p).into()]);
    }
    t
}

fn record_joint(report: &mut Report, sampled: &JointFrequencyTable, exact: &[f64]) -> Result<()> {
    report.table("joint", joint_table(sampled, exact));
    report.exact("tv_to_exact", tv_distance(&sampled.frequencies(), exact)?);
    if let Ok(e) = composite::correlator(sampled) {
        let n = sampled.total as f64;
        report.metric("correlator", e, ((1.0 - e * e).max(0.0) / n).sqrt());
    }
    report.exact("shots", sampled.total as f64);
    Ok(())
}

fn outcome_counts(obs: &Observable, outcomes: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; obs.outcome_count()];
    for &v in outcomes {
        counts[obs.decomposition().index_of(v)] += 1;
    }
    counts
}

fn execute(cfg: &ExperimentConfig, plan: Plan, report: &mut Report) -> Result<()> {
    match plan {
        Plan::Repeatability { state, obs, trials } => {
            let r = protocols::repeatability_experiment(&state, &obs, cfg.mode, trials, seed_for(cfg, "system"))?;
            let n = r.trials as f64;
            report.metric("agreement_rate", r.rate, (r.rate * (1.0 - r.rate) / n).sqrt());
            report.exact("expected_rate", r.expected_rate);
            let (lo, hi) = wilson_interval(r.agreements, r.trials, WILSON_Z)?;
            report.exact("agreement_rate_wilson_lo", lo);
            report.exact("agreement_rate_wilson_hi", hi);
            report.exact("agreements", r.agreements as f64);
            report.resources = Some(protocols::Resources {
                oracle_calls: 0,
                copies_consumed: r.copies_consumed,
                shots: 2 * r.trials,
            });
        }
        Plan::BornSampling { state, obs, shots } => {
            let mut sys = system(cfg, state.clone());
            let rec = sys.repeated_measure(&obs, shots)?;
            let counts = outcome_counts(&obs, &rec.outcomes);
            let born = born_distribution(&obs, &state)?.probabilities();
            let freq = empirical(&counts);
            let mut t = Table::new(&["eigenvalue", "count", "frequency", "born"]);
            for (i, &a) in obs.eigenvalues().iter().enumerate() {
                t.push(vec![a.into(), counts[i].into(), freq[i].into(), born[i].into()]);
            }
            report.table("distribution", t);
            report.exact("tv_distance", tv_distance(&freq, &born)?);
            let chi = chi_square_gof(&counts, &born)?;
            report.exact("chi_square", chi.statistic);
            report.exact("chi_square_p_value", chi.p_value);
            report.metric("mean", rec.mean(), (crate::measurement::expectation_variance(&obs, &state)?.1 / shots as f64).sqrt());
            report.verdict("state_unchanged", sys.state() == &state);
        }
        Plan::Reconstruct { state, ic, target, shots } => {
            let mut sys = system(cfg, state.clone());
            let rec = tomography::reconstruct_single_copy(&mut sys, &ic, shots)?;
            let mut t = Table::new(&["observable", "mean", "half_width"]);
            for d in &rec.diagnostics {
                t.push(vec![d.observable.clone().into(), d.mean.into(), d.half_width.into()]);
            }
            report.table("expectations", t);
            let estimate = QuantumState::Mixed(rec.estimate.clone());
            report.exact("fidelity", fidelity(&target, &estimate)?);
            report.exact("purity", rec.estimate.purity());
            report.exact("condition_number", ic.condition_number());
            report.state("estimate", rec.estimate.matrix());
            report.state("raw_estimate", &rec.raw_estimate);
            report.verdict("state_unchanged", sys.state() == &state);
        }
        Plan::Discriminate { state, candidates, ic, shots } => {
            let mut sys = system(cfg, state);
            let d = tomography::discriminate(&mut sys, &candidates, &ic, shots)?;
            let mut t = Table::new(&["candidate", "fidelity"]);
            for (i, f) in d.fidelities.iter().enumerate() {
                t.push(vec![i.into(), (*f).into()]);
            }
            report.table("candidates", t);
            report.verdict("candidate", d.index);
        }
        Plan::Spectrum { state, obs, shots } => {
            let mut sys = system(cfg, state.clone());
            let seen = tomography::estimate_spectrum(&mut sys, &obs, shots)?;
            let born = born_distribution(&obs, &state)?;
            let mut t = Table::new(&["eigenvalue", "born", "seen"]);
            for &(a, p) in born.outcomes() {
                let hit = seen.contains(&a);
                t.push(vec![a.into(), p.into(), (if hit { 1.0 } else { 0.0 }).into()]);
            }
            report.table("spectrum", t);
            let reference: Vec<f64> = obs.matrix().clone().symmetric_eigenvalues().iter().copied().collect();
            let err = seen
                .iter()
                .map(|s| reference.iter().map(|r| (s - r).abs()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max);
            report.exact("max_eigenvalue_error", err);
            report.exact("distinct_seen", seen.len() as f64);
            report.verdict("all_recovered", seen.len() == obs.outcome_count());
        }
        Plan::GlobalJoint { state, a, b, shots } => {
            let exact = global_joint_distribution(&state, &a, &b)?.probabilities();
            let table = match cfg.mode {
                Mode::Passive => global_joint_sample(&mut system(cfg, state), &a, &b, shots)?,
                Mode::Quantum => {
                    let mut ens = Ensemble::new(state, seed_for(cfg, "ensemble"));
                    let t = global_joint_sample_ensemble(&mut ens, &a, &b, shots)?;
                    report.exact("copies_consumed", ens.copies_consumed() as f64);
                    t
                }
            };
            record_joint(report, &table, &exact)?;
        }
        Plan::LocalJoint { state, a, b, shots } => {
            let (sa, sb) = (LocalSetting::new(Side::A, a), LocalSetting::new(Side::B, b));
            let exact = local_passive_joint_distribution(&state, &sa, &sb)?.probabilities();
            let table = local_passive_joint_sample(&mut system(cfg, state), &sa, &sb, shots)?;
            record_joint(report, &table, &exact)?;
        }
        Plan::Chsh { state, settings, source, shots } => {
            let exact = composite::exact_chsh_value(&state, &settings, source)?;
            let r = composite::chsh_value(&mut system(cfg, state), &settings, source, shots)?;
            let var: f64 = r.correlators.iter().map(|e| (1.0 - e * e).max(0.0)).sum();
            report.metric("S", r.value, (var / shots as f64).sqrt());
            report.exact("S_exact", exact.value);
            for (name, e) in ["E11", "E12", "E21", "E22"].iter().zip(r.correlators) {
                report.metric(name, e, ((1.0 - e * e).max(0.0) / shots as f64).sqrt());
            }
            report.verdict("exceeds_classical_bound", r.value.abs() > 2.0);
        }
        Plan::Entanglement { state, shots } => {
            let r = composite::detect_entanglement_single_copy(&mut system(cfg, state), shots)?;
            report.verdict("verdict", serde_json::to_value(r.verdict)?.as_str().unwrap_or_default());
            report.exact("purity", r.purity);
            report.state("reduced_estimate", r.reduced_estimate.matrix());
        }
        Plan::Signalling { state, action, b } => {
            let r = composite::signalling_check(&state, &action, &b)?;
            let mut t = Table::new(&["eigenvalue", "without_action", "with_action"]);
            for ((a, p), q) in b.eigenvalues().iter().zip(&r.without_action).zip(&r.with_action) {
                t.push(vec![(*a).into(), (*p).into(), (*q).into()]);
            }
            report.table("marginals", t);
            report.exact("tv", r.tv);
        }
        Plan::FunctionRecovery { spec, shots } => {
            let r = protocols::function_recovery(&spec, cfg.mode, shots, seed_for(cfg, "oracle"))?;
            let mut t = Table::new(&["x", "f"]);
            for (x, &f) in r.truth_table.iter().enumerate() {
                t.push(vec![x.into(), (f as usize).into()]);
            }
            report.table("truth_table", t);
            merge(report, r.report);
        }
        Plan::DeutschJozsa { spec, shots } => {
            let (_, pr) = protocols::deutsch_jozsa_verdict(&spec, cfg.mode, shots, seed_for(cfg, "oracle"))?;
            merge(report, pr);
        }
        Plan::Clone { state, shots } => {
            let mut sys = system(cfg, state.clone());
            let r = protocols::clone_via_reconstruction(&mut sys, shots)?;
            report.exact("fidelity", r.fidelity);
            report.state("clone", &r.clone.state().to_density().matrix().clone());
            report.verdict("original_unchanged", sys.state() == &state);
        }
        Plan::NoCloning { unitary, psi, phi } => {
            let r = protocols::no_cloning_check(&unitary, &psi, &phi)?;
            report.exact("overlap_re", r.overlap.re);
            report.exact("overlap_im", r.overlap.im);
            report.exact("obstruction", r.obstruction);
            report.exact("fidelity_psi", r.fidelity_psi);
            report.exact("fidelity_phi", r.fidelity_phi);
            report.verdict("clones_both", r.clones_both);
        }
        Plan::Mixture { source, trials, shots } => {
            let r = protocols::proper_vs_improper(&source, trials, shots, seed_for(cfg, "trials"))?;
            let mut t = Table::new(&["trial", "purity", "verdict"]);
            for (i, (p, v)) in r.purities.iter().zip(&r.trial_verdicts).enumerate() {
                t.push(vec![i.into(), (*p).into(), Cell::Text(kind_name(*v).into())]);
            }
            report.table("trials", t);
            let n = trials as f64;
            let spread = r.purities.iter().map(|p| (p - r.mean_purity).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
            report.metric("mean_purity", r.mean_purity, (spread / n).sqrt());
            report.exact("threshold", r.threshold);
            report.exact("average_state_purity", r.average_purity);
            report.verdict("verdict", kind_name(r.verdict));
        }
        Plan::SimulateQt { state, obs, subsystem, follow_up, shots } => {
            let mut sys = PSystem::new(state.clone(), Mode::Passive, seed_for(cfg, "system"));
            let seed = seed_for(cfg, "comparison");
            let r = match subsystem {
                None => {
                    let library = protocols::eigenstate_library(&obs, state.shape(), seed_for(cfg, "library"))?;
                    let follow = follow_up.unwrap_or_else(|| obs.clone());
                    protocols::simulate_qt_single(&mut sys, &obs, library, &follow, shots, seed)?
                }
                Some(k) => {
                    let setting = LocalSetting::new(if k == 0 { Side::A } else { Side::B }, obs);
                    let follow = match follow_up {
                        Some(f) => f,
                        None => composite::lift_local(&setting, state.shape())?,
                    };
                    protocols::simulate_qt_bipartite(&mut sys, &setting, shots, &follow, shots, seed)?
                }
            };
            let mut t = Table::new(&["outcome_index", "simulated", "quantum"]);
            for (i, (p, q)) in r.follow_up_simulated.iter().zip(&r.follow_up_quantum).enumerate() {
                t.push(vec![i.into(), (*p).into(), (*q).into()]);
            }
            report.table("follow_up", t);
            report.exact("outcome", r.outcome);
            report.exact("tv", r.tv);
            report.state("replacement", r.replacement.to_density().matrix());
            merge(report, r.report);
        }
        Plan::Teleportation { input, trials } => {
            let r = protocols::teleportation_demo(&input, cfg.mode, trials, seed_for(cfg, "trials"))?;
            let mut t = Table::new(&["trial", "m0", "m1", "fidelity"]);
            for (i, ((m0, m1), f)) in r.outcomes.iter().zip(&r.fidelities).enumerate() {
                t.push(vec![i.into(), (*m0 as usize).into(), (*m1 as usize).into(), (*f).into()]);
            }
            report.table("trials", t);
            report.exact("mean_fidelity", r.mean_fidelity);
            if !r.analytic_fidelities.is_empty() {
                let mean = r.analytic_fidelities.iter().sum::<f64>() / r.analytic_fidelities.len() as f64;
                report.exact("analytic_fidelity", mean);
            }
        }
    }
    Ok(())
}

fn kind_name(k: MixtureKind) -> &'static str {
    match k {
        MixtureKind::Proper => "proper",
        MixtureKind::Improper => "improper",
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
