//! Storage and gate-operation experiments: encoded pairs against bare qubits
//! sharing the same bath.

use num_complex::Complex64;
use thiserror::Error;

use crate::dfs::{decode, encode, pair_dfs_leakage, DfsError, LogicalState};
use crate::evolve::{
    l1_coherence, reduce_to_system, top_level_populations, EvolveError, Propagator,
};
use crate::gates::{
    commutator_norm, gate_hamiltonian, to_computational, u_bare_gate, u_pair_gate,
    unitary_from_hamiltonian, GateError, GateParams,
};
use crate::model::{
    assemble_h_bare, assemble_h_total, bare_layout, pair_layout, AsymmetryKnob, BathSpec,
    ModelError, NoiseModel,
};
use crate::qops::{
    kron_all, kron_vectors, max_abs, s_eigenbasis, CMatrix, CVector, HilbertLayout, ONE,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dfs(#[from] DfsError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error("{0}")]
    Invalid(String),
}

/// Initial state of the bath modes.
#[derive(Debug, Clone, PartialEq)]
pub enum BathInit {
    Vacuum,
    /// Truncated Gibbs state of every mode at temperature T (k_B = ħ = 1).
    Thermal {
        temperature: f64,
    },
    /// Truncated, renormalized coherent state per mode with real amplitude.
    Coherent {
        amplitudes: Vec<f64>,
    },
}

/// Statistical mixture of pure states, Σ w_k |ψ_k⟩⟨ψ_k|.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub members: Vec<(f64, CVector)>,
}

impl Ensemble {
    pub fn pure(psi: CVector) -> Self {
        Self {
            members: vec![(1.0, psi)],
        }
    }
}

/// Weights below this are dropped from thermal ensembles.
const ENSEMBLE_CUTOFF: f64 = 1e-16;

fn fock(dim: usize, n: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[n] = ONE;
    v
}

fn coherent_state(dim: usize, alpha: f64) -> CVector {
    let mut v = CVector::zeros(dim);
    let mut amp = (-alpha * alpha / 2.0).exp();
    for n in 0..dim {
        if n > 0 {
            amp *= alpha / (n as f64).sqrt();
        }
        v[n] = Complex64::new(amp, 0.0);
    }
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// Decomposes the bath initial state into weighted product states.
pub fn bath_ensemble(bath: &BathSpec, init: &BathInit) -> Result<Ensemble, ExperimentError> {
    let dims = bath.mode_dims();
    match init {
        BathInit::Vacuum => Ok(Ensemble::pure(kron_vectors(
            dims.iter().map(|&d| fock(d, 0)).collect::<Vec<_>>().iter(),
        ))),
        BathInit::Coherent { amplitudes } => {
            if amplitudes.len() != dims.len() {
                return Err(ExperimentError::Invalid(format!(
                    "coherent bath needs {} amplitudes, got {}",
                    dims.len(),
                    amplitudes.len()
                )));
            }
            let states: Vec<CVector> = dims
                .iter()
                .zip(amplitudes)
                .map(|(&d, &a)| coherent_state(d, a))
                .collect();
            Ok(Ensemble::pure(kron_vectors(states.iter())))
        }
        BathInit::Thermal { temperature } => {
            if !(temperature.is_finite() && *temperature >= 0.0) {
                return Err(ExperimentError::Invalid(format!(
                    "temperature must be non-negative, got {temperature}"
                )));
            }
            let per_mode: Vec<Vec<f64>> = bath
                .modes
                .iter()
                .map(|m| {
                    let w: Vec<f64> = (0..m.fock_dim)
                        .map(|n| {
                            if *temperature == 0.0 {
                                if n == 0 {
                                    1.0
                                } else {
                                    0.0
                                }
                            } else {
                                (-(n as f64) * m.frequency / temperature).exp()
                            }
                        })
                        .collect();
                    let z: f64 = w.iter().sum();
                    w.into_iter().map(|x| x / z).collect()
                })
                .collect();
            let total: usize = dims.iter().product();
            let mut members = Vec::new();
            for idx in 0..total {
                let mut rem = idx;
                let mut weight = 1.0;
                for k in (0..dims.len()).rev() {
                    weight *= per_mode[k][rem % dims[k]];
                    rem /= dims[k];
                }
                if weight > ENSEMBLE_CUTOFF {
                    members.push((weight, fock(total, idx)));
                }
            }
            let z: f64 = members.iter().map(|(w, _)| w).sum();
            for m in &mut members {
                m.0 /= z;
            }
            Ok(Ensemble { members })
        }
    }
}

/// Per-time record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub time: f64,
    /// ⟨ψ_ref(t)|ρ_sys(t)|ψ_ref(t)⟩.
    pub fidelity: f64,
    /// l1 coherence of ρ_sys in the S eigenbasis.
    pub coherence_offdiag: f64,
    /// Out-of-subspace norm; absent for unencoded runs.
    pub dfs_leakage: Option<f64>,
    pub top_fock_pop: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub layout: HilbertLayout,
    pub times: Vec<f64>,
    pub states: Vec<Ensemble>,
    pub reduced: Vec<CMatrix>,
    pub metrics: Vec<MetricsRow>,
}

impl EvolutionResult {
    pub fn min_fidelity(&self) -> f64 {
        self.metrics
            .iter()
            .map(|m| m.fidelity)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_infidelity(&self) -> f64 {
        1.0 - self.min_fidelity()
    }

    pub fn max_leakage(&self) -> Option<f64> {
        self.metrics
            .iter()
            .map(|m| m.dfs_leakage)
            .try_fold(0.0f64, |acc, l| l.map(|l| acc.max(l)))
    }

    pub fn max_top_fock_pop(&self) -> f64 {
        self.metrics
            .iter()
            .flat_map(|m| m.top_fock_pop.iter().copied())
            .fold(0.0, f64::max)
    }

    pub fn final_metrics(&self) -> &MetricsRow {
        self.metrics.last().expect("at least one time point")
    }
}

struct RunSpec<'a> {
    h: &'a CMatrix,
    layout: HilbertLayout,
    system: CVector,
    bath: &'a Ensemble,
    times: &'a [f64],
    /// Reference system state at time t.
    reference: &'a dyn Fn(f64) -> CVector,
    coherence_basis: CMatrix,
    /// Pairs and S basis for leakage, when the run is encoded.
    leakage: Option<(crate::qops::SBasis, usize)>,
}

fn run(spec: RunSpec<'_>) -> Result<EvolutionResult, ExperimentError> {
    let prop = Propagator::new(spec.h)?;
    let trajectories: Vec<(f64, Vec<CVector>)> = spec
        .bath
        .members
        .iter()
        .map(|(w, b)| {
            let psi0 = spec.system.kronecker(b);
            prop.evolve(&psi0, spec.times).map(|t| (*w, t))
        })
        .collect::<Result<_, _>>()?;

    let sys_dim = spec.layout.system_dim();
    let mut states = Vec::with_capacity(spec.times.len());
    let mut reduced = Vec::with_capacity(spec.times.len());
    let mut metrics = Vec::with_capacity(spec.times.len());
    for (k, &t) in spec.times.iter().enumerate() {
        let mut rho = CMatrix::zeros(sys_dim, sys_dim);
        let mut leak_sq = 0.0;
        let mut pops = vec![0.0; spec.layout.mode_dims.len()];
        let mut members = Vec::with_capacity(trajectories.len());
        for (w, traj) in &trajectories {
            let psi = &traj[k];
            rho += reduce_to_system(psi, &spec.layout) * Complex64::new(*w, 0.0);
            if let Some((sb, pairs)) = &spec.leakage {
                leak_sq += w * pair_dfs_leakage(psi, sb, *pairs).powi(2);
            }
            for (p, q) in pops
                .iter_mut()
                .zip(top_level_populations(psi, &spec.layout))
            {
                *p += w * q;
            }
            members.push((*w, psi.clone()));
        }
        let reference = (spec.reference)(t);
        metrics.push(MetricsRow {
            time: t,
            fidelity: crate::evolve::fidelity(&rho, &reference),
            coherence_offdiag: l1_coherence(&rho, &spec.coherence_basis),
            dfs_leakage: spec.leakage.as_ref().map(|_| leak_sq.sqrt()),
            top_fock_pop: pops,
        });
        states.push(Ensemble { members });
        reduced.push(rho);
    }
    Ok(EvolutionResult {
        layout: spec.layout,
        times: spec.times.to_vec(),
        states,
        reduced,
        metrics,
    })
}

fn s_basis_frame(nv: &crate::qops::NoiseVector, qubits: usize) -> CMatrix {
    let r = s_eigenbasis(nv).rotation_matrix();
    kron_all(std::iter::repeat_n(&r, qubits))
}

/// Inputs shared by storage runs.
#[derive(Debug, Clone)]
pub struct StorageSetup {
    pub pairs: usize,
    pub noise: NoiseModel,
    /// Couplings are indexed by pair; the bare run couples qubit l exactly
    /// like pair l.
    pub bath: BathSpec,
    pub bath_init: BathInit,
    pub logical: LogicalState,
    pub times: Vec<f64>,
    pub asym: AsymmetryKnob,
}

#[derive(Debug, Clone)]
pub struct StorageOutcome {
    pub encoded: EvolutionResult,
    pub bare: EvolutionResult,
}

/// Evolves the encoded pairs under the driven pair Hamiltonian and the
/// unencoded qubits under the bare Hamiltonian, from the same bath state.
pub fn run_storage_experiment(setup: &StorageSetup) -> Result<StorageOutcome, ExperimentError> {
    let pairs = setup.pairs;
    if setup.logical.qubits() != pairs {
        return Err(ExperimentError::Invalid(format!(
            "logical state has {} qubits for {} pairs",
            setup.logical.qubits(),
            pairs
        )));
    }
    let nv = setup.noise.nv;
    let bath_state = bath_ensemble(&setup.bath, &setup.bath_init)?;

    let layout = pair_layout(pairs, &setup.bath);
    let h = assemble_h_total(pairs, &setup.noise, &setup.bath, &setup.asym, &layout)?;
    let encoded_sys = encode(&setup.logical, &nv);
    let reference = encoded_sys.clone();
    let encoded = run(RunSpec {
        h: &h,
        layout,
        system: encoded_sys,
        bath: &bath_state,
        times: &setup.times,
        reference: &|_| reference.clone(),
        coherence_basis: s_basis_frame(&nv, 2 * pairs),
        leakage: Some((s_eigenbasis(&nv), pairs)),
    })?;

    let layout = bare_layout(pairs, &setup.bath);
    let h = assemble_h_bare(pairs, &setup.noise, &setup.bath, &layout)?;
    let bare_sys = setup.logical.physical(&nv);
    let reference = bare_sys.clone();
    let bare = run(RunSpec {
        h: &h,
        layout,
        system: bare_sys,
        bath: &bath_state,
        times: &setup.times,
        reference: &|_| reference.clone(),
        coherence_basis: s_basis_frame(&nv, pairs),
        leakage: None,
    })?;
    Ok(StorageOutcome { encoded, bare })
}

/// Inputs of a two-pair gate run of unit duration.
#[derive(Debug, Clone)]
pub struct GateSetup {
    pub noise: NoiseModel,
    pub bath: BathSpec,
    pub bath_init: BathInit,
    pub logical: LogicalState,
    pub params: GateParams,
    pub asym: AsymmetryKnob,
    /// Number of time points on [0, 1].
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct GateOutcome {
    pub result: EvolutionResult,
    /// Fidelity of the final system state with exp(−iH_g)·(encoded input).
    pub final_fidelity: f64,
    pub max_leakage: f64,
    /// ‖exp(−iH_g) − U‖_max.
    pub log_roundtrip_error: f64,
    /// Frobenius norms of [U, S_l + S_l'] for both pairs.
    pub commutator_norms: [f64; 2],
    /// |⟨u_bare·c | decode(U·encode(c))⟩|².
    pub logical_fidelity: f64,
}

/// Runs the two-pair gate U for unit time under H_total + H_g.
pub fn run_gate_experiment(setup: &GateSetup) -> Result<GateOutcome, ExperimentError> {
    const PAIRS: usize = 2;
    if setup.logical.qubits() != PAIRS {
        return Err(ExperimentError::Invalid(format!(
            "gate experiment needs a 2-qubit logical state, got {} qubits",
            setup.logical.qubits()
        )));
    }
    if setup.steps < 2 {
        return Err(ExperimentError::Invalid(
            "gate experiment needs at least 2 time points".into(),
        ));
    }
    let nv = setup.noise.nv;
    let u = to_computational(&u_pair_gate(&setup.params), &nv);
    let hg = gate_hamiltonian(&u)?.h;
    let log_roundtrip_error = max_abs(&(unitary_from_hamiltonian(&hg, 1.0) - &u));
    let commutator_norms = [commutator_norm(&u, &nv, 0)?, commutator_norm(&u, &nv, 1)?];

    let encoded_sys = encode(&setup.logical, &nv);
    let expected_logical = u_bare_gate(&setup.params) * setup.logical.amplitudes();
    let actual = decode(&(&u * &encoded_sys), &nv, PAIRS)?;
    let logical_fidelity = actual.amplitudes().dotc(&expected_logical).norm_sqr();

    let layout = pair_layout(PAIRS, &setup.bath);
    let bath_dim = layout.bath_dim();
    let h = assemble_h_total(PAIRS, &setup.noise, &setup.bath, &setup.asym, &layout)?
        + hg.kronecker(&CMatrix::identity(bath_dim, bath_dim));
    let bath_state = bath_ensemble(&setup.bath, &setup.bath_init)?;
    let times = crate::evolve::linspace(0.0, 1.0, setup.steps);
    let gate_prop = Propagator::new(&hg)?;
    let reference = |t: f64| {
        gate_prop
            .evolve(&encoded_sys, &[t])
            .expect("register-sized")
            .remove(0)
    };
    let result = run(RunSpec {
        h: &h,
        layout,
        system: encoded_sys.clone(),
        bath: &bath_state,
        times: &times,
        reference: &reference,
        coherence_basis: s_basis_frame(&nv, 2 * PAIRS),
        leakage: Some((s_eigenbasis(&nv), PAIRS)),
    })?;
    let final_fidelity = result.final_metrics().fidelity;
    let max_leakage = result.max_leakage().unwrap_or(0.0);
    Ok(GateOutcome {
        result,
        final_fidelity,
        max_leakage,
        log_roundtrip_error,
        commutator_norms,
        logical_fidelity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::{linspace, min_eigenvalue};
    use crate::model::{pair_s_sum, BathMode, Coupling};
    use crate::qops::{hermiticity_residual, NoiseVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model(l: [f64; 3], omega0: f64) -> NoiseModel {
        NoiseModel::new(NoiseVector::new(l[0], l[1], l[2]).unwrap(), omega0).unwrap()
    }

    fn single_mode(g: f64, cutoff: usize) -> BathSpec {
        BathSpec::new(
            vec![BathMode {
                frequency: 1.0,
                fock_dim: cutoff,
            }],
            vec![Coupling {
                site: 0,
                mode: 0,
                g,
            }],
        )
        .unwrap()
    }

    fn equal_superposition() -> LogicalState {
        LogicalState::normalized(CVector::from_vec(vec![ONE, ONE])).unwrap()
    }

    fn storage(noise: NoiseModel, g: f64, init: BathInit, eps: f64) -> StorageSetup {
        StorageSetup {
            pairs: 1,
            noise,
            bath: single_mode(g, 6),
            bath_init: init,
            logical: equal_superposition(),
            times: linspace(0.0, 20.0, 50),
            asym: AsymmetryKnob { epsilon: eps },
        }
    }

    #[test]
    fn thermal_ensemble_is_normalized_gibbs() {
        let bath = single_mode(0.1, 4);
        let e = bath_ensemble(&bath, &BathInit::Thermal { temperature: 1.0 }).unwrap();
        assert_eq!(e.members.len(), 4);
        let z: f64 = (0..4).map(|n| (-(n as f64)).exp()).sum();
        for (n, (w, _)) in e.members.iter().enumerate() {
            assert!((w - (-(n as f64)).exp() / z).abs() < 1e-15);
        }
        let cold = bath_ensemble(&bath, &BathInit::Thermal { temperature: 0.0 }).unwrap();
        assert_eq!(cold.members.len(), 1);
        let coh = bath_ensemble(
            &bath,
            &BathInit::Coherent {
                amplitudes: vec![0.5],
            },
        )
        .unwrap();
        assert!((coh.members[0].1.norm() - 1.0).abs() < 1e-15);
        assert!(bath_ensemble(&bath, &BathInit::Coherent { amplitudes: vec![] }).is_err());
    }

    #[test]
    fn encoded_storage_is_decoherence_free() {
        for (l, init) in [
            ([0.0, 0.0, 1.0], BathInit::Vacuum),
            ([1.0, 0.0, 1.0], BathInit::Thermal { temperature: 0.3 }),
            (
                [1.0, 1.0, 1.0],
                BathInit::Coherent {
                    amplitudes: vec![0.3],
                },
            ),
        ] {
            let out = run_storage_experiment(&storage(model(l, 1.0), 0.2, init, 0.0)).unwrap();
            assert!(out.encoded.min_fidelity() >= 1.0 - 1e-9, "{l:?}");
            assert!(out.encoded.max_leakage().unwrap() <= 1e-9);
            assert!(out.bare.min_fidelity() < 0.99);
            let rho0 = &out.encoded.reduced[0];
            let nv = NoiseVector::new(l[0], l[1], l[2]).unwrap();
            for rho in &out.encoded.reduced {
                assert!(crate::qops::max_abs(&(rho - rho0)) <= 1e-9);
                assert!((pair_s_sum(&nv, 0, 1) * rho).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn reduced_states_are_valid_density_matrices() {
        let out = run_storage_experiment(&storage(
            model([0.0, 0.0, 1.0], 1.0),
            0.2,
            BathInit::Thermal { temperature: 0.5 },
            0.1,
        ))
        .unwrap();
        for rho in out.encoded.reduced.iter().chain(&out.bare.reduced) {
            assert!(hermiticity_residual(rho) <= 1e-10);
            assert!((rho.trace().re - 1.0).abs() <= 1e-10);
            assert!(min_eigenvalue(rho) >= -1e-10);
        }
        for ens in &out.encoded.states {
            for (_, psi) in &ens.members {
                assert!((psi.norm() - 1.0).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn decoupled_bath_leaves_bare_run_coherent() {
        // ω0 = 0 removes free precession too
        let out = run_storage_experiment(&storage(
            model([0.0, 0.0, 1.0], 0.0),
            0.0,
            BathInit::Vacuum,
            0.0,
        ))
        .unwrap();
        assert!(out.bare.min_fidelity() >= 1.0 - 1e-12);
    }

    #[test]
    fn bare_dephasing_decays_coherence() {
        let out = run_storage_experiment(&storage(
            model([0.0, 0.0, 1.0], 1.0),
            0.2,
            BathInit::Vacuum,
            0.0,
        ))
        .unwrap();
        let c0 = out.bare.metrics[0].coherence_offdiag;
        let min = out
            .bare
            .metrics
            .iter()
            .map(|m| m.coherence_offdiag)
            .fold(f64::INFINITY, f64::min);
        assert!(min < 0.99 * c0);
        assert!(out.bare.max_top_fock_pop() <= 1e-4);
    }

    #[test]
    fn asymmetry_degrades_storage_monotonically() {
        let infid: Vec<f64> = [0.0, 0.02, 0.05, 0.1]
            .iter()
            .map(|&e| {
                run_storage_experiment(&storage(
                    model([0.0, 0.0, 1.0], 1.0),
                    0.2,
                    BathInit::Vacuum,
                    e,
                ))
                .unwrap()
                .encoded
                .max_infidelity()
            })
            .collect();
        assert!(infid.windows(2).all(|w| w[0] < w[1]), "{infid:?}");
    }

    fn two_pair_bath() -> BathSpec {
        BathSpec::new(
            vec![
                BathMode {
                    frequency: 1.0,
                    fock_dim: 3,
                },
                BathMode {
                    frequency: 0.8,
                    fock_dim: 3,
                },
            ],
            vec![
                Coupling {
                    site: 0,
                    mode: 0,
                    g: 0.2,
                },
                Coupling {
                    site: 1,
                    mode: 1,
                    g: 0.2,
                },
            ],
        )
        .unwrap()
    }

    fn gate_setup(params: GateParams, eps: f64, logical: LogicalState) -> GateSetup {
        GateSetup {
            noise: model([1.0, 0.0, 1.0], 1.0),
            bath: two_pair_bath(),
            bath_init: BathInit::Vacuum,
            logical,
            params,
            asym: AsymmetryKnob { epsilon: eps },
            steps: 5,
        }
    }

    #[test]
    fn gate_run_is_decoherence_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let logical = LogicalState::random(2, &mut rng);
        let out =
            run_gate_experiment(&gate_setup(GateParams::new(0.3, 0.7, 0.2), 0.0, logical)).unwrap();
        assert!(out.final_fidelity >= 1.0 - 1e-8);
        assert!(out.max_leakage <= 1e-9);
        assert!(out.logical_fidelity >= 1.0 - 1e-10);
        assert!(out.log_roundtrip_error <= 1e-10);
    }

    #[test]
    fn trivial_gate_matches_storage() {
        let logical =
            LogicalState::normalized(CVector::from_vec(vec![ONE, ONE, ONE, ONE])).unwrap();
        let out = run_gate_experiment(&gate_setup(
            GateParams::new(0.0, 0.0, 0.5),
            0.0,
            logical.clone(),
        ))
        .unwrap();
        let rho0 = &out.result.reduced[0];
        for rho in &out.result.reduced {
            assert!(crate::qops::max_abs(&(rho - rho0)) <= 1e-9);
        }
    }

    #[test]
    fn gate_fidelity_drops_with_asymmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let logical = LogicalState::random(2, &mut rng);
        let params = GateParams::new(0.3, 0.7, 0.2);
        let fid: Vec<f64> = [0.0, 0.02, 0.05, 0.1]
            .iter()
            .map(|&e| {
                run_gate_experiment(&gate_setup(params, e, logical.clone()))
                    .unwrap()
                    .final_fidelity
            })
            .collect();
        assert!(fid[3] < 1.0 - 1e-8);
        assert!(fid.windows(2).all(|w| w[0] > w[1]), "{fid:?}");
    }
}
