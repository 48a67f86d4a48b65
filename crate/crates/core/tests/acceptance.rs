//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with its measured figure and wall-clock time.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pairdfs::config::parse_config;
use pairdfs::dfs::{
    coherence_preserving_subspace, decode, efficiency, encode, zero_eigenspace_dimension,
    LogicalState,
};
use pairdfs::experiment::{
    run_gate_experiment, run_storage_experiment, BathInit, GateSetup, StorageSetup,
};
use pairdfs::gates::{
    commutator_norm, gate_hamiltonian, to_computational, u_pair_gate, unitary_from_hamiltonian,
    GateParams,
};
use pairdfs::model::{
    assemble_h_drive, assemble_h_pairs, drive_field, pair_layout, pair_s_sum, AsymmetryKnob,
    BathMode, BathSpec, Coupling, NoiseModel,
};
use pairdfs::qops::{max_abs, NoiseVector};
use pairdfs::runner::{compare_csv, run_scenario};
use pairdfs::tolerances::*;
use pairdfs::CMatrix;

fn report(id: u32, title: &str, passed: bool, detail: String, elapsed: Duration, bound: Duration) {
    let in_time = elapsed <= bound;
    let ok = passed && in_time;
    println!(
        "{} criterion {id} ({title}): {detail}; {:.3}s of {}s",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        bound.as_secs()
    );
    assert!(passed, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded {bound:?}: {elapsed:?}");
}

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn noise(l: [f64; 3]) -> NoiseVector {
    NoiseVector::new(l[0], l[1], l[2]).unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Exact integer C(2m, m).
fn central_binomial(m: u64) -> u64 {
    (1..=m).fold(1u64, |acc, k| acc * (m + k) / k)
}

const NOISE_VECTORS: [[f64; 3]; 3] = [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.3, -0.5, 0.8]];

#[test]
fn criterion_1_efficiency() {
    let t = Instant::now();
    let one_pair = efficiency(1).eta_exact;
    let mut worst = 0.0f64;
    for m in 1..=6u64 {
        let oracle = (central_binomial(m) as f64).log2() / (2 * m) as f64;
        worst = worst.max((efficiency(m as usize).eta_exact - oracle).abs());
    }
    let m = EFFICIENCY_APPROX_M;
    let e = efficiency(m);
    let approx_oracle = 1.0 - (std::f64::consts::PI * m as f64).log2() / (4 * m) as f64;
    let approx_gap = (e.eta_exact - e.eta_approx).abs();
    let passed = one_pair == 0.5
        && worst <= EFFICIENCY_TABLE_TOL
        && (e.eta_approx - approx_oracle).abs() <= EFFICIENCY_TABLE_TOL
        && approx_gap <= EFFICIENCY_APPROX_TOL;
    report(
        1,
        "efficiency",
        passed,
        format!("eta(1) = {one_pair}, table error {worst:e}, |exact - approx| at m={m} is {approx_gap:e}"),
        t.elapsed(),
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_2_subspace_dimensions() {
    let t = Instant::now();
    let mut dims = Vec::new();
    let mut worst = 0.0f64;
    let mut passed = true;
    for l in NOISE_VECTORS {
        let nv = noise(l);
        let mut row = Vec::new();
        for m in 1..=3usize {
            let sub = coherence_preserving_subspace(&nv, m).unwrap();
            let numeric = zero_eigenspace_dimension(&nv, m, 1e-8).unwrap();
            let expected = central_binomial(m as u64) as usize;
            passed &= sub.dim() == expected && numeric == expected;
            worst = worst.max(sub.max_residual(&nv));
            row.push(sub.dim());
        }
        dims.push(row);
    }
    passed &= worst <= ZERO_EIGEN_RESIDUAL;
    report(
        2,
        "subspace dimensions",
        passed,
        format!("dims {dims:?}, max residual {worst:e}"),
        t.elapsed(),
        Duration::from_secs(10),
    );
}

fn kron_list(ops: &[CMatrix]) -> CMatrix {
    ops.iter()
        .skip(1)
        .fold(ops[0].clone(), |acc, op| acc.kronecker(op))
}

/// Independent S-form assembly from explicit factor lists.
fn oracle_s_form(pairs: usize, nm: &NoiseModel, bath: &BathSpec) -> CMatrix {
    let [l1, l2, l3] = nm.nv.components();
    let s = DMatrix::from_row_slice(
        2,
        2,
        &[
            c(l3),
            Complex64::new(l1, -l2),
            Complex64::new(l1, l2),
            c(-l3),
        ],
    );
    let dims: Vec<usize> = bath.modes.iter().map(|m| m.fock_dim).collect();
    let factors = 2 * pairs + dims.len();
    let identity_at = |k: usize| {
        let d = if k < 2 * pairs {
            2
        } else {
            dims[k - 2 * pairs]
        };
        CMatrix::identity(d, d)
    };
    let place = |ops: &[(usize, CMatrix)]| {
        let list: Vec<CMatrix> = (0..factors)
            .map(|k| {
                ops.iter()
                    .find(|(f, _)| *f == k)
                    .map(|(_, o)| o.clone())
                    .unwrap_or_else(|| identity_at(k))
            })
            .collect();
        kron_list(&list)
    };
    let kappa = if nm.omega0 == 0.0 {
        0.0
    } else {
        nm.omega0 / l3
    };
    let quad = |d: usize| {
        CMatrix::from_fn(d, d, |i, j| {
            if i + 1 == j || j + 1 == i {
                c((i.max(j) as f64).sqrt())
            } else {
                c(0.0)
            }
        })
    };
    let number =
        |d: usize| CMatrix::from_fn(d, d, |i, j| if i == j { c(i as f64) } else { c(0.0) });
    let total: usize = (1 << (2 * pairs)) * dims.iter().product::<usize>();
    let mut h = CMatrix::zeros(total, total);
    for l in 0..pairs {
        for q in [2 * l, 2 * l + 1] {
            h += place(&[(q, s.clone())]) * c(kappa);
            for cp in bath.couplings.iter().filter(|cp| cp.site == l) {
                let k = 2 * pairs + cp.mode;
                h += place(&[(q, s.clone()), (k, quad(dims[cp.mode]))]) * c(cp.g);
            }
        }
    }
    for (k, m) in bath.modes.iter().enumerate() {
        h += place(&[(2 * pairs + k, number(m.fock_dim))]) * c(m.frequency);
    }
    h
}

fn random_model(rng: &mut ChaCha8Rng) -> (usize, NoiseModel, BathSpec) {
    let pairs = rng.random_range(1..=2usize);
    let nv = noise([
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(0.2..1.0) * if rng.random::<bool>() { 1.0 } else { -1.0 },
    ]);
    let nm = NoiseModel::new(nv, rng.random_range(0.0..2.0)).unwrap();
    let n_modes = rng.random_range(1..=2usize);
    let modes: Vec<BathMode> = (0..n_modes)
        .map(|_| BathMode {
            frequency: rng.random_range(0.5..2.0),
            fock_dim: rng.random_range(2..=4),
        })
        .collect();
    let mut couplings = Vec::new();
    for site in 0..pairs {
        for mode in 0..n_modes {
            if couplings.iter().all(|x: &Coupling| x.site != site) || rng.random::<bool>() {
                couplings.push(Coupling {
                    site,
                    mode,
                    g: rng.random_range(-0.5..0.5),
                });
            }
        }
    }
    (pairs, nm, BathSpec::new(modes, couplings).unwrap())
}

#[test]
fn criterion_3_driven_identity() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let (pairs, nm, bath) = random_model(&mut rng);
        let layout = pair_layout(pairs, &bath);
        let df = drive_field(&nm).unwrap();
        let h = assemble_h_pairs(pairs, &nm, &bath, &AsymmetryKnob::symmetric(), &layout).unwrap()
            + assemble_h_drive(pairs, &df, &layout).unwrap();
        worst = worst.max(max_abs(&(h - oracle_s_form(pairs, &nm, &bath))));
    }
    report(
        3,
        "driven identity",
        worst <= DRIVE_IDENTITY_TOL,
        format!("25 random models, max residual {worst:e}"),
        t.elapsed(),
        Duration::from_secs(30),
    );
}

fn storage_bath() -> BathSpec {
    BathSpec::new(
        vec![BathMode {
            frequency: 1.0,
            fock_dim: 6,
        }],
        vec![Coupling {
            site: 0,
            mode: 0,
            g: 0.2,
        }],
    )
    .unwrap()
}

/// Runs a bundled scenario into `out` and compares every CSV with its golden.
fn scenario_matches_golden(stem: &str, out: &Path) -> Result<pairdfs::runner::RunReport, String> {
    let text =
        fs::read_to_string(manifest().join("scenarios").join(format!("{stem}.toml"))).unwrap();
    let cfg = parse_config(&text).map_err(|e| e.to_string())?;
    let report = run_scenario(&cfg, out, 2).map_err(|e| e.to_string())?;
    for name in &report.files {
        let golden = manifest().join("goldens").join(stem).join(name);
        let expected =
            fs::read_to_string(&golden).map_err(|e| format!("{}: {e}", golden.display()))?;
        let actual = fs::read_to_string(out.join(name)).unwrap();
        compare_csv(&expected, &actual).map_err(|e| format!("{stem}/{name}: {e}"))?;
    }
    Ok(report)
}

#[test]
fn criterion_4_storage() {
    let t = Instant::now();
    let inits = [
        ("vacuum", BathInit::Vacuum),
        ("thermal", BathInit::Thermal { temperature: 0.3 }),
        (
            "coherent",
            BathInit::Coherent {
                amplitudes: vec![0.3],
            },
        ),
    ];
    let logical =
        LogicalState::normalized(nalgebra::DVector::from_vec(vec![c(1.0), c(1.0)])).unwrap();
    let mut worst_encoded = 1.0f64;
    let mut best_bare_min = 0.0f64;
    let mut passed = true;
    for l in [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 1.0]] {
        for (_, init) in &inits {
            let o = run_storage_experiment(&StorageSetup {
                pairs: 1,
                noise: NoiseModel::new(noise(l), 1.0).unwrap(),
                bath: storage_bath(),
                bath_init: init.clone(),
                logical: logical.clone(),
                times: pairdfs::evolve::linspace(0.0, 20.0, 50),
                asym: AsymmetryKnob::symmetric(),
            })
            .unwrap();
            passed &= o.encoded.metrics.len() == 50;
            worst_encoded = worst_encoded.min(o.encoded.min_fidelity());
            best_bare_min = best_bare_min.max(o.bare.min_fidelity());
        }
    }
    passed &= worst_encoded >= 1.0 - STORAGE_FIDELITY_TOL && best_bare_min < BARE_FIDELITY_CEILING;
    let dir = tempfile::tempdir().unwrap();
    let mut golden = "goldens match".to_string();
    for stem in ["storage_vacuum", "storage_thermal", "storage_coherent"] {
        match scenario_matches_golden(stem, &dir.path().join(stem)) {
            Ok(r) => passed &= r.passed(),
            Err(e) => {
                passed = false;
                golden = e;
            }
        }
    }
    report(
        4,
        "zero-decoherence storage",
        passed,
        format!(
            "9 runs: worst encoded fidelity {worst_encoded}, largest bare minimum {best_bare_min}; {golden}"
        ),
        t.elapsed(),
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_5_round_trip() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_infidelity = 0.0f64;
    let mut worst_annihilation = 0.0f64;
    for k in 0..100 {
        let pairs = 1 + k % 2;
        let state = LogicalState::random(pairs, &mut rng);
        for l in NOISE_VECTORS {
            let nv = noise(l);
            let enc = encode(&state, &nv);
            let back = decode(&enc, &nv, pairs).unwrap();
            worst_infidelity = worst_infidelity.max(1.0 - state.fidelity(&back));
            for p in 0..pairs {
                worst_annihilation =
                    worst_annihilation.max((pair_s_sum(&nv, p, pairs) * &enc).norm());
            }
        }
    }
    report(
        5,
        "encode/decode round trip",
        worst_infidelity <= ROUNDTRIP_FIDELITY_TOL && worst_annihilation <= DFS_ANNIHILATION_TOL,
        format!("300 round trips, max infidelity {worst_infidelity:e}, max |(S+S')psi| {worst_annihilation:e}"),
        t.elapsed(),
        Duration::from_secs(30),
    );
}

fn random_params(rng: &mut ChaCha8Rng) -> GateParams {
    let tau = std::f64::consts::TAU;
    GateParams::new(
        rng.random_range(0.0..tau),
        rng.random_range(0.0..tau),
        rng.random_range(0.0..tau),
    )
}

#[test]
fn criterion_6_gate_commutation() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_comm = 0.0f64;
    let mut worst_log = 0.0f64;
    for k in 0..100 {
        let nv = noise(NOISE_VECTORS[k % 3]);
        let u = to_computational(&u_pair_gate(&random_params(&mut rng)), &nv);
        for pair in 0..2 {
            worst_comm = worst_comm.max(commutator_norm(&u, &nv, pair).unwrap());
        }
        let hg = gate_hamiltonian(&u).unwrap().h;
        worst_log = worst_log.max(max_abs(&(unitary_from_hamiltonian(&hg, 1.0) - &u)));
    }
    report(
        6,
        "gate commutation",
        worst_comm <= GATE_COMMUTATOR_TOL && worst_log <= GATE_LOG_ROUNDTRIP_TOL,
        format!("100 gates, max commutator {worst_comm:e}, max log round trip {worst_log:e}"),
        t.elapsed(),
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_7_gate_operation() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // each pair has its own mode, shared by its two members
    let bath = BathSpec::new(
        vec![
            BathMode {
                frequency: 1.0,
                fock_dim: 3,
            },
            BathMode {
                frequency: 1.3,
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
    .unwrap();
    let nm = NoiseModel::new(noise([1.0, 0.0, 1.0]), 1.0).unwrap();
    let mut worst_fid = 1.0f64;
    let mut worst_leak = 0.0f64;
    let mut worst_logical = 0.0f64;
    for _ in 0..10 {
        let o = run_gate_experiment(&GateSetup {
            noise: nm,
            bath: bath.clone(),
            bath_init: BathInit::Vacuum,
            logical: LogicalState::random(2, &mut rng),
            params: random_params(&mut rng),
            asym: AsymmetryKnob::symmetric(),
            steps: 11,
        })
        .unwrap();
        worst_fid = worst_fid.min(o.result.min_fidelity());
        worst_leak = worst_leak.max(o.max_leakage);
        worst_logical = worst_logical.max(1.0 - o.logical_fidelity);
    }
    report(
        7,
        "decoherence-free gate",
        worst_fid >= 1.0 - GATE_FIDELITY_TOL && worst_leak <= GATE_LEAKAGE_TOL && worst_logical <= LOGICAL_ACTION_TOL,
        format!("10 gates, min fidelity {worst_fid}, max leakage {worst_leak:e}, max logical infidelity {worst_logical:e}"),
        t.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_8_asymmetry_degradation() {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let (passed, detail) = match scenario_matches_golden("asymmetry_sweep", dir.path()) {
        Err(e) => (false, e),
        Ok(r) => {
            let runs = r.summary["headline"]["runs"].as_array().unwrap();
            let series: Vec<(f64, f64)> = runs
                .iter()
                .map(|x| {
                    (
                        x["epsilon"].as_f64().unwrap(),
                        1.0 - x["encoded_min_fidelity"].as_f64().unwrap(),
                    )
                })
                .collect();
            let strictly = series.windows(2).all(|w| w[1].1 > w[0].1);
            let eps: Vec<f64> = series.iter().map(|s| s.0).collect();
            (
                strictly && r.passed() && eps == [0.0, 0.02, 0.05, 0.1],
                format!("infidelity by epsilon {series:?}, goldens match"),
            )
        }
    };
    report(
        8,
        "asymmetry degradation",
        passed,
        detail,
        t.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_9_determinism() {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut stems: Vec<String> = fs::read_dir(manifest().join("scenarios"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .map(|p| p.file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    stems.sort();
    let mut compared = 0;
    let mut differing = Vec::new();
    for stem in &stems {
        let text =
            fs::read_to_string(manifest().join("scenarios").join(format!("{stem}.toml"))).unwrap();
        let cfg = parse_config(&text).unwrap();
        let a = dir.path().join(format!("{stem}_a"));
        let b = dir.path().join(format!("{stem}_b"));
        let ra = run_scenario(&cfg, &a, 1).unwrap();
        let rb = run_scenario(&cfg, &b, 4).unwrap();
        assert_eq!(ra.files, rb.files);
        for name in &ra.files {
            compared += 1;
            if fs::read(a.join(name)).unwrap() != fs::read(b.join(name)).unwrap() {
                differing.push(format!("{stem}/{name}"));
            }
        }
    }
    report(
        9,
        "determinism",
        differing.is_empty() && compared > 0,
        format!(
            "{compared} CSVs from {} scenarios, 1 vs 4 workers, differing {differing:?}",
            stems.len()
        ),
        t.elapsed(),
        Duration::from_secs(120),
    );
}
