//! Coherence-preserving subspaces, pair encodings and cluster efficiency.
//!
//! In the S eigenbasis the collective operator Σ S_i is diagonal with
//! eigenvalue a·(#(+1) − #(−1)), so its zero-eigenspace is spanned by the
//! balanced product states. Pairs use the two balanced states |+1,−1⟩ and
//! |−1,+1⟩ to carry one logical qubit.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::circuit::{Circuit, ControlState, Gate};
use crate::qops::{
    build_s, embed_block, kron_vectors, s_eigenbasis, CMatrix, CVector, NoiseVector, SBasis,
};
use crate::tolerances::DECODE_LEAKAGE_TOL;

/// Largest cluster half-size handled (2m = 12 qubits, 4096 amplitudes).
pub const MAX_CLUSTER_HALF: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DfsError {
    #[error("cluster half-size m = {0} outside 1..={MAX_CLUSTER_HALF}")]
    InfeasibleCluster(usize),
    #[error("need at least one pair")]
    NoPairs,
    #[error("logical state has {got} amplitudes, expected {expected}")]
    LogicalDimension { got: usize, expected: usize },
    #[error("logical amplitudes must be finite with nonzero norm")]
    DegenerateState,
    #[error("logical state norm {0} is not 1")]
    NotNormalized(f64),
    #[error("vector has {got} entries, expected {expected} for the pair register")]
    RegisterDimension { got: usize, expected: usize },
    #[error("state leaked out of the coherence-preserving subspace (norm {leaked:e})")]
    Leakage { leaked: f64 },
}

/// Orthonormal basis of the zero-eigenspace of S_1 + … + S_2m.
#[derive(Debug, Clone)]
pub struct DfsSubspace {
    pub cluster_size: usize,
    pub basis: Vec<CVector>,
    pub eigenvalue: f64,
    pub logical_dim: usize,
}

impl DfsSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Largest ‖(Σ S_i) v‖ over the basis.
    pub fn max_residual(&self, nv: &NoiseVector) -> f64 {
        let sum = collective_s(nv, self.cluster_size);
        self.basis
            .iter()
            .map(|v| (&sum * v).norm())
            .fold(0.0, f64::max)
    }

    /// Largest |⟨v_i|v_j⟩ − δ_ij|.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in self.basis.iter().enumerate() {
            for (j, v) in self.basis.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((u.dotc(v) - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Σ_i S_i over a cluster of `qubits` qubits.
pub fn collective_s(nv: &NoiseVector, qubits: usize) -> CMatrix {
    let s = build_s(nv);
    let dim = 1usize << qubits;
    let mut sum = CMatrix::zeros(dim, dim);
    for q in 0..qubits {
        sum += embed_block(&s, 1 << q, 1 << (qubits - 1 - q));
    }
    sum
}

/// The zero-eigenspace of the collective noise operator of a 2m-qubit cluster.
///
/// Basis vectors are the balanced S-eigenbasis products, ordered by ascending
/// bit pattern (bit 0 ↔ |+1⟩, first qubit most significant). For m = 1 this is
/// [|+1,−1⟩, |−1,+1⟩].
pub fn coherence_preserving_subspace(nv: &NoiseVector, m: usize) -> Result<DfsSubspace, DfsError> {
    if m == 0 || m > MAX_CLUSTER_HALF {
        return Err(DfsError::InfeasibleCluster(m));
    }
    let qubits = 2 * m;
    let sb = s_eigenbasis(nv);
    let states = [sb.state(0), sb.state(1)];
    let basis: Vec<CVector> = (0usize..1 << qubits)
        .filter(|p| p.count_ones() as usize == m)
        .map(|pattern| {
            kron_vectors((0..qubits).map(|q| &states[(pattern >> (qubits - 1 - q)) & 1]))
        })
        .collect();
    Ok(DfsSubspace {
        cluster_size: qubits,
        logical_dim: basis.len(),
        basis,
        eigenvalue: 0.0,
    })
}

/// Number of eigenvalues of Σ S_i within `tol` of zero, by full diagonalization.
pub fn zero_eigenspace_dimension(nv: &NoiseVector, m: usize, tol: f64) -> Result<usize, DfsError> {
    if m == 0 || m > MAX_CLUSTER_HALF {
        return Err(DfsError::InfeasibleCluster(m));
    }
    let eig = SymmetricEigen::new(collective_s(nv, 2 * m));
    Ok(eig.eigenvalues.iter().filter(|e| e.abs() <= tol).count())
}

/// log₂ C(2m, m), summed as Σ_k log₂((m + k)/k) so large m stays finite.
pub fn log2_central_binomial(m: usize) -> f64 {
    (1..=m).map(|k| ((m + k) as f64 / k as f64).log2()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Efficiency {
    pub eta_exact: f64,
    pub eta_approx: f64,
}

/// Logical qubits per physical qubit for 2m-qubit clusters, exact and
/// large-m asymptotic.
pub fn efficiency(m: usize) -> Efficiency {
    assert!(m >= 1, "cluster half-size must be positive");
    let mf = m as f64;
    Efficiency {
        eta_exact: log2_central_binomial(m) / (2.0 * mf),
        eta_approx: 1.0 - (std::f64::consts::PI * mf).log2() / (4.0 * mf),
    }
}

fn rotation_gate(qubit: usize, matrix: nalgebra::Matrix2<Complex64>) -> Gate {
    Gate::Rotation { qubit, matrix }
}

/// Rotated CNOTs R_l R_l' C_ll' R_l(−θ) R_l'(−θ), one per pair.
///
/// The CNOT fires on |+⟩ in the rotated frame, i.e. on a |+1⟩ control, so
/// |+1,+1⟩ ↦ |+1,−1⟩ and |−1,+1⟩ is left alone.
pub fn build_encode_circuit(pairs: usize, nv: &NoiseVector) -> Circuit {
    let sb = s_eigenbasis(nv);
    let r = sb.rotation;
    let r_inv = r.adjoint();
    let mut circuit = Circuit::new(2 * pairs);
    for l in 0..pairs {
        let (data, ancilla) = (2 * l, 2 * l + 1);
        let gates = [
            rotation_gate(data, r_inv),
            rotation_gate(ancilla, r_inv),
            Gate::Cnot {
                control: data,
                target: ancilla,
                active: ControlState::Plus,
            },
            rotation_gate(data, r),
            rotation_gate(ancilla, r),
        ];
        for g in gates {
            circuit.push(g).expect("pair qubits inside register");
        }
    }
    circuit
}

/// Amplitudes c_{i_1 … i_L} over logical basis states, i_l = +1 at bit 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalState {
    amplitudes: CVector,
}

impl LogicalState {
    /// Requires unit norm to 1e-10.
    pub fn new(amplitudes: CVector) -> Result<Self, DfsError> {
        check_logical_len(amplitudes.len())?;
        let norm = amplitudes.norm();
        if !norm.is_finite() {
            return Err(DfsError::DegenerateState);
        }
        if (norm - 1.0).abs() > crate::tolerances::NORM_TOL {
            return Err(DfsError::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(amplitudes: CVector) -> Result<Self, DfsError> {
        check_logical_len(amplitudes.len())?;
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(DfsError::DegenerateState);
        }
        Ok(Self {
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
        })
    }

    /// Haar-like random state from Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Self {
        let dim = 1usize << qubits;
        loop {
            let v = CVector::from_fn(dim, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
            if let Ok(s) = Self::normalized(v) {
                return s;
            }
        }
    }

    pub fn qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// The unencoded physical state Σ c_i ⊗_l |i_l⟩ in the S eigenbasis.
    pub fn physical(&self, nv: &NoiseVector) -> CVector {
        let sb = s_eigenbasis(nv);
        let qubits = self.qubits();
        let mut v = self.amplitudes.clone();
        let mut rot = Circuit::new(qubits);
        for q in 0..qubits {
            rot.push(rotation_gate(q, sb.rotation)).expect("in range");
        }
        rot.apply(&mut v).expect("register-sized");
        v
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &LogicalState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }
}

fn check_logical_len(len: usize) -> Result<(), DfsError> {
    if len < 2 || !len.is_power_of_two() {
        return Err(DfsError::LogicalDimension {
            got: len,
            expected: len.next_power_of_two().max(2),
        });
    }
    Ok(())
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; u1 in (0, 1]
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Spreads logical bit l to position 2l of a 2L-bit pair-register index.
fn interleave(logical: usize, pairs: usize) -> usize {
    (0..pairs).fold(0, |acc, l| {
        let bit = (logical >> (pairs - 1 - l)) & 1;
        acc | bit << (2 * (pairs - 1 - l) + 1)
    })
}

fn rotate_all(v: &mut CVector, qubits: usize, m: nalgebra::Matrix2<Complex64>) {
    let mut c = Circuit::new(qubits);
    for q in 0..qubits {
        c.push(rotation_gate(q, m)).expect("in range");
    }
    c.apply(v).expect("register-sized");
}

/// Encodes into the pair subspace: Σ c_{i} |{i_l, −i_l}⟩.
///
/// Ancillas start in |+1⟩ and the encode circuit is applied.
pub fn encode(state: &LogicalState, nv: &NoiseVector) -> CVector {
    let pairs = state.qubits();
    let sb = s_eigenbasis(nv);
    let mut v = CVector::zeros(1 << (2 * pairs));
    for (i, c) in state.amplitudes.iter().enumerate() {
        v[interleave(i, pairs)] = *c;
    }
    rotate_all(&mut v, 2 * pairs, sb.rotation);
    build_encode_circuit(pairs, nv)
        .apply(&mut v)
        .expect("register-sized");
    v
}

/// Inverts [`encode`] by running the same circuit again.
///
/// Fails with [`DfsError::Leakage`] when more than 1e-9 of norm sits outside
/// the pair subspace.
pub fn decode(vector: &CVector, nv: &NoiseVector, pairs: usize) -> Result<LogicalState, DfsError> {
    if pairs == 0 {
        return Err(DfsError::NoPairs);
    }
    let expected = 1usize << (2 * pairs);
    if vector.len() != expected {
        return Err(DfsError::RegisterDimension {
            got: vector.len(),
            expected,
        });
    }
    let sb = s_eigenbasis(nv);
    let mut v = vector.clone();
    build_encode_circuit(pairs, nv)
        .apply(&mut v)
        .expect("register-sized");
    rotate_all(&mut v, 2 * pairs, sb.rotation.adjoint());

    let ancilla_mask = (0..pairs).fold(0, |acc, l| acc | 1 << (2 * l));
    let leaked = v
        .iter()
        .enumerate()
        .filter(|(idx, _)| idx & ancilla_mask != 0)
        .map(|(_, z)| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if leaked > DECODE_LEAKAGE_TOL {
        return Err(DfsError::Leakage { leaked });
    }
    let amps = CVector::from_fn(1 << pairs, |i, _| v[interleave(i, pairs)]);
    LogicalState::normalized(amps)
}

/// Encoded images of the logical basis states, in logical index order.
pub fn pair_dfs_basis(nv: &NoiseVector, pairs: usize) -> Vec<CVector> {
    (0..1usize << pairs)
        .map(|i| {
            let mut amps = CVector::zeros(1 << pairs);
            amps[i] = Complex64::new(1.0, 0.0);
            encode(&LogicalState { amplitudes: amps }, nv)
        })
        .collect()
}

/// Projector onto the pair subspace of the system register.
pub fn dfs_projector(nv: &NoiseVector, pairs: usize) -> CMatrix {
    let dim = 1usize << (2 * pairs);
    let mut p = CMatrix::zeros(dim, dim);
    for v in pair_dfs_basis(nv, pairs) {
        p += &v * v.adjoint();
    }
    p
}

/// Norm of the component of `state` outside (pair subspace) ⊗ bath.
///
/// `state` is a system ⊗ bath vector with the 2L pair qubits leading. The
/// out-of-subspace weight is summed directly rather than obtained as 1 − P.
pub fn pair_dfs_leakage(state: &CVector, sb: &SBasis, pairs: usize) -> f64 {
    let qubits = 2 * pairs;
    let mut v = state.clone();
    rotate_all(&mut v, qubits, sb.rotation.adjoint());
    let trailing = v.len() >> qubits;
    v.iter()
        .enumerate()
        .filter(|(idx, _)| {
            let reg = idx / trailing;
            (0..pairs).any(|l| {
                let shift = 2 * (pairs - 1 - l);
                ((reg >> (shift + 1)) & 1) == ((reg >> shift) & 1)
            })
        })
        .map(|(_, z)| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}
