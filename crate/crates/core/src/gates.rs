//! Universal two-qubit gate family, its lift to qubit pairs, and the
//! commutation test that decides whether a gate is decoherence-free.
//!
//! [`u_bare_gate`] and [`u_pair_gate`] are written in S-eigenbasis coordinates
//! with the crate's index order (|+1⟩ first). [`to_computational`] conjugates
//! them into the computational basis used by the Hamiltonians.

use log::warn;
use num_complex::Complex64;
use thiserror::Error;

use crate::model::pair_s_sum;
use crate::qops::{kron_all, s_eigenbasis, unitarity_residual, CMatrix, NoiseVector};
use crate::tolerances::{NORM_TOL, SCALAR_COMMUTATOR_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("operator dimension {got} does not match a register of {pairs} pairs ({expected})")]
    DimensionMismatch {
        got: usize,
        pairs: usize,
        expected: usize,
    },
    #[error("pair {pair} out of range for {pairs} pairs")]
    PairOutOfRange { pair: usize, pairs: usize },
    #[error("commutator with the pair-{pair} noise sum is not scalar (‖C − nI‖ = {norm:e})")]
    NonScalarCommutator { pair: usize, norm: f64 },
    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("could not separate the eigenvectors of the gate unitary")]
    Eigenbasis,
}

/// Angles of V(α, θ, φ). Universality needs them to be irrational multiples
/// of π and of each other; that is not something a float can certify.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateParams {
    pub alpha: f64,
    pub theta_gate: f64,
    pub phi: f64,
}

impl GateParams {
    pub fn new(alpha: f64, theta_gate: f64, phi: f64) -> Self {
        Self {
            alpha,
            theta_gate,
            phi,
        }
    }
}

/// V(α, θ, φ) exactly as written, rows/columns ordered (|−1⟩, |+1⟩).
pub fn v_matrix(p: &GateParams) -> CMatrix {
    let (s, c) = p.theta_gate.sin_cos();
    let diag = Complex64::from_polar(c, p.alpha);
    let minus_i = Complex64::new(0.0, -1.0);
    let upper = minus_i * Complex64::from_polar(s, p.alpha - p.phi);
    let lower = minus_i * Complex64::from_polar(s, p.alpha + p.phi);
    CMatrix::from_row_slice(2, 2, &[diag, upper, lower, diag])
}

/// V reordered to the crate's index order (|+1⟩, |−1⟩).
fn v_canonical(p: &GateParams) -> CMatrix {
    let v = v_matrix(p);
    CMatrix::from_fn(2, 2, |i, j| v[(1 - i, 1 - j)])
}

/// Controlled-V: identity when the control is |−1⟩, V when it is |+1⟩.
pub fn u_bare_gate(p: &GateParams) -> CMatrix {
    let mut u = CMatrix::identity(4, 4);
    u.view_mut((0, 0), (2, 2)).copy_from(&v_canonical(p));
    u
}

/// V lifted to one pair: mixes |+1,−1⟩ and |−1,+1⟩, fixes |±1,±1⟩.
fn v_pair(p: &GateParams) -> CMatrix {
    let v = v_canonical(p);
    let mut out = CMatrix::identity(4, 4);
    // logical |+1⟩ ↔ |+1,−1⟩ (index 1), logical |−1⟩ ↔ |−1,+1⟩ (index 2)
    let slots = [1, 2];
    for (i, &a) in slots.iter().enumerate() {
        for (j, &b) in slots.iter().enumerate() {
            out[(a, b)] = v[(i, j)];
        }
    }
    out
}

/// Two-pair gate: V on pair 2 when pair 1 is |+1,−1⟩, identity otherwise.
///
/// Outside the control pair's coherence-preserving states (|+1,+1⟩, |−1,−1⟩)
/// the gate is completed by the identity.
pub fn u_pair_gate(p: &GateParams) -> CMatrix {
    let target = v_pair(p);
    let mut u = CMatrix::identity(16, 16);
    // control pair index 1 = |+1,−1⟩ occupies rows/cols 4..8
    u.view_mut((4, 4), (4, 4)).copy_from(&target);
    u
}

/// Conjugates an S-basis operator on `qubits` qubits into the computational basis.
pub fn to_computational(op: &CMatrix, nv: &NoiseVector) -> CMatrix {
    let qubits = op.nrows().trailing_zeros() as usize;
    let r = s_eigenbasis(nv).rotation_matrix();
    let full = kron_all(std::iter::repeat_n(&r, qubits));
    &full * op * full.adjoint()
}

fn pair_count(op: &CMatrix) -> Result<usize, GateError> {
    let dim = op.nrows();
    let qubits = dim.trailing_zeros() as usize;
    if dim != op.ncols() || !dim.is_power_of_two() || !qubits.is_multiple_of(2) || qubits == 0 {
        return Err(GateError::DimensionMismatch {
            got: dim,
            pairs: qubits / 2,
            expected: 1 << (2 * (qubits / 2).max(1)),
        });
    }
    Ok(qubits / 2)
}

/// Frobenius norm of [op, S_l + S_l'] for pair `pair`.
pub fn commutator_norm(op: &CMatrix, nv: &NoiseVector, pair: usize) -> Result<f64, GateError> {
    let pairs = pair_count(op)?;
    if pair >= pairs {
        return Err(GateError::PairOutOfRange { pair, pairs });
    }
    let s = pair_s_sum(nv, pair, pairs);
    Ok((op * &s - &s * op).norm())
}

/// For each listed pair, returns n_l with [op, S_l + S_l'] = n_l·I.
///
/// Because the commutator is traceless in finite dimension, any n_l found
/// here is zero up to rounding.
pub fn check_gate_commutation(
    op: &CMatrix,
    nv: &NoiseVector,
    pairs: &[usize],
) -> Result<Vec<Complex64>, GateError> {
    let count = pair_count(op)?;
    let dim = op.nrows();
    pairs
        .iter()
        .map(|&pair| {
            if pair >= count {
                return Err(GateError::PairOutOfRange { pair, pairs: count });
            }
            let s = pair_s_sum(nv, pair, count);
            let c = op * &s - &s * op;
            let n = c.trace() / Complex64::new(dim as f64, 0.0);
            let norm = (c - CMatrix::identity(dim, dim) * n).norm();
            if norm > SCALAR_COMMUTATOR_TOL {
                Err(GateError::NonScalarCommutator { pair, norm })
            } else {
                Ok(n)
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct GateHamiltonian {
    pub h: CMatrix,
    /// Eigenvalues of U found at −1 and assigned phase +π.
    pub branch_cut_hits: usize,
}

/// Eigenphases within this of ±π are treated as exactly −1.
const BRANCH_EPS: f64 = 1e-12;

/// Eigenvalues of the Hermitian probe closer than this are handled as one cluster.
const CLUSTER_TOL: f64 = 1e-8;

/// Mixing weights c for the probe Re U + c·Im U; irrational-looking values
/// make accidental coincidences of distinct eigenphases unlikely.
const PROBE_WEIGHTS: [f64; 4] = [
    0.7548776662466927,
    1.324717957244746,
    0.2718281828459045,
    2.414213562373095,
];

/// Orthonormal eigenbasis and eigenphases of a unitary.
///
/// U is normal, so Re U = (U + U†)/2 and Im U = (U − U†)/2i commute and
/// share U's eigenvectors; the Hermitian probe Re U + c·Im U is diagonalized
/// instead of U itself. Each cluster of equal probe eigenvalues must carry a
/// single eigenvalue of U, otherwise the next weight is tried.
fn unitary_eigen(u: &CMatrix) -> Option<(CMatrix, Vec<f64>)> {
    let half = Complex64::new(0.5, 0.0);
    let re = (u + u.adjoint()) * half;
    let im = (u - u.adjoint()) * Complex64::new(0.0, -0.5);
    'weights: for c in PROBE_WEIGHTS {
        let eig = nalgebra::SymmetricEigen::new(&re + &im * Complex64::new(c, 0.0));
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut phases = vec![0.0; order.len()];
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len()
                && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < CLUSTER_TOL
            {
                end += 1;
            }
            let cols: Vec<usize> = order[start..end].to_vec();
            let v = eig.eigenvectors.select_columns(&cols);
            let m = v.adjoint() * u * &v;
            let mean = m.trace() / Complex64::new(cols.len() as f64, 0.0);
            let spread = (&m - CMatrix::identity(cols.len(), cols.len()) * mean).norm();
            if spread > CLUSTER_TOL {
                continue 'weights;
            }
            for &k in &cols {
                phases[k] = mean.arg();
            }
            start = end;
        }
        return Some((eig.eigenvectors, phases));
    }
    None
}

/// H_g = i·log U on the principal branch, so that exp(−iH_g) = U.
///
/// Eigenvalues at −1 are resolved to phase +π (H_g eigenvalue −π) and counted.
pub fn gate_hamiltonian(u: &CMatrix) -> Result<GateHamiltonian, GateError> {
    let residual = unitarity_residual(u);
    if residual > NORM_TOL {
        return Err(GateError::NotUnitary(residual));
    }
    let (q, raw_phases) = unitary_eigen(u).ok_or(GateError::Eigenbasis)?;
    let mut branch_cut_hits = 0;
    let phases: Vec<f64> = raw_phases
        .into_iter()
        .map(|arg| {
            if (arg.abs() - std::f64::consts::PI).abs() <= BRANCH_EPS {
                branch_cut_hits += 1;
                std::f64::consts::PI
            } else {
                arg
            }
        })
        .collect();
    if branch_cut_hits > 0 {
        warn!("{branch_cut_hits} eigenvalue(s) at -1; log branch resolved to +pi");
    }
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        phases.len(),
        phases.iter().map(|&ph| Complex64::new(-ph, 0.0)),
    ));
    let h = &q * d * q.adjoint();
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(GateHamiltonian { h, branch_cut_hits })
}

/// exp(−i t H) for Hermitian H, by diagonalization.
pub fn unitary_from_hamiltonian(h: &CMatrix, t: f64) -> CMatrix {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let phases = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -e * t)),
    ));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}
