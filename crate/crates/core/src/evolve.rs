//! Exact unitary evolution, partial traces and state metrics.

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::qops::{hermiticity_residual, CMatrix, CVector, HilbertLayout};
use crate::tolerances::HERMITIAN_TOL;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolveError {
    #[error("Hamiltonian is not Hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("state has dimension {got}, operator has {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("times must be finite, non-negative and sorted")]
    BadTimes,
    #[error("invalid subsystem selection {keep:?} for factor dims {dims:?}")]
    InvalidSubsystem { keep: Vec<usize>, dims: Vec<usize> },
}

/// Diagonalized Hamiltonian, reusable for many initial states and times.
#[derive(Debug, Clone)]
pub struct Propagator {
    energies: DVector<f64>,
    vectors: CMatrix,
}

impl Propagator {
    pub fn new(h: &CMatrix) -> Result<Self, EvolveError> {
        let residual = hermiticity_residual(h);
        if residual > HERMITIAN_TOL {
            return Err(EvolveError::NotHermitian(residual));
        }
        let hermitian = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(hermitian);
        Ok(Self {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// e^{−iHt}ψ₀ at each time.
    pub fn evolve(&self, psi0: &CVector, times: &[f64]) -> Result<Vec<CVector>, EvolveError> {
        if psi0.len() != self.dim() {
            return Err(EvolveError::DimensionMismatch {
                got: psi0.len(),
                expected: self.dim(),
            });
        }
        check_times(times)?;
        let coeffs = self.vectors.adjoint() * psi0;
        Ok(times
            .iter()
            .map(|&t| {
                let rotated = CVector::from_fn(coeffs.len(), |k, _| {
                    coeffs[k] * Complex64::from_polar(1.0, -self.energies[k] * t)
                });
                &self.vectors * rotated
            })
            .collect())
    }
}

fn check_times(times: &[f64]) -> Result<(), EvolveError> {
    let ok =
        times.iter().all(|t| t.is_finite() && *t >= 0.0) && times.windows(2).all(|w| w[0] <= w[1]);
    if ok {
        Ok(())
    } else {
        Err(EvolveError::BadTimes)
    }
}

/// ψ(t) = e^{−iHt}ψ₀, diagonalizing H once.
pub fn evolve_exact(
    h: &CMatrix,
    psi0: &CVector,
    times: &[f64],
) -> Result<Vec<CVector>, EvolveError> {
    Propagator::new(h)?.evolve(psi0, times)
}

/// Evenly spaced times from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|k| {
                    if k == count - 1 {
                        stop
                    } else {
                        start + step * k as f64
                    }
                })
                .collect()
        }
    }
}

fn split_index(dims: &[usize], keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>), EvolveError> {
    let invalid = || EvolveError::InvalidSubsystem {
        keep: keep.to_vec(),
        dims: dims.to_vec(),
    };
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(invalid());
    }
    let total: usize = dims.iter().product();
    let mut kept = vec![0; total];
    let mut traced = vec![0; total];
    for idx in 0..total {
        let mut rem = idx;
        let (mut k, mut t) = (0, 0);
        let (mut k_scale, mut t_scale) = (1, 1);
        for f in (0..dims.len()).rev() {
            let digit = rem % dims[f];
            rem /= dims[f];
            if keep.contains(&f) {
                k += digit * k_scale;
                k_scale *= dims[f];
            } else {
                t += digit * t_scale;
                t_scale *= dims[f];
            }
        }
        kept[idx] = k;
        traced[idx] = t;
    }
    Ok((kept, traced))
}

/// Reduced density matrix of a pure state on the factors `keep` (ascending).
pub fn partial_trace_pure(
    psi: &CVector,
    dims: &[usize],
    keep: &[usize],
) -> Result<CMatrix, EvolveError> {
    let total: usize = dims.iter().product();
    if psi.len() != total {
        return Err(EvolveError::DimensionMismatch {
            got: psi.len(),
            expected: total,
        });
    }
    let (kept, traced) = split_index(dims, keep)?;
    let kd: usize = keep.iter().map(|&k| dims[k]).product();
    let td = total / kd;
    let mut m = CMatrix::zeros(kd, td);
    for idx in 0..total {
        m[(kept[idx], traced[idx])] = psi[idx];
    }
    Ok(&m * m.adjoint())
}

/// Reduced density matrix of a mixed state on the factors `keep` (ascending).
pub fn partial_trace_rho(
    rho: &CMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<CMatrix, EvolveError> {
    let total: usize = dims.iter().product();
    if rho.nrows() != total || rho.ncols() != total {
        return Err(EvolveError::DimensionMismatch {
            got: rho.nrows(),
            expected: total,
        });
    }
    let (kept, traced) = split_index(dims, keep)?;
    let kd: usize = keep.iter().map(|&k| dims[k]).product();
    let mut out = CMatrix::zeros(kd, kd);
    for i in 0..total {
        for j in 0..total {
            if traced[i] == traced[j] {
                out[(kept[i], kept[j])] += rho[(i, j)];
            }
        }
    }
    Ok(out)
}

pub fn partial_trace(
    psi: &CVector,
    layout: &HilbertLayout,
    keep: &[usize],
) -> Result<CMatrix, EvolveError> {
    partial_trace_pure(psi, &layout.factor_dims(), keep)
}

/// System density matrix of a state whose leading factors are the qubits.
pub fn reduce_to_system(psi: &CVector, layout: &HilbertLayout) -> CMatrix {
    let sys = layout.system_dim();
    let bath = layout.bath_dim();
    let m = CMatrix::from_row_slice(sys, bath, psi.as_slice());
    &m * m.adjoint()
}

/// ⟨ψ|ρ|ψ⟩ for a pure reference.
pub fn fidelity(rho: &CMatrix, reference: &CVector) -> f64 {
    reference.dotc(&(rho * reference)).re
}

/// Σ_{i≠j} |ρ_ij| after rotating ρ by `basis` (ρ' = B†ρB).
pub fn l1_coherence(rho: &CMatrix, basis: &CMatrix) -> f64 {
    let r = basis.adjoint() * rho * basis;
    let mut sum = 0.0;
    for i in 0..r.nrows() {
        for j in 0..r.ncols() {
            if i != j {
                sum += r[(i, j)].norm();
            }
        }
    }
    sum
}

pub fn purity(rho: &CMatrix) -> f64 {
    (rho * rho).trace().re
}

/// Population of each mode's highest Fock level.
pub fn top_level_populations(psi: &CVector, layout: &HilbertLayout) -> Vec<f64> {
    let dims = layout.factor_dims();
    let mut pops = vec![0.0; layout.mode_dims.len()];
    for (idx, z) in psi.iter().enumerate() {
        let p = z.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let mut rem = idx;
        for f in (0..dims.len()).rev() {
            let digit = rem % dims[f];
            rem /= dims[f];
            if f >= layout.qubit_count && digit == dims[f] - 1 {
                pops[f - layout.qubit_count] += p;
            }
        }
    }
    pops
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(rho: &CMatrix) -> f64 {
    let h = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
