//! Dense operator algebra for qubits and truncated bosonic modes.
//!
//! Basis convention used everywhere in the crate: index 0 is the σ^z = +1
//! state |+⟩ and index 1 is σ^z = −1 state |−⟩. Multi-factor spaces are laid
//! out with the first factor as the most significant index.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QopsError {
    #[error("invalid Fock dimension {0}: need at least 2 levels")]
    InvalidDimension(usize),
    #[error("factor index {index} out of range for layout with {factors} factors")]
    FactorOutOfRange { index: usize, factors: usize },
    #[error("operator is {got}x{got} but factor {index} has dimension {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("invalid noise vector ({0}, {1}, {2}): components must be finite and not all zero")]
    InvalidNoise(f64, f64, f64),
}

/// Single-qubit operator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
    /// σ^+ = (σ^x + iσ^y)/2, raises |−⟩ to |+⟩.
    Plus,
    /// σ^- = (σ^x − iσ^y)/2.
    Minus,
}

pub fn pauli(axis: Axis) -> CMatrix {
    let r = |x: f64| Complex64::new(x, 0.0);
    let entries = match axis {
        Axis::X => [ZERO, ONE, ONE, ZERO],
        Axis::Y => [ZERO, -I, I, ZERO],
        Axis::Z => [ONE, ZERO, ZERO, r(-1.0)],
        Axis::Plus => [ZERO, ONE, ZERO, ZERO],
        Axis::Minus => [ZERO, ZERO, ONE, ZERO],
    };
    CMatrix::from_row_slice(2, 2, &entries)
}

/// Truncated annihilation operator on `dim` Fock levels.
pub fn ladder(dim: usize) -> Result<CMatrix, QopsError> {
    if dim < 2 {
        return Err(QopsError::InvalidDimension(dim));
    }
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    Ok(a)
}

/// Number operator a†a on `dim` levels.
pub fn number(dim: usize) -> Result<CMatrix, QopsError> {
    if dim < 2 {
        return Err(QopsError::InvalidDimension(dim));
    }
    Ok(CMatrix::from_diagonal(&CVector::from_fn(dim, |n, _| {
        Complex64::new(n as f64, 0.0)
    })))
}

/// Tensor layout of qubits followed by bosonic modes.
///
/// Qubits come first in ascending index. For paired layouts qubit `2l` is the
/// data qubit of pair `l` and qubit `2l + 1` is its ancilla. Modes follow in
/// ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertLayout {
    pub qubit_count: usize,
    pub mode_dims: Vec<usize>,
}

impl HilbertLayout {
    pub fn new(qubit_count: usize, mode_dims: Vec<usize>) -> Result<Self, QopsError> {
        if let Some(&d) = mode_dims.iter().find(|&&d| d < 2) {
            return Err(QopsError::InvalidDimension(d));
        }
        Ok(Self {
            qubit_count,
            mode_dims,
        })
    }

    pub fn qubits(qubit_count: usize) -> Self {
        Self {
            qubit_count,
            mode_dims: Vec::new(),
        }
    }

    pub fn factor_count(&self) -> usize {
        self.qubit_count + self.mode_dims.len()
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        let mut dims = vec![2; self.qubit_count];
        dims.extend_from_slice(&self.mode_dims);
        dims
    }

    pub fn factor_dim(&self, index: usize) -> Option<usize> {
        if index < self.qubit_count {
            Some(2)
        } else {
            self.mode_dims.get(index - self.qubit_count).copied()
        }
    }

    /// Factor index of bath mode `mode`.
    pub fn mode_factor(&self, mode: usize) -> usize {
        self.qubit_count + mode
    }

    pub fn system_dim(&self) -> usize {
        1 << self.qubit_count
    }

    pub fn bath_dim(&self) -> usize {
        self.mode_dims.iter().product()
    }

    pub fn total_dim(&self) -> usize {
        self.system_dim() * self.bath_dim()
    }
}

/// Places `op` on one tensor factor: I ⊗ … ⊗ op ⊗ … ⊗ I.
pub fn embed(
    op: &CMatrix,
    factor_index: usize,
    layout: &HilbertLayout,
) -> Result<CMatrix, QopsError> {
    let dims = layout.factor_dims();
    let expected = *dims.get(factor_index).ok_or(QopsError::FactorOutOfRange {
        index: factor_index,
        factors: dims.len(),
    })?;
    if op.nrows() != expected || op.ncols() != expected {
        return Err(QopsError::DimensionMismatch {
            index: factor_index,
            expected,
            got: op.nrows(),
        });
    }
    let left: usize = dims[..factor_index].iter().product();
    let right: usize = dims[factor_index + 1..].iter().product();
    Ok(embed_block(op, left, right))
}

/// I_left ⊗ op ⊗ I_right without forming the identities.
pub(crate) fn embed_block(op: &CMatrix, left: usize, right: usize) -> CMatrix {
    let d = op.nrows();
    let n = left * d * right;
    let mut out = CMatrix::zeros(n, n);
    for l in 0..left {
        for i in 0..d {
            for j in 0..d {
                let v = op[(i, j)];
                if v == ZERO {
                    continue;
                }
                for r in 0..right {
                    out[((l * d + i) * right + r, (l * d + j) * right + r)] = v;
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of matrices, first factor most significant.
pub fn kron_all<'a>(ops: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    ops.into_iter()
        .fold(CMatrix::identity(1, 1), |acc, op| acc.kronecker(op))
}

pub fn kron_vectors<'a>(vs: impl IntoIterator<Item = &'a CVector>) -> CVector {
    vs.into_iter()
        .fold(CVector::from_element(1, ONE), |acc, v| acc.kronecker(v))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn unitarity_residual(m: &CMatrix) -> f64 {
    max_abs(&(m.adjoint() * m - CMatrix::identity(m.nrows(), m.ncols())))
}

pub(crate) fn to_dmatrix(m: &Matrix2<Complex64>) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}

/// Noise direction (λ⁽¹⁾, λ⁽²⁾, λ⁽³⁾).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseVector {
    lambda: [f64; 3],
}

impl NoiseVector {
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64) -> Result<Self, QopsError> {
        let lambda = [lambda1, lambda2, lambda3];
        if lambda.iter().any(|x| !x.is_finite()) || lambda.iter().all(|&x| x == 0.0) {
            return Err(QopsError::InvalidNoise(lambda1, lambda2, lambda3));
        }
        Ok(Self { lambda })
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda[0]
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda[1]
    }

    pub fn lambda3(&self) -> f64 {
        self.lambda[2]
    }

    pub fn components(&self) -> [f64; 3] {
        self.lambda
    }

    /// a = |λ|, the eigenvalue magnitude of S.
    pub fn magnitude(&self) -> f64 {
        let [x, y, z] = self.lambda;
        x.hypot(y).hypot(z)
    }
}

/// S = λ⁽¹⁾σ^x + λ⁽²⁾σ^y + λ⁽³⁾σ^z.
pub fn build_s(nv: &NoiseVector) -> CMatrix {
    let [x, y, z] = nv.components();
    let c = |v: f64| Complex64::new(v, 0.0);
    pauli(Axis::X) * c(x) + pauli(Axis::Y) * c(y) + pauli(Axis::Z) * c(z)
}

/// Eigenbasis of S: column 0 is |+1⟩ (eigenvalue +a), column 1 is |−1⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct SBasis {
    pub rotation: Matrix2<Complex64>,
    pub eigenvalue: f64,
}

impl SBasis {
    pub fn rotation_matrix(&self) -> CMatrix {
        to_dmatrix(&self.rotation)
    }

    /// Column `k` of the rotation as a state vector (0 ↦ |+1⟩, 1 ↦ |−1⟩).
    pub fn state(&self, k: usize) -> CVector {
        CVector::from_fn(2, |i, _| self.rotation[(i, k)])
    }
}

/// Rotates the computational basis onto the S eigenbasis.
///
/// Eigenvectors are normalised so their first non-negligible component is
/// real and positive.
pub fn s_eigenbasis(nv: &NoiseVector) -> SBasis {
    let a = nv.magnitude();
    let [x, y, z] = nv.components();
    let polar = x.hypot(y).atan2(z);
    let azimuth = y.atan2(x);
    let (s, c) = (polar / 2.0).sin_cos();
    let phase = Complex64::from_polar(1.0, azimuth);
    let up = fix_phase([Complex64::new(c, 0.0), phase * s]);
    let down = fix_phase([-phase.conj() * s, Complex64::new(c, 0.0)]);
    SBasis {
        rotation: Matrix2::new(up[0], down[0], up[1], down[1]),
        eigenvalue: a,
    }
}

/// Single rotation angle θ = atan2(λ⁽¹⁾, λ⁽³⁾), meaningful only when λ⁽²⁾ = 0.
///
/// In that case the eigenbasis equals exp(−iθσ^y/2) up to per-column phases.
pub fn rotation_angle(nv: &NoiseVector) -> Option<f64> {
    (nv.lambda2() == 0.0).then(|| nv.lambda1().atan2(nv.lambda3()))
}

const PHASE_EPS: f64 = 1e-14;

fn fix_phase(v: [Complex64; 2]) -> [Complex64; 2] {
    let Some(lead) = v.iter().find(|z| z.norm() > PHASE_EPS).copied() else {
        return v;
    };
    let correction = lead.conj() / lead.norm();
    let mut out = v.map(|z| z * correction);
    // the leading component is real by construction; drop rounding residue
    if let Some(z) = out.iter_mut().find(|z| z.norm() > PHASE_EPS) {
        *z = Complex64::new(z.norm(), 0.0);
    }
    out
}
