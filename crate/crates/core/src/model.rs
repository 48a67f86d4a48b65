//! System-bath Hamiltonians for bare qubits and qubit pairs.
//!
//! Bath modes are referenced by index. Two couplings touch the same physical
//! mode exactly when they name the same index, which is how a mode shared by
//! several qubits (or pairs) contributes its free energy ω a†a only once.

use num_complex::Complex64;
use thiserror::Error;

use crate::qops::{
    build_s, embed, embed_block, ladder, number, pauli, Axis, CMatrix, HilbertLayout, NoiseVector,
    QopsError,
};
use crate::tolerances::DRIVE_IDENTITY_TOL;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("omega0 must be finite and non-negative, got {0}")]
    InvalidSplitting(f64),
    #[error("bath mode {mode}: {reason}")]
    InvalidMode { mode: usize, reason: String },
    #[error("coupling references mode {mode} but the bath has {count} modes")]
    UnknownMode { mode: usize, count: usize },
    #[error("coupling references site {site} but only {count} sites exist")]
    UnknownSite { site: usize, count: usize },
    #[error("duplicate coupling between site {site} and mode {mode}")]
    DuplicateCoupling { site: usize, mode: usize },
    #[error("coupling constant must be finite, got {0}")]
    InvalidCoupling(f64),
    #[error("layout mismatch: expected {expected_qubits} qubits and modes {expected_modes:?}, got {got_qubits} qubits and modes {got_modes:?}")]
    LayoutMismatch {
        expected_qubits: usize,
        expected_modes: Vec<usize>,
        got_qubits: usize,
        got_modes: Vec<usize>,
    },
    #[error("undrivable model: lambda3 = 0 with omega0 = {omega0} leaves g1:g2:omega0 = lambda1:lambda2:lambda3 without solution (pure amplitude damping with nonzero splitting is not handled)")]
    Undrivable { omega0: f64 },
    #[error("pair Hamiltonian plus drive differs from the S-form by {residual:e}")]
    IdentityViolation { residual: f64 },
    #[error(transparent)]
    Qops(#[from] QopsError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub nv: NoiseVector,
    pub omega0: f64,
}

impl NoiseModel {
    pub fn new(nv: NoiseVector, omega0: f64) -> Result<Self, ModelError> {
        if !omega0.is_finite() || omega0 < 0.0 {
            return Err(ModelError::InvalidSplitting(omega0));
        }
        Ok(Self { nv, omega0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathMode {
    pub frequency: f64,
    pub fock_dim: usize,
}

/// One term g·σ_site·(a + a†) with mode `mode`.
///
/// `site` is a qubit index for bare Hamiltonians and a pair index for paired
/// ones; both members of a pair share every coupling of their pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub site: usize,
    pub mode: usize,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BathSpec {
    pub modes: Vec<BathMode>,
    pub couplings: Vec<Coupling>,
}

impl BathSpec {
    pub fn new(modes: Vec<BathMode>, couplings: Vec<Coupling>) -> Result<Self, ModelError> {
        for (i, m) in modes.iter().enumerate() {
            if !(m.frequency.is_finite() && m.frequency > 0.0) {
                return Err(ModelError::InvalidMode {
                    mode: i,
                    reason: format!("frequency must be positive, got {}", m.frequency),
                });
            }
            if m.fock_dim < 2 {
                return Err(ModelError::InvalidMode {
                    mode: i,
                    reason: format!("Fock cutoff must be at least 2, got {}", m.fock_dim),
                });
            }
        }
        for (k, c) in couplings.iter().enumerate() {
            if c.mode >= modes.len() {
                return Err(ModelError::UnknownMode {
                    mode: c.mode,
                    count: modes.len(),
                });
            }
            if !c.g.is_finite() {
                return Err(ModelError::InvalidCoupling(c.g));
            }
            if couplings[..k]
                .iter()
                .any(|o| o.site == c.site && o.mode == c.mode)
            {
                return Err(ModelError::DuplicateCoupling {
                    site: c.site,
                    mode: c.mode,
                });
            }
        }
        Ok(Self { modes, couplings })
    }

    /// A bath with no modes.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn mode_dims(&self) -> Vec<usize> {
        self.modes.iter().map(|m| m.fock_dim).collect()
    }

    pub fn couplings_of(&self, site: usize) -> impl Iterator<Item = &Coupling> {
        self.couplings.iter().filter(move |c| c.site == site)
    }

    fn check_sites(&self, sites: usize) -> Result<(), ModelError> {
        match self.couplings.iter().find(|c| c.site >= sites) {
            Some(c) => Err(ModelError::UnknownSite {
                site: c.site,
                count: sites,
            }),
            None => Ok(()),
        }
    }
}

/// Ancilla couplings are scaled to g·(1 + epsilon); zero means exact pairing.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AsymmetryKnob {
    pub epsilon: f64,
}

impl AsymmetryKnob {
    pub fn symmetric() -> Self {
        Self { epsilon: 0.0 }
    }
}

/// Classical drive quadratures with (g1, g2, omega0) = kappa·(λ1, λ2, λ3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveField {
    pub g1: f64,
    pub g2: f64,
    pub kappa: f64,
}

pub fn bare_layout(qubits: usize, bath: &BathSpec) -> HilbertLayout {
    HilbertLayout {
        qubit_count: qubits,
        mode_dims: bath.mode_dims(),
    }
}

pub fn pair_layout(pairs: usize, bath: &BathSpec) -> HilbertLayout {
    bare_layout(2 * pairs, bath)
}

fn check_layout(qubits: usize, bath: &BathSpec, layout: &HilbertLayout) -> Result<(), ModelError> {
    let modes = bath.mode_dims();
    if layout.qubit_count != qubits || layout.mode_dims != modes {
        return Err(ModelError::LayoutMismatch {
            expected_qubits: qubits,
            expected_modes: modes,
            got_qubits: layout.qubit_count,
            got_modes: layout.mode_dims.clone(),
        });
    }
    Ok(())
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Free bath energy Σ ω a†a, one term per physical mode.
fn free_bath(bath: &BathSpec, layout: &HilbertLayout) -> Result<CMatrix, ModelError> {
    let dim = layout.total_dim();
    let mut h = CMatrix::zeros(dim, dim);
    for (k, mode) in bath.modes.iter().enumerate() {
        let n = number(mode.fock_dim)?;
        h += embed(&n, layout.mode_factor(k), layout)? * real(mode.frequency);
    }
    Ok(h)
}

/// Quadrature a + a† of mode `mode` in the full space.
fn quadrature(bath: &BathSpec, mode: usize, layout: &HilbertLayout) -> Result<CMatrix, ModelError> {
    let a = ladder(bath.modes[mode].fock_dim)?;
    let x = &a + a.adjoint();
    Ok(embed(&x, layout.mode_factor(mode), layout)?)
}

/// λ⁽¹⁾σ^x + λ⁽²⁾σ^y + λ⁽³⁾σ^z on one qubit, summed term by term.
fn noise_operator(
    nv: &NoiseVector,
    qubit: usize,
    layout: &HilbertLayout,
) -> Result<CMatrix, ModelError> {
    let dim = layout.total_dim();
    let mut op = CMatrix::zeros(dim, dim);
    for (axis, lambda) in [Axis::X, Axis::Y, Axis::Z].into_iter().zip(nv.components()) {
        if lambda != 0.0 {
            op += embed(&pauli(axis), qubit, layout)? * real(lambda);
        }
    }
    Ok(op)
}

/// ω0 Σσ^z + Σ ω a†a + Σ_l Σ_ω (λ·σ)_l g_{ωl} (a + a†) for unpaired qubits.
pub fn assemble_h_bare(
    qubits: usize,
    nm: &NoiseModel,
    bath: &BathSpec,
    layout: &HilbertLayout,
) -> Result<CMatrix, ModelError> {
    check_layout(qubits, bath, layout)?;
    bath.check_sites(qubits)?;
    let mut h = free_bath(bath, layout)?;
    for q in 0..qubits {
        h += embed(&pauli(Axis::Z), q, layout)? * real(nm.omega0);
    }
    for c in &bath.couplings {
        let s = noise_operator(&nm.nv, c.site, layout)?;
        h += s * quadrature(bath, c.mode, layout)? * real(c.g);
    }
    Ok(h)
}

/// Paired-qubit dissipation Hamiltonian; the ancilla coupling carries the
/// asymmetry factor (1 + ε).
pub fn assemble_h_pairs(
    pairs: usize,
    nm: &NoiseModel,
    bath: &BathSpec,
    asym: &AsymmetryKnob,
    layout: &HilbertLayout,
) -> Result<CMatrix, ModelError> {
    check_layout(2 * pairs, bath, layout)?;
    bath.check_sites(pairs)?;
    let mut h = free_bath(bath, layout)?;
    for q in 0..2 * pairs {
        h += embed(&pauli(Axis::Z), q, layout)? * real(nm.omega0);
    }
    for c in &bath.couplings {
        let data = noise_operator(&nm.nv, 2 * c.site, layout)?;
        let ancilla = noise_operator(&nm.nv, 2 * c.site + 1, layout)? * real(1.0 + asym.epsilon);
        h += (data + ancilla) * quadrature(bath, c.mode, layout)? * real(c.g);
    }
    Ok(h)
}

/// Solves g1:g2:ω0 = λ1:λ2:λ3 for the drive quadratures.
pub fn drive_field(nm: &NoiseModel) -> Result<DriveField, ModelError> {
    let [l1, l2, l3] = nm.nv.components();
    if l3 == 0.0 {
        if nm.omega0 != 0.0 {
            return Err(ModelError::Undrivable { omega0: nm.omega0 });
        }
        return Ok(DriveField {
            g1: 0.0,
            g2: 0.0,
            kappa: 0.0,
        });
    }
    let kappa = nm.omega0 / l3;
    Ok(DriveField {
        g1: kappa * l1,
        g2: kappa * l2,
        kappa,
    })
}

/// Σ_l [g1(σ_l^x + σ_l'^x) + g2(σ_l^y + σ_l'^y)].
pub fn assemble_h_drive(
    pairs: usize,
    df: &DriveField,
    layout: &HilbertLayout,
) -> Result<CMatrix, ModelError> {
    let dim = layout.total_dim();
    let mut h = CMatrix::zeros(dim, dim);
    if layout.qubit_count != 2 * pairs {
        return Err(ModelError::LayoutMismatch {
            expected_qubits: 2 * pairs,
            expected_modes: layout.mode_dims.clone(),
            got_qubits: layout.qubit_count,
            got_modes: layout.mode_dims.clone(),
        });
    }
    let single = pauli(Axis::X) * real(df.g1) + pauli(Axis::Y) * real(df.g2);
    for q in 0..2 * pairs {
        h += embed(&single, q, layout)?;
    }
    Ok(h)
}

/// Total driven Hamiltonian H_pairs + H_drive.
///
/// At ε = 0 the result is cross-checked against [`assemble_h_total_s_form`];
/// a mismatch above 1e-12 is reported as [`ModelError::IdentityViolation`].
pub fn assemble_h_total(
    pairs: usize,
    nm: &NoiseModel,
    bath: &BathSpec,
    asym: &AsymmetryKnob,
    layout: &HilbertLayout,
) -> Result<CMatrix, ModelError> {
    let df = drive_field(nm)?;
    let h =
        assemble_h_pairs(pairs, nm, bath, asym, layout)? + assemble_h_drive(pairs, &df, layout)?;
    if asym.epsilon == 0.0 {
        let residual = drive_identity_residual(&h, pairs, nm, bath, layout)?;
        if residual > DRIVE_IDENTITY_TOL {
            return Err(ModelError::IdentityViolation { residual });
        }
    }
    Ok(h)
}

/// Max-entry distance between `h` and the S-form of the same model.
pub fn drive_identity_residual(
    h: &CMatrix,
    pairs: usize,
    nm: &NoiseModel,
    bath: &BathSpec,
    layout: &HilbertLayout,
) -> Result<f64, ModelError> {
    let s_form = assemble_h_total_s_form(pairs, nm, bath, layout)?;
    Ok(crate::qops::max_abs(&(h - s_form)))
}

/// Σ_l (S_l + S_l')·[κ I + Σ_ω g_{ωl}(a + a†)] + Σ ω a†a, assembled as
/// system ⊗ bath products instead of factor-by-factor embedding.
pub fn assemble_h_total_s_form(
    pairs: usize,
    nm: &NoiseModel,
    bath: &BathSpec,
    layout: &HilbertLayout,
) -> Result<CMatrix, ModelError> {
    check_layout(2 * pairs, bath, layout)?;
    bath.check_sites(pairs)?;
    let df = drive_field(nm)?;
    let sys_dim = layout.system_dim();
    let bath_dims = bath.mode_dims();
    let bath_dim: usize = bath_dims.iter().product();

    let mode_op = |k: usize, op: &CMatrix| {
        let left: usize = bath_dims[..k].iter().product();
        let right: usize = bath_dims[k + 1..].iter().product();
        embed_block(op, left, right)
    };

    let s = build_s(&nm.nv);
    let mut h = CMatrix::zeros(sys_dim * bath_dim, sys_dim * bath_dim);
    for l in 0..pairs {
        // S ⊗ I + I ⊗ S on the pair, lifted to the whole register
        let pair_sum =
            s.kronecker(&CMatrix::identity(2, 2)) + CMatrix::identity(2, 2).kronecker(&s);
        let left = 1usize << (2 * l);
        let right = 1usize << (2 * (pairs - l - 1));
        let sys = embed_block(&pair_sum, left, right);

        let mut field = CMatrix::identity(bath_dim, bath_dim) * real(df.kappa);
        for c in bath.couplings_of(l) {
            let a = ladder(bath_dims[c.mode])?;
            field += mode_op(c.mode, &(&a + a.adjoint())) * real(c.g);
        }
        h += sys.kronecker(&field);
    }
    let mut free = CMatrix::zeros(bath_dim, bath_dim);
    for (k, mode) in bath.modes.iter().enumerate() {
        free += mode_op(k, &number(mode.fock_dim)?) * real(mode.frequency);
    }
    h += CMatrix::identity(sys_dim, sys_dim).kronecker(&free);
    Ok(h)
}

/// S_l + S_l' for pair `pair`, acting on the system register only.
pub fn pair_s_sum(nv: &NoiseVector, pair: usize, pairs: usize) -> CMatrix {
    let s = build_s(nv);
    let pair_sum = s.kronecker(&CMatrix::identity(2, 2)) + CMatrix::identity(2, 2).kronecker(&s);
    embed_block(&pair_sum, 1 << (2 * pair), 1 << (2 * (pairs - pair - 1)))
}
