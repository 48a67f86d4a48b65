//! Numerical thresholds shared by the scenario runner and the test suites.

/// Max-entry residual allowed between the two assemblies of the driven pair Hamiltonian.
pub const DRIVE_IDENTITY_TOL: f64 = 1e-12;

/// ‖(Σ S_i) v‖ for basis vectors of a coherence-preserving subspace.
pub const ZERO_EIGEN_RESIDUAL: f64 = 1e-12;
pub const ORTHONORMALITY_TOL: f64 = 1e-12;

pub const EFFICIENCY_TABLE_TOL: f64 = 1e-12;
pub const EFFICIENCY_APPROX_TOL: f64 = 1e-3;
pub const EFFICIENCY_APPROX_M: usize = 64;

/// Encoded storage runs must keep the system fidelity above 1 − this.
pub const STORAGE_FIDELITY_TOL: f64 = 1e-9;
/// The unencoded run must fall below this fidelity somewhere on the time grid.
pub const BARE_FIDELITY_CEILING: f64 = 0.99;

pub const ROUNDTRIP_FIDELITY_TOL: f64 = 1e-12;
pub const DFS_ANNIHILATION_TOL: f64 = 1e-12;
/// Out-of-subspace norm above which decoding reports leakage.
pub const DECODE_LEAKAGE_TOL: f64 = 1e-9;

pub const GATE_COMMUTATOR_TOL: f64 = 1e-12;
pub const GATE_LOG_ROUNDTRIP_TOL: f64 = 1e-10;
/// Scalar-commutator test: [op, S_l + S_l'] = n_l I within this.
pub const SCALAR_COMMUTATOR_TOL: f64 = 1e-10;
pub const GATE_FIDELITY_TOL: f64 = 1e-8;
pub const GATE_LEAKAGE_TOL: f64 = 1e-9;
pub const LOGICAL_ACTION_TOL: f64 = 1e-10;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-10;
/// Per-pair ‖(S_l + S_l') ρ_sys‖ during encoded evolution.
pub const DFS_CONSERVATION_TOL: f64 = 1e-9;

/// Top-Fock-level population above which a run is flagged as under-resolved.
pub const TRUNCATION_FLAG: f64 = 1e-4;

/// Golden CSV values are compared to this absolute tolerance.
pub const GOLDEN_TOL: f64 = 1e-9;

/// CSV sanity bounds.
pub const FIDELITY_CEILING_SLACK: f64 = 1e-9;
pub const LEAKAGE_FLOOR: f64 = -1e-12;
