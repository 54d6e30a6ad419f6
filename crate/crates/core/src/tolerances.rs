//! Numerical tolerances shared by every module.
//!
//! All thresholds live in one record so tests and callers tune a single knob.

/// Tolerance configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max elementwise |M - M†| for a stored density matrix.
    pub hermitian: f64,
    /// Max |tr(rho) - 1| for a stored density matrix.
    pub trace: f64,
    /// Lowest eigenvalue still accepted as positive semidefinite (a negative number).
    pub psd: f64,
    /// Max elementwise |M - M†| accepted by the Hermitian eigensolver.
    pub eig_input: f64,
    /// Jacobi stops once the off-diagonal Frobenius norm drops below this (scaled by max(1, ||M||)).
    pub jacobi_offdiag: f64,
    /// Max magnitude of entries outside the X pattern.
    pub x_state: f64,
    /// A steering marginal with |Bloch| >= 1 - this is treated as pure.
    pub pure_marginal: f64,
    /// A marginal with |Bloch| below this is treated as degenerate (maximally mixed).
    pub degenerate_marginal: f64,
    /// Partial-transpose eigenvalue below -this flags entanglement.
    pub ppt_entangled: f64,
    /// Density-matrix eigenvalues at or below this are treated as exact zeros.
    pub rank_cutoff: f64,
    /// Smallest marginal eigenvalue accepted when inverting a local filter.
    pub invertible_marginal: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-12,
        trace: 1e-12,
        psd: -1e-10,
        eig_input: 1e-10,
        jacobi_offdiag: 1e-13,
        x_state: 1e-10,
        pure_marginal: 1e-8,
        degenerate_marginal: 1e-8,
        ppt_entangled: 1e-10,
        invertible_marginal: 1e-10,
        rank_cutoff: 1e-14,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub const TOL: Tolerances = Tolerances::DEFAULT;
