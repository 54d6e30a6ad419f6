//! Entanglement (concurrence, PPT) and CHSH nonlocality.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, partial_transpose, pauli, singular_values, Qubit};
use crate::states::{check_unit_interval, x_pattern_residual, TwoQubitState};
use crate::tolerances::TOL;
use crate::unruh::{alice_rob_state, check_r};

/// Wootters concurrence `max{0, λ1 − λ2 − λ3 − λ4}`.
///
/// The `λ_i` are the eigenvalues of `R = sqrt(√ρ ρ̃ √ρ)` with
/// `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`. Since `√ρ ρ̃ √ρ = (√ρ √ρ̃)(√ρ √ρ̃)†` and
/// `√ρ̃ = (σy⊗σy) (√ρ)* (σy⊗σy)`, they are the singular values of
/// `√ρ √ρ̃`, which keeps vanishing `λ_i` at machine precision for
/// rank-deficient states.
pub fn concurrence(state: &TwoQubitState) -> Result<f64> {
    let rho = state.matrix();
    let yy = kron(&pauli::y(), &pauli::y())?;
    let sqrt_rho = hermitian_eig(rho)?.map_spectrum(|x| if x > TOL.rank_cutoff { x.sqrt() } else { 0.0 });
    let sqrt_rho_tilde = yy.conjugate_by(&sqrt_rho.conj());
    let lambdas = singular_values(&(&sqrt_rho * &sqrt_rho_tilde))?;
    let c = lambdas[0] - lambdas[1..].iter().sum::<f64>();
    Ok(c.clamp(0.0, 1.0))
}

/// X-state shortcut `2 max{0, |ρ14| − √(ρ22 ρ33), |ρ23| − √(ρ11 ρ44)}`.
pub fn concurrence_x_closed_form(state: &TwoQubitState) -> Result<f64> {
    require_x_state(state, "concurrence()")?;
    let d = |i| state.rho(i, i).re.max(0.0);
    let outer = state.rho(1, 4).norm() - (d(2) * d(3)).sqrt();
    let inner = state.rho(2, 3).norm() - (d(1) * d(4)).sqrt();
    Ok(2.0 * outer.max(inner).max(0.0))
}

/// The published closed form `(cos²r/4) max{0, 4p² + 2p − 2 + (1 − p²) cos²r}`,
/// evaluated as printed.
///
/// Its zero set agrees with the Wootters value for the accelerated Werner
/// state, its magnitude does not (at `r = 0` it gives `(3p−1)(p+1)/4`
/// instead of `(3p−1)/2`). Reported for comparison only.
pub fn concurrence_literature_formula(p: f64, r: f64) -> f64 {
    let c2 = r.cos().powi(2);
    let bracket = 4.0 * p * p + 2.0 * p - 2.0 + (1.0 - p * p) * c2;
    c2 / 4.0 * bracket.max(0.0)
}

/// Largest `p` for which the accelerated Werner state is separable:
/// `(2 − cos²r) / (4 − cos²r)`.
pub fn separability_threshold(r: f64) -> Result<f64> {
    check_r(r)?;
    let c2 = r.cos().powi(2);
    Ok((2.0 - c2) / (4.0 - c2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PptResult {
    pub min_eigenvalue: f64,
    pub entangled: bool,
}

/// Peres–Horodecki test with the partial transpose over the second qubit.
pub fn ppt_test(state: &TwoQubitState) -> Result<PptResult> {
    let pt = partial_transpose(state.matrix(), Qubit::Second)?;
    let min_eigenvalue = hermitian_eig(&pt)?.min();
    Ok(PptResult {
        min_eigenvalue,
        entangled: min_eigenvalue < -TOL.ppt_entangled,
    })
}

/// Horodecki `M(ρ)` for X-states:
/// `max{8(|ρ14|² + |ρ23|²), (ρ11 + ρ44 − ρ22 − ρ33)² + 4(|ρ23| + |ρ14|)²}`.
pub fn chsh_m(state: &TwoQubitState) -> Result<f64> {
    require_x_state(state, "the general Horodecki T-matrix criterion (not implemented)")?;
    let r14 = state.rho(1, 4).norm();
    let r23 = state.rho(2, 3).norm();
    let zz = state.rho(1, 1).re + state.rho(4, 4).re - state.rho(2, 2).re - state.rho(3, 3).re;
    let first = 8.0 * (r14 * r14 + r23 * r23);
    let second = zz * zz + 4.0 * (r23 + r14).powi(2);
    Ok(first.max(second))
}

/// Maximal CHSH value `2 √M`.
pub fn b_max(m: f64) -> f64 {
    2.0 * m.max(0.0).sqrt()
}

/// Smallest `p` beyond which the accelerated Werner state violates CHSH:
/// `1 / (√2 cos r)`. Values above 1 mean no violation is possible.
pub fn bell_threshold(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(1.0 / (std::f64::consts::SQRT_2 * r.cos()))
}

fn require_x_state(state: &TwoQubitState, suggestion: &'static str) -> Result<()> {
    let residual = x_pattern_residual(state);
    if residual > TOL.x_state {
        return Err(Error::NotXState {
            max_entry: residual,
            suggestion,
        });
    }
    Ok(())
}

/// Entanglement and nonlocality summary for one accelerated Werner state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub concurrence_wootters: f64,
    #[serde(rename = "concurrence_eq17")]
    pub concurrence_literature: f64,
    pub ppt_min_eigenvalue: f64,
    pub entangled_ppt: bool,
    pub chsh_m: f64,
    pub b_max: f64,
    pub bell_nonlocal: bool,
}

impl CorrelationReport {
    pub fn alice_rob(p: f64, r: f64) -> Result<Self> {
        check_unit_interval("p", p)?;
        let state = alice_rob_state(p, r)?;
        let ppt = ppt_test(&state)?;
        let m = chsh_m(&state)?;
        Ok(Self {
            concurrence_wootters: concurrence(&state)?,
            concurrence_literature: concurrence_literature_formula(p, r),
            ppt_min_eigenvalue: ppt.min_eigenvalue,
            entangled_ppt: ppt.entangled,
            chsh_m: m,
            b_max: b_max(m),
            bell_nonlocal: m > 1.0,
        })
    }

    /// Published closed form minus the Wootters value.
    pub fn literature_gap(&self) -> f64 {
        self.concurrence_literature - self.concurrence_wootters
    }
}
