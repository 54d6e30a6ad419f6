//! Fermionic Unruh effect in the single-mode approximation, as a qubit channel.
//!
//! The Minkowski vacuum of the accelerated mode looks like
//! `cos r |0>_I |0>_II + sin r |1>_I |1>_II` to the accelerated observer and
//! the one-particle state like `|1>_I |0>_II`. Tracing out region II leaves a
//! two-outcome Kraus channel on the region-I qubit.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::linalg::{embed, ComplexMatrix, Dim, Qubit, C64, ONE, ZERO};
use crate::states::{check_unit_interval, werner, TwoQubitState};

/// Acceleration parameter `r ∈ [0, π/4]`, optionally with the physical
/// quantities it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnruhParams {
    r: f64,
    physical: Option<PhysicalAcceleration>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalAcceleration {
    /// Mode angular frequency, 1/s.
    pub omega: f64,
    /// Proper acceleration, m/s².
    pub accel: f64,
    /// Speed of light, m/s.
    pub c: f64,
}

impl UnruhParams {
    pub fn new(r: f64) -> Result<Self> {
        check_r(r)?;
        Ok(Self { r, physical: None })
    }

    pub fn from_acceleration(omega: f64, accel: f64, c: f64) -> Result<Self> {
        let r = r_from_acceleration(omega, accel, c)?;
        Ok(Self {
            r,
            physical: Some(PhysicalAcceleration { omega, accel, c }),
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn physical(&self) -> Option<PhysicalAcceleration> {
        self.physical
    }
}

/// Grid endpoints computed as `π/4 · k/n` can land an ulp above `π/4`.
const R_SLACK: f64 = 1e-12;

pub(crate) fn check_r(r: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_4 + R_SLACK).contains(&r) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "must lie in [0, pi/4]",
        });
    }
    Ok(())
}

/// `cos r = (1 + exp(-2πωc/a))^{-1/2}`, evaluated as `tan r = exp(-πωc/a)`.
pub fn r_from_acceleration(omega: f64, accel: f64, c: f64) -> Result<f64> {
    for (name, value) in [("omega", omega), ("accel", accel), ("c", c)] {
        if value <= 0.0 || !value.is_finite() {
            return Err(Error::InvalidParameter {
                name,
                value,
                reason: "must be positive and finite",
            });
        }
    }
    let exponent = PI * omega * c / accel;
    Ok((-exponent).exp().atan())
}

/// `K0 = cos r |0><0| + |1><1|`, `K1 = sin r |1><0|`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausPair {
    pub k0: ComplexMatrix,
    pub k1: ComplexMatrix,
}

impl KrausPair {
    /// `max |K0†K0 + K1†K1 - I|`
    pub fn completeness_error(&self) -> f64 {
        let sum = &(&self.k0.adjoint() * &self.k0) + &(&self.k1.adjoint() * &self.k1);
        sum.max_abs_diff(&ComplexMatrix::identity(Dim::Two))
    }

    /// Applies the channel to a single-qubit operator.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        &self.k0.conjugate_by(rho) + &self.k1.conjugate_by(rho)
    }
}

pub fn unruh_kraus(r: f64) -> Result<KrausPair> {
    check_r(r)?;
    let (s, c) = r.sin_cos();
    let k0 = ComplexMatrix::from_rows([[C64::new(c, 0.0), ZERO], [ZERO, ONE]])?;
    let k1 = ComplexMatrix::from_rows([[ZERO, ZERO], [C64::new(s, 0.0), ZERO]])?;
    Ok(KrausPair { k0, k1 })
}

/// Sends qubit `which` of `state` through the Unruh channel.
pub fn apply_unruh(state: &TwoQubitState, which: Qubit, r: f64) -> Result<TwoQubitState> {
    let kraus = unruh_kraus(r)?;
    let rho = state.matrix();
    let e0 = embed(&kraus.k0, which)?;
    let e1 = embed(&kraus.k1, which)?;
    let out = &e0.conjugate_by(rho) + &e1.conjugate_by(rho);
    TwoQubitState::new(out, format!("unruh(r={r}, {which}) of {}", state.label()))
}

/// Werner state whose second qubit is carried by the accelerated observer.
pub fn alice_rob_state(p: f64, r: f64) -> Result<TwoQubitState> {
    check_unit_interval("p", p)?;
    check_r(r)?;
    let state = apply_unruh(&werner(p)?, Qubit::Second, r)?;
    Ok(state.with_label(format!("alice_rob(p={p}, r={r})")))
}
