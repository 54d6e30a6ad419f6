//! Quantum correlations of Werner states shared between an inertial observer
//! and a uniformly accelerated one (fermionic Unruh channel, single-mode
//! approximation).
//!
//! Every headline quantity is available twice: from a closed form and from an
//! independent numerical route (Wootters eigenvalues vs the X-state formula,
//! steered-coherence measurement sweep vs the ellipsoid semiaxis, sphere
//! quadrature vs the analytic critical radius).
//!
//! Qubit ordering is `|q1 q2>`; qubit 1 is the inertial party and qubit 2 the
//! accelerated mode.

pub mod correlations;
pub mod error;
pub mod linalg;
pub mod quadrature;
pub mod report;
pub mod states;
pub mod steering;
pub mod tolerances;
pub mod unruh;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Qubit};
pub use states::{PauliDecomposition, TwoQubitState};
