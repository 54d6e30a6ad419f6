//! Two-qubit states and their Pauli-basis decomposition.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, kron, pauli, ComplexMatrix, Dim, Qubit, C64, ZERO};
use crate::tolerances::TOL;

/// A validated 4x4 density matrix over `|q1 q2>`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    matrix: ComplexMatrix,
    label: String,
}

impl TwoQubitState {
    /// Validates unit trace, Hermiticity and positivity.
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        if matrix.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: "4x4".into(),
                got: format!("{0}x{0}", matrix.dim()),
            });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > TOL.hermitian {
            return Err(Error::NotDensityMatrix {
                reason: format!("Hermiticity violated by {deviation:e}"),
            });
        }
        let trace = matrix.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > TOL.trace {
            return Err(Error::NotDensityMatrix {
                reason: format!("trace is {} + {}i", trace.re, trace.im),
            });
        }
        let min = hermitian_eig(&matrix)?.min();
        if min < TOL.psd {
            return Err(Error::NotDensityMatrix {
                reason: format!("minimum eigenvalue {min:e}"),
            });
        }
        Ok(Self {
            matrix,
            label: label.into(),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// 1-based element access matching the usual `ρ_ij` notation.
    pub fn rho(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i - 1, j - 1)]
    }

    /// Reduced state of the qubit that remains after tracing out `traced`.
    pub fn reduced(&self, traced: Qubit) -> ComplexMatrix {
        linalg::partial_trace(&self.matrix, traced).expect("stored matrix is 4x4")
    }

    /// Marginal of `which`.
    pub fn marginal(&self, which: Qubit) -> ComplexMatrix {
        self.reduced(which.other())
    }

    /// `(U1 ⊗ U2) ρ (U1 ⊗ U2)†` for any pair of 2x2 operators, renormalized.
    pub fn local_operation(&self, first: &ComplexMatrix, second: &ComplexMatrix) -> Result<Self> {
        let op = kron(first, second)?;
        let out = op.conjugate_by(&self.matrix).hermitian_part();
        let norm = out.trace().re;
        if norm <= 0.0 {
            return Err(Error::NotDensityMatrix {
                reason: "local operation annihilated the state".into(),
            });
        }
        Self::new(out.scale_re(1.0 / norm), format!("filtered {}", self.label))
    }
}

/// `|Φ+> = (|00> + |11>)/√2` as a projector.
pub fn bell_phi_plus() -> TwoQubitState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
    TwoQubitState::new(ComplexMatrix::outer(&psi).expect("4-vector"), "phi+").expect("Bell projector is a valid state")
}

/// `(1-p) I/4 + p |Φ+><Φ+|`
pub fn werner(p: f64) -> Result<TwoQubitState> {
    check_unit_interval("p", p)?;
    let noise = ComplexMatrix::identity(Dim::Four).scale_re((1.0 - p) / 4.0);
    let bell = bell_phi_plus().matrix.scale_re(p);
    TwoQubitState::new(&noise + &bell, format!("werner(p={p})"))
}

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        });
    }
    Ok(())
}

/// Local Bloch vectors and correlation matrix:
/// `ρ = ¼ (I⊗I + a·σ⊗I + I⊗b·σ + Σ T_nm σ_n⊗σ_m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliDecomposition {
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
    pub t: Matrix3<f64>,
}

impl PauliDecomposition {
    /// Bloch vector of `which`.
    pub fn bloch(&self, which: Qubit) -> Vector3<f64> {
        match which {
            Qubit::First => self.a,
            Qubit::Second => self.b,
        }
    }

    /// Swaps the roles of the two qubits.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            t: self.t.transpose(),
        }
    }

    fn to_matrix(self) -> ComplexMatrix {
        let id = pauli::identity();
        let s = pauli::sigmas();
        let mut m = ComplexMatrix::identity(Dim::Four);
        for n in 0..3 {
            m = &m + &kron(&s[n], &id).unwrap().scale_re(self.a[n]);
            m = &m + &kron(&id, &s[n]).unwrap().scale_re(self.b[n]);
            for k in 0..3 {
                m = &m + &kron(&s[n], &s[k]).unwrap().scale_re(self.t[(n, k)]);
            }
        }
        m.scale_re(0.25)
    }
}

pub fn pauli_decompose(state: &TwoQubitState) -> PauliDecomposition {
    let id = pauli::identity();
    let s = pauli::sigmas();
    let rho = state.matrix();
    let expect = |op: ComplexMatrix| (rho * &op).trace().re;
    let mut d = PauliDecomposition {
        a: Vector3::zeros(),
        b: Vector3::zeros(),
        t: Matrix3::zeros(),
    };
    for n in 0..3 {
        d.a[n] = expect(kron(&s[n], &id).unwrap());
        d.b[n] = expect(kron(&id, &s[n]).unwrap());
        for m in 0..3 {
            d.t[(n, m)] = expect(kron(&s[n], &s[m]).unwrap());
        }
    }
    d
}

pub fn pauli_compose(d: &PauliDecomposition) -> Result<TwoQubitState> {
    let m = d.to_matrix();
    let min = hermitian_eig(&m)?.min();
    if min < TOL.psd {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    TwoQubitState::new(m, "pauli composition")
}

/// Largest modulus among entries outside the main and anti-diagonal.
pub fn x_pattern_residual(state: &TwoQubitState) -> f64 {
    let m = state.matrix();
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            if i != j && i + j != 3 {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

pub fn is_x_state(state: &TwoQubitState, tol: f64) -> bool {
    x_pattern_residual(state) <= tol
}
