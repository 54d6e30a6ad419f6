//! Dense complex matrices for one and two qubits.
//!
//! Row-major storage, qubit-1-major ordering of the two-qubit basis:
//! index `2 * q1 + q2` over `|00>, |01>, |10>, |11>`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::TOL;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I_UNIT: C64 = C64::new(0.0, 1.0);

/// Matrix dimension: a single qubit or a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Two,
    Four,
}

impl Dim {
    pub fn size(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Four => 4,
        }
    }
}

/// One of the two qubits of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Qubit {
    First,
    Second,
}

impl Qubit {
    pub fn other(self) -> Qubit {
        match self {
            Qubit::First => Qubit::Second,
            Qubit::Second => Qubit::First,
        }
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Qubit::First => "first",
            Qubit::Second => "second",
        })
    }
}

impl FromStr for Qubit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "first" | "1" | "a" => Ok(Qubit::First),
            "second" | "2" | "b" => Ok(Qubit::Second),
            other => Err(Error::UnknownSubsystem(other.to_string())),
        }
    }
}

/// Square complex matrix of dimension 2 or 4.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: Dim) -> Self {
        Self::zeros_n(dim.size())
    }

    pub fn identity(dim: Dim) -> Self {
        Self::identity_n(dim.size())
    }

    // Any size; used internally by the eigensolver for 3x3 real matrices.
    pub(crate) fn zeros_n(n: usize) -> Self {
        Self {
            dim: n,
            entries: vec![ZERO; n * n],
        }
    }

    pub(crate) fn identity_n(n: usize) -> Self {
        let mut m = Self::zeros_n(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_row_major(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::DimensionMismatch {
                expected: "dimension 2 or 4".into(),
                got: format!("dimension {dim}"),
            });
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", dim * dim),
                got: format!("{} entries", entries.len()),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Result<Self> {
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::from_row_major(N, entries)
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Result<Self> {
        Self::from_row_major(N, rows.iter().flatten().copied().collect())
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut entries = vec![ZERO; n * n];
        for (i, &v) in values.iter().enumerate() {
            entries[i * n + i] = C64::new(v, 0.0);
        }
        Self::from_row_major(n, entries)
    }

    /// Projector |psi><psi| for a (not necessarily normalized) vector.
    pub fn outer(psi: &[C64]) -> Result<Self> {
        let n = psi.len();
        let entries = psi
            .iter()
            .flat_map(|&a| psi.iter().map(move |&b| a * b.conj()))
            .collect();
        Self::from_row_major(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros_n(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros_n(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dimensions");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// (M + M†) / 2
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_re(0.5)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += self[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    /// `self * other * self†`
    pub fn conjugate_by(&self, other: &Self) -> Self {
        &(self * other) * &self.adjoint()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product on mismatched dimensions");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros_n(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum on mismatched dimensions");
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference on mismatched dimensions");
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Pauli matrices, indexed 1..=3 as x, y, z.
pub mod pauli {
    use super::*;

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(Dim::Two)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows([[ZERO, -I_UNIT], [I_UNIT, ZERO]]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, -ONE]]).unwrap()
    }

    /// `[σx, σy, σz]`
    pub fn sigmas() -> [ComplexMatrix; 3] {
        [x(), y(), z()]
    }

    /// `(I + v·σ) / 2` for a real 3-vector `v`.
    pub fn bloch_state(v: &Vector3<f64>) -> ComplexMatrix {
        let mut m = identity();
        for (k, s) in sigmas().iter().enumerate() {
            m = &m + &s.scale_re(v[k]);
        }
        m.scale_re(0.5)
    }

    /// Bloch vector `tr(ρ σ_k)` of a 2x2 matrix (real parts).
    pub fn bloch_vector(rho: &ComplexMatrix) -> Vector3<f64> {
        let s = sigmas();
        Vector3::new(
            (rho * &s[0]).trace().re,
            (rho * &s[1]).trace().re,
            (rho * &s[2]).trace().re,
        )
    }
}

/// Kronecker product of two 2x2 matrices, qubit-1-major block layout.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != 2 || b.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: "two 2x2 factors".into(),
            got: format!("{}x{} and {}x{}", a.dim, a.dim, b.dim, b.dim),
        });
    }
    let mut out = ComplexMatrix::zeros(Dim::Four);
    for i1 in 0..2 {
        for j1 in 0..2 {
            for i2 in 0..2 {
                for j2 in 0..2 {
                    out[(2 * i1 + i2, 2 * j1 + j2)] = a[(i1, j1)] * b[(i2, j2)];
                }
            }
        }
    }
    Ok(out)
}

/// Embeds a single-qubit operator on `which` of a pair.
pub fn embed(op: &ComplexMatrix, which: Qubit) -> Result<ComplexMatrix> {
    let id = pauli::identity();
    match which {
        Qubit::First => kron(op, &id),
        Qubit::Second => kron(&id, op),
    }
}

fn require_four(m: &ComplexMatrix) -> Result<()> {
    if m.dim != 4 {
        return Err(Error::DimensionMismatch {
            expected: "4x4".into(),
            got: format!("{}x{}", m.dim, m.dim),
        });
    }
    Ok(())
}

/// Traces out `traced` and returns the 2x2 operator on the other qubit.
///
/// This is the plain linear map; density-matrix validation happens on
/// `TwoQubitState`.
pub fn partial_trace(m: &ComplexMatrix, traced: Qubit) -> Result<ComplexMatrix> {
    require_four(m)?;
    let mut out = ComplexMatrix::zeros(Dim::Two);
    for i in 0..2 {
        for k in 0..2 {
            out[(i, k)] = match traced {
                Qubit::Second => m[(2 * i, 2 * k)] + m[(2 * i + 1, 2 * k + 1)],
                Qubit::First => m[(i, k)] + m[(2 + i, 2 + k)],
            };
        }
    }
    Ok(out)
}

/// Transposes the indices of `which` only.
pub fn partial_transpose(m: &ComplexMatrix, which: Qubit) -> Result<ComplexMatrix> {
    require_four(m)?;
    let mut out = ComplexMatrix::zeros(Dim::Four);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let (src_row, src_col) = match which {
                        Qubit::Second => (2 * i + l, 2 * k + j),
                        Qubit::First => (2 * k + j, 2 * i + l),
                    };
                    out[(2 * i + j, 2 * k + l)] = m[(src_row, src_col)];
                }
            }
        }
    }
    Ok(out)
}

/// Spectrum of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Non-increasing.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl EigenResult {
    pub fn min(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.dim).map(|i| self.vectors[(i, k)]).collect()
    }

    /// V f(Λ) V†
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim;
        let mut out = ComplexMatrix::zeros_n(n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += self.vectors[(i, k)] * self.vectors[(j, k)].conj() * w;
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| x)
    }
}

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenResult> {
    let deviation = m.hermitian_deviation();
    if deviation > TOL.eig_input {
        return Err(Error::NotHermitian { deviation });
    }
    jacobi(m)
}

fn jacobi(m: &ComplexMatrix) -> Result<EigenResult> {
    let n = m.dim;
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity_n(n);
    let threshold = TOL.jacobi_offdiag * m.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    while a.off_diagonal_norm() >= threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NotConverged {
                sweeps,
                residual: a.off_diagonal_norm(),
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                // Phase e^{-iφ} on q makes the (p, q) entry real, then a real rotation zeroes it.
                let phase = (apq / mag).conj();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let mut u = ComplexMatrix::identity_n(n);
                u[(p, p)] = C64::new(c, 0.0);
                u[(p, q)] = C64::new(s, 0.0);
                u[(q, p)] = phase * (-s);
                u[(q, q)] = phase * c;

                a = &(&u.adjoint() * &a) * &u;
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                v = &v * &u;
            }
        }
        sweeps += 1;
    }

    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| {
            let mut col: Vec<C64> = (0..n).map(|i| v[(i, k)]).collect();
            fix_phase(&mut col);
            (a[(k, k)].re, col)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| lexicographic(&x.1, &y.1)));

    let mut vectors = ComplexMatrix::zeros_n(n);
    for (k, (_, col)) in pairs.iter().enumerate() {
        for i in 0..n {
            vectors[(i, k)] = col[i];
        }
    }
    Ok(EigenResult {
        values: pairs.into_iter().map(|(val, _)| val).collect(),
        vectors,
    })
}

// Rotates the global phase so the first largest-modulus component is real positive.
fn fix_phase(col: &mut [C64]) {
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = col
        .iter()
        .find(|z| z.norm() >= max - 1e-12)
        .copied()
        .expect("pivot exists");
    let phase = (pivot / pivot.norm()).conj();
    for z in col.iter_mut() {
        *z *= phase;
    }
}

fn lexicographic(x: &[C64], y: &[C64]) -> Ordering {
    x.iter()
        .zip(y)
        .map(|(a, b)| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(m)?.min())
}

/// Singular values (descending) by one-sided Jacobi column orthogonalization.
///
/// Small singular values come out with absolute accuracy near machine
/// epsilon times the matrix norm, unlike square roots of `A A†` eigenvalues.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.dim;
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| m[(i, j)]).collect()).collect();
    // Columns below this squared norm are roundoff and need no rotation.
    let floor = (f64::EPSILON * m.frobenius_norm()).powi(2);
    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for j in 0..n {
            for k in (j + 1)..n {
                let alpha: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[k].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[j].iter().zip(&cols[k]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if alpha <= floor || beta <= floor || g <= 4.0 * f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rephase column k so the overlap is real, then rotate the pair.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(k);
                for (x, y) in left[j].iter_mut().zip(right[0].iter_mut()) {
                    let (xv, yv) = (*x, *y * phase);
                    *x = xv * c - yv * s;
                    *y = xv * s + yv * c;
                }
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps == MAX_SWEEPS {
            return Err(Error::NotConverged {
                sweeps,
                residual: f64::NAN,
            });
        }
    }
    let mut values: Vec<f64> = cols
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Eigen-decomposition of a real symmetric 3x3 matrix.
///
/// Values descending; columns of the returned matrix are unit eigenvectors
/// with their largest-magnitude component positive.
pub fn symmetric_eig3(m: &Matrix3<f64>) -> Result<(Vector3<f64>, Matrix3<f64>)> {
    let asym = (m - m.transpose()).abs().max();
    if asym > TOL.eig_input {
        return Err(Error::NotHermitian { deviation: asym });
    }
    let mut cm = ComplexMatrix::zeros_n(3);
    for i in 0..3 {
        for j in 0..3 {
            cm[(i, j)] = C64::new(0.5 * (m[(i, j)] + m[(j, i)]), 0.0);
        }
    }
    let eig = jacobi(&cm)?;
    let mut values = Vector3::zeros();
    let mut vectors = Matrix3::zeros();
    for k in 0..3 {
        values[k] = eig.values[k];
        let mut col = Vector3::new(eig.vectors[(0, k)].re, eig.vectors[(1, k)].re, eig.vectors[(2, k)].re);
        let pivot = col
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0);
        if pivot < 0.0 {
            col = -col;
        }
        vectors.set_column(k, &col.normalize());
    }
    Ok((values, vectors))
}
