//! Quantum steering ellipsoids, maximal steered coherence and the
//! critical-radius steerability test for T-states.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{embed, hermitian_eig, partial_trace, pauli, symmetric_eig3, ComplexMatrix, Qubit};
use crate::quadrature::sphere_integral;
use crate::states::{check_unit_interval, is_x_state, pauli_decompose, PauliDecomposition, TwoQubitState};
use crate::tolerances::TOL;
use crate::unruh::check_r;

/// The set `{ center + axes · (s ∘ x) : |x| ≤ 1 }` of Bloch vectors one qubit
/// can be steered to by measurements on its partner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringEllipsoid {
    pub center: Vector3<f64>,
    /// Descending.
    pub semiaxes: Vector3<f64>,
    /// Column `k` is the direction of `semiaxes[k]`.
    pub axes: Matrix3<f64>,
}

impl SteeringEllipsoid {
    /// Ellipsoid matrix `Q`, whose eigenvalues are the squared semiaxes.
    pub fn matrix(&self) -> Matrix3<f64> {
        let s2 = self.semiaxes.component_mul(&self.semiaxes);
        self.axes * Matrix3::from_diagonal(&s2) * self.axes.transpose()
    }

    /// Maps a point of the unit sphere (or ball) onto the ellipsoid.
    pub fn surface_point(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.center + self.axes * self.semiaxes.component_mul(x)
    }
}

/// Ellipsoid of qubit `steered` under all measurements on the other qubit.
pub fn steering_ellipsoid(state: &TwoQubitState, steered: Qubit) -> Result<SteeringEllipsoid> {
    ellipsoid_from_decomposition(&pauli_decompose(state), steered)
}

/// `C = (a − T b)/(1 − b²)`,
/// `Q = (T − a bᵀ)/(1 − b²) · (I + b bᵀ/(1 − b²)) · (Tᵀ − b aᵀ)`
/// for the first qubit; the second is obtained by swapping the roles.
pub fn ellipsoid_from_decomposition(d: &PauliDecomposition, steered: Qubit) -> Result<SteeringEllipsoid> {
    let d = match steered {
        Qubit::First => *d,
        Qubit::Second => d.swapped(),
    };
    let (a, b, t) = (d.a, d.b, d.t);
    let b_norm = b.norm();
    if b_norm >= 1.0 - TOL.pure_marginal {
        return Err(Error::PureMarginal { norm: b_norm });
    }
    let gamma = 1.0 - b.norm_squared();
    let center = (a - t * b) / gamma;
    let left = (t - a * b.transpose()) / gamma;
    let middle = Matrix3::identity() + b * b.transpose() / gamma;
    let right = t.transpose() - b * a.transpose();
    let q = left * middle * right;
    let q = (q + q.transpose()) * 0.5;
    let (values, axes) = symmetric_eig3(&q)?;
    Ok(SteeringEllipsoid {
        center,
        semiaxes: values.map(|v| v.max(0.0).sqrt()),
        axes,
    })
}

/// SLOCC filter `((2ρ_A)^{-1/2} ⊗ I)` that makes the first marginal `I/2`.
pub fn canonical_state(state: &TwoQubitState) -> Result<TwoQubitState> {
    let eig = hermitian_eig(&state.marginal(Qubit::First))?;
    if eig.min() <= TOL.invertible_marginal {
        return Err(Error::SingularMarginal {
            min_eigenvalue: eig.min(),
        });
    }
    let filter = eig.map_spectrum(|x| 1.0 / (2.0 * x).sqrt());
    let lifted = embed(&filter, Qubit::First)?;
    let out = lifted.conjugate_by(state.matrix()).hermitian_part();
    let norm = out.trace().re;
    TwoQubitState::new(out.scale_re(1.0 / norm), format!("canonical {}", state.label()))
}

/// Maximal steered coherence from the ellipsoid geometry (X-states only).
///
/// With a non-degenerate steered marginal the reference basis is its
/// eigenbasis; for X-states its Bloch vector lies on an ellipsoid axis and
/// the answer is the longest of the other two semiaxes.
///
/// With a degenerate marginal the infimum over reference axes is taken:
/// for an ellipsoid centred at the origin it equals the middle semiaxis
/// (Courant–Fischer on the projected ellipsoid matrix); for an ellipsoid of
/// revolution whose centre sits on its symmetry axis it equals the repeated
/// semiaxis (the circle of that radius in the centre plane stays at least
/// that far from every line through the origin). Other degenerate cases are
/// rejected.
pub fn msc_closed_form(state: &TwoQubitState, steered: Qubit) -> Result<f64> {
    if !is_x_state(state, TOL.x_state) {
        return Err(Error::NotXState {
            max_entry: crate::states::x_pattern_residual(state),
            suggestion: "msc_oracle()",
        });
    }
    let d = pauli_decompose(state);
    let ellipsoid = ellipsoid_from_decomposition(&d, steered)?;
    let s = ellipsoid.semiaxes;
    let bloch = d.bloch(steered);

    if bloch.norm() >= TOL.degenerate_marginal {
        let k = most_aligned_axis(&ellipsoid.axes, &bloch);
        return Ok(others(k).map(|i| s[i]).into_iter().fold(0.0, f64::max));
    }

    if ellipsoid.center.norm() < TOL.degenerate_marginal {
        return Ok(s[1]);
    }
    let k = most_aligned_axis(&ellipsoid.axes, &ellipsoid.center);
    let alignment = ellipsoid.axes.column(k).dot(&ellipsoid.center.normalize()).abs();
    let [i, j] = others(k);
    if alignment >= 1.0 - 1e-9 && (s[i] - s[j]).abs() <= 1e-9 {
        return Ok(s[i]);
    }
    Err(Error::UnsupportedDegenerateMarginal)
}

fn most_aligned_axis(axes: &Matrix3<f64>, direction: &Vector3<f64>) -> usize {
    (0..3)
        .max_by(|&i, &j| {
            let ci = axes.column(i).dot(direction).abs();
            let cj = axes.column(j).dot(direction).abs();
            ci.total_cmp(&cj).then(j.cmp(&i))
        })
        .expect("three axes")
}

fn others(k: usize) -> [usize; 2] {
    match k {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

/// Steered states as an affine function of the measurement direction.
///
/// For a POVM element `M = μ0 I + μ·σ` on the steering qubit the unnormalized
/// steered state is `μ0 X0 + Σ μ_k X_k` with `X0 = tr_steering(ρ)` and
/// `X_k = tr_steering((σ_k ⊗ I) ρ)`. The normalization divides out any
/// positive scale of `M`, so only `m = μ/μ0` with `|m| ≤ 1` matters. The image
/// of the unit ball is the solid ellipsoid whose surface is reached by rank-1
/// projectors (`|m| = 1`); l1 coherence of a qubit is the distance of its
/// Bloch vector from the reference axis, a convex function, so its maximum
/// over the solid ellipsoid sits on the surface. Sweeping projectors is
/// therefore enough.
struct SteeringMap {
    x0: ComplexMatrix,
    xs: [ComplexMatrix; 3],
}

impl SteeringMap {
    fn new(state: &TwoQubitState, steered: Qubit) -> Result<Self> {
        let steering = steered.other();
        let rho = state.matrix();
        let x0 = partial_trace(rho, steering)?;
        let mut xs = Vec::with_capacity(3);
        for sigma in pauli::sigmas() {
            let lifted = embed(&sigma, steering)?;
            xs.push(partial_trace(&(&lifted * rho), steering)?);
        }
        let xs: [ComplexMatrix; 3] = xs.try_into().expect("three Pauli components");
        Ok(Self { x0, xs })
    }

    /// Normalized steered state for the projector `(I + m·σ)/2`.
    fn steered(&self, m: &Vector3<f64>) -> Option<ComplexMatrix> {
        let mut out = self.x0.clone();
        for k in 0..3 {
            out = &out + &self.xs[k].scale_re(m[k]);
        }
        let prob = 0.5 * out.trace().re;
        if prob <= 1e-14 {
            return None;
        }
        Some(out.scale_re(0.5 / prob))
    }
}

/// `Σ_{i≠j} |<χ_i|ρ|χ_j>|` with the basis vectors as columns of `basis`.
fn l1_coherence(rho: &ComplexMatrix, basis: &ComplexMatrix) -> f64 {
    let rotated = &(&basis.adjoint() * rho) * basis;
    let n = rotated.dim();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += rotated[(i, j)].norm();
            }
        }
    }
    total
}

fn direction(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

/// Best point of a `polar × azimuthal` (θ, φ) grid over `θ ∈ [0, θ_max]`,
/// `φ ∈ [0, 2π)`, visiting each pole once.
fn grid_search(
    polar: usize,
    azimuthal: usize,
    theta_max: f64,
    maximize: bool,
    f: impl Fn(&Vector3<f64>) -> f64,
) -> (Vector3<f64>, f64) {
    let dtheta = theta_max / (polar - 1) as f64;
    let dphi = 2.0 * PI / azimuthal as f64;
    let mut best: Option<(Vector3<f64>, f64)> = None;
    for i in 0..polar {
        let theta = dtheta * i as f64;
        let at_pole = i == 0 || (i == polar - 1 && (theta_max - PI).abs() < 1e-15);
        for j in 0..if at_pole { 1 } else { azimuthal } {
            let n = direction(theta, dphi * j as f64);
            let v = f(&n);
            if best.is_none_or(|b| if maximize { v > b.1 } else { v < b.1 }) {
                best = Some((n, v));
            }
        }
    }
    best.expect("non-empty grid")
}

fn tangent_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = n.cross(&helper).normalize();
    (e1, n.cross(&e1))
}

/// Local maximization over unit vectors by damped Newton steps in tangent
/// coordinates, with a finite-difference gradient and Hessian.
///
/// The steered-coherence landscape has long shallow ridges (the ellipsoid is
/// often close to a body of revolution about the reference axis); the
/// Hessian lets the step follow them where line or pattern searches stall.
fn newton_maximize(start: (Vector3<f64>, f64), radius: f64, iters: usize, f: impl Fn(&Vector3<f64>) -> f64) -> f64 {
    const D: f64 = 1e-4;
    let (mut n, mut value) = start;
    let mut radius = radius;
    for _ in 0..iters {
        let (e1, e2) = tangent_basis(&n);
        let at = |u: f64, v: f64| f(&(n + e1 * u + e2 * v).normalize());
        let (xp, xm, yp, ym) = (at(D, 0.0), at(-D, 0.0), at(0.0, D), at(0.0, -D));
        let grad = Vector2::new(xp - xm, yp - ym) / (2.0 * D);
        let hxx = (xp - 2.0 * value + xm) / (D * D);
        let hyy = (yp - 2.0 * value + ym) / (D * D);
        let hxy = (at(D, D) - at(D, -D) - at(-D, D) + at(-D, -D)) / (4.0 * D * D);
        // Saddle-free Newton: divide by |curvature| so directions of positive
        // or vanishing curvature still move uphill, up to the trust radius.
        let eig = Matrix2::new(hxx, hxy, hxy, hyy).symmetric_eigen();
        let mut step = Vector2::zeros();
        for k in 0..2 {
            let v = eig.eigenvectors.column(k);
            let slope = v.dot(&grad);
            let curvature = eig.eigenvalues[k].abs().max(slope.abs() / radius);
            if curvature > 0.0 {
                step += v * (slope / curvature);
            }
        }
        if step.norm() == 0.0 {
            break;
        }
        if step.norm() > radius {
            step *= radius / step.norm();
        }
        let mut accepted = None;
        for halving in 0..30 {
            let v = at(step.x, step.y);
            if v > value {
                accepted = Some((v, halving == 0));
                break;
            }
            step *= 0.5;
        }
        let Some((v, full)) = accepted else { break };
        n = (n + e1 * step.x + e2 * step.y).normalize();
        value = v;
        radius = if full {
            (2.0 * radius).min(FRAC_PI_2)
        } else {
            step.norm()
        };
        if step.norm() < 1e-9 {
            break;
        }
    }
    value
}

/// Pattern search for a minimum over unit vectors: probe eight tangent
/// directions at step `h`, move to the best point if it gains more than
/// `min_gain` (relative) or halve `h`, for at most `halvings` halvings.
///
/// Suited to the kinked max-min objective over reference axes, whose
/// minimum is the tip of a cone.
fn compass_minimize(
    start: (Vector3<f64>, f64),
    mut h: f64,
    halvings: usize,
    min_gain: f64,
    f: impl Fn(&Vector3<f64>) -> f64,
) -> Vector3<f64> {
    const MAX_MOVES_PER_STEP: usize = 32;
    let (mut n, mut value) = start;
    let h_min = h / 2f64.powi(halvings as i32);
    let mut moves = 0;
    while h > h_min {
        let (e1, e2) = tangent_basis(&n);
        let mut best: Option<(Vector3<f64>, f64)> = None;
        for k in 0..8 {
            let (s, c) = (k as f64 * PI / 4.0).sin_cos();
            let candidate = (n + (e1 * c + e2 * s) * h).normalize();
            let v = f(&candidate);
            if best.is_none_or(|b| v < b.1) {
                best = Some((candidate, v));
            }
        }
        match best {
            // Chasing gains at the noise level random-walks along flat valleys.
            Some((candidate, v)) if moves < MAX_MOVES_PER_STEP && v < value - min_gain * value.abs().max(1.0) => {
                n = candidate;
                value = v;
                moves += 1;
            }
            _ => {
                h *= 0.5;
                moves = 0;
            }
        }
    }
    n
}

fn max_coherence(map: &SteeringMap, basis: &ComplexMatrix, grid_density: usize, refine_iters: usize) -> f64 {
    let polar = grid_density.max(3);
    let f = |m: &Vector3<f64>| map.steered(m).map_or(0.0, |rho| l1_coherence(&rho, basis));
    let start = grid_search(polar, 2 * polar, PI, true, f);
    newton_maximize(start, PI / (polar - 1) as f64, refine_iters, f)
}

/// Maximal steered coherence by brute force over projective measurements.
///
/// Steered states of `steered` are generated for measurement directions on a
/// `grid_density × 2·grid_density` (θ, φ) grid on the steering qubit's Bloch
/// sphere; the best point is refined by up to `refine_iters` Newton steps. Coherence is measured in the
/// eigenbasis of the steered marginal. When that marginal is maximally mixed
/// the basis is not defined and the same search is nested inside a
/// minimization over reference axes.
pub fn msc_oracle(state: &TwoQubitState, steered: Qubit, grid_density: usize, refine_iters: usize) -> Result<f64> {
    let map = SteeringMap::new(state, steered)?;
    let bloch = pauli::bloch_vector(&map.x0);
    if bloch.norm() >= TOL.degenerate_marginal {
        let basis = hermitian_eig(&map.x0)?.vectors;
        return Ok(max_coherence(&map, &basis, grid_density, refine_iters));
    }

    let basis_for = |axis: &Vector3<f64>| -> ComplexMatrix {
        let projector = pauli::bloch_state(axis);
        hermitian_eig(&projector).expect("projector is Hermitian").vectors
    };
    let coarse_grid = (grid_density / 4).max(8);
    let coarse_iters = (refine_iters / 2).max(10);
    let inner = |axis: &Vector3<f64>| max_coherence(&map, &basis_for(axis), coarse_grid, coarse_iters);
    // Axes n and -n are equivalent, so the upper hemisphere suffices.
    let start = grid_search(7, 12, FRAC_PI_2, false, inner);
    // The inner maxima are only accurate to roughly 1e-13, so the outer
    // search asks for clearly larger gains.
    let axis = compass_minimize(start, FRAC_PI_2 / 6.0, 16, 1e-9, inner);
    Ok(max_coherence(&map, &basis_for(&axis), grid_density, refine_iters))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalRadiusMethod {
    Analytic,
    Quadrature,
}

/// Critical radius; `value ≥ 1` means a local-hidden-state model exists for
/// projective measurements (the state is unsteerable).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalRadiusResult {
    pub value: f64,
    pub method: CriticalRadiusMethod,
    pub unsteerable: bool,
}

impl CriticalRadiusResult {
    fn new(value: f64, method: CriticalRadiusMethod) -> Self {
        Self {
            value,
            method,
            unsteerable: value >= 1.0,
        }
    }
}

/// `r cot r`, with its series near the removable singularity at 0.
pub fn r_cot_r(r: f64) -> f64 {
    if r.abs() < 1e-4 {
        let r2 = r * r;
        1.0 - r2 / 3.0 - r2 * r2 / 45.0
    } else {
        r / r.tan()
    }
}

/// `1 / (p [cos²r + r cot r])`; `p = 0` yields `+∞`.
pub fn critical_radius_analytic(p: f64, r: f64) -> Result<CriticalRadiusResult> {
    check_unit_interval("p", p)?;
    check_r(r)?;
    let value = if p == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (p * (r.cos().powi(2) + r_cot_r(r)))
    };
    Ok(CriticalRadiusResult::new(value, CriticalRadiusMethod::Analytic))
}

/// `2π N_T |det T|` with `N_T⁻¹ = ∫ dΩ (nᵀ T⁻² n)⁻²`, integrated with
/// `nodes` Gauss–Legendre points in `cos θ` and `2·nodes` points in `φ`.
pub fn critical_radius_quadrature(t: &Matrix3<f64>, nodes: usize) -> Result<CriticalRadiusResult> {
    let scale = t.abs().max().max(1.0);
    let off_diagonal = (0..3)
        .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| t[(i, j)].abs())
        .fold(0.0, f64::max);
    if off_diagonal > 1e-12 * scale {
        return Err(Error::UnsupportedCorrelationMatrix {
            reason: format!("off-diagonal entry {off_diagonal:e}"),
        });
    }
    let diag = t.diagonal();
    let det = diag.product();
    if det.abs() <= 1e-300 || diag.iter().any(|&x| x == 0.0) {
        return Err(Error::UnsupportedCorrelationMatrix {
            reason: "det T = 0 (degenerate T-state)".into(),
        });
    }
    if nodes == 0 {
        return Err(Error::InvalidParameter {
            name: "nodes",
            value: 0.0,
            reason: "must be positive",
        });
    }
    let inv_sq = diag.map(|x| 1.0 / (x * x));
    let inverse_norm = sphere_integral(nodes, 2 * nodes, |n| {
        let quad = n.component_mul(n).dot(&inv_sq);
        1.0 / (quad * quad)
    });
    let value = 2.0 * PI * det.abs() / inverse_norm;
    Ok(CriticalRadiusResult::new(value, CriticalRadiusMethod::Quadrature))
}

/// Largest `p` for which the accelerated Werner state has a local-hidden-state
/// model: `1 / (cos²r + r cot r)`.
pub fn steerability_threshold(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(1.0 / (r.cos().powi(2) + r_cot_r(r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, C64};
    use crate::states::werner;
    use crate::unruh::alice_rob_state;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn expected_center_z(p: f64, r: f64) -> f64 {
        let s2 = r.sin().powi(2);
        p * s2 / (s2 + 1.0)
    }

    #[test]
    fn werner_ellipsoid_is_a_sphere() {
        for p in [0.2, 0.6, 1.0] {
            for q in [Qubit::First, Qubit::Second] {
                let e = steering_ellipsoid(&werner(p).unwrap(), q).unwrap();
                assert!(e.center.norm() < 1e-15);
                for k in 0..3 {
                    assert_abs_diff_eq!(e.semiaxes[k], p, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn accelerated_ellipsoid_at_reference_point() {
        let e = steering_ellipsoid(&alice_rob_state(0.9, FRAC_PI_4).unwrap(), Qubit::First).unwrap();
        assert_abs_diff_eq!(e.center.z, 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(e.semiaxes[0], 0.7348469, epsilon = 1e-7);
        assert_abs_diff_eq!(e.semiaxes[1], 0.7348469, epsilon = 1e-7);
        assert_abs_diff_eq!(e.semiaxes[2], 0.6, epsilon = 1e-14);
        // the smallest semiaxis points along z
        assert_abs_diff_eq!(e.axes[(2, 2)].abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn accelerated_ellipsoid_of_second_qubit() {
        let (p, r): (f64, f64) = (0.8, 0.5);
        let e = steering_ellipsoid(&alice_rob_state(p, r).unwrap(), Qubit::Second).unwrap();
        let c = r.cos();
        assert!((e.center - Vector3::new(0.0, 0.0, -r.sin().powi(2))).norm() < 1e-14);
        assert_abs_diff_eq!(e.semiaxes[0], p * c, epsilon = 1e-12);
        assert_abs_diff_eq!(e.semiaxes[2], p * c * c, epsilon = 1e-12);
    }

    #[test]
    fn ellipsoid_matches_closed_form_on_grid() {
        for i in 0..20 {
            for j in 0..20 {
                let p = i as f64 / 19.0;
                let r = FRAC_PI_4 * j as f64 / 19.0;
                let e = steering_ellipsoid(&alice_rob_state(p, r).unwrap(), Qubit::First).unwrap();
                let s2 = r.sin().powi(2);
                assert!((e.center - Vector3::new(0.0, 0.0, expected_center_z(p, r))).norm() <= 1e-10);
                let want = Vector3::new(p / (s2 + 1.0).sqrt(), p / (s2 + 1.0).sqrt(), p / (s2 + 1.0));
                assert!((e.semiaxes - want).norm() <= 1e-10, "p={p} r={r}");
            }
        }
    }

    #[test]
    fn pure_steering_marginal_is_rejected() {
        let up = ComplexMatrix::diag(&[1.0, 0.0]).unwrap();
        let half = ComplexMatrix::identity(crate::linalg::Dim::Two).scale_re(0.5);
        let s = TwoQubitState::new(kron(&half, &up).unwrap(), "product").unwrap();
        assert!(matches!(
            steering_ellipsoid(&s, Qubit::First),
            Err(Error::PureMarginal { .. })
        ));
        let e = steering_ellipsoid(&s, Qubit::Second).unwrap();
        assert!((e.center - Vector3::new(0.0, 0.0, 1.0)).norm() < 1e-14);
        assert!(e.semiaxes.norm() < 1e-7);
    }

    #[test]
    fn surface_points_stay_in_bloch_ball() {
        for (p, r) in [(1.0, 0.0), (1.0, FRAC_PI_4), (0.9, FRAC_PI_8), (0.5, 0.3)] {
            let state = alice_rob_state(p, r).unwrap();
            for q in [Qubit::First, Qubit::Second] {
                let e = steering_ellipsoid(&state, q).unwrap();
                let g = e.axes.transpose() * e.axes;
                assert!((g - Matrix3::identity()).abs().max() < 1e-10);
                for i in 0..=12 {
                    for j in 0..24 {
                        let x = direction(PI * i as f64 / 12.0, 2.0 * PI * j as f64 / 24.0);
                        assert!(e.surface_point(&x).norm() <= 1.0 + 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_state_properties() {
        let s = alice_rob_state(0.7, 0.6).unwrap();
        let c = canonical_state(&s).unwrap();
        assert!(c.matrix().max_abs_diff(s.matrix()) < 1e-12);

        // filter the first qubit of a Werner state, then undo it canonically
        let filter = ComplexMatrix::from_rows([
            [C64::new(1.2, 0.0), C64::new(0.3, 0.1)],
            [C64::new(-0.2, 0.0), C64::new(0.7, -0.4)],
        ])
        .unwrap();
        let filtered = werner(0.8)
            .unwrap()
            .local_operation(&filter, &ComplexMatrix::identity(crate::linalg::Dim::Two))
            .unwrap();
        let canon = canonical_state(&filtered).unwrap();
        let half = ComplexMatrix::identity(crate::linalg::Dim::Two).scale_re(0.5);
        assert!(canon.marginal(Qubit::First).max_abs_diff(&half) < 1e-10);
        let before = steering_ellipsoid(&filtered, Qubit::Second).unwrap();
        let after = steering_ellipsoid(&canon, Qubit::Second).unwrap();
        assert!((before.center - after.center).norm() < 1e-8);
        assert!((before.semiaxes - after.semiaxes).norm() < 1e-8);
    }

    #[test]
    fn canonical_state_rejects_pure_marginal() {
        let up = ComplexMatrix::diag(&[1.0, 0.0]).unwrap();
        let half = ComplexMatrix::identity(crate::linalg::Dim::Two).scale_re(0.5);
        let s = TwoQubitState::new(kron(&up, &half).unwrap(), "product").unwrap();
        assert!(matches!(canonical_state(&s), Err(Error::SingularMarginal { .. })));
    }

    #[test]
    fn msc_closed_form_examples() {
        for (p, r) in [(0.9, FRAC_PI_4), (0.5, FRAC_PI_8), (1.0, 0.0), (0.3, 0.2)] {
            let s = alice_rob_state(p, r).unwrap();
            let want = p / (r.sin().powi(2) + 1.0).sqrt();
            assert_abs_diff_eq!(msc_closed_form(&s, Qubit::First).unwrap(), want, epsilon = 1e-12);
            assert!(want >= (2.0f64 / 3.0).sqrt() * p - 1e-12 && want <= p + 1e-12);
        }
        assert_abs_diff_eq!(
            msc_closed_form(&alice_rob_state(0.9, FRAC_PI_4).unwrap(), Qubit::First).unwrap(),
            0.7348469,
            epsilon = 1e-7
        );
        assert_abs_diff_eq!(
            msc_closed_form(&werner(0.4).unwrap(), Qubit::Second).unwrap(),
            0.4,
            epsilon = 1e-12
        );
        // accelerated qubit: non-degenerate marginal along z
        let (p, r): (f64, f64) = (0.8, 0.5);
        let s = alice_rob_state(p, r).unwrap();
        assert_abs_diff_eq!(
            msc_closed_form(&s, Qubit::Second).unwrap(),
            p * r.cos(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn msc_closed_form_rejects_general_states() {
        let mut m = werner(0.5).unwrap().matrix().clone();
        m[(0, 1)] = C64::new(0.05, 0.0);
        m[(1, 0)] = C64::new(0.05, 0.0);
        let s = TwoQubitState::new(m, "skew").unwrap();
        assert!(matches!(
            msc_closed_form(&s, Qubit::First),
            Err(Error::NotXState { .. })
        ));
    }

    #[test]
    fn msc_oracle_examples() {
        let s = alice_rob_state(0.9, FRAC_PI_4).unwrap();
        let oracle = msc_oracle(&s, Qubit::First, 64, 40).unwrap();
        assert_abs_diff_eq!(oracle, 0.9 / 1.5f64.sqrt(), epsilon = 1e-4);
        assert_abs_diff_eq!(
            msc_oracle(&werner(0.5).unwrap(), Qubit::Second, 64, 40).unwrap(),
            0.5,
            epsilon = 1e-4
        );
        let mixed = werner(0.0).unwrap();
        assert!(msc_oracle(&mixed, Qubit::First, 16, 10).unwrap() < 1e-12);
        let second = msc_oracle(&alice_rob_state(0.8, 0.5).unwrap(), Qubit::Second, 64, 40).unwrap();
        assert_abs_diff_eq!(second, 0.8 * 0.5f64.cos(), epsilon = 1e-4);
    }

    #[test]
    fn msc_oracle_is_deterministic() {
        let s = alice_rob_state(0.7, 0.3).unwrap();
        let a = msc_oracle(&s, Qubit::First, 32, 20).unwrap();
        let b = msc_oracle(&s, Qubit::First, 32, 20).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn critical_radius_examples() {
        let r = critical_radius_analytic(0.5, 0.0).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-15);
        assert!(r.unsteerable);
        let r = critical_radius_analytic(0.7, FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 / (0.7 * (0.5 + FRAC_PI_4)), epsilon = 1e-15);
        assert_abs_diff_eq!(r.value, 1.1113846, epsilon = 1e-6);
        assert!(r.unsteerable);
        let r = critical_radius_analytic(1.0, 0.0).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-15);
        assert!(!r.unsteerable);
        let r = critical_radius_analytic(0.0, 0.3).unwrap();
        assert!(r.value.is_infinite() && r.unsteerable);
        assert!(critical_radius_analytic(1.2, 0.3).is_err());
    }

    #[test]
    fn r_cot_r_is_continuous_at_series_switch() {
        let below = r_cot_r(0.99999e-4);
        let above = r_cot_r(1.00001e-4);
        assert!((below - above).abs() < 1e-12);
        assert_eq!(r_cot_r(0.0), 1.0);
    }

    #[test]
    fn quadrature_examples() {
        for p in [0.3, 0.8, 1.0] {
            let t = Matrix3::from_diagonal(&Vector3::new(p, -p, p));
            let res = critical_radius_quadrature(&t, 8).unwrap();
            assert_abs_diff_eq!(res.value, 1.0 / (2.0 * p), epsilon = 1e-12);
            assert_eq!(res.method, CriticalRadiusMethod::Quadrature);
        }
        let (p, r) = (0.7, FRAC_PI_4);
        let c = r.cos();
        let t = Matrix3::from_diagonal(&Vector3::new(p * c, -p * c, p * c * c));
        let quad = critical_radius_quadrature(&t, 64).unwrap();
        let exact = critical_radius_analytic(p, r).unwrap();
        assert!((quad.value - exact.value).abs() <= 1e-6);
        assert_eq!(quad.unsteerable, exact.unsteerable);
    }

    #[test]
    fn quadrature_rejects_bad_matrices() {
        let singular = Matrix3::from_diagonal(&Vector3::new(0.5, 0.0, 0.5));
        assert!(critical_radius_quadrature(&singular, 16).is_err());
        let mut skew = Matrix3::from_diagonal(&Vector3::new(0.5, 0.5, 0.5));
        skew[(0, 1)] = 0.1;
        assert!(critical_radius_quadrature(&skew, 16).is_err());
    }

    #[test]
    fn steerability_threshold_examples() {
        assert_abs_diff_eq!(steerability_threshold(0.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            steerability_threshold(FRAC_PI_4).unwrap(),
            4.0 / (2.0 + PI),
            epsilon = 1e-15
        );
        // cot(pi/8) = 1 + sqrt(2)
        let r = FRAC_PI_8;
        let want = 1.0 / (r.cos().powi(2) + r * (1.0 + 2f64.sqrt()));
        assert_abs_diff_eq!(steerability_threshold(r).unwrap(), want, epsilon = 1e-15);
        assert_abs_diff_eq!(want, 0.555058, epsilon = 1e-6);
        for k in 0..=40 {
            let r = FRAC_PI_4 * k as f64 / 40.0;
            let ps = steerability_threshold(r).unwrap();
            assert_abs_diff_eq!(critical_radius_analytic(ps, r).unwrap().value, 1.0, epsilon = 1e-10);
        }
    }
}
