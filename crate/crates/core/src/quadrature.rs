//! Gauss–Legendre rules and a product rule on the unit sphere.

use std::f64::consts::PI;

use nalgebra::Vector3;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `∫ f(n) dΩ` over the unit sphere: `polar` Gauss–Legendre nodes in `cos θ`
/// times `azimuthal` equispaced (trapezoid) nodes in `φ`.
///
/// Summation order is fixed so results are bit-reproducible.
pub fn sphere_integral(polar: usize, azimuthal: usize, f: impl Fn(&Vector3<f64>) -> f64) -> f64 {
    assert!(azimuthal >= 1, "need at least one azimuthal node");
    let (us, ws) = gauss_legendre(polar);
    let dphi = 2.0 * PI / azimuthal as f64;
    let mut total = 0.0;
    for (&u, &w) in us.iter().zip(&ws) {
        let sin_theta = (1.0 - u * u).max(0.0).sqrt();
        let mut ring = 0.0;
        for k in 0..azimuthal {
            let phi = dphi * k as f64;
            let n = Vector3::new(sin_theta * phi.cos(), sin_theta * phi.sin(), u);
            ring += f(&n);
        }
        total += w * ring * dphi;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_rules_match_tables() {
        let (x, w) = gauss_legendre(1);
        assert_abs_diff_eq!(x[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w[0], 2.0, epsilon = 1e-15);

        let (x, w) = gauss_legendre(2);
        assert_abs_diff_eq!(x[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-15);

        let (x, w) = gauss_legendre(3);
        assert_abs_diff_eq!(x[2], (0.6f64).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w[1], 8.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w[0], 5.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for n in [4, 9, 64] {
            let (x, w) = gauss_legendre(n);
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            for deg in 0..(2 * n).min(30) {
                let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert_abs_diff_eq!(got, want, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn sphere_area_and_moments() {
        assert_abs_diff_eq!(sphere_integral(8, 16, |_| 1.0), 4.0 * PI, epsilon = 1e-13);
        assert_abs_diff_eq!(sphere_integral(8, 16, |n| n.z * n.z), 4.0 * PI / 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(sphere_integral(8, 16, |n| n.x * n.x), 4.0 * PI / 3.0, epsilon = 1e-13);
    }
}
