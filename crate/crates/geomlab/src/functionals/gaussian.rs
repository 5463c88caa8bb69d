//! Gaussian-weighted area of a mesh and of the exterior cone over a curve.
//!
//! The kernel is the 2-dimensional backward heat kernel
//! ψ_{v,λ}(x) = (4πλ)^{-1} exp(−|x−v|²/(4λ)); the plane through v has
//! ψ-mass exactly 1 at every scale.

use crate::error::{GeomError, Result};
use crate::geom::curve::Curve;
use crate::geom::mesh::{closest_point_on_triangle, TriMesh};
use crate::geom::point::P3;

/// Center and scale of the Gaussian weight.
#[derive(Debug, Clone, Copy)]
pub struct GaussianKernel {
    pub center: P3,
    pub scale: f64,
}

impl GaussianKernel {
    pub fn new(center: P3, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() || !center.is_finite() {
            return Err(GeomError::Precondition(format!(
                "Gaussian kernel needs a finite center and scale λ > 0, got λ = {scale}"
            )));
        }
        Ok(GaussianKernel { center, scale })
    }

    #[inline]
    pub fn eval(&self, x: &P3) -> f64 {
        let d2 = x.dist_sq(&self.center);
        (-d2 / (4.0 * self.scale)).exp() / (4.0 * std::f64::consts::PI * self.scale)
    }

    /// Kernel value at squared distance `d2` from the center.
    #[inline]
    fn eval_d2(&self, d2: f64) -> f64 {
        (-d2 / (4.0 * self.scale)).exp() / (4.0 * std::f64::consts::PI * self.scale)
    }
}

/// Result of a quadrature: value and a nonnegative error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

// Dunavant 6-point rule, exact to degree 4.
const TRI_RULE: [(f64, f64, f64); 6] = [
    (0.108_103_018_168_070, 0.445_948_490_915_965, 0.223_381_589_678_011),
    (0.445_948_490_915_965, 0.108_103_018_168_070, 0.223_381_589_678_011),
    (0.445_948_490_915_965, 0.445_948_490_915_965, 0.223_381_589_678_011),
    (0.816_847_572_980_459, 0.091_576_213_509_771, 0.109_951_743_655_322),
    (0.091_576_213_509_771, 0.816_847_572_980_459, 0.109_951_743_655_322),
    (0.091_576_213_509_771, 0.091_576_213_509_771, 0.109_951_743_655_322),
];

fn tri_area(a: &P3, b: &P3, c: &P3) -> f64 {
    (*b - *a).cross(&(*c - *a)).norm() * 0.5
}

fn tri_rule_6(a: &P3, b: &P3, c: &P3, k: &GaussianKernel) -> f64 {
    let area = tri_area(a, b, c);
    let mut s = 0.0;
    for &(u, v, w) in &TRI_RULE {
        let p = *a * (1.0 - u - v) + *b * u + *c * v;
        s += w * k.eval(&p);
    }
    s * area
}

fn tri_rule_midedge(a: &P3, b: &P3, c: &P3, k: &GaussianKernel) -> f64 {
    let area = tri_area(a, b, c);
    let m0 = a.lerp(b, 0.5);
    let m1 = b.lerp(c, 0.5);
    let m2 = c.lerp(a, 0.5);
    (k.eval(&m0) + k.eval(&m1) + k.eval(&m2)) * area / 3.0
}

/// Exponent beyond which a whole triangle's contribution is dropped and
/// charged to the error estimate (e^{−36} ≈ 2·10⁻¹⁶ relative to the peak).
const TAIL_EXPONENT: f64 = 36.0;
const MAX_DEPTH: u32 = 26;

fn integrate_triangle(a: &P3, b: &P3, c: &P3, k: &GaussianKernel, depth: u32) -> Quadrature {
    // cheapest first: cull by the nearest point of the triangle
    let nearest = closest_point_on_triangle(&k.center, &[*a, *b, *c]);
    let d2 = nearest.dist_sq(&k.center);
    if d2 / (4.0 * k.scale) > TAIL_EXPONENT {
        let bound = tri_area(a, b, c) * k.eval_d2(d2);
        return Quadrature {
            value: 0.0,
            error: bound,
        };
    }
    let diam_sq = a
        .dist_sq(b)
        .max(b.dist_sq(c))
        .max(c.dist_sq(a));
    // subdivide while the triangle is large relative to the kernel width
    if diam_sq > 0.04 * k.scale && depth < MAX_DEPTH {
        let m0 = a.lerp(b, 0.5);
        let m1 = b.lerp(c, 0.5);
        let m2 = c.lerp(a, 0.5);
        let mut total = Quadrature { value: 0.0, error: 0.0 };
        for (x, y, z) in [
            (*a, m0, m2),
            (*b, m1, m0),
            (*c, m2, m1),
            (m0, m1, m2),
        ] {
            let q = integrate_triangle(&x, &y, &z, k, depth + 1);
            total.value += q.value;
            total.error += q.error;
        }
        return total;
    }
    let fine = tri_rule_6(a, b, c, k);
    let coarse = tri_rule_midedge(a, b, c, k);
    Quadrature {
        value: fine,
        error: (fine - coarse).abs() * 0.1,
    }
}

/// ∫_M ψ_{v,λ} dA by per-triangle quadrature with adaptive subdivision near
/// the kernel center. The empty mesh integrates to zero.
pub fn gaussian_area(mesh: &TriMesh, kernel: &GaussianKernel) -> Quadrature {
    let mut total = Quadrature { value: 0.0, error: 0.0 };
    for f in mesh.faces() {
        let [a, b, c] = mesh.face_points(*f);
        let q = integrate_triangle(&a, &b, &c, kernel, 0);
        total.value += q.value;
        total.error += q.error;
    }
    total
}

/// ∫_{E_{Γ,v}} ψ_{v,λ} dA with multiplicity, where the cone vertex equals
/// the kernel center.
///
/// Parametrizing the exterior cone over an edge point x(u) by
/// P(s, u) = v + s·q(u) with q = x − v and s ∈ [1, ∞), the area element is
/// s·|q × q′| ds du and the s-integral is elementary, collapsing to
/// exp(−|q|²/(4λ)) / (2π|q|²)·|q × q′| per unit u. On a straight edge
/// |q × q′| = δ·|q′| is constant (δ the distance from v to the edge's line)
/// and |q(u)|² = δ² + ξ², so substituting ξ = δ·tan θ gives
///
///   (1/2π) e^{−δ²/4λ} ∫ exp(−δ² tan²θ / 4λ) dθ,
///
/// a bounded smooth integrand even as v approaches the curve. No truncation
/// in s is involved; the reported error is quadrature only.
pub fn exterior_cone_gaussian(
    curve: &Curve<3>,
    kernel: &GaussianKernel,
) -> Result<Quadrature> {
    curve.ensure_simple()?;
    let v = kernel.center;
    let lambda = kernel.scale;
    let scale = curve.bbox_diagonal().max(curve.distance_to_point(&v));

    let mut total = Quadrature { value: 0.0, error: 0.0 };
    let verts = curve.vertices();
    for (i, j) in curve.edge_indices() {
        let a = verts[i];
        let b = verts[j];
        let e = b - a;
        let len_sq = e.norm_sq();
        // foot of the perpendicular from v to the edge's line
        let u0 = (v - a).dot(&e) / len_sq;
        let foot = a + e * u0;
        let delta = foot.dist(&v);
        if delta <= 1e-14 * scale {
            continue; // v on the edge's line: the cone over it is degenerate
        }
        // ξ runs over signed distance along the line from the foot
        let len = len_sq.sqrt();
        let xi_1 = (0.0 - u0) * len;
        let xi_2 = (1.0 - u0) * len;
        let theta_1 = (xi_1 / delta).atan();
        let theta_2 = (xi_2 / delta).atan();
        let d2_over = delta * delta / (4.0 * lambda);
        if d2_over > TAIL_EXPONENT {
            // whole edge is deep in the Gaussian tail
            total.error += (theta_2 - theta_1).abs() * (-d2_over).exp()
                / (2.0 * std::f64::consts::PI);
            continue;
        }
        let g = |theta: f64| {
            let t = theta.tan();
            (-d2_over * t * t).exp()
        };
        let q = integrate_1d(&g, theta_1, theta_2, 0);
        let factor = (-d2_over).exp() / (2.0 * std::f64::consts::PI);
        total.value += factor * q.value;
        total.error += factor * q.error;
    }
    Ok(total)
}

// 5-point Gauss–Legendre on [0, 1]: nodes and weights.
const GL5: [(f64, f64); 5] = [
    (0.046_910_077_030_668, 0.118_463_442_528_095),
    (0.230_765_344_947_158, 0.239_314_335_249_683),
    (0.5, 0.284_444_444_444_444),
    (0.769_234_655_052_841, 0.239_314_335_249_683),
    (0.953_089_922_969_332, 0.118_463_442_528_095),
];

fn gl5_1d(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mut s = 0.0;
    for &(t, w) in &GL5 {
        s += w * f(a + (b - a) * t);
    }
    s * (b - a)
}

fn integrate_1d(f: &impl Fn(f64) -> f64, a: f64, b: f64, depth: u32) -> Quadrature {
    let coarse = gl5_1d(f, a, b);
    let m = 0.5 * (a + b);
    let fine = gl5_1d(f, a, m) + gl5_1d(f, m, b);
    let diff = (coarse - fine).abs();
    if depth >= 20 || diff <= 1e-14 + 1e-10 * fine.abs() {
        return Quadrature {
            value: fine,
            error: diff,
        };
    }
    let left = integrate_1d(f, a, m, depth + 1);
    let right = integrate_1d(f, m, b, depth + 1);
    Quadrature {
        value: left.value + right.value,
        error: left.error + right.error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn plane_has_unit_gaussian_mass() {
        // large flat square, side 100√λ, kernel centered in-plane
        let lambda = 0.04_f64;
        let side_half = 50.0 * lambda.sqrt();
        let mesh = shapes::square_plane(side_half, 48);
        let k = GaussianKernel::new(P3::new(0.0, 0.0, 0.0), lambda).unwrap();
        let q = gaussian_area(&mesh, &k);
        assert!((q.value - 1.0).abs() < 1e-4, "mass = {} ± {}", q.value, q.error);
    }

    #[test]
    fn sphere_radius_two_mass_is_four_over_e() {
        let mesh = shapes::icosphere(2.0, 3);
        let k = GaussianKernel::new(P3::new(0.0, 0.0, 0.0), 1.0).unwrap();
        let q = gaussian_area(&mesh, &k);
        let expected = 4.0 / std::f64::consts::E;
        assert!(
            (q.value - expected).abs() < 0.005 * expected,
            "mass = {}, want {expected}",
            q.value
        );
    }

    #[test]
    fn empty_mesh_has_zero_mass() {
        let mesh = TriMesh::new(Vec::new(), Vec::new()).unwrap();
        let k = GaussianKernel::new(P3::new(0.0, 0.0, 0.0), 1.0).unwrap();
        assert_eq!(gaussian_area(&mesh, &k).value, 0.0);
    }

    #[test]
    fn exterior_cone_of_circle_from_center_closed_form() {
        // E over the unit circle from its center is the plane outside the
        // unit disk: mass exp(−1/(4λ)).
        let c = shapes::circle_curve(1.0, 512);
        for lambda in [0.05, 0.25, 1.0, 5.0] {
            let k = GaussianKernel::new(P3::new(0.0, 0.0, 0.0), lambda).unwrap();
            let q = exterior_cone_gaussian(&c, &k).unwrap();
            let expected = (-1.0 / (4.0 * lambda)).exp();
            assert!(
                (q.value - expected).abs() < 2e-4 + 1e-3 * expected,
                "λ = {lambda}: mass = {}, want {expected}",
                q.value
            );
        }
    }

    #[test]
    fn exterior_cone_limits_in_lambda() {
        let c = shapes::circle_curve(1.0, 256);
        let small = exterior_cone_gaussian(
            &c,
            &GaussianKernel::new(P3::new(0.0, 0.0, 0.0), 1e-3).unwrap(),
        )
        .unwrap();
        assert!(small.value < 1e-10);
        let large = exterior_cone_gaussian(
            &c,
            &GaussianKernel::new(P3::new(0.0, 0.0, 0.0), 1e4).unwrap(),
        )
        .unwrap();
        assert!((large.value - 1.0).abs() < 1e-3);
    }

    #[test]
    fn kernel_rejects_bad_scale() {
        assert!(GaussianKernel::new(P3::new(0.0, 0.0, 0.0), 0.0).is_err());
        assert!(GaussianKernel::new(P3::new(0.0, 0.0, 0.0), -1.0).is_err());
    }
}
