//! The pushed-in-boundary link invariant.
//!
//! For a mesh M with a single boundary loop, push ∂M a distance ε into the
//! surface to get a disjoint loop C; λ(M) is the linking number of ∂M and
//! C. It vanishes for embedded orientable surfaces, while for an embedded
//! Möbius strip λ/2 is an odd integer; a surface with connected boundary
//! and λ ≠ 0 is a *generalized Möbius strip*.
//!
//! Linking numbers are computed two independent ways — the Gauss-map
//! double sum over segment pairs and signed crossings in a generic
//! projection — and any disagreement is an error, never averaged away.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::geom::curve::{segment_segment_distance, Curve};
use crate::geom::mesh::TriMesh;
use crate::geom::point::P3;

/// A simple closed polygonal loop in ℝ³ whose orientation is its vertex
/// order.
pub type OrientedLoop = Curve<3>;

/// Push the boundary loop of `mesh` a distance `epsilon` into the surface:
/// each boundary vertex moves along the in-surface direction perpendicular
/// to the boundary (the local face-fan normal crossed with the edge
/// bisector), then is projected back onto the mesh. The result inherits the
/// boundary's orientation.
pub fn pushed_in_curve(mesh: &TriMesh, epsilon: f64) -> Result<OrientedLoop> {
    if mesh.boundary_loops().len() != 1 {
        return Err(GeomError::Precondition(format!(
            "pushed-in curve needs exactly one boundary loop, found {}",
            mesh.boundary_loops().len()
        )));
    }
    if !(epsilon > 0.0) {
        return Err(GeomError::Precondition("epsilon must be positive".into()));
    }
    let chain = mesh.boundary_loops()[0].clone();
    let m = chain.len();
    let vertex_faces = mesh.vertex_faces();
    let fan_normals = crate::geom::curvature::vertex_normals_local(mesh);
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let prev = mesh.vertex(chain[(i + m - 1) % m]);
        let here = mesh.vertex(chain[i]);
        let next = mesh.vertex(chain[(i + 1) % m]);
        let t_in = (here - prev).normalized().unwrap();
        let t_out = (next - here).normalized().unwrap();
        let tangent = (t_in + t_out)
            .normalized()
            .or_else(|| (next - prev).normalized())
            .ok_or_else(|| {
                GeomError::Degenerate("boundary doubles back on itself".into())
            })?;
        let normal = fan_normals[chain[i]];
        if normal.norm_sq() == 0.0 {
            return Err(GeomError::Degenerate(format!(
                "degenerate face fan at boundary vertex {}",
                chain[i]
            )));
        }
        let mut inward = normal.cross(&tangent).normalized().ok_or_else(|| {
            GeomError::Degenerate("boundary tangent parallel to the surface normal".into())
        })?;
        // orient into the surface: toward the fan's interior neighbors
        let mut interior_centroid = P3::new(0.0, 0.0, 0.0);
        let mut count = 0.0;
        for &f in &vertex_faces[chain[i]] {
            for &v in &mesh.faces()[f] {
                if v != chain[i] {
                    interior_centroid += mesh.vertex(v);
                    count += 1.0;
                }
            }
        }
        if count > 0.0 && inward.dot(&(interior_centroid / count - here)) < 0.0 {
            inward = -inward;
        }
        let offset = here + inward * epsilon;
        let projected = mesh.project_point(&offset);
        let d = mesh.distance_to_boundary(&projected);
        if (d - epsilon).abs() > 0.2 * epsilon {
            return Err(GeomError::Collar(format!(
                "offset point sits at boundary distance {d:.4e}, not ε = {epsilon:.4e}; \
                 ε is too large for the collar"
            )));
        }
        out.push(projected);
    }
    let curve = Curve::closed(out)?;
    curve.ensure_simple()?;
    Ok(curve)
}

#[derive(Debug, Clone)]
pub struct LinkingOptions {
    pub seed: u64,
    /// Retries for the projection direction in the crossing count.
    pub max_direction_retries: usize,
    /// Transversality margin for crossings, relative to segment scale.
    pub margin: f64,
}

impl Default for LinkingOptions {
    fn default() -> Self {
        LinkingOptions {
            seed: 42,
            max_direction_retries: 64,
            margin: 1e-6,
        }
    }
}

/// Integer linking number of two disjoint oriented loops, computed by the
/// Gauss double sum and by signed crossings in a generic projection. The two
/// results must agree exactly; disagreement is an internal error, never
/// averaged.
pub fn linking_number(a: &OrientedLoop, b: &OrientedLoop, opts: &LinkingOptions) -> Result<i64> {
    ensure_disjoint(a, b)?;
    let gauss = gauss_linking_sum(a, b)?;
    let crossings = crossing_count_linking(a, b, opts)?;
    if gauss != crossings {
        return Err(GeomError::Internal(format!(
            "linking methods disagree: Gauss sum {gauss} vs crossing count {crossings}"
        )));
    }
    Ok(gauss)
}

fn ensure_disjoint(a: &OrientedLoop, b: &OrientedLoop) -> Result<()> {
    let scale = a.bbox_diagonal().max(b.bbox_diagonal());
    let tol = 1e-9 * scale;
    let av = a.vertices();
    let bv = b.vertices();
    for (i0, i1) in a.edge_indices() {
        for (j0, j1) in b.edge_indices() {
            let d = segment_segment_distance(&av[i0], &av[i1], &bv[j0], &bv[j1]);
            if d <= tol {
                return Err(GeomError::Geometry(format!(
                    "loops come within {d:.3e} of each other; linking needs disjoint loops"
                )));
            }
        }
    }
    Ok(())
}

/// Signed solid angle of the spherical triangle (a, b, c) (van Oosterom &
/// Strackee), inputs unit vectors.
fn triangle_solid_angle(a: &P3, b: &P3, c: &P3) -> f64 {
    let num = a.dot(&b.cross(c));
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

/// Gauss-map degree: for each segment pair the Gauss image is a spherical
/// quadrilateral with great-arc edges; its signed area is summed (Kahan)
/// over all pairs and divided by 4π.
fn gauss_linking_sum(a: &OrientedLoop, b: &OrientedLoop) -> Result<i64> {
    let av = a.vertices();
    let bv = b.vertices();
    let mut sum = 0.0f64;
    let mut comp = 0.0f64; // Kahan compensation
    for (i0, i1) in a.edge_indices() {
        for (j0, j1) in b.edge_indices() {
            let r00 = (bv[j0] - av[i0]).normalized();
            let r10 = (bv[j0] - av[i1]).normalized();
            let r11 = (bv[j1] - av[i1]).normalized();
            let r01 = (bv[j1] - av[i0]).normalized();
            let (r00, r10, r11, r01) = match (r00, r10, r11, r01) {
                (Some(p), Some(q), Some(r), Some(s)) => (p, q, r, s),
                _ => {
                    return Err(GeomError::Geometry(
                        "coincident points between the two loops".into(),
                    ))
                }
            };
            // boundary of the Gauss image, following ∂[0,1]² counterclockwise
            let patch = triangle_solid_angle(&r00, &r10, &r11)
                + triangle_solid_angle(&r00, &r11, &r01);
            let y = patch - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    let lk = sum / (4.0 * std::f64::consts::PI);
    let rounded = lk.round();
    if (lk - rounded).abs() > 0.2 {
        return Err(GeomError::Numerical(format!(
            "Gauss linking sum {lk} is not close to an integer"
        )));
    }
    Ok(rounded as i64)
}

/// Linking number as half the sum of crossing signs in a generic projection:
/// at each inter-loop crossing the sign is det[t_over, t_under] in the
/// projection plane. Directions are retried until every crossing is
/// transverse with margin and strand heights separate cleanly.
fn crossing_count_linking(a: &OrientedLoop, b: &OrientedLoop, opts: &LinkingOptions) -> Result<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    'directions: for _ in 0..opts.max_direction_retries {
        let dir = random_unit(&mut rng);
        let (u, w) = orthonormal_basis(&dir);
        let proj =
            |p: &P3| -> (f64, f64, f64) { (p.dot(&u), p.dot(&w), p.dot(&dir)) };
        let scale = a.bbox_diagonal().max(b.bbox_diagonal());
        let av = a.vertices();
        let bv = b.vertices();
        let mut signed = 0i64;
        for (i0, i1) in a.edge_indices() {
            for (j0, j1) in b.edge_indices() {
                let (ax, ay, ah) = proj(&av[i0]);
                let (bx, by, bh) = proj(&av[i1]);
                let (cx, cy, ch) = proj(&bv[j0]);
                let (dx, dy, dh) = proj(&bv[j1]);
                let r = (bx - ax, by - ay);
                let z = (dx - cx, dy - cy);
                let denom = r.0 * z.1 - r.1 * z.0;
                let r_len = (r.0 * r.0 + r.1 * r.1).sqrt();
                let z_len = (z.0 * z.0 + z.1 * z.1).sqrt();
                if r_len == 0.0 || z_len == 0.0 {
                    continue 'directions; // an edge projected to a point
                }
                let q = (cx - ax, cy - ay);
                let t_num = q.0 * z.1 - q.1 * z.0;
                let s_num = q.0 * r.1 - q.1 * r.0;
                if denom.abs() <= opts.margin * r_len * z_len {
                    // (near-)parallel in projection: a problem only if the
                    // projected segments nearly touch; retry then
                    let d = crate::geom::curve::segment_segment_distance(
                        &crate::geom::point::P2::of(ax, ay),
                        &crate::geom::point::P2::of(bx, by),
                        &crate::geom::point::P2::of(cx, cy),
                        &crate::geom::point::P2::of(dx, dy),
                    );
                    if d <= opts.margin * scale {
                        continue 'directions;
                    }
                    continue;
                }
                let t = t_num / denom;
                let s = s_num / denom;
                if !(t.is_finite() && s.is_finite()) {
                    continue 'directions;
                }
                if t <= -opts.margin || t >= 1.0 + opts.margin || s <= -opts.margin || s >= 1.0 + opts.margin {
                    continue; // no crossing
                }
                if t < opts.margin
                    || t > 1.0 - opts.margin
                    || s < opts.margin
                    || s > 1.0 - opts.margin
                {
                    continue 'directions; // crossing at an endpoint: not generic
                }
                let height_a = ah + t * (bh - ah);
                let height_b = ch + s * (dh - ch);
                if (height_a - height_b).abs() <= 1e-9 * scale {
                    continue 'directions; // strands not separated along dir
                }
                let cross_sign = if denom > 0.0 { 1 } else { -1 };
                // det[t_over, t_under]: flips sign when B is the over strand
                signed += if height_a > height_b { cross_sign } else { -cross_sign };
            }
        }
        if signed % 2 != 0 {
            return Err(GeomError::Numerical(
                "odd signed crossing total between two closed loops".into(),
            ));
        }
        return Ok(signed / 2);
    }
    Err(GeomError::Numerical(format!(
        "no generic projection direction found in {} tries",
        opts.max_direction_retries
    )))
}

fn random_unit(rng: &mut ChaCha8Rng) -> P3 {
    loop {
        let p = P3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = p.norm_sq();
        if n > 1e-4 && n <= 1.0 {
            return p.normalized().unwrap();
        }
    }
}

fn orthonormal_basis(dir: &P3) -> (P3, P3) {
    let helper = if dir.x().abs() < 0.9 {
        P3::new(1.0, 0.0, 0.0)
    } else {
        P3::new(0.0, 1.0, 0.0)
    };
    let u = dir.cross(&helper).normalized().unwrap();
    let w = dir.cross(&u).normalized().unwrap();
    (u, w)
}

/// λ(M): the linking number of ∂M with its pushed-in copy, computed at the
/// default collar depth. Verified independent of the orientation choice and
/// of ε (recomputed at ε/2); any instability is an error.
pub fn lambda_invariant(mesh: &TriMesh, opts: &LinkingOptions) -> Result<i64> {
    let epsilon = default_push_depth(mesh)?;
    lambda_invariant_at(mesh, epsilon, opts)
}

/// λ(M) at a caller-chosen collar depth ε.
pub fn lambda_invariant_at(mesh: &TriMesh, epsilon: f64, opts: &LinkingOptions) -> Result<i64> {
    let boundary = mesh.boundary_curve()?;
    let pushed = pushed_in_curve(mesh, epsilon)?;
    let lambda = linking_number(&boundary, &pushed, opts)?;

    let pushed_half = pushed_in_curve(mesh, epsilon / 2.0)?;
    let lambda_half = linking_number(&boundary, &pushed_half, opts)?;
    if lambda != lambda_half {
        return Err(GeomError::Internal(format!(
            "λ depends on the collar depth: {lambda} at ε, {lambda_half} at ε/2"
        )));
    }

    let reversed_boundary = boundary.reversed();
    let reversed_pushed = pushed.reversed();
    let lambda_flipped = linking_number(&reversed_boundary, &reversed_pushed, opts)?;
    if lambda != lambda_flipped {
        return Err(GeomError::Internal(format!(
            "λ depends on the orientation choice: {lambda} vs {lambda_flipped}"
        )));
    }
    Ok(lambda)
}

/// Default collar depth: twice the mean boundary edge length.
pub fn default_push_depth(mesh: &TriMesh) -> Result<f64> {
    if mesh.boundary_loops().len() != 1 {
        return Err(GeomError::Precondition(format!(
            "λ needs exactly one boundary loop, found {}",
            mesh.boundary_loops().len()
        )));
    }
    let chain = &mesh.boundary_loops()[0];
    let m = chain.len();
    let mut total = 0.0;
    for i in 0..m {
        total += mesh
            .vertex(chain[i])
            .dist(&mesh.vertex(chain[(i + 1) % m]));
    }
    Ok(2.0 * total / m as f64)
}

/// A generalized Möbius strip has exactly one boundary component and λ ≠ 0.
pub fn is_generalized_mobius(mesh: &TriMesh, opts: &LinkingOptions) -> Result<bool> {
    if mesh.boundary_loops().len() != 1 {
        return Ok(false);
    }
    Ok(lambda_invariant(mesh, opts)? != 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use std::f64::consts::PI;

    fn hopf_pair() -> (OrientedLoop, OrientedLoop) {
        let a = shapes::circle_curve(1.0, 64);
        let b_pts = (0..64)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 64.0;
                P3::new(1.0 + t.cos(), 0.0, t.sin())
            })
            .collect();
        (a, Curve::closed(b_pts).unwrap())
    }

    #[test]
    fn hopf_link_has_linking_one() {
        let (a, b) = hopf_pair();
        let lk = linking_number(&a, &b, &LinkingOptions::default()).unwrap();
        assert_eq!(lk.abs(), 1);
    }

    #[test]
    fn distant_circles_unlink() {
        let a = shapes::circle_curve(1.0, 48);
        let b = shapes::circle_curve(1.0, 48).translated(P3::new(5.0, 0.0, 0.0));
        assert_eq!(linking_number(&a, &b, &LinkingOptions::default()).unwrap(), 0);
    }

    #[test]
    fn double_cable_links_twice() {
        // one trip around the z-axis while winding twice around the tube of
        // the unit circle: passes through its spanning disk twice, same sign
        let a = shapes::circle_curve(1.0, 96);
        let n = 192;
        let b_pts = (0..n)
            .map(|i| {
                let th = 2.0 * PI * i as f64 / n as f64;
                let phi = 2.0 * th;
                let rad = 1.0 + 0.4 * phi.cos();
                P3::new(rad * th.cos(), rad * th.sin(), 0.4 * phi.sin())
            })
            .collect();
        let b = Curve::closed(b_pts).unwrap();
        let lk = linking_number(&a, &b, &LinkingOptions::default()).unwrap();
        assert_eq!(lk.abs(), 2, "cable should link twice, got {lk}");
    }

    #[test]
    fn linking_symmetry_and_orientation_reversal() {
        let (a, b) = hopf_pair();
        let opts = LinkingOptions::default();
        let ab = linking_number(&a, &b, &opts).unwrap();
        let ba = linking_number(&b, &a, &opts).unwrap();
        assert_eq!(ab, ba);
        let rev = linking_number(&a.reversed(), &b, &opts).unwrap();
        assert_eq!(rev, -ab);
    }

    #[test]
    fn near_intersecting_loops_rejected() {
        let a = shapes::circle_curve(1.0, 48);
        let b = shapes::circle_curve(1.0, 48).translated(P3::new(0.0, 0.0, 1e-12));
        assert!(matches!(
            linking_number(&a, &b, &LinkingOptions::default()),
            Err(GeomError::Geometry(_))
        ));
    }

    #[test]
    fn pushed_in_disk_is_smaller_circle() {
        let m = shapes::disk_fan(1.0, 64);
        let c = pushed_in_curve(&m, 0.1).unwrap();
        assert_eq!(c.len(), 64);
        for p in c.vertices() {
            let r = (p.x() * p.x() + p.y() * p.y()).sqrt();
            assert!((r - 0.9).abs() < 1e-6, "pushed radius {r}");
            assert!(p.z().abs() < 1e-12);
        }
    }

    #[test]
    fn pushed_in_rejects_two_boundary_loops() {
        let m = shapes::annulus(0.5, 1.0, 32, 4);
        assert!(matches!(
            pushed_in_curve(&m, 0.05),
            Err(GeomError::Precondition(_))
        ));
    }

    #[test]
    fn pushed_in_rejects_excessive_depth() {
        let m = shapes::mobius_strip(2.0, 0.3, 64, 6);
        assert!(matches!(
            pushed_in_curve(&m, 10.0),
            Err(GeomError::Collar(_)) | Err(GeomError::Simplicity { .. })
        ));
    }

    #[test]
    fn disk_lambda_vanishes() {
        let m = shapes::disk_mesh(1.0, 6, 48);
        assert_eq!(lambda_invariant(&m, &LinkingOptions::default()).unwrap(), 0);
    }

    #[test]
    fn torus_minus_disk_lambda_vanishes() {
        let m = shapes::torus_minus_disk(2.0, 0.8, 64, 32);
        assert_eq!(lambda_invariant(&m, &LinkingOptions::default()).unwrap(), 0);
        assert!(!is_generalized_mobius(&m, &LinkingOptions::default()).unwrap());
    }

    #[test]
    fn mobius_lambda_is_plus_minus_two() {
        let m = shapes::mobius_strip(2.0, 0.6, 96, 8);
        let lambda = lambda_invariant(&m, &LinkingOptions::default()).unwrap();
        assert_eq!(lambda.abs(), 2, "λ = {lambda}");
        assert_eq!((lambda / 2).rem_euclid(2), 1, "λ/2 should be odd");
        assert!(is_generalized_mobius(&m, &LinkingOptions::default()).unwrap());
    }

    #[test]
    fn mobius_pushed_in_curve_winds_twice_around_the_core() {
        // count signed half-turns of the pushed-in loop's angular coordinate
        let m = shapes::mobius_strip(2.0, 0.6, 96, 8);
        let c = pushed_in_curve(&m, 0.2).unwrap();
        let mut total_angle = 0.0;
        let verts = c.vertices();
        for i in 0..verts.len() {
            let a = verts[i];
            let b = verts[(i + 1) % verts.len()];
            let th_a = a.y().atan2(a.x());
            let th_b = b.y().atan2(b.x());
            let mut d = th_b - th_a;
            while d > PI {
                d -= 2.0 * PI;
            }
            while d < -PI {
                d += 2.0 * PI;
            }
            total_angle += d;
        }
        let windings = (total_angle / (2.0 * PI)).round() as i64;
        assert_eq!(windings.abs(), 2, "pushed-in loop should double-cover the core");
    }

    #[test]
    fn lambda_stable_under_subdivision() {
        let m = shapes::mobius_strip(2.0, 0.6, 48, 4);
        let lambda = lambda_invariant(&m, &LinkingOptions::default()).unwrap();
        let s = m.subdivide_midpoint().unwrap();
        let lambda_fine = lambda_invariant(&s, &LinkingOptions::default()).unwrap();
        assert_eq!(lambda.abs(), lambda_fine.abs());
    }

    #[test]
    fn lambda_invariant_under_rigid_motion() {
        let m = shapes::mobius_strip(2.0, 0.6, 48, 4);
        let lambda = lambda_invariant(&m, &LinkingOptions::default()).unwrap();
        let axis = P3::new(2.0, -1.0, 0.5).normalized().unwrap();
        let moved = m.mapped(|p| p.rotated(&axis, 0.8) + P3::new(3.0, 1.0, -2.0));
        let lambda_moved = lambda_invariant(&moved, &LinkingOptions::default()).unwrap();
        assert_eq!(lambda.abs(), lambda_moved.abs());
    }
}
