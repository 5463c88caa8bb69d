//! Discrete curvature quantities on triangle meshes.
//!
//! The mean curvature vector at an interior vertex is the discrete area
//! gradient per unit vertex area: the cotangent-weighted position Laplacian
//! divided by the barycentric (one-third ring) vertex area. With this
//! normalization a round sphere of radius R carries |H| = 2/R pointing
//! inward, and the flow velocity of mean curvature flow is H itself.

use crate::error::{GeomError, Result};
use crate::geom::mesh::TriMesh;
use crate::geom::point::P3;

/// cot of the angle at `apex` in the triangle `(apex, a, b)`.
fn cotangent(apex: &P3, a: &P3, b: &P3) -> f64 {
    let u = *a - *apex;
    let v = *b - *apex;
    let cross = u.cross(&v).norm();
    if cross <= 0.0 {
        return 0.0;
    }
    u.dot(&v) / cross
}

/// Per-vertex barycentric areas: one third of the incident face areas.
pub fn vertex_areas(mesh: &TriMesh) -> Vec<f64> {
    let mut areas = vec![0.0; mesh.vertices().len()];
    for f in mesh.faces() {
        let a = mesh.face_area(*f) / 3.0;
        for &v in f {
            areas[v] += a;
        }
    }
    areas
}

/// Per-vertex mixed Voronoi areas (Meyer et al.): Voronoi contributions in
/// non-obtuse triangles, area/2 at the obtuse corner and area/4 elsewhere in
/// obtuse ones. Positive, and tiles the total area exactly.
///
/// The barycentric convention is fine for mass terms, but as the divisor of
/// the position Laplacian it leaves an O(1) relative error in |H| at
/// irregular vertices (≈14% at the valence-5 vertices of an icosphere, at
/// every refinement level); the mixed areas bring that within a couple of
/// percent, which is what pointwise curvature checks need.
pub fn vertex_areas_mixed(mesh: &TriMesh) -> Vec<f64> {
    let mut areas = vec![0.0; mesh.vertices().len()];
    for f in mesh.faces() {
        let pts = mesh.face_points(*f);
        let area = mesh.face_area(*f);
        // cot at each corner; a corner is obtuse iff its cot is negative
        let mut cots = [0.0; 3];
        for k in 0..3 {
            cots[k] = cotangent(&pts[k], &pts[(k + 1) % 3], &pts[(k + 2) % 3]);
        }
        let obtuse = cots.iter().position(|&c| c < 0.0);
        for k in 0..3 {
            areas[f[k]] += match obtuse {
                None => {
                    // Voronoi: (1/8)(|e_next|² cot(opp of e_next) + |e_prev|² cot(opp of e_prev))
                    let e_next = pts[(k + 1) % 3] - pts[k];
                    let e_prev = pts[(k + 2) % 3] - pts[k];
                    0.125
                        * (e_next.norm_sq() * cots[(k + 2) % 3]
                            + e_prev.norm_sq() * cots[(k + 1) % 3])
                }
                Some(o) if o == k => area * 0.5,
                Some(_) => area * 0.25,
            };
        }
    }
    areas
}

/// Area-weighted vertex normals (direction only meaningful where the mesh is
/// locally consistently wound; flows use them per-vertex where that holds).
pub fn vertex_normals(mesh: &TriMesh) -> Vec<P3> {
    let mut normals = vec![P3::new(0.0, 0.0, 0.0); mesh.vertices().len()];
    for f in mesh.faces() {
        let [a, b, c] = mesh.face_points(*f);
        let n = (b - a).cross(&(c - a)); // area-weighted
        for &v in f {
            normals[v] += n;
        }
    }
    for n in &mut normals {
        if let Some(u) = n.normalized() {
            *n = u;
        }
    }
    normals
}

/// Vertex normals with per-vertex winding reconciliation: stored face
/// windings are propagated consistently across each vertex's face fan, so
/// the result is meaningful on non-orientable meshes too (up to the
/// per-vertex sign, which consumers like x^⊥ = n(x·n) never see).
pub fn vertex_normals_local(mesh: &TriMesh) -> Vec<P3> {
    use crate::geom::mesh::{face_edges, ordered};
    let vertex_faces = mesh.vertex_faces();
    let mut normals = vec![P3::new(0.0, 0.0, 0.0); mesh.vertices().len()];
    for (v, fan) in vertex_faces.iter().enumerate() {
        if fan.is_empty() {
            continue;
        }
        let mut sign = vec![0.0f64; fan.len()];
        sign[0] = 1.0;
        let mut stack = vec![0usize];
        while let Some(k) = stack.pop() {
            let f = mesh.faces()[fan[k]];
            for (l, &other) in fan.iter().enumerate() {
                if sign[l] != 0.0 {
                    continue;
                }
                let g = mesh.faces()[other];
                let mut relation = None;
                for (a, b) in face_edges(f) {
                    for (c, d) in face_edges(g) {
                        if ordered(a, b) == ordered(c, d) {
                            relation = Some(a == c && b == d);
                        }
                    }
                }
                if let Some(same_direction) = relation {
                    sign[l] = if same_direction { -sign[k] } else { sign[k] };
                    stack.push(l);
                }
            }
        }
        let mut n = P3::new(0.0, 0.0, 0.0);
        for (k, &f) in fan.iter().enumerate() {
            let s = if sign[k] == 0.0 { 1.0 } else { sign[k] };
            let [a, b, c] = mesh.face_points(mesh.faces()[f]);
            n += (b - a).cross(&(c - a)) * s;
        }
        normals[v] = n.normalized().unwrap_or(P3::new(0.0, 0.0, 0.0));
    }
    normals
}

/// Mean curvature vectors at interior vertices; `None` at boundary vertices.
///
/// H(v) = Σ_j (cot α_ij + cot β_ij)(x_j − x_i) / (2 A_i), with A_i the mixed
/// Voronoi vertex area.
pub fn mean_curvature_vectors(mesh: &TriMesh) -> Result<Vec<Option<P3>>> {
    let n = mesh.vertices().len();
    let areas = vertex_areas_mixed(mesh);
    let mut accum = vec![P3::new(0.0, 0.0, 0.0); n];
    let scale_sq = mesh.bbox_diagonal().powi(2).max(f64::MIN_POSITIVE);
    for f in mesh.faces() {
        let [i, j, k] = *f;
        let [pi, pj, pk] = mesh.face_points(*f);
        if mesh.face_area(*f) <= 1e-14 * scale_sq {
            return Err(GeomError::Degenerate(format!(
                "collapsed triangle {f:?} in one-ring"
            )));
        }
        // each face contributes cot(angle at the opposite vertex) to its
        // three edges; the half factor is applied at the end
        let cot_i = cotangent(&pi, &pj, &pk);
        let cot_j = cotangent(&pj, &pk, &pi);
        let cot_k = cotangent(&pk, &pi, &pj);
        accum[j] += (pk - pj) * cot_i;
        accum[k] += (pj - pk) * cot_i;
        accum[k] += (pi - pk) * cot_j;
        accum[i] += (pk - pi) * cot_j;
        accum[i] += (pj - pi) * cot_k;
        accum[j] += (pi - pj) * cot_k;
    }
    let mut out = Vec::with_capacity(n);
    for v in 0..n {
        if mesh.is_boundary_vertex(v) {
            out.push(None);
        } else {
            if areas[v] <= 0.0 {
                return Err(GeomError::Degenerate(format!(
                    "vertex {v} has zero one-ring area"
                )));
            }
            out.push(Some(accum[v] * (0.5 / areas[v])));
        }
    }
    Ok(out)
}

/// Discrete curvature vectors of a closed polygonal curve: the second
/// difference of position with respect to arclength,
/// κ_i = (T_{i+} − T_{i−}) / ((ℓ_{i−} + ℓ_{i+})/2), with unit tangents T.
pub fn curve_curvature_vectors<const N: usize>(
    curve: &crate::geom::curve::Curve<N>,
) -> Vec<crate::geom::point::Point<N>> {
    let v = curve.vertices();
    let n = v.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = v[(i + n - 1) % n];
        let here = v[i];
        let next = v[(i + 1) % n];
        let l_prev = here.dist(&prev);
        let l_next = next.dist(&here);
        let t_prev = (here - prev) / l_prev;
        let t_next = (next - here) / l_next;
        out.push((t_next - t_prev) / (0.5 * (l_prev + l_next)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn flat_disk_interior_mean_curvature_is_zero() {
        let m = shapes::disk_mesh(1.0, 6, 36);
        let h = mean_curvature_vectors(&m).unwrap();
        let mut interior = 0;
        for (v, hv) in h.iter().enumerate() {
            match hv {
                Some(vec) => {
                    interior += 1;
                    assert!(
                        vec.norm() < 1e-10,
                        "vertex {v}: |H| = {} on a planar mesh",
                        vec.norm()
                    );
                }
                None => assert!(m.is_boundary_vertex(v)),
            }
        }
        assert!(interior > 0);
    }

    #[test]
    fn sphere_mean_curvature_magnitude_and_direction() {
        let radius = 2.0;
        let m = shapes::icosphere(radius, 3);
        let h = mean_curvature_vectors(&m).unwrap();
        for (v, hv) in h.iter().enumerate() {
            let hv = hv.expect("closed mesh: all vertices interior");
            let expected = 2.0 / radius;
            assert!(
                (hv.norm() - expected).abs() <= 0.02 * expected,
                "vertex {v}: |H| = {}, want ≈ {expected}",
                hv.norm()
            );
            // inward: opposite the position direction
            let inward = -m.vertex(v).normalized().unwrap();
            assert!(hv.normalized().unwrap().dot(&inward) > 0.99);
        }
    }

    #[test]
    fn cylinder_interior_mean_curvature() {
        let radius = 1.5;
        let m = shapes::cylinder(radius, 2.0, 64, 24);
        let h = mean_curvature_vectors(&m).unwrap();
        let mut checked = 0;
        for (v, hv) in h.iter().enumerate() {
            if let Some(hv) = hv {
                // stay away from the open ends where the ring is one-sided
                if m.vertex(v).z().abs() > 1.2 {
                    continue;
                }
                checked += 1;
                let expected = 1.0 / radius;
                assert!(
                    (hv.norm() - expected).abs() <= 0.02 * expected,
                    "vertex {v}: |H| = {}, want ≈ {expected}",
                    hv.norm()
                );
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn circle_curve_curvature_is_one_over_radius() {
        let c = shapes::circle_curve(2.0, 256);
        for k in curve_curvature_vectors(&c) {
            assert!((k.norm() - 0.5).abs() < 0.01 * 0.5);
        }
    }
}
