//! Canonical curves and meshes used by the test suites, the verification
//! runner, and as ready-made inputs: circles, ellipses, knots, disks,
//! icospheres, cylinders, Möbius strips, and friends.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geom::curve::Curve;
use crate::geom::mesh::TriMesh;
use crate::geom::point::P3;

// ---------------------------------------------------------------------------
// curves
// ---------------------------------------------------------------------------

/// Circle of given radius in the z = 0 plane.
pub fn circle_curve(radius: f64, n: usize) -> Curve<3> {
    let pts = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            P3::new(radius * t.cos(), radius * t.sin(), 0.0)
        })
        .collect();
    Curve::closed(pts).expect("regular polygon is a valid curve")
}

/// Axis-aligned ellipse in the z = 0 plane.
pub fn ellipse_curve(a: f64, b: f64, n: usize) -> Curve<3> {
    let pts = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            P3::new(a * t.cos(), b * t.sin(), 0.0)
        })
        .collect();
    Curve::closed(pts).expect("ellipse is a valid curve")
}

/// Planar star-shaped curve r(θ) = r0 + amp·cos(lobes·θ). Non-convex for
/// amp large enough relative to r0.
pub fn flower_curve(r0: f64, amp: f64, lobes: u32, n: usize) -> Curve<3> {
    let pts = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            let r = r0 + amp * (lobes as f64 * t).cos();
            P3::new(r * t.cos(), r * t.sin(), 0.0)
        })
        .collect();
    Curve::closed(pts).expect("flower is a valid curve")
}

/// Trefoil knot ((2+cos 3s)cos 2s, (2+cos 3s)sin 2s, sin 3s).
pub fn trefoil_curve(n: usize) -> Curve<3> {
    let pts = (0..n)
        .map(|i| {
            let s = 2.0 * PI * i as f64 / n as f64;
            let r = 2.0 + (3.0 * s).cos();
            P3::new(r * (2.0 * s).cos(), r * (2.0 * s).sin(), (3.0 * s).sin())
        })
        .collect();
    Curve::closed(pts).expect("trefoil is a valid curve")
}

/// Closed loop on the unit circle with a vertical wobble:
/// (cos t, sin t, amp·sin(2t)). Total curvature grows with `amp`.
pub fn twisted_loop(amp: f64, n: usize) -> Curve<3> {
    let pts = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            P3::new(t.cos(), t.sin(), amp * (2.0 * t).sin())
        })
        .collect();
    Curve::closed(pts).expect("twisted loop is a valid curve")
}

/// Random smooth closed curve from a low-order Fourier series, retrying
/// seeds until the sampled polygon is simple. Deterministic per seed.
pub fn fourier_loop(seed: u64, modes: usize, n: usize) -> Curve<3> {
    let mut attempt = seed;
    loop {
        let mut rng = ChaCha8Rng::seed_from_u64(attempt);
        // base circle plus decaying higher modes keeps most samples embedded
        let mut coef = [[[0.0f64; 2]; 8]; 3];
        for c in &mut coef {
            for (k, pair) in c.iter_mut().enumerate().take(modes.min(8)) {
                let decay = 0.5 / ((k + 2) * (k + 2)) as f64;
                pair[0] = rng.random_range(-1.0..1.0) * decay;
                pair[1] = rng.random_range(-1.0..1.0) * decay;
            }
        }
        let pts: Vec<P3> = (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                let mut p = [t.cos(), t.sin(), 0.0];
                for (dim, c) in coef.iter().enumerate() {
                    for (k, pair) in c.iter().enumerate().take(modes.min(8)) {
                        let f = (k + 2) as f64 * t;
                        p[dim] += pair[0] * f.cos() + pair[1] * f.sin();
                    }
                }
                P3::new(p[0], p[1], p[2])
            })
            .collect();
        if let Ok(curve) = Curve::closed(pts) {
            if curve.is_simple() {
                return curve;
            }
        }
        attempt = attempt.wrapping_add(0x9e37_79b9_7f4a_7c15);
    }
}

// ---------------------------------------------------------------------------
// meshes
// ---------------------------------------------------------------------------

/// Flat disk triangulated as a single fan: one center vertex, `n` boundary
/// vertices.
pub fn disk_fan(radius: f64, n: usize) -> TriMesh {
    let mut vertices = vec![P3::new(0.0, 0.0, 0.0)];
    for i in 0..n {
        let t = 2.0 * PI * i as f64 / n as f64;
        vertices.push(P3::new(radius * t.cos(), radius * t.sin(), 0.0));
    }
    let faces = (0..n).map(|i| [0, 1 + i, 1 + (i + 1) % n]).collect();
    TriMesh::new(vertices, faces).expect("disk fan is valid")
}

/// Flat disk with `rings` concentric rings of `segs` vertices each.
pub fn disk_mesh(radius: f64, rings: usize, segs: usize) -> TriMesh {
    assert!(rings >= 1 && segs >= 3);
    let mut vertices = vec![P3::new(0.0, 0.0, 0.0)];
    for r in 1..=rings {
        let rad = radius * r as f64 / rings as f64;
        for s in 0..segs {
            let t = 2.0 * PI * s as f64 / segs as f64;
            vertices.push(P3::new(rad * t.cos(), rad * t.sin(), 0.0));
        }
    }
    let ring_start = |r: usize| 1 + (r - 1) * segs;
    let mut faces = Vec::new();
    for s in 0..segs {
        faces.push([0, ring_start(1) + s, ring_start(1) + (s + 1) % segs]);
    }
    for r in 1..rings {
        let inner = ring_start(r);
        let outer = ring_start(r + 1);
        for s in 0..segs {
            let s1 = (s + 1) % segs;
            faces.push([inner + s, outer + s, outer + s1]);
            faces.push([inner + s, outer + s1, inner + s1]);
        }
    }
    TriMesh::new(vertices, faces).expect("disk mesh is valid")
}

/// Disk with an interior normal bump of the given amplitude; the boundary
/// circle stays in the z = 0 plane. `bump(r/R, θ)`-shaped via
/// z = amp·(1 − ρ²)²·cos(2θ).
pub fn perturbed_disk(radius: f64, rings: usize, segs: usize, amp: f64) -> TriMesh {
    let base = disk_mesh(radius, rings, segs);
    base.mapped(|p| {
        let rho = (p.x() * p.x() + p.y() * p.y()).sqrt() / radius;
        let theta = p.y().atan2(p.x());
        let z = amp * (1.0 - rho * rho).powi(2) * (2.0 * theta).cos();
        P3::new(p.x(), p.y(), z)
    })
}

/// Icosphere: subdivided icosahedron projected to the sphere of the given
/// radius, centered at the origin.
pub fn icosphere(radius: f64, subdivisions: u32) -> TriMesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let raw = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ];
    let vertices: Vec<P3> = raw
        .iter()
        .map(|&(x, y, z)| P3::new(x, y, z).normalized().unwrap() * radius)
        .collect();
    let faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let mut mesh = TriMesh::new(vertices, faces).expect("icosahedron is valid");
    for _ in 0..subdivisions {
        mesh = mesh.subdivide_midpoint().expect("subdivision stays valid");
        mesh = mesh.mapped(|p| p.normalized().unwrap() * radius);
    }
    mesh
}

/// Open cylinder of the given radius around the z-axis, z ∈ [−half_len, half_len].
/// Two boundary circles.
pub fn cylinder(radius: f64, half_len: f64, segs: usize, rings: usize) -> TriMesh {
    assert!(segs >= 3 && rings >= 1);
    let mut vertices = Vec::with_capacity((rings + 1) * segs);
    for r in 0..=rings {
        let z = -half_len + 2.0 * half_len * r as f64 / rings as f64;
        for s in 0..segs {
            let t = 2.0 * PI * s as f64 / segs as f64;
            vertices.push(P3::new(radius * t.cos(), radius * t.sin(), z));
        }
    }
    let mut faces = Vec::new();
    for r in 0..rings {
        for s in 0..segs {
            let s1 = (s + 1) % segs;
            let a = r * segs + s;
            let b = r * segs + s1;
            let c = (r + 1) * segs + s;
            let d = (r + 1) * segs + s1;
            faces.push([a, b, d]);
            faces.push([a, d, c]);
        }
    }
    TriMesh::new(vertices, faces).expect("cylinder is valid")
}

/// Open cylinder with sinh-graded rings concentrating axial resolution near
/// z = 0, where a neck forms under mean curvature flow between far rings.
pub fn graded_tube(radius: f64, half_len: f64, segs: usize, rings: usize) -> TriMesh {
    assert!(segs >= 3 && rings >= 2);
    let sharp = 3.0f64;
    let mut vertices = Vec::with_capacity((rings + 1) * segs);
    for r in 0..=rings {
        let u = -1.0 + 2.0 * r as f64 / rings as f64;
        let z = half_len * (sharp * u).sinh() / sharp.sinh();
        for s in 0..segs {
            let t = 2.0 * PI * s as f64 / segs as f64;
            vertices.push(P3::new(radius * t.cos(), radius * t.sin(), z));
        }
    }
    let mut faces = Vec::new();
    for r in 0..rings {
        for s in 0..segs {
            let s1 = (s + 1) % segs;
            let a = r * segs + s;
            let b = r * segs + s1;
            let c = (r + 1) * segs + s;
            let d = (r + 1) * segs + s1;
            faces.push([a, b, d]);
            faces.push([a, d, c]);
        }
    }
    TriMesh::new(vertices, faces).expect("graded tube is valid")
}

/// Flat annulus in the z = 0 plane. Two boundary circles.
pub fn annulus(r_inner: f64, r_outer: f64, segs: usize, rings: usize) -> TriMesh {
    assert!(segs >= 3 && rings >= 1);
    let mut vertices = Vec::new();
    for r in 0..=rings {
        let rad = r_inner + (r_outer - r_inner) * r as f64 / rings as f64;
        for s in 0..segs {
            let t = 2.0 * PI * s as f64 / segs as f64;
            vertices.push(P3::new(rad * t.cos(), rad * t.sin(), 0.0));
        }
    }
    let mut faces = Vec::new();
    for r in 0..rings {
        for s in 0..segs {
            let s1 = (s + 1) % segs;
            let a = r * segs + s;
            let b = r * segs + s1;
            let c = (r + 1) * segs + s;
            let d = (r + 1) * segs + s1;
            faces.push([a, b, d]);
            faces.push([a, d, c]);
        }
    }
    TriMesh::new(vertices, faces).expect("annulus is valid")
}

/// Möbius strip: center circle of the given radius in the z = 0 plane, ruled
/// by segments of half-width `half_width` that turn by π over one trip
/// around. One boundary loop; non-orientable.
pub fn mobius_strip(radius: f64, half_width: f64, segs_around: usize, segs_across: usize) -> TriMesh {
    assert!(segs_around >= 8 && segs_across >= 1);
    let m = segs_across + 1; // vertices across
    let mut vertices = Vec::with_capacity(segs_around * m);
    for i in 0..segs_around {
        let u = 2.0 * PI * i as f64 / segs_around as f64;
        let e_r = P3::new(u.cos(), u.sin(), 0.0);
        let e_z = P3::new(0.0, 0.0, 1.0);
        // ruling direction rotates by u/2 in the (e_r, e_z) plane
        let d = e_r * (u / 2.0).cos() + e_z * (u / 2.0).sin();
        let center = e_r * radius;
        for j in 0..m {
            let s = -half_width + 2.0 * half_width * j as f64 / segs_across as f64;
            vertices.push(center + d * s);
        }
    }
    // wrap with the half-twist: (u + 2π, s) ≡ (u, −s)
    let wrap = |i: usize, j: usize| -> usize {
        if i == segs_around {
            segs_across - j // row 0, reversed across
        } else {
            i * m + j
        }
    };
    let mut faces = Vec::new();
    for i in 0..segs_around {
        for j in 0..segs_across {
            let a = wrap(i, j);
            let b = wrap(i, j + 1);
            let c = wrap(i + 1, j);
            let d = wrap(i + 1, j + 1);
            faces.push([a, b, d]);
            faces.push([a, d, c]);
        }
    }
    TriMesh::new(vertices, faces).expect("mobius strip is valid")
}

/// Torus of radii (R, r) with the faces nearest a marked point removed:
/// orientable, genus 1, one boundary loop.
pub fn torus_minus_disk(big_r: f64, small_r: f64, segs_u: usize, segs_v: usize) -> TriMesh {
    assert!(segs_u >= 8 && segs_v >= 6);
    let mut vertices = Vec::with_capacity(segs_u * segs_v);
    for i in 0..segs_u {
        let u = 2.0 * PI * i as f64 / segs_u as f64;
        for j in 0..segs_v {
            let v = 2.0 * PI * j as f64 / segs_v as f64;
            let rad = big_r + small_r * v.cos();
            vertices.push(P3::new(rad * u.cos(), rad * u.sin(), small_r * v.sin()));
        }
    }
    let idx = |i: usize, j: usize| (i % segs_u) * segs_v + (j % segs_v);
    let mut faces = Vec::new();
    for i in 0..segs_u {
        for j in 0..segs_v {
            // cut a 2×2 patch of quads around (u, v) = (0, 0)
            let in_hole = |ii: usize, jj: usize| {
                (ii == 0 || ii == 1 || ii == segs_u - 1) && (jj == 0 || jj == 1 || jj == segs_v - 1)
            };
            if in_hole(i, j) {
                continue;
            }
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i, j + 1);
            let d = idx(i + 1, j + 1);
            faces.push([a, b, d]);
            faces.push([a, d, c]);
        }
    }
    // drop unreferenced vertices
    compact(vertices, faces)
}

/// Flat half-disk {x ≥ 0, |x| ≤ radius} in the z = 0 plane, bounded by the
/// segment of the y-axis and the arc. One boundary loop.
pub fn half_disk(radius: f64, rings: usize, segs: usize) -> TriMesh {
    assert!(rings >= 1 && segs >= 2);
    let mut vertices = vec![P3::new(0.0, 0.0, 0.0)];
    for r in 1..=rings {
        let rad = radius * r as f64 / rings as f64;
        for s in 0..=segs {
            let t = -PI / 2.0 + PI * s as f64 / segs as f64;
            vertices.push(P3::new(rad * t.cos(), rad * t.sin(), 0.0));
        }
    }
    let row = |r: usize| 1 + (r - 1) * (segs + 1);
    let mut faces = Vec::new();
    for s in 0..segs {
        faces.push([0, row(1) + s, row(1) + s + 1]);
    }
    for r in 1..rings {
        let inner = row(r);
        let outer = row(r + 1);
        for s in 0..segs {
            faces.push([inner + s, outer + s, outer + s + 1]);
            faces.push([inner + s, outer + s + 1, inner + s + 1]);
        }
    }
    TriMesh::new(vertices, faces).expect("half disk is valid")
}

/// Icosphere with the faces inside the polar cap of the given opening
/// angle removed: a sphere-with-hole whose single (jagged) boundary loop
/// can be held fixed by a flow.
pub fn punctured_sphere(radius: f64, cap_angle: f64, subdivisions: u32) -> TriMesh {
    let full = icosphere(radius, subdivisions);
    let z_cut = radius * cap_angle.cos();
    let faces: Vec<[usize; 3]> = full
        .faces()
        .iter()
        .copied()
        .filter(|f| {
            let c = (full.vertex(f[0]) + full.vertex(f[1]) + full.vertex(f[2])) / 3.0;
            c.z() < z_cut
        })
        .collect();
    compact(full.vertices().to_vec(), faces)
}

/// Flat square [−half, half]² in the z = 0 plane, n×n quads.
pub fn square_plane(half: f64, n: usize) -> TriMesh {
    assert!(n >= 1);
    let m = n + 1;
    let mut vertices = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let x = -half + 2.0 * half * i as f64 / n as f64;
            let y = -half + 2.0 * half * j as f64 / n as f64;
            vertices.push(P3::new(x, y, 0.0));
        }
    }
    let idx = |i: usize, j: usize| i * m + j;
    let mut faces = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i, j + 1);
            let d = idx(i + 1, j + 1);
            faces.push([a, b, d]);
            faces.push([a, d, c]);
        }
    }
    TriMesh::new(vertices, faces).expect("square plane is valid")
}

fn compact(vertices: Vec<P3>, faces: Vec<[usize; 3]>) -> TriMesh {
    let mut used = vec![false; vertices.len()];
    for f in &faces {
        for &v in f {
            used[v] = true;
        }
    }
    let mut remap = vec![usize::MAX; vertices.len()];
    let mut new_vertices = Vec::new();
    for (i, &u) in used.iter().enumerate() {
        if u {
            remap[i] = new_vertices.len();
            new_vertices.push(vertices[i]);
        }
    }
    let new_faces = faces
        .iter()
        .map(|f| [remap[f[0]], remap[f[1]], remap[f[2]]])
        .collect();
    TriMesh::new(new_vertices, new_faces).expect("compacted mesh is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_loops_are_simple_and_deterministic() {
        let a = fourier_loop(1, 4, 200);
        let b = fourier_loop(1, 4, 200);
        assert_eq!(a.vertices(), b.vertices());
        assert!(a.is_simple());
    }

    #[test]
    fn torus_minus_disk_is_orientable_genus_one_with_one_loop() {
        let m = torus_minus_disk(2.0, 0.8, 48, 24);
        assert!(m.is_orientable());
        assert_eq!(m.boundary_loops().len(), 1);
    }

    #[test]
    fn half_disk_boundary_includes_axis_segment() {
        let m = half_disk(1.0, 4, 8);
        assert_eq!(m.boundary_loops().len(), 1);
        // some boundary vertices on the y-axis
        let axis_count = m
            .boundary_loops()[0]
            .iter()
            .filter(|&&v| m.vertex(v).x().abs() < 1e-12)
            .count();
        assert!(axis_count >= 2);
    }

    #[test]
    fn perturbed_disk_keeps_boundary_flat() {
        let m = perturbed_disk(1.0, 8, 32, 0.2);
        assert_eq!(m.boundary_loops().len(), 1);
        for chain in m.boundary_loops() {
            for &v in chain {
                assert!(m.vertex(v).z().abs() < 1e-12);
            }
        }
        // the bump is really there
        let max_z = m.vertices().iter().map(|p| p.z().abs()).fold(0.0, f64::max);
        assert!(max_z > 0.1);
    }
}
