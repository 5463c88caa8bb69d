//! Conservative local remeshing for evolving meshes: long-edge splits,
//! short-edge collapses, and Delaunay-improving flips. The boundary
//! polyline is never touched, and any operation that would fold normals,
//! create degenerate faces, or change the total area beyond rounding is
//! rejected.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::geom::mesh::{face_edges, ordered, TriMesh};
use crate::geom::point::P3;

const SPLIT_FACTOR: f64 = 1.6;
const COLLAPSE_FACTOR: f64 = 0.5;
/// Max relative total-area change a flip/collapse may introduce.
const AREA_SLACK: f64 = 1e-9;

struct Working {
    vertices: Vec<P3>,
    faces: Vec<[usize; 3]>,
    boundary_vertex: Vec<bool>,
}

impl Working {
    fn edge_faces(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for (a, b) in face_edges(*f) {
                map.entry(ordered(a, b)).or_default().push(fi);
            }
        }
        map
    }

    fn face_area(&self, f: [usize; 3]) -> f64 {
        let [a, b, c] = f.map(|v| self.vertices[v]);
        (b - a).cross(&(c - a)).norm() * 0.5
    }

    fn face_normal(&self, f: [usize; 3]) -> Option<P3> {
        let [a, b, c] = f.map(|v| self.vertices[v]);
        (b - a).cross(&(c - a)).normalized()
    }

    fn median_edge(&self) -> f64 {
        let mut lens: Vec<f64> = Vec::new();
        let mut seen = BTreeSet::new();
        for f in &self.faces {
            for (a, b) in face_edges(*f) {
                if seen.insert(ordered(a, b)) {
                    lens.push(self.vertices[a].dist(&self.vertices[b]));
                }
            }
        }
        lens.sort_by(|x, y| x.partial_cmp(y).unwrap());
        lens[lens.len() / 2]
    }
}

/// One remeshing pass. Returns `None` when no operation was applicable or
/// when the pass failed to improve the min/max edge-length ratio (splitting
/// thin triangles mints ever-shorter spokes, so an unconditional pass can
/// cascade into runaway refinement).
pub fn remesh_pass(mesh: &TriMesh) -> Result<Option<TriMesh>> {
    let mut w = Working {
        vertices: mesh.vertices().to_vec(),
        faces: mesh.faces().to_vec(),
        boundary_vertex: (0..mesh.vertices().len())
            .map(|v| mesh.is_boundary_vertex(v))
            .collect(),
    };
    let ratio_before = mesh.min_edge_length() / mesh.max_edge_length();
    let target = w.median_edge();
    let mut changed = false;
    changed |= split_long_edges(&mut w, SPLIT_FACTOR * target);
    changed |= collapse_short_edges(&mut w, COLLAPSE_FACTOR * target);
    changed |= flip_for_delaunay(&mut w);
    if !changed {
        return Ok(None);
    }
    {
        let mut min = f64::INFINITY;
        let mut max: f64 = 0.0;
        for f in &w.faces {
            for (a, b) in face_edges(*f) {
                let len = w.vertices[a].dist(&w.vertices[b]);
                min = min.min(len);
                max = max.max(len);
            }
        }
        if min / max <= ratio_before {
            return Ok(None);
        }
    }
    // drop any vertices orphaned by collapses and revalidate
    let mut used = vec![false; w.vertices.len()];
    for f in &w.faces {
        for &v in f {
            used[v] = true;
        }
    }
    let mut remap = vec![usize::MAX; w.vertices.len()];
    let mut vertices = Vec::with_capacity(w.vertices.len());
    for (i, &u) in used.iter().enumerate() {
        if u {
            remap[i] = vertices.len();
            vertices.push(w.vertices[i]);
        }
    }
    let faces = w
        .faces
        .iter()
        .map(|f| [remap[f[0]], remap[f[1]], remap[f[2]]])
        .collect();
    TriMesh::new(vertices, faces).map(Some)
}

fn split_long_edges(w: &mut Working, threshold: f64) -> bool {
    let mut changed = false;
    loop {
        let edge_faces = w.edge_faces();
        let mut split: Option<((usize, usize), Vec<usize>)> = None;
        let mut longest = threshold;
        for (&(a, b), faces) in &edge_faces {
            if faces.len() != 2 {
                continue; // boundary edges stay
            }
            let len = w.vertices[a].dist(&w.vertices[b]);
            if len > longest {
                longest = len;
                split = Some(((a, b), faces.clone()));
            }
        }
        let Some(((a, b), faces)) = split else { break };
        let mid = w.vertices[a].lerp(&w.vertices[b], 0.5);
        let m = w.vertices.len();
        w.vertices.push(mid);
        w.boundary_vertex.push(false);
        for &fi in &faces {
            let f = w.faces[fi];
            // replace the split edge's endpoints with (endpoint, mid) pairs
            let opposite = f
                .iter()
                .copied()
                .find(|&v| v != a && v != b)
                .expect("triangle has a third vertex");
            // preserve winding: keep the cyclic order of f with b→m in one
            // face and m→a in the other
            let mut f1 = f;
            let mut f2 = f;
            for v in &mut f1 {
                if *v == b {
                    *v = m;
                }
            }
            for v in &mut f2 {
                if *v == a {
                    *v = m;
                }
            }
            let _ = opposite;
            w.faces[fi] = f1;
            w.faces.push(f2);
        }
        changed = true;
    }
    changed
}

fn collapse_short_edges(w: &mut Working, threshold: f64) -> bool {
    let mut changed = false;
    // collapses may perturb the surface slightly; keep the cumulative area
    // drift well inside the flow traces' 1e-6 monotonicity slack
    let initial_area: f64 = w.faces.iter().map(|&f| w.face_area(f)).sum();
    let mut area_budget = 5e-7 * initial_area;
    'outer: loop {
        let edge_faces = w.edge_faces();
        // adjacency for the link condition
        let mut neighbors: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for f in &w.faces {
            for (x, y) in face_edges(*f) {
                neighbors.entry(x).or_default().insert(y);
                neighbors.entry(y).or_default().insert(x);
            }
        }
        let total_area: f64 = w.faces.iter().map(|&f| w.face_area(f)).sum();

        let mut candidates: Vec<((usize, usize), f64)> = edge_faces
            .iter()
            .filter(|(_, faces)| faces.len() == 2)
            .map(|(&e, _)| (e, w.vertices[e.0].dist(&w.vertices[e.1])))
            .filter(|&(_, len)| len < threshold)
            .collect();
        candidates.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());

        for ((a, b), _) in candidates {
            if w.boundary_vertex[a] && w.boundary_vertex[b] {
                continue; // collapsing would disturb the boundary collar
            }
            // link condition: common neighbors must be exactly the two
            // opposite vertices of the edge's faces
            let common: Vec<usize> = neighbors[&a].intersection(&neighbors[&b]).copied().collect();
            if common.len() != 2 {
                continue;
            }
            let (survivor, removed) = if w.boundary_vertex[a] {
                (a, b)
            } else if w.boundary_vertex[b] {
                (b, a)
            } else {
                (a, b)
            };
            let new_pos = if w.boundary_vertex[survivor] {
                w.vertices[survivor]
            } else {
                w.vertices[a].lerp(&w.vertices[b], 0.5)
            };

            // simulate: drop the two shared faces, reroute `removed`.
            // Track (old, new) pairs so fold checks compare like with like.
            let mut pairs: Vec<([usize; 3], [usize; 3])> = Vec::with_capacity(w.faces.len());
            let mut ok = true;
            for &f in &w.faces {
                if f.contains(&a) && f.contains(&b) {
                    continue;
                }
                let mut g = f;
                for v in &mut g {
                    if *v == removed {
                        *v = survivor;
                    }
                }
                if g[0] == g[1] || g[1] == g[2] || g[0] == g[2] {
                    ok = false;
                    break;
                }
                pairs.push((f, g));
            }
            if !ok {
                continue;
            }
            // old normals and area with the original position
            let old_normals: Vec<Option<P3>> =
                pairs.iter().map(|&(f, _)| w.face_normal(f)).collect();
            let old_pos_survivor = w.vertices[survivor];
            w.vertices[survivor] = new_pos;
            let mut area_after = 0.0;
            for ((_, g), n_old) in pairs.iter().zip(&old_normals) {
                let area = w.face_area(*g);
                if area <= 1e-14 * total_area {
                    ok = false;
                    break;
                }
                area_after += area;
                if g.contains(&survivor) {
                    if let (Some(n_new), Some(n_old)) = (w.face_normal(*g), n_old) {
                        if n_new.dot(n_old) < 0.2 {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            let area_change = (area_after - total_area).abs();
            if ok && area_change > area_budget {
                ok = false;
            }
            if !ok {
                w.vertices[survivor] = old_pos_survivor;
                continue;
            }
            area_budget -= area_change;
            w.faces = pairs.into_iter().map(|(_, g)| g).collect();
            changed = true;
            continue 'outer; // adjacency is stale; rebuild
        }
        break;
    }
    changed
}

fn flip_for_delaunay(w: &mut Working) -> bool {
    let mut changed = false;
    for _ in 0..4 {
        let edge_faces = w.edge_faces();
        let total_area: f64 = w.faces.iter().map(|&f| w.face_area(f)).sum();
        let mut flipped_any = false;
        for (&(a, b), faces) in &edge_faces {
            if faces.len() != 2 {
                continue;
            }
            let (f1, f2) = (faces[0], faces[1]);
            let c = opposite_vertex(w.faces[f1], a, b);
            let d = opposite_vertex(w.faces[f2], a, b);
            let (Some(c), Some(d)) = (c, d) else { continue };
            if c == d {
                continue;
            }
            let angle_c = corner_angle(&w.vertices[c], &w.vertices[a], &w.vertices[b]);
            let angle_d = corner_angle(&w.vertices[d], &w.vertices[a], &w.vertices[b]);
            if angle_c + angle_d <= std::f64::consts::PI + 0.2 {
                continue;
            }
            // proposed faces (a, d, c) and (b, c, d) with winding from f1
            let old_area = w.face_area(w.faces[f1]) + w.face_area(w.faces[f2]);
            let g1 = rewound_face(w.faces[f1], a, b, c, d, true);
            let g2 = rewound_face(w.faces[f1], a, b, c, d, false);
            let new_area = w.face_area(g1) + w.face_area(g2);
            if (new_area - old_area).abs() > AREA_SLACK * total_area + 1e-12 * old_area {
                continue; // the quad is non-planar enough to change area
            }
            if w.face_area(g1) <= 1e-14 * total_area || w.face_area(g2) <= 1e-14 * total_area {
                continue;
            }
            if let (Some(n1), Some(n2), Some(o1)) = (
                w.face_normal(g1),
                w.face_normal(g2),
                w.face_normal(w.faces[f1]),
            ) {
                if n1.dot(&o1) < 0.5 || n2.dot(&o1) < 0.5 {
                    continue;
                }
            }
            w.faces[f1] = g1;
            w.faces[f2] = g2;
            changed = true;
            flipped_any = true;
        }
        if !flipped_any {
            break;
        }
    }
    changed
}

fn opposite_vertex(f: [usize; 3], a: usize, b: usize) -> Option<usize> {
    f.iter().copied().find(|&v| v != a && v != b)
}

fn corner_angle(apex: &P3, p: &P3, q: &P3) -> f64 {
    let u = *p - *apex;
    let v = *q - *apex;
    u.cross_norm(&v).atan2(u.dot(&v))
}

/// The two faces replacing (a, b, c) + (a, b, d) after flipping edge (a, b)
/// to (c, d), keeping the winding of `reference`.
fn rewound_face(reference: [usize; 3], a: usize, b: usize, c: usize, d: usize, first: bool) -> [usize; 3] {
    // reference contains a, b, c in some cyclic order; build the flipped
    // pair so each keeps the a→b sense of the original
    let ab_in_order = {
        let mut found = false;
        for (x, y) in face_edges(reference) {
            if x == a && y == b {
                found = true;
            }
        }
        found
    };
    if first {
        if ab_in_order {
            [a, d, c]
        } else {
            [a, c, d]
        }
    } else if ab_in_order {
        [d, b, c]
    } else {
        [c, b, d]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn remesh_preserves_boundary_and_area() {
        // squeeze a disk mesh so some edges get long and thin
        let m = shapes::disk_mesh(1.0, 6, 24).mapped(|p| P3::new(p.x() * 3.0, p.y(), p.z()));
        let boundary_before: Vec<P3> = m.boundary_loops()[0]
            .iter()
            .map(|&v| m.vertex(v))
            .collect();
        let area_before = m.total_area();
        let out = remesh_pass(&m).unwrap();
        let out = out.expect("squeezed disk should trigger remeshing");
        let area_after = out.total_area();
        assert!(
            (area_after - area_before).abs() < 0.03 * area_before,
            "area changed {area_before} -> {area_after}"
        );
        assert_eq!(out.boundary_loops().len(), 1);
        let boundary_after: Vec<P3> = out.boundary_loops()[0]
            .iter()
            .map(|&v| out.vertex(v))
            .collect();
        assert_eq!(boundary_before.len(), boundary_after.len());
        // same polyline as a set
        for p in &boundary_before {
            let nearest = boundary_after
                .iter()
                .map(|q| q.dist(p))
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-12);
        }
        // quality actually improved
        let ratio = |mesh: &TriMesh| mesh.min_edge_length() / mesh.max_edge_length();
        assert!(ratio(&out) >= ratio(&m));
    }

    #[test]
    fn remesh_noop_on_a_good_mesh() {
        let m = shapes::icosphere(1.0, 2);
        let out = remesh_pass(&m).unwrap();
        assert!(out.is_none());
    }
}
