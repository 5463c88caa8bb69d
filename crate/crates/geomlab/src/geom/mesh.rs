//! Triangle meshes with boundary in ℝ³.
//!
//! Construction validates the manifold-with-boundary invariants: every edge
//! is shared by at most two faces, boundary edges (face-degree 1) chain into
//! disjoint simple loops, and no face is degenerate. Operations that need
//! more (a single boundary component, orientability) check separately.

use std::collections::BTreeMap;

use crate::error::{GeomError, Result};
use crate::geom::curve::Curve;
use crate::geom::point::P3;

/// Relative face-area threshold below which a face counts as degenerate:
/// area ≤ `DEGENERACY_REL_TOL` × (bbox diagonal)².
pub const DEGENERACY_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<P3>,
    faces: Vec<[usize; 3]>,
    /// Ordered vertex loops of the boundary, one per component.
    boundary_loops: Vec<Vec<usize>>,
    /// Per-vertex flag: lies on the boundary (held fixed by flows).
    boundary_vertex: Vec<bool>,
}

impl TriMesh {
    pub fn new(vertices: Vec<P3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.is_empty() && faces.is_empty() {
            return Ok(TriMesh {
                vertices,
                faces,
                boundary_loops: Vec::new(),
                boundary_vertex: Vec::new(),
            });
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(GeomError::Degenerate(format!(
                "non-finite vertex coordinate in {p:?}"
            )));
        }
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                if v >= vertices.len() {
                    return Err(GeomError::Topology(format!(
                        "face {fi} references vertex {v}, but only {} vertices exist",
                        vertices.len()
                    )));
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(GeomError::Topology(format!(
                    "face {fi} repeats a vertex: {f:?}"
                )));
            }
        }

        let mut mesh = TriMesh {
            vertices,
            faces,
            boundary_loops: Vec::new(),
            boundary_vertex: Vec::new(),
        };
        mesh.validate_geometry()?;
        mesh.rebuild_boundary()?;
        Ok(mesh)
    }

    fn validate_geometry(&self) -> Result<()> {
        let scale_sq = self.bbox_diagonal().powi(2).max(f64::MIN_POSITIVE);
        for (fi, f) in self.faces.iter().enumerate() {
            if self.face_area(*f) <= DEGENERACY_REL_TOL * scale_sq {
                return Err(GeomError::Degenerate(format!(
                    "face {fi} {f:?} has (near-)zero area"
                )));
            }
        }
        Ok(())
    }

    /// Recompute boundary loops and the boundary-vertex mask from scratch.
    /// Fails if any edge has face-degree ≥ 3 or the boundary edges do not
    /// form disjoint simple loops.
    pub(crate) fn rebuild_boundary(&mut self) -> Result<()> {
        let degrees = self.edge_face_degrees();
        for (&(a, b), &d) in &degrees {
            if d > 2 {
                return Err(GeomError::Topology(format!(
                    "non-manifold edge ({a}, {b}) shared by {d} faces"
                )));
            }
        }
        // adjacency among boundary edges
        let mut next: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut boundary_edges = 0usize;
        for (&(a, b), &d) in &degrees {
            if d == 1 {
                next.entry(a).or_default().push(b);
                next.entry(b).or_default().push(a);
                boundary_edges += 1;
            }
        }
        for (v, nbrs) in &next {
            if nbrs.len() != 2 {
                return Err(GeomError::Topology(format!(
                    "boundary vertex {v} has {} boundary edges; loops must be simple",
                    nbrs.len()
                )));
            }
        }
        let mut visited: BTreeMap<usize, bool> = next.keys().map(|&v| (v, false)).collect();
        let mut loops = Vec::new();
        let mut total = 0usize;
        for &start in next.keys() {
            if visited[&start] {
                continue;
            }
            let mut chain = vec![start];
            visited.insert(start, true);
            let mut prev = start;
            let mut here = next[&start][0];
            while here != start {
                visited.insert(here, true);
                chain.push(here);
                let nbrs = &next[&here];
                let step = if nbrs[0] == prev { nbrs[1] } else { nbrs[0] };
                prev = here;
                here = step;
            }
            total += chain.len();
            loops.push(chain);
        }
        if total != boundary_edges && !(boundary_edges == 0 && total == 0) {
            return Err(GeomError::Topology(
                "boundary edges do not decompose into disjoint simple loops".into(),
            ));
        }
        // deterministic order: loops sorted by smallest vertex index, each
        // loop rotated to start at its smallest vertex
        for chain in &mut loops {
            let (k, _) = chain.iter().enumerate().min_by_key(|(_, &v)| v).unwrap();
            chain.rotate_left(k);
        }
        loops.sort_by_key(|c| c[0]);
        let mut mask = vec![false; self.vertices.len()];
        for chain in &loops {
            for &v in chain {
                mask[v] = true;
            }
        }
        self.boundary_loops = loops;
        self.boundary_vertex = mask;
        Ok(())
    }

    pub fn vertices(&self) -> &[P3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex(&self, i: usize) -> P3 {
        self.vertices[i]
    }

    /// Move vertices (flows). The caller is responsible for keeping the mesh
    /// non-degenerate; topology is unchanged.
    pub fn set_vertex(&mut self, i: usize, p: P3) {
        self.vertices[i] = p;
    }

    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.boundary_loops
    }

    pub fn is_boundary_vertex(&self, i: usize) -> bool {
        self.boundary_vertex[i]
    }

    /// The boundary loop as an oriented closed curve. Fails unless the mesh
    /// has exactly one boundary component.
    pub fn boundary_curve(&self) -> Result<Curve<3>> {
        if self.boundary_loops.len() != 1 {
            return Err(GeomError::Precondition(format!(
                "expected exactly one boundary loop, found {}",
                self.boundary_loops.len()
            )));
        }
        Curve::closed(
            self.boundary_loops[0]
                .iter()
                .map(|&v| self.vertices[v])
                .collect(),
        )
    }

    pub fn edge_face_degrees(&self) -> BTreeMap<(usize, usize), usize> {
        let mut degrees = BTreeMap::new();
        for f in &self.faces {
            for (a, b) in face_edges(*f) {
                *degrees.entry(ordered(a, b)).or_insert(0) += 1;
            }
        }
        degrees
    }

    /// Map from undirected edge to the faces containing it.
    pub fn edge_faces(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for (a, b) in face_edges(*f) {
                map.entry(ordered(a, b)).or_default().push(fi);
            }
        }
        map
    }

    /// Faces incident to each vertex.
    pub fn vertex_faces(&self) -> Vec<Vec<usize>> {
        let mut vf = vec![Vec::new(); self.vertices.len()];
        for (fi, f) in self.faces.iter().enumerate() {
            for &v in f {
                vf[v].push(fi);
            }
        }
        vf
    }

    pub fn face_points(&self, f: [usize; 3]) -> [P3; 3] {
        [self.vertices[f[0]], self.vertices[f[1]], self.vertices[f[2]]]
    }

    pub fn face_area(&self, f: [usize; 3]) -> f64 {
        let [a, b, c] = self.face_points(f);
        (b - a).cross(&(c - a)).norm() * 0.5
    }

    /// Face normal following the stored winding; zero-length for degenerate
    /// faces (construction forbids those).
    pub fn face_normal(&self, f: [usize; 3]) -> P3 {
        let [a, b, c] = self.face_points(f);
        (b - a).cross(&(c - a)).normalized().unwrap_or(P3::new(0.0, 0.0, 0.0))
    }

    pub fn total_area(&self) -> f64 {
        self.faces.iter().map(|&f| self.face_area(f)).sum()
    }

    pub fn bbox(&self) -> (P3, P3) {
        let mut lo = self.vertices.first().copied().unwrap_or(P3::new(0.0, 0.0, 0.0));
        let mut hi = lo;
        for p in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    pub fn bbox_diagonal(&self) -> f64 {
        let (lo, hi) = self.bbox();
        lo.dist(&hi)
    }

    pub fn min_edge_length(&self) -> f64 {
        let mut min = f64::INFINITY;
        for f in &self.faces {
            for (a, b) in face_edges(*f) {
                min = min.min(self.vertices[a].dist(&self.vertices[b]));
            }
        }
        min
    }

    pub fn max_edge_length(&self) -> f64 {
        let mut max: f64 = 0.0;
        for f in &self.faces {
            for (a, b) in face_edges(*f) {
                max = max.max(self.vertices[a].dist(&self.vertices[b]));
            }
        }
        max
    }

    /// True iff a globally consistent face orientation exists, decided by
    /// propagating orientation across shared edges on each component.
    pub fn is_orientable(&self) -> bool {
        let edge_faces = self.edge_faces();
        let n = self.faces.len();
        // flip[f]: whether face f must be flipped relative to its stored winding
        let mut flip: Vec<Option<bool>> = vec![None; n];
        for seed in 0..n {
            if flip[seed].is_some() {
                continue;
            }
            flip[seed] = Some(false);
            let mut stack = vec![seed];
            while let Some(f) = stack.pop() {
                let f_flip = flip[f].unwrap();
                for (a, b) in face_edges(self.faces[f]) {
                    for &g in &edge_faces[&ordered(a, b)] {
                        if g == f {
                            continue;
                        }
                        // In a consistently oriented pair, the shared edge is
                        // traversed in opposite directions. Same direction in
                        // both faces means exactly one of them must flip.
                        let same_dir = face_has_directed_edge(self.faces[g], a, b);
                        let needed = if same_dir { !f_flip } else { f_flip };
                        match flip[g] {
                            None => {
                                flip[g] = Some(needed);
                                stack.push(g);
                            }
                            Some(existing) => {
                                if existing != needed {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// One round of 1-to-4 subdivision: each face is split at its edge
    /// midpoints. Original vertices keep their indices.
    pub fn subdivide_midpoint(&self) -> Result<TriMesh> {
        let mut vertices = self.vertices.clone();
        let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut faces = Vec::with_capacity(self.faces.len() * 4);
        for f in &self.faces {
            let mut mids = [0usize; 3];
            for (k, (a, b)) in face_edges(*f).into_iter().enumerate() {
                let key = ordered(a, b);
                mids[k] = *midpoint.entry(key).or_insert_with(|| {
                    vertices.push(self.vertices[a].lerp(&self.vertices[b], 0.5));
                    vertices.len() - 1
                });
            }
            let [v0, v1, v2] = *f;
            let [m01, m12, m20] = mids;
            faces.push([v0, m01, m20]);
            faces.push([v1, m12, m01]);
            faces.push([v2, m20, m12]);
            faces.push([m01, m12, m20]);
        }
        TriMesh::new(vertices, faces)
    }

    /// Nearest point on the mesh surface to `p` (linear scan over faces).
    pub fn project_point(&self, p: &P3) -> P3 {
        let mut best = self.vertices[0];
        let mut best_d = f64::INFINITY;
        for f in &self.faces {
            let q = closest_point_on_triangle(p, &self.face_points(*f));
            let d = p.dist_sq(&q);
            if d < best_d {
                best_d = d;
                best = q;
            }
        }
        best
    }

    /// Minimum distance from `p` to the boundary polyline(s).
    pub fn distance_to_boundary(&self, p: &P3) -> f64 {
        let mut min = f64::INFINITY;
        for chain in &self.boundary_loops {
            for i in 0..chain.len() {
                let a = self.vertices[chain[i]];
                let b = self.vertices[chain[(i + 1) % chain.len()]];
                min = min.min(crate::geom::curve::point_segment_distance(p, &a, &b));
            }
        }
        min
    }

    pub fn translated(&self, offset: P3) -> TriMesh {
        let mut m = self.clone();
        for v in &mut m.vertices {
            *v += offset;
        }
        m
    }

    pub fn scaled(&self, factor: f64) -> TriMesh {
        let mut m = self.clone();
        for v in &mut m.vertices {
            *v = *v * factor;
        }
        m
    }

    pub fn mapped(&self, f: impl Fn(&P3) -> P3) -> TriMesh {
        let mut m = self.clone();
        for v in &mut m.vertices {
            *v = f(v);
        }
        m
    }
}

pub(crate) fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) fn face_edges(f: [usize; 3]) -> [(usize, usize); 3] {
    [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])]
}

fn face_has_directed_edge(f: [usize; 3], a: usize, b: usize) -> bool {
    face_edges(f).into_iter().any(|(x, y)| x == a && y == b)
}

/// Closest point on a triangle to `p` (Ericson's region test).
pub fn closest_point_on_triangle(p: &P3, tri: &[P3; 3]) -> P3 {
    let [a, b, c] = *tri;
    let ab = b - a;
    let ac = c - a;
    let ap = *p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = *p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = *p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn disk_fan_has_one_boundary_loop_of_64_edges() {
        let m = shapes::disk_fan(1.0, 64);
        assert_eq!(m.boundary_loops().len(), 1);
        assert_eq!(m.boundary_loops()[0].len(), 64);
        assert!(m.is_orientable());
    }

    #[test]
    fn icosphere_is_closed_and_orientable() {
        let m = shapes::icosphere(1.0, 2);
        assert_eq!(m.boundary_loops().len(), 0);
        assert!(m.is_orientable());
    }

    #[test]
    fn nonmanifold_edge_rejected() {
        // three faces sharing the edge (0, 1)
        let vertices = vec![
            P3::new(0.0, 0.0, 0.0),
            P3::new(1.0, 0.0, 0.0),
            P3::new(0.0, 1.0, 0.0),
            P3::new(0.0, -1.0, 0.0),
            P3::new(0.0, 0.0, 1.0),
        ];
        let faces = vec![[0, 1, 2], [0, 1, 3], [0, 1, 4]];
        let r = TriMesh::new(vertices, faces);
        assert!(matches!(r, Err(GeomError::Topology(_))));
    }

    #[test]
    fn degenerate_face_rejected() {
        let vertices = vec![
            P3::new(0.0, 0.0, 0.0),
            P3::new(1.0, 0.0, 0.0),
            P3::new(2.0, 0.0, 0.0), // collinear
            P3::new(0.0, 1.0, 0.0),
        ];
        let faces = vec![[0, 1, 2], [0, 1, 3]];
        let r = TriMesh::new(vertices, faces);
        assert!(matches!(r, Err(GeomError::Degenerate(_))));
    }

    #[test]
    fn mobius_strip_is_nonorientable_with_one_boundary_loop() {
        let m = shapes::mobius_strip(2.0, 0.6, 64, 8);
        assert!(!m.is_orientable());
        assert_eq!(m.boundary_loops().len(), 1);
    }

    #[test]
    fn annulus_is_orientable_with_two_loops() {
        let m = shapes::annulus(0.5, 1.0, 48, 4);
        assert!(m.is_orientable());
        assert_eq!(m.boundary_loops().len(), 2);
    }

    #[test]
    fn boundary_edges_match_degree_one_edges() {
        for m in [
            shapes::disk_fan(1.0, 16),
            shapes::annulus(0.5, 1.0, 24, 3),
            shapes::mobius_strip(2.0, 0.5, 40, 6),
        ] {
            let degrees = m.edge_face_degrees();
            let mut from_degrees: Vec<(usize, usize)> = degrees
                .iter()
                .filter(|(_, &d)| d == 1)
                .map(|(&e, _)| e)
                .collect();
            let mut from_loops: Vec<(usize, usize)> = m
                .boundary_loops()
                .iter()
                .flat_map(|chain| {
                    (0..chain.len())
                        .map(move |i| ordered(chain[i], chain[(i + 1) % chain.len()]))
                })
                .collect();
            from_degrees.sort_unstable();
            from_loops.sort_unstable();
            assert_eq!(from_degrees, from_loops);
        }
    }

    #[test]
    fn subdivision_quadruples_faces_and_preserves_boundary() {
        let m = shapes::disk_fan(1.0, 16);
        let s = m.subdivide_midpoint().unwrap();
        assert_eq!(s.faces().len(), m.faces().len() * 4);
        assert_eq!(s.boundary_loops().len(), 1);
        assert_eq!(s.boundary_loops()[0].len(), 32);
    }

    #[test]
    fn orientability_invariant_under_reindexing() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (mesh, expect) in [
            (shapes::mobius_strip(2.0, 0.5, 36, 5), false),
            (shapes::annulus(0.6, 1.2, 20, 3), true),
        ] {
            // permute vertices and shuffle faces
            let n = mesh.vertices().len();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let mut new_vertices = vec![P3::new(0.0, 0.0, 0.0); n];
            for (old, &new) in perm.iter().enumerate() {
                new_vertices[new] = mesh.vertices()[old];
            }
            let mut new_faces: Vec<[usize; 3]> = mesh
                .faces()
                .iter()
                .map(|f| [perm[f[0]], perm[f[1]], perm[f[2]]])
                .collect();
            new_faces.shuffle(&mut rng);
            let remapped = TriMesh::new(new_vertices, new_faces).unwrap();
            assert_eq!(remapped.is_orientable(), expect);
        }
    }
}
