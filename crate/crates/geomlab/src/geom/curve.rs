//! Polygonal curves in `N`-dimensional space.
//!
//! A [`Curve`] is an ordered list of vertices, closed by default (the last
//! vertex connects back to the first). Open polylines are supported only as
//! boundary data for entropy evaluation; curvature-type quantities require a
//! closed curve.

use crate::error::{GeomError, Result};
use crate::geom::point::{angle_between, Point};

/// Relative tolerance deciding whether non-adjacent edges of a "simple"
/// curve are far enough apart: pairs must be ≥ `SIMPLICITY_REL_TOL` × the
/// bounding-box diagonal apart.
pub const SIMPLICITY_REL_TOL: f64 = 1e-7;

/// A polygonal curve: vertices in order, with an implicit closing edge
/// unless `closed` is false.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve<const N: usize> {
    vertices: Vec<Point<N>>,
    closed: bool,
}

impl<const N: usize> Curve<N> {
    /// Build a closed curve. Requires ≥ 3 vertices, all finite, with
    /// consecutive vertices (including the wrap-around pair) distinct.
    pub fn closed(vertices: Vec<Point<N>>) -> Result<Self> {
        Self::build(vertices, true)
    }

    /// Build an open polyline (≥ 2 vertices). Used for boundary data such as
    /// a truncated straight line; most curve functionals reject these.
    pub fn open(vertices: Vec<Point<N>>) -> Result<Self> {
        Self::build(vertices, false)
    }

    fn build(vertices: Vec<Point<N>>, closed: bool) -> Result<Self> {
        let min = if closed { 3 } else { 2 };
        if vertices.len() < min {
            return Err(GeomError::Precondition(format!(
                "curve needs at least {min} vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(GeomError::Degenerate(format!(
                "non-finite vertex coordinate in {p:?}"
            )));
        }
        let curve = Curve { vertices, closed };
        let scale = curve.bbox_diagonal().max(f64::MIN_POSITIVE);
        for (i, j) in curve.edge_indices() {
            if curve.vertices[i].dist(&curve.vertices[j]) <= 1e-14 * scale {
                return Err(GeomError::Degenerate(format!(
                    "zero-length edge between vertices {i} and {j}"
                )));
            }
        }
        Ok(curve)
    }

    pub fn vertices(&self) -> &[Point<N>] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Index pairs `(i, j)` of the curve edges, in traversal order.
    pub fn edge_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.vertices.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |i| (i, (i + 1) % n))
    }

    pub fn edge_vector(&self, edge: (usize, usize)) -> Point<N> {
        self.vertices[edge.1] - self.vertices[edge.0]
    }

    pub fn total_length(&self) -> f64 {
        self.edge_indices()
            .map(|(i, j)| self.vertices[i].dist(&self.vertices[j]))
            .sum()
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edge_indices()
            .map(|(i, j)| self.vertices[i].dist(&self.vertices[j]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edge_indices()
            .map(|(i, j)| self.vertices[i].dist(&self.vertices[j]))
            .fold(0.0, f64::max)
    }

    pub fn bbox(&self) -> (Point<N>, Point<N>) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for p in &self.vertices {
            for k in 0..N {
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

    pub fn centroid(&self) -> Point<N> {
        let mut c = Point::zero();
        for p in &self.vertices {
            c += *p;
        }
        c / self.vertices.len() as f64
    }

    /// Minimum distance from `p` to the curve (over all edges).
    pub fn distance_to_point(&self, p: &Point<N>) -> f64 {
        self.edge_indices()
            .map(|(i, j)| point_segment_distance(p, &self.vertices[i], &self.vertices[j]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest distance between any pair of non-adjacent edges.
    pub fn min_nonadjacent_separation(&self) -> f64 {
        let edges: Vec<(usize, usize)> = self.edge_indices().collect();
        let mut min = f64::INFINITY;
        for a in 0..edges.len() {
            for b in (a + 1)..edges.len() {
                let (i0, i1) = edges[a];
                let (j0, j1) = edges[b];
                // adjacent edges share a vertex; skip them
                if i0 == j0 || i0 == j1 || i1 == j0 || i1 == j1 {
                    continue;
                }
                let d = segment_segment_distance(
                    &self.vertices[i0],
                    &self.vertices[i1],
                    &self.vertices[j0],
                    &self.vertices[j1],
                );
                min = min.min(d);
            }
        }
        min
    }

    /// Whether the curve is simple at the crate's standard tolerance
    /// (non-adjacent edge separation ≥ `SIMPLICITY_REL_TOL` × bbox diagonal).
    pub fn is_simple(&self) -> bool {
        self.min_nonadjacent_separation() >= SIMPLICITY_REL_TOL * self.bbox_diagonal()
    }

    /// Like [`is_simple`](Self::is_simple) but returns the failing separation.
    pub fn ensure_simple(&self) -> Result<()> {
        let tol = SIMPLICITY_REL_TOL * self.bbox_diagonal();
        let sep = self.min_nonadjacent_separation();
        if sep >= tol {
            Ok(())
        } else {
            Err(GeomError::Simplicity {
                min_separation: sep,
                tolerance: tol,
            })
        }
    }

    /// Sum of turning angles over the vertices, in radians. For a polygon
    /// this is its total curvature; it converges to the total curvature of a
    /// smooth curve under refinement. Closed curves only.
    pub fn exterior_angle_sum(&self) -> Result<f64> {
        if !self.closed {
            return Err(GeomError::Precondition(
                "exterior angle sum requires a closed curve".into(),
            ));
        }
        let n = self.vertices.len();
        let mut sum = 0.0;
        for i in 0..n {
            let prev = self.vertices[(i + n - 1) % n];
            let here = self.vertices[i];
            let next = self.vertices[(i + 1) % n];
            let incoming = here - prev;
            let outgoing = next - here;
            sum += angle_between(&incoming, &outgoing);
        }
        Ok(sum)
    }

    /// Resample to `count` vertices spaced uniformly by arclength along the
    /// polygon. New vertices lie on the original polygon. Closed curves only.
    pub fn resample_by_arclength(&self, count: usize) -> Result<Self> {
        if !self.closed {
            return Err(GeomError::Precondition("resampling requires a closed curve".into()));
        }
        if count < 3 {
            return Err(GeomError::Precondition("resampling needs at least 3 vertices".into()));
        }
        let total = self.total_length();
        let step = total / count as f64;
        let mut out = Vec::with_capacity(count);
        let n = self.vertices.len();
        let mut edge = 0usize;
        let mut edge_start = 0.0; // arclength at the start of `edge`
        let mut edge_len = self.vertices[0].dist(&self.vertices[1 % n]);
        for k in 0..count {
            let target = k as f64 * step;
            while target > edge_start + edge_len && edge + 1 < n {
                edge_start += edge_len;
                edge += 1;
                edge_len = self.vertices[edge].dist(&self.vertices[(edge + 1) % n]);
            }
            let t = ((target - edge_start) / edge_len).clamp(0.0, 1.0);
            out.push(self.vertices[edge].lerp(&self.vertices[(edge + 1) % n], t));
        }
        Curve::closed(out)
    }

    /// Point at parameter `t ∈ [0, 1)` measured uniformly in the vertex
    /// parameter (vertex `i` is at `t = i/n`), linearly interpolated.
    pub fn point_at_param(&self, t: f64) -> Point<N> {
        let n = self.vertices.len() as f64;
        let s = (t.rem_euclid(1.0)) * n;
        let i = (s.floor() as usize) % self.vertices.len();
        let frac = s - s.floor();
        let j = (i + 1) % self.vertices.len();
        self.vertices[i].lerp(&self.vertices[j], frac)
    }

    pub fn translated(&self, offset: Point<N>) -> Self {
        Curve {
            vertices: self.vertices.iter().map(|p| *p + offset).collect(),
            closed: self.closed,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Curve {
            vertices: self.vertices.iter().map(|p| *p * factor).collect(),
            closed: self.closed,
        }
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Curve {
            vertices,
            closed: self.closed,
        }
    }

    /// Apply a linear map given by row vectors (used for rotations).
    pub fn mapped(&self, f: impl Fn(&Point<N>) -> Point<N>) -> Self {
        Curve {
            vertices: self.vertices.iter().map(|p| f(p)).collect(),
            closed: self.closed,
        }
    }
}

impl Curve<3> {
    /// Area-vector (Newell) normal of the closed polygon about its centroid.
    /// Exact for planar polygons; zero only for degenerate configurations.
    pub fn newell_normal(&self) -> Point<3> {
        let c = self.centroid();
        let n = self.vertices.len();
        let mut normal = Point::zero();
        for i in 0..n {
            let a = self.vertices[i] - c;
            let b = self.vertices[(i + 1) % n] - c;
            normal += a.cross(&b);
        }
        normal
    }

    /// Maximum distance of the vertices from the plane through the centroid
    /// with the Newell normal.
    pub fn planarity_deviation(&self) -> f64 {
        let c = self.centroid();
        let normal = match self.newell_normal().normalized() {
            Some(u) => u,
            None => return f64::INFINITY,
        };
        self.vertices
            .iter()
            .map(|p| ((*p - c).dot(&normal)).abs())
            .fold(0.0, f64::max)
    }

    /// True when the curve is planar (within `tol`) and convex: all turning
    /// happens with a consistent orientation about the common plane normal.
    pub fn is_planar_convex(&self, tol: f64) -> bool {
        if !self.closed || self.planarity_deviation() > tol {
            return false;
        }
        let n = self.vertices.len();
        let mut reference: Option<Point<3>> = None;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            let cross = (b - a).cross(&(c - b));
            if cross.norm() < 1e-12 * self.bbox_diagonal().powi(2) {
                continue; // collinear corner carries no orientation
            }
            match &reference {
                None => reference = Some(cross),
                Some(r) => {
                    if r.dot(&cross) < 0.0 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Distance from a point to a segment.
pub fn point_segment_distance<const N: usize>(
    p: &Point<N>,
    a: &Point<N>,
    b: &Point<N>,
) -> f64 {
    let ab = *b - *a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.dist(a);
    }
    let t = ((*p - *a).dot(&ab) / len_sq).clamp(0.0, 1.0);
    p.dist(&(*a + ab * t))
}

/// Distance between two segments `[p1, p2]` and `[q1, q2]`.
pub fn segment_segment_distance<const N: usize>(
    p1: &Point<N>,
    p2: &Point<N>,
    q1: &Point<N>,
    q2: &Point<N>,
) -> f64 {
    // Closest points of two segments, clamped to the parameter square.
    let d1 = *p2 - *p1;
    let d2 = *q2 - *q1;
    let r = *p1 - *q1;
    let a = d1.norm_sq();
    let e = d2.norm_sq();
    let f = d2.dot(&r);
    let (s, t);
    if a == 0.0 && e == 0.0 {
        return p1.dist(q1);
    }
    if a == 0.0 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e == 0.0 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s_ = if denom != 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t_ = (b * s_ + f) / e;
            if t_ < 0.0 {
                t_ = 0.0;
                s_ = (-c / a).clamp(0.0, 1.0);
            } else if t_ > 1.0 {
                t_ = 1.0;
                s_ = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s_;
            t = t_;
        }
    }
    (*p1 + d1 * s).dist(&(*q1 + d2 * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::point::{P2, P3};
    use std::f64::consts::PI;

    fn square() -> Curve<2> {
        Curve::closed(vec![
            P2::of(0.0, 0.0),
            P2::of(1.0, 0.0),
            P2::of(1.0, 1.0),
            P2::of(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn square_exterior_angles_sum_to_two_pi_exactly() {
        assert_eq!(square().exterior_angle_sum().unwrap(), 2.0 * PI);
    }

    #[test]
    fn regular_100gon_total_curvature() {
        let poly = crate::shapes::circle_curve(1.0, 100);
        let tc = poly.exterior_angle_sum().unwrap();
        assert!((tc - 2.0 * PI).abs() < 1e-6, "tc = {tc}");
    }

    #[test]
    fn duplicate_consecutive_vertices_rejected() {
        let r = Curve::closed(vec![
            P2::of(0.0, 0.0),
            P2::of(0.0, 0.0),
            P2::of(1.0, 1.0),
        ]);
        assert!(matches!(r, Err(GeomError::Degenerate(_))));
    }

    #[test]
    fn figure_eight_is_not_simple() {
        // two lobes sharing the crossing near the origin
        let mut pts = Vec::new();
        let n = 40;
        for i in 0..n {
            let t = 2.0 * PI * i as f64 / n as f64;
            pts.push(P2::of(t.sin(), t.sin() * t.cos()));
        }
        let c = Curve::closed(pts).unwrap();
        assert!(!c.is_simple());
        assert!(matches!(
            c.ensure_simple(),
            Err(GeomError::Simplicity { .. })
        ));
    }

    #[test]
    fn trefoil_total_curvature_exceeds_four_pi() {
        let c = crate::shapes::trefoil_curve(400);
        let tc = c.exterior_angle_sum().unwrap();
        assert!(tc >= 4.0 * PI, "tc = {tc}");
    }

    #[test]
    fn resampling_preserves_shape_roughly() {
        let c = crate::shapes::circle_curve(2.0, 128);
        let r = c.resample_by_arclength(96).unwrap();
        assert_eq!(r.len(), 96);
        for p in r.vertices() {
            let rad = (p.x() * p.x() + p.y() * p.y()).sqrt();
            assert!((rad - 2.0).abs() < 1e-2);
        }
    }

    #[test]
    fn planar_convexity_detects_ellipse_and_rejects_flower() {
        let e = crate::shapes::ellipse_curve(2.0, 1.0, 200);
        assert!(e.is_planar_convex(1e-9));
        let f = crate::shapes::flower_curve(1.0, 0.3, 5, 300);
        assert!(!f.is_planar_convex(1e-9));
    }

    #[test]
    fn open_polyline_rejects_curvature_sum() {
        let line = Curve::open(vec![P3::new(0.0, -1.0, 0.0), P3::new(0.0, 1.0, 0.0)]).unwrap();
        assert!(line.exterior_angle_sum().is_err());
    }
}
