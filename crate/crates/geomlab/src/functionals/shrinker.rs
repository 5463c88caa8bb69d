//! Shrinker residual: how far a mesh is from satisfying the self-shrinking
//! soliton equation H + x^⊥/2 = 0 (the time −1 slice of a flow moving by
//! rescaled dilation, normalized so the round sphere of radius 2 and the
//! cylinder of radius √2 are exact solutions).

use crate::error::Result;
use crate::geom::curvature::{mean_curvature_vectors, vertex_normals_local};
use crate::geom::mesh::TriMesh;

#[derive(Debug, Clone)]
pub struct ShrinkerResidual {
    /// |H(x) + x^⊥/2| at interior vertices, `None` at boundary vertices.
    pub per_vertex: Vec<Option<f64>>,
    /// Supremum over interior vertices.
    pub sup: f64,
}

pub fn shrinker_residual(mesh: &TriMesh) -> Result<ShrinkerResidual> {
    let h = mean_curvature_vectors(mesh)?;
    let normals = vertex_normals_local(mesh);
    let mut per_vertex = Vec::with_capacity(h.len());
    let mut sup: f64 = 0.0;
    for (v, hv) in h.iter().enumerate() {
        match hv {
            None => per_vertex.push(None),
            Some(hv) => {
                let x = mesh.vertex(v);
                let n = normals[v];
                let x_perp = n * x.dot(&n);
                let r = (*hv + x_perp * 0.5).norm();
                sup = sup.max(r);
                per_vertex.push(Some(r));
            }
        }
    }
    Ok(ShrinkerResidual { per_vertex, sup })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn plane_through_origin_is_a_shrinker() {
        let m = shapes::square_plane(3.0, 24);
        let r = shrinker_residual(&m).unwrap();
        assert!(r.sup < 1e-8, "sup residual = {}", r.sup);
    }

    #[test]
    fn half_plane_bounded_by_line_through_origin_is_a_shrinker() {
        let m = shapes::half_disk(3.0, 12, 24);
        let r = shrinker_residual(&m).unwrap();
        assert!(r.sup < 1e-6, "sup residual = {}", r.sup);
    }

    #[test]
    fn sphere_radius_two_is_a_shrinker() {
        let m = shapes::icosphere(2.0, 3);
        let r = shrinker_residual(&m).unwrap();
        assert!(r.sup < 0.02, "sup residual = {}", r.sup);
    }

    #[test]
    fn cylinder_radius_sqrt_two_is_a_shrinker_away_from_the_ends() {
        let m = shapes::cylinder(2.0f64.sqrt(), 4.0, 48, 32);
        let r = shrinker_residual(&m).unwrap();
        let mut interior_sup: f64 = 0.0;
        for (v, res) in r.per_vertex.iter().enumerate() {
            if let Some(res) = res {
                if m.vertex(v).z().abs() < 3.0 {
                    interior_sup = interior_sup.max(*res);
                }
            }
        }
        assert!(interior_sup < 0.02, "sup residual = {interior_sup}");
    }

    #[test]
    fn unit_sphere_is_not_a_shrinker() {
        let m = shapes::icosphere(1.0, 2);
        let r = shrinker_residual(&m).unwrap();
        // |H| = 2, |x^⊥/2| = 1/2 outward: residual 3/2
        assert!((r.sup - 1.5).abs() < 0.05, "sup residual = {}", r.sup);
    }
}
