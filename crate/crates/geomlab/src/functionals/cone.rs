//! Cones over curves and the quantities built from them: the r-independent
//! cone density at a vertex and the vision number (its supremum over
//! vertices).
//!
//! The cone over Γ with vertex v is {v + s(x−v) : x ∈ Γ, s ≥ 0}; the
//! exterior cone restricts to s ≥ 1. Both are counted with multiplicity.
//! For a polygonal Γ the density of the cone inside a ball about v equals
//! the spherical length (with multiplicity) of the radial projection of Γ
//! onto the unit sphere about v, divided by 2π — each edge projects to a
//! great-circle arc whose length is the angle subtended at v.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::functionals::report::FunctionalReport;
use crate::functionals::search::nelder_mead_max;
use crate::geom::curve::Curve;
use crate::geom::point::{angle_between, Point, P3};

/// Relative tolerance (× bbox diagonal) for classifying a vertex as lying on
/// the curve.
pub const ON_CURVE_REL_TOL: f64 = 1e-6;

/// Scale parameter range of a cone over a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeRange {
    /// s ∈ [0, ∞)
    Full,
    /// s ∈ [1, ∞)
    Exterior,
}

/// A cone over a simple closed curve with a marked vertex.
#[derive(Debug, Clone)]
pub struct ConeOverCurve<const N: usize> {
    pub base: Curve<N>,
    pub vertex: Point<N>,
    pub range: ConeRange,
}

impl<const N: usize> ConeOverCurve<N> {
    pub fn new(base: Curve<N>, vertex: Point<N>, range: ConeRange) -> Result<Self> {
        if !vertex.is_finite() {
            return Err(GeomError::Degenerate("cone vertex is not finite".into()));
        }
        base.ensure_simple()?;
        if !base.is_closed() {
            return Err(GeomError::Precondition("cone base must be a closed curve".into()));
        }
        Ok(ConeOverCurve { base, vertex, range })
    }
}

/// Spherical length (with multiplicity) of the radial projection of the
/// curve onto the unit sphere about `v`: the sum over edges of the angle
/// subtended at `v`. Edges passing through `v` project to points and
/// contribute zero.
pub fn projected_spherical_length<const N: usize>(curve: &Curve<N>, v: &Point<N>) -> f64 {
    let scale = curve.bbox_diagonal();
    let near = 1e-12 * scale;
    let verts = curve.vertices();
    let mut total = 0.0;
    for (i, j) in curve.edge_indices() {
        let a = verts[i];
        let b = verts[j];
        if crate::geom::curve::point_segment_distance(v, &a, &b) < near {
            continue; // radial edge: projects to at most two points
        }
        let qa = a - *v;
        let qb = b - *v;
        total += angle_between(&qa, &qb);
    }
    total
}

/// The r-independent cone density at `v`:
/// (projected spherical length)/(2π), plus ½ if `v` lies on the curve.
///
/// `v` within the on-curve tolerance counts as on the curve; distances in
/// the band between 1× and 10× the tolerance are rejected as ambiguous
/// rather than silently classified.
pub fn cone_density<const N: usize>(curve: &Curve<N>, v: &Point<N>) -> Result<f64> {
    curve.ensure_simple()?;
    if !curve.is_closed() {
        return Err(GeomError::Precondition("cone density requires a closed curve".into()));
    }
    let tol = ON_CURVE_REL_TOL * curve.bbox_diagonal();
    let dist = curve.distance_to_point(v);
    let indicator = if dist <= tol {
        0.5
    } else if dist < 10.0 * tol {
        return Err(GeomError::AmbiguousOnCurve(format!(
            "vertex at distance {dist:.3e} from the curve, between tolerance {tol:.3e} \
             and 10× tolerance; adjust the tolerance or move the vertex"
        )));
    } else {
        0.0
    };
    Ok(projected_spherical_length(curve, v) / (2.0 * std::f64::consts::PI) + indicator)
}

/// Search options for [`vision_number`].
#[derive(Debug, Clone)]
pub struct VisionOptions {
    pub seed: u64,
    pub restarts: usize,
    pub max_evaluations: usize,
    /// Convergence target for the reported error estimate.
    pub tolerance: f64,
}

impl Default for VisionOptions {
    fn default() -> Self {
        VisionOptions {
            seed: 42,
            restarts: 5,
            max_evaluations: 10_000,
            tolerance: 1e-4,
        }
    }
}

/// The vision number: the supremum over vertices v of the cone density.
///
/// The supremum is attained in the convex hull of the curve and, because the
/// completed density is continuous, it is unchanged by dropping the ½
/// on-curve indicator; the search therefore maximizes the pure projected
/// ratio over the hull's bounding box. The report carries the argmax v and a
/// convergence estimate; a large `error_estimate` means the refinement did
/// not converge within budget.
pub fn vision_number(curve: &Curve<3>, opts: &VisionOptions) -> Result<FunctionalReport> {
    curve.ensure_simple()?;
    if !curve.is_closed() {
        return Err(GeomError::Precondition("vision number requires a closed curve".into()));
    }
    let (lo, hi) = curve.bbox();
    let diag = curve.bbox_diagonal();
    let mut evals = 0u64;
    let density = |v: &P3, evals: &mut u64| {
        *evals += 1;
        projected_spherical_length(curve, v) / (2.0 * std::f64::consts::PI)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![curve.centroid()];
    for _ in 1..opts.restarts.max(1) {
        starts.push(P3::new(
            rng.random_range(lo[0]..=hi[0]),
            rng.random_range(lo[1]..=hi[1]),
            rng.random_range(lo[2]..=hi[2].max(lo[2] + f64::MIN_POSITIVE)),
        ));
    }

    let mut best_v = starts[0];
    let mut best = f64::NEG_INFINITY;
    let mut last_spread = f64::INFINITY;
    let budget_per_start = opts.max_evaluations / opts.restarts.max(1);
    for start in starts {
        let mut local_evals = evals;
        let r = nelder_mead_max(
            |p| density(p, &mut local_evals),
            start,
            0.2 * diag,
            budget_per_start,
            opts.tolerance * 1e-3,
        );
        evals = local_evals;
        if r.max > best {
            best = r.max;
            best_v = r.argmax;
            last_spread = r.spread;
        }
    }

    // polish the winner with a tighter simplex
    let mut local_evals = evals;
    let polished = nelder_mead_max(
        |p| density(p, &mut local_evals),
        best_v,
        0.01 * diag,
        budget_per_start,
        opts.tolerance * 1e-4,
    );
    evals = local_evals;
    let improvement = (polished.max - best).max(0.0);
    if polished.max > best {
        best = polished.max;
        best_v = polished.argmax;
        last_spread = polished.spread;
    }

    Ok(FunctionalReport {
        value: best,
        argmax_point: Some(best_v),
        argmax_scale: None,
        error_estimate: improvement + last_spread.abs().min(1.0),
        evaluations: evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use std::f64::consts::PI;

    #[test]
    fn unit_circle_density_at_center_is_one() {
        let c = shapes::circle_curve(1.0, 256);
        let d = cone_density(&c, &P3::new(0.0, 0.0, 0.0)).unwrap();
        assert!((d - 1.0).abs() < 1e-6, "density = {d}");
    }

    #[test]
    fn unit_circle_density_on_the_curve_is_one() {
        let c = shapes::circle_curve(1.0, 4096);
        // exactly a vertex of the polygon
        let v = c.vertices()[0];
        let d = cone_density(&c, &v).unwrap();
        assert!((d - 1.0).abs() < 1e-3, "density = {d}");
    }

    #[test]
    fn density_above_circle_decreases_and_small_at_height_ten() {
        let c = shapes::circle_curve(1.0, 512);
        let mut prev = f64::INFINITY;
        for h in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let d = cone_density(&c, &P3::new(0.0, 0.0, h)).unwrap();
            assert!(d <= 1.0 + 1e-9);
            assert!(d < prev, "not decreasing at h = {h}");
            // closed form for the circle: 1/√(1+h²)
            assert!((d - 1.0 / (1.0 + h * h).sqrt()).abs() < 1e-4);
            prev = d;
        }
        assert!(prev < 0.6);
    }

    #[test]
    fn ambiguous_band_rejected() {
        let c = shapes::circle_curve(1.0, 256);
        let tol = ON_CURVE_REL_TOL * c.bbox_diagonal();
        let v = P3::new(1.0 + 3.0 * tol, 0.0, 0.0);
        assert!(matches!(
            cone_density(&c, &v),
            Err(GeomError::AmbiguousOnCurve(_))
        ));
    }

    #[test]
    fn vision_of_circle_and_ellipse_is_one() {
        for curve in [shapes::circle_curve(1.0, 256), shapes::ellipse_curve(2.0, 1.0, 256)] {
            let r = vision_number(&curve, &VisionOptions::default()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-2, "vis = {}", r.value);
        }
    }

    #[test]
    fn vision_bounded_by_total_curvature_ratio() {
        for curve in [
            shapes::trefoil_curve(300),
            shapes::flower_curve(1.0, 0.3, 5, 300),
            shapes::twisted_loop(0.8, 300),
            shapes::fourier_loop(11, 4, 240),
        ] {
            let vis = vision_number(&curve, &VisionOptions::default()).unwrap();
            let tc = curve.exterior_angle_sum().unwrap();
            assert!(
                vis.value <= tc / (2.0 * PI) + 1e-3,
                "vis = {} > tc/2π = {}",
                vis.value,
                tc / (2.0 * PI)
            );
        }
    }

    #[test]
    fn cone_density_continuous_across_curve() {
        // approach a boundary vertex from outside the tolerance bands
        let c = shapes::circle_curve(1.0, 4096);
        let on = cone_density(&c, &c.vertices()[0]).unwrap();
        let near = P3::new(1.0 - 1e-3, 0.0, 0.0);
        let d = cone_density(&c, &near).unwrap();
        assert!((d - on).abs() < 5e-3, "on = {on}, near = {d}");
    }
}
