//! Brute-force oracles for the functional evaluators.
//!
//! Each oracle re-derives a quantity by raw tessellation or grid search,
//! with no shared code path against the production evaluator it checks:
//! cone densities against directly measured cone areas, the exterior-cone
//! Gaussian against a 2-D truncated quadrature, and the entropy solver
//! against plain grid search.

use geomlab::functionals::{
    cone_density, entropy, entropy_at, exterior_cone_gaussian, gaussian_area, EntropyOptions,
    GaussianKernel,
};
use geomlab::geom::point::P3;
use geomlab::shapes;
use geomlab::Curve;

/// Area of C_{Γ,v} ∩ B(v, r) divided by ω₂ r², measured by tessellating the
/// truncated cone into raw triangles (no angle identities involved).
fn cone_ball_density_brute(curve: &Curve<3>, v: &P3, r: f64, refine: usize, strips: usize) -> f64 {
    let verts = curve.vertices();
    let mut area = 0.0;
    for (i, j) in curve.edge_indices() {
        for piece in 0..refine {
            let t0 = piece as f64 / refine as f64;
            let t1 = (piece + 1) as f64 / refine as f64;
            let a = verts[i].lerp(&verts[j], t0);
            let b = verts[i].lerp(&verts[j], t1);
            let qa = a - *v;
            let qb = b - *v;
            let (na, nb) = (qa.norm(), qb.norm());
            if na == 0.0 || nb == 0.0 {
                continue;
            }
            // strip k reaches radius (k/strips)·r at both corners, so the
            // outer rim lands exactly on the sphere
            for k in 0..strips {
                let fa0 = (k as f64 / strips as f64) * r / na;
                let fa1 = ((k + 1) as f64 / strips as f64) * r / na;
                let fb0 = (k as f64 / strips as f64) * r / nb;
                let fb1 = ((k + 1) as f64 / strips as f64) * r / nb;
                let p00 = *v + qa * fa0;
                let p01 = *v + qa * fa1;
                let p10 = *v + qb * fb0;
                let p11 = *v + qb * fb1;
                area += (p01 - p00).cross(&(p10 - p00)).norm() * 0.5;
                area += (p11 - p01).cross(&(p10 - p01)).norm() * 0.5;
            }
        }
    }
    area / (std::f64::consts::PI * r * r)
}

#[test]
fn cone_density_matches_brute_cone_area() {
    let circle = shapes::circle_curve(1.0, 128);
    let cases = [
        P3::new(0.0, 0.0, 0.0),
        P3::new(0.3, -0.2, 0.0),
        P3::new(0.0, 0.0, 2.0),
        P3::new(1.5, 0.4, -0.7),
    ];
    for v in cases {
        let fast = cone_density(&circle, &v).unwrap();
        // r-independence: measure at two radii
        for r in [0.7, 2.3] {
            let brute = cone_ball_density_brute(&circle, &v, r, 40, 400);
            assert!(
                (fast - brute).abs() < 2e-3,
                "v = {v:?}, r = {r}: density {fast} vs brute {brute}"
            );
        }
    }
    // a genuinely non-planar curve
    let loopy = shapes::twisted_loop(0.7, 96);
    let v = P3::new(0.1, 0.2, 0.05);
    let fast = cone_density(&loopy, &v).unwrap();
    let brute = cone_ball_density_brute(&loopy, &v, 1.1, 40, 400);
    assert!((fast - brute).abs() < 2e-3, "{fast} vs {brute}");
}

/// ∫_{E_{Γ,v}} ψ by raw 2-D tessellation of the cone over [1, s_max] with a
/// Gaussian-tail truncation. Midpoint rule on actual triangles.
fn exterior_cone_brute(curve: &Curve<3>, k: &GaussianKernel, refine: usize, strips: usize) -> f64 {
    let v = k.center;
    let verts = curve.vertices();
    let mut total = 0.0;
    for (i, j) in curve.edge_indices() {
        for piece in 0..refine {
            let t0 = piece as f64 / refine as f64;
            let t1 = (piece + 1) as f64 / refine as f64;
            let a = verts[i].lerp(&verts[j], t0);
            let b = verts[i].lerp(&verts[j], t1);
            let qa = a - v;
            let qb = b - v;
            let (na, nb) = (qa.norm(), qb.norm());
            if na < 1e-12 || nb < 1e-12 {
                continue;
            }
            // truncate where the kernel argument reaches 40: s|q| = √(160 λ)
            let reach = (160.0 * k.scale).sqrt();
            let s_max_a = (reach / na).max(1.0);
            let s_max_b = (reach / nb).max(1.0);
            for step in 0..strips {
                let f0 = step as f64 / strips as f64;
                let f1 = (step + 1) as f64 / strips as f64;
                // quadratic grading packs strips near s = 1 where ψ is largest
                let sa0 = 1.0 + (s_max_a - 1.0) * f0 * f0;
                let sa1 = 1.0 + (s_max_a - 1.0) * f1 * f1;
                let sb0 = 1.0 + (s_max_b - 1.0) * f0 * f0;
                let sb1 = 1.0 + (s_max_b - 1.0) * f1 * f1;
                let p00 = v + qa * sa0;
                let p01 = v + qa * sa1;
                let p10 = v + qb * sb0;
                let p11 = v + qb * sb1;
                for tri in [[p00, p01, p10], [p01, p11, p10]] {
                    let area = (tri[1] - tri[0]).cross(&(tri[2] - tri[0])).norm() * 0.5;
                    let mid = (tri[0] + tri[1] + tri[2]) / 3.0;
                    total += area * k.eval(&mid);
                }
            }
        }
    }
    total
}

#[test]
fn exterior_cone_gaussian_matches_brute_quadrature() {
    let circle = shapes::circle_curve(1.0, 96);
    for (v, lambda) in [
        (P3::new(0.0, 0.0, 0.0), 0.5),
        (P3::new(0.4, 0.1, 0.0), 0.25),
        (P3::new(0.0, 0.0, 1.0), 1.0),
        (P3::new(0.2, -0.3, 0.4), 2.0),
    ] {
        let k = GaussianKernel::new(v, lambda).unwrap();
        let fast = exterior_cone_gaussian(&circle, &k).unwrap().value;
        let brute = exterior_cone_brute(&circle, &k, 24, 600);
        assert!(
            (fast - brute).abs() < 2e-3 * (1.0 + brute),
            "v = {v:?}, λ = {lambda}: {fast} vs brute {brute}"
        );
    }
}

#[test]
fn disk_entropy_matches_grid_search_oracle() {
    let disk = shapes::disk_mesh(1.0, 10, 64);
    let circle = disk.boundary_curve().unwrap();
    let solver = entropy(&disk, Some(&circle), &EntropyOptions::default()).unwrap();

    // plain grid search over v in the disk's bounding box and log λ
    let mut grid_best = f64::NEG_INFINITY;
    for ix in -2..=2 {
        for iy in -2..=2 {
            for iz in 0..=1 {
                let v = P3::new(0.3 * ix as f64, 0.3 * iy as f64, 0.4 * iz as f64);
                for e in -6..=2 {
                    let lambda = (e as f64 * 0.8).exp();
                    let (val, _) = entropy_at(&disk, Some(&circle), &v, lambda).unwrap();
                    grid_best = grid_best.max(val);
                }
            }
        }
    }
    assert!(
        solver.value + 1e-6 >= grid_best,
        "solver {} below grid oracle {grid_best}",
        solver.value
    );
    assert!((solver.value - 1.0).abs() < 0.02, "disk entropy {}", solver.value);
    assert!((grid_best - 1.0).abs() < 0.02, "grid oracle {grid_best}");
}

#[test]
fn half_plane_entropy_matches_grid_search_oracle() {
    let mesh = shapes::half_disk(100.0, 32, 40);
    let line = Curve::open(vec![
        P3::new(0.0, -100.0, 0.0),
        P3::new(0.0, 0.0, 0.0),
        P3::new(0.0, 100.0, 0.0),
    ])
    .unwrap();
    let opts = EntropyOptions {
        check_boundary_match: false,
        ..Default::default()
    };
    let solver = entropy(&mesh, Some(&line), &opts).unwrap();

    let mut grid_best = f64::NEG_INFINITY;
    for ix in 1..=3 {
        for iy in -1..=1 {
            let v = P3::new(12.0 * ix as f64, 20.0 * iy as f64, 0.0);
            for e in 0..=6 {
                let lambda = 0.5 * (e as f64 * 0.9).exp();
                let (val, _) = entropy_at(&mesh, Some(&line), &v, lambda).unwrap();
                grid_best = grid_best.max(val);
            }
        }
    }
    assert!(
        solver.value + 1e-6 >= grid_best,
        "solver {} below grid oracle {grid_best}",
        solver.value
    );
    assert!((solver.value - 1.0).abs() < 0.02, "half-plane entropy {}", solver.value);
    assert!((grid_best - 1.0).abs() < 0.02, "grid oracle {grid_best}");
}

#[test]
fn entropy_dominates_individual_evaluations() {
    // sup ≥ every (v, λ) evaluation, and rigid motions move the sup by < 1e-3
    let mesh = shapes::icosphere(2.0, 2);
    let r = entropy(&mesh, None, &EntropyOptions::default()).unwrap();
    for (v, lambda) in [
        (P3::new(0.0, 0.0, 0.0), 1.0),
        (P3::new(0.5, 0.0, 0.0), 0.5),
        (P3::new(0.0, 2.0, 0.0), 0.1),
    ] {
        let k = GaussianKernel::new(v, lambda).unwrap();
        let val = gaussian_area(&mesh, &k).value;
        assert!(r.value + 1e-9 >= val);
    }

    let axis = P3::new(0.36, 0.8, 0.48).normalized().unwrap();
    let moved = mesh.mapped(|p| p.rotated(&axis, 1.1) + P3::new(0.7, -0.3, 0.2));
    let r2 = entropy(&moved, None, &EntropyOptions::default()).unwrap();
    assert!(
        (r.value - r2.value).abs() < 1e-3,
        "entropy moved under rigid motion: {} vs {}",
        r.value,
        r2.value
    );
}

#[test]
fn closed_mesh_entropy_at_least_one() {
    for mesh in [shapes::icosphere(2.0, 2), shapes::icosphere(0.7, 2)] {
        let r = entropy(&mesh, None, &EntropyOptions::default()).unwrap();
        assert!(r.value >= 1.0 - 1e-3, "entropy {} below the plane bound", r.value);
    }
}
