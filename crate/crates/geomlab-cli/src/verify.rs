//! Built-in invariant suite: one pass/fail line per check, nonzero exit on
//! any violation. The fast suite covers the cheap identities; the full
//! suite adds the flow laws, the entropy anchors, and the deformation
//! pipeline.

use std::f64::consts::PI;

use geomlab::deform::{deform_to_convex, DeformOptions};
use geomlab::flows::mcf::{mcf_run, renormalized_mcf_run};
use geomlab::flows::{csf_run, FlowOptions, TerminationReason};
use geomlab::functionals::{
    cone_density, entropy, exterior_cone_gaussian, gaussian_area, shrinker_residual,
    vision_number, EntropyOptions, GaussianKernel, VisionOptions,
};
use geomlab::linking::{lambda_invariant, linking_number, LinkingOptions};
use geomlab::{shapes, Curve, P3};

type Check = (&'static str, fn() -> Result<String, String>);

fn fail(msg: String) -> Result<String, String> {
    Err(msg)
}

fn check_square_and_polygon_tc() -> Result<String, String> {
    let square = Curve::closed(vec![
        P3::new(0.0, 0.0, 0.0),
        P3::new(1.0, 0.0, 0.0),
        P3::new(1.0, 1.0, 0.0),
        P3::new(0.0, 1.0, 0.0),
    ])
    .unwrap();
    let tc_square = square.exterior_angle_sum().map_err(|e| e.to_string())?;
    if tc_square != 2.0 * PI {
        return fail(format!("square tc = {tc_square}, want exactly 2π"));
    }
    let poly = shapes::circle_curve(1.0, 100);
    let tc = poly.exterior_angle_sum().map_err(|e| e.to_string())?;
    if (tc - 2.0 * PI).abs() > 1e-6 {
        return fail(format!("100-gon tc = {tc}"));
    }
    Ok(format!("square exactly 2π; 100-gon within {:.1e}", (tc - 2.0 * PI).abs()))
}

fn check_fenchel_on_random_loops() -> Result<String, String> {
    let mut worst = f64::INFINITY;
    for seed in 0..40u64 {
        let c = shapes::fourier_loop(seed, 4, 200);
        let tc = c.exterior_angle_sum().map_err(|e| e.to_string())?;
        worst = worst.min(tc);
        if tc < 2.0 * PI - 1e-6 {
            return fail(format!("seed {seed}: tc = {tc} below 2π"));
        }
    }
    Ok(format!("40 random loops, min tc = {worst:.6} ≥ 2π"))
}

fn check_tc_rigid_invariance() -> Result<String, String> {
    let c = shapes::twisted_loop(0.7, 160);
    let tc = c.exterior_angle_sum().map_err(|e| e.to_string())?;
    let axis = P3::new(0.2, -0.5, 0.6).normalized().unwrap();
    let moved = c
        .mapped(|p| p.rotated(&axis, 1.234) + P3::new(4.0, -7.0, 0.5))
        .scaled(3.7);
    let tc_moved = moved.exterior_angle_sum().map_err(|e| e.to_string())?;
    if (tc - tc_moved).abs() > 1e-10 {
        return fail(format!("tc changed under similarity: {tc} vs {tc_moved}"));
    }
    Ok(format!("Δtc = {:.1e} under rotation+translation+scale", (tc - tc_moved).abs()))
}

fn check_cone_density_closed_forms() -> Result<String, String> {
    let circle = shapes::circle_curve(1.0, 512);
    let center = cone_density(&circle, &P3::new(0.0, 0.0, 0.0)).map_err(|e| e.to_string())?;
    if (center - 1.0).abs() > 1e-4 {
        return fail(format!("density at center = {center}"));
    }
    for h in [1.0, 3.0, 10.0] {
        let d = cone_density(&circle, &P3::new(0.0, 0.0, h)).map_err(|e| e.to_string())?;
        let expected = 1.0 / (1.0 + h * h).sqrt();
        if (d - expected).abs() > 1e-4 {
            return fail(format!("density at height {h}: {d}, want {expected}"));
        }
    }
    Ok("center = 1, axis heights match 1/√(1+h²)".into())
}

fn check_vision_tc_bound() -> Result<String, String> {
    let opts = VisionOptions::default();
    let mut detail = String::new();
    for (name, curve) in [
        ("circle", shapes::circle_curve(1.0, 200)),
        ("ellipse", shapes::ellipse_curve(2.0, 1.0, 200)),
        ("flower", shapes::flower_curve(1.0, 0.3, 5, 240)),
        ("twisted", shapes::twisted_loop(0.8, 200)),
    ] {
        let vis = vision_number(&curve, &opts).map_err(|e| e.to_string())?.value;
        let tc = curve.exterior_angle_sum().map_err(|e| e.to_string())?;
        if vis > tc / (2.0 * PI) + 1e-3 {
            return fail(format!("{name}: vis {vis} > tc/2π {}", tc / (2.0 * PI)));
        }
        detail.push_str(&format!("{name} {vis:.3}≤{:.3} ", tc / (2.0 * PI)));
    }
    Ok(detail)
}

fn check_exterior_cone_closed_form() -> Result<String, String> {
    let circle = shapes::circle_curve(1.0, 256);
    for lambda in [0.25, 1.0, 4.0] {
        let k = GaussianKernel::new(P3::new(0.0, 0.0, 0.0), lambda).unwrap();
        let v = exterior_cone_gaussian(&circle, &k)
            .map_err(|e| e.to_string())?
            .value;
        let expected = (-1.0 / (4.0 * lambda)).exp();
        if (v - expected).abs() > 2e-3 {
            return fail(format!("λ = {lambda}: {v}, want {expected}"));
        }
    }
    Ok("circle exterior cone matches exp(−1/4λ)".into())
}

fn check_shrinker_residuals() -> Result<String, String> {
    let plane = shapes::square_plane(3.0, 20);
    let r = shrinker_residual(&plane).map_err(|e| e.to_string())?;
    if r.sup > 1e-8 {
        return fail(format!("plane residual {}", r.sup));
    }
    let half = shapes::half_disk(3.0, 10, 20);
    let r_half = shrinker_residual(&half).map_err(|e| e.to_string())?;
    if r_half.sup > 1e-6 {
        return fail(format!("half-plane residual {}", r_half.sup));
    }
    let sphere = shapes::icosphere(2.0, 3);
    let r_sphere = shrinker_residual(&sphere).map_err(|e| e.to_string())?;
    if r_sphere.sup > 0.02 {
        return fail(format!("sphere residual {}", r_sphere.sup));
    }
    Ok(format!(
        "plane {:.1e}, half-plane {:.1e}, sphere {:.4}",
        r.sup, r_half.sup, r_sphere.sup
    ))
}

fn check_linking_basics() -> Result<String, String> {
    let opts = LinkingOptions::default();
    let a = shapes::circle_curve(1.0, 48);
    let b_pts: Vec<P3> = (0..48)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / 48.0;
            P3::new(1.0 + t.cos(), 0.0, t.sin())
        })
        .collect();
    let b = Curve::closed(b_pts).unwrap();
    let hopf = linking_number(&a, &b, &opts).map_err(|e| e.to_string())?;
    if hopf.abs() != 1 {
        return fail(format!("Hopf link lk = {hopf}"));
    }
    let far = shapes::circle_curve(1.0, 48).translated(P3::new(6.0, 0.0, 0.0));
    let split = linking_number(&a, &far, &opts).map_err(|e| e.to_string())?;
    if split != 0 {
        return fail(format!("split link lk = {split}"));
    }
    Ok(format!("Hopf ±1 (got {hopf}), split 0"))
}

fn check_lambda_invariant() -> Result<String, String> {
    let opts = LinkingOptions::default();
    let disk = shapes::disk_mesh(1.0, 6, 48);
    let l_disk = lambda_invariant(&disk, &opts).map_err(|e| e.to_string())?;
    if l_disk != 0 {
        return fail(format!("disk λ = {l_disk}"));
    }
    let mobius = shapes::mobius_strip(2.0, 0.6, 96, 8);
    let l_mob = lambda_invariant(&mobius, &opts).map_err(|e| e.to_string())?;
    if l_mob.abs() != 2 || (l_mob / 2).rem_euclid(2) != 1 {
        return fail(format!("Möbius λ = {l_mob}, want ±2 with λ/2 odd"));
    }
    Ok(format!("disk 0, Möbius {l_mob}"))
}

fn check_orientability() -> Result<String, String> {
    if !shapes::disk_fan(1.0, 32).is_orientable() {
        return fail("disk fan reported non-orientable".into());
    }
    if shapes::mobius_strip(2.0, 0.5, 32, 4).is_orientable() {
        return fail("Möbius strip reported orientable".into());
    }
    if !shapes::annulus(0.5, 1.0, 24, 3).is_orientable() {
        return fail("annulus reported non-orientable".into());
    }
    Ok("disk/annulus orientable, Möbius not".into())
}

fn check_csf_circle_law() -> Result<String, String> {
    let circle = shapes::circle_curve(1.0, 160);
    let trace = csf_run(&circle, 0.3, &FlowOptions::default()).map_err(|e| e.to_string())?;
    let correction = {
        let x = PI / 160.0;
        x.sin() / x
    };
    let mut worst: f64 = 0.0;
    for s in &trace.samples {
        let r = s.measure / (2.0 * PI) / correction;
        let expected = (1.0 - 2.0 * s.t).sqrt();
        worst = worst.max(((r - expected) / expected).abs());
    }
    if worst > 0.01 {
        return fail(format!("radius law violated by {worst:.3}"));
    }
    Ok(format!("radius law within {worst:.2e}"))
}

fn check_disk_entropy() -> Result<String, String> {
    let disk = shapes::disk_mesh(1.0, 10, 64);
    let circle = disk.boundary_curve().map_err(|e| e.to_string())?;
    let r = entropy(&disk, Some(&circle), &EntropyOptions::default()).map_err(|e| e.to_string())?;
    if (r.value - 1.0).abs() > 0.02 {
        return fail(format!("disk entropy {}", r.value));
    }
    Ok(format!("disk entropy {:.5}", r.value))
}

fn check_cylinder_entropy() -> Result<String, String> {
    let cyl = shapes::cylinder(2.0f64.sqrt(), 8.0, 48, 96);
    let r = entropy(&cyl, None, &EntropyOptions::default()).map_err(|e| e.to_string())?;
    let sigma1 = (2.0 * PI / std::f64::consts::E).sqrt();
    if ((r.value - sigma1) / sigma1).abs() > 0.01 {
        return fail(format!("cylinder entropy {} vs σ₁ {sigma1}", r.value));
    }
    Ok(format!("σ₁: {:.5} vs {:.5}", r.value, sigma1))
}

fn check_mcf_sphere_law() -> Result<String, String> {
    let sphere = shapes::icosphere(1.0, 3);
    let opts = FlowOptions {
        dt_safety: Some(0.125),
        ..Default::default()
    };
    let trace = mcf_run(&sphere, 0.2, &opts).map_err(|e| e.to_string())?;
    let area0 = trace.samples[0].measure;
    let mut worst: f64 = 0.0;
    for s in &trace.samples {
        let ratio = (s.measure / area0).sqrt();
        let expected = (1.0 - 4.0 * s.t).sqrt();
        worst = worst.max(((ratio - expected) / expected).abs());
    }
    if worst > 0.02 {
        return fail(format!("sphere law violated by {worst:.3}"));
    }
    Ok(format!("radius law within {worst:.2e}"))
}

fn check_renormalized_fixed_points() -> Result<String, String> {
    let sphere = shapes::icosphere(2.0, 3);
    let trace =
        renormalized_mcf_run(&sphere, 1.0, &FlowOptions::default()).map_err(|e| e.to_string())?;
    let drift = trace
        .last()
        .state
        .vertices()
        .iter()
        .map(|p| (p.norm() - 2.0).abs())
        .fold(0.0f64, f64::max);
    if drift > 0.04 {
        return fail(format!("radius-2 sphere drifted {drift}"));
    }
    Ok(format!("sphere-2 drift {drift:.2e} over unit time"))
}

fn check_lambda_flow_constancy() -> Result<String, String> {
    let mobius = shapes::mobius_strip(2.0, 0.6, 64, 6);
    let opts = FlowOptions {
        snapshot_dt: Some(0.002),
        ..Default::default()
    };
    let trace = mcf_run(&mobius, 0.02, &opts).map_err(|e| e.to_string())?;
    if trace.termination != TerminationReason::TimeBudget {
        return fail(format!("Möbius flow ended early: {:?}", trace.termination));
    }
    let link_opts = LinkingOptions::default();
    let mut values = Vec::new();
    for s in &trace.samples {
        values.push(lambda_invariant(&s.state, &link_opts).map_err(|e| e.to_string())?);
    }
    if values.windows(2).any(|w| w[0] != w[1]) {
        return fail(format!("λ varied along the flow: {values:?}"));
    }
    Ok(format!("λ ≡ {} across {} samples", values[0], values.len()))
}

fn check_deformation_pipeline() -> Result<String, String> {
    let loopy = shapes::twisted_loop(0.8, 320);
    let path = deform_to_convex(&loopy, 3.6 * PI, &DeformOptions::default())
        .map_err(|e| e.to_string())?;
    path.certify().map_err(|e| e.to_string())?;
    let last = path.samples.last().unwrap();
    if !last
        .curve
        .is_planar_convex(1e-6 * last.curve.bbox_diagonal())
    {
        return fail("endpoint is not planar convex".into());
    }
    Ok(format!(
        "certified {} samples, tc {:.4} -> {:.4}",
        path.samples.len(),
        path.samples[0].total_curvature,
        last.total_curvature
    ))
}

fn check_gaussian_plane_mass() -> Result<String, String> {
    let lambda = 0.04f64;
    let mesh = shapes::square_plane(50.0 * lambda.sqrt(), 48);
    let k = GaussianKernel::new(P3::new(0.0, 0.0, 0.0), lambda).unwrap();
    let q = gaussian_area(&mesh, &k);
    if (q.value - 1.0).abs() > 1e-4 {
        return fail(format!("plane mass {}", q.value));
    }
    Ok(format!("plane mass {:.6}", q.value))
}

pub fn suite(name: &str) -> Vec<Check> {
    let fast: Vec<Check> = vec![
        ("tc/convex-polygons", check_square_and_polygon_tc),
        ("tc/fenchel-random-loops", check_fenchel_on_random_loops),
        ("tc/rigid-invariance", check_tc_rigid_invariance),
        ("cone/closed-forms", check_cone_density_closed_forms),
        ("cone/exterior-gaussian", check_exterior_cone_closed_form),
        ("gaussian/plane-mass", check_gaussian_plane_mass),
        ("shrinker/residuals", check_shrinker_residuals),
        ("link/gauss-vs-crossings", check_linking_basics),
        ("link/lambda", check_lambda_invariant),
        ("mesh/orientability", check_orientability),
        ("flow/csf-circle-law", check_csf_circle_law),
    ];
    let full_extra: Vec<Check> = vec![
        ("vision/tc-bound", check_vision_tc_bound),
        ("entropy/disk", check_disk_entropy),
        ("entropy/cylinder-sigma1", check_cylinder_entropy),
        ("flow/mcf-sphere-law", check_mcf_sphere_law),
        ("flow/renormalized-fixed-points", check_renormalized_fixed_points),
        ("flow/lambda-constancy", check_lambda_flow_constancy),
        ("deform/pipeline", check_deformation_pipeline),
    ];
    let mut checks = fast;
    if name == "full" {
        checks.extend(full_extra);
    }
    checks
}

/// Run the suite, one line per check; returns the number of failures.
/// With more than one worker the checks still print in declaration order.
pub fn run(name: &str, threads: usize) -> usize {
    let checks = suite(name);
    let results: Vec<(usize, Result<String, String>)> = if threads <= 1 {
        checks.iter().enumerate().map(|(i, (_, f))| (i, f())).collect()
    } else {
        let mut results: Vec<Option<(usize, Result<String, String>)>> =
            (0..checks.len()).map(|_| None).collect();
        let next = std::sync::atomic::AtomicUsize::new(0);
        let results_mutex = std::sync::Mutex::new(&mut results);
        std::thread::scope(|scope| {
            for _ in 0..threads.min(checks.len()) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= checks.len() {
                        break;
                    }
                    let out = (checks[i].1)();
                    results_mutex.lock().unwrap()[i] = Some((i, out));
                });
            }
        });
        results.into_iter().flatten().collect()
    };

    let mut failures = 0;
    let mut ordered = results;
    ordered.sort_by_key(|(i, _)| *i);
    for (i, outcome) in ordered {
        let name = checks[i].0;
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    failures
}
