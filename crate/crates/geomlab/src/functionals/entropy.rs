//! Boundary entropy: the supremum over Gaussian centers and scales of the
//! ψ-mass of a mesh plus the exterior cone over its boundary curve,
//!
//!   e(M; Γ) = sup_{v, λ} [ ∫_M ψ_{v,λ} + ∫_{E_{Γ,v}} ψ_{v,λ} ],
//!
//! with the Γ-term dropped when no boundary curve is supplied.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::functionals::gaussian::{exterior_cone_gaussian, gaussian_area, GaussianKernel};
use crate::functionals::report::FunctionalReport;
use crate::functionals::search::{golden_section_max, nelder_mead_max};
use crate::geom::curve::Curve;
use crate::geom::mesh::TriMesh;
use crate::geom::point::P3;

#[derive(Debug, Clone)]
pub struct EntropyOptions {
    pub seed: u64,
    pub restarts: usize,
    pub max_evaluations: usize,
    /// Check that a supplied Γ actually matches the mesh boundary loop
    /// (vertex-wise, within tolerance); disable for explicitly truncated
    /// boundary data like a straight-line segment.
    pub check_boundary_match: bool,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            seed: 42,
            restarts: 5,
            max_evaluations: 10_000,
            check_boundary_match: true,
        }
    }
}

/// One evaluation of the entropy integrand pair at fixed (v, λ).
pub fn entropy_at(
    mesh: &TriMesh,
    boundary: Option<&Curve<3>>,
    v: &P3,
    lambda: f64,
) -> Result<(f64, f64)> {
    let k = GaussianKernel::new(*v, lambda)?;
    let area = gaussian_area(mesh, &k);
    let (mut value, mut err) = (area.value, area.error);
    if let Some(curve) = boundary {
        let cone = exterior_cone_gaussian(curve, &k)?;
        value += cone.value;
        err += cone.error;
    }
    Ok((value, err))
}

/// The entropy e(M; Γ): multi-start local ascent over v in a box 1.5× the
/// bounding box of M ∪ Γ and log λ in [log(10⁻³ d²), log(10³ d²)], d the
/// diameter of M ∪ Γ. The report carries the argmax (v, λ); when the budget
/// runs out before the ascent settles, the remaining movement is folded into
/// `error_estimate` rather than silently accepted.
pub fn entropy(
    mesh: &TriMesh,
    boundary: Option<&Curve<3>>,
    opts: &EntropyOptions,
) -> Result<FunctionalReport> {
    if mesh.faces().is_empty() && boundary.is_none() {
        return Err(GeomError::Precondition(
            "entropy of an empty mesh with no boundary curve".into(),
        ));
    }
    if let Some(curve) = boundary {
        curve.ensure_simple()?;
        if opts.check_boundary_match {
            ensure_boundary_matches(mesh, curve)?;
        }
    }

    // combined bounding box of M ∪ Γ
    let (mut lo, mut hi) = mesh.bbox();
    if let Some(curve) = boundary {
        let (clo, chi) = curve.bbox();
        for k in 0..3 {
            lo[k] = lo[k].min(clo[k]);
            hi[k] = hi[k].max(chi[k]);
        }
    }
    let center = (lo + hi) / 2.0;
    let half = (hi - lo) * 0.75; // box expanded 1.5×
    let d = lo.dist(&hi).max(f64::MIN_POSITIVE);
    let log_lambda_range = ((1e-3 * d * d).ln(), (1e3 * d * d).ln());

    let mut evals = 0u64;
    let mut quad_err_at_best = 0.0;
    let objective = |v: &P3, log_lambda: f64, evals: &mut u64, qerr: &mut f64| -> f64 {
        *evals += 1;
        match entropy_at(mesh, boundary, v, log_lambda.exp()) {
            Ok((value, err)) => {
                *qerr = err;
                value
            }
            Err(_) => f64::NEG_INFINITY,
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts: Vec<(P3, f64)> = vec![(center, (0.05 * d * d).ln())];
    for i in 1..opts.restarts.max(1) {
        let p = P3::new(
            center.x() + half.x() * rng.random_range(-1.0..1.0),
            center.y() + half.y() * rng.random_range(-1.0..1.0),
            center.z() + half.z() * rng.random_range(-1.0..1.0),
        );
        // spread starting scales over the low/middle of the range
        let frac = 0.15 + 0.2 * (i as f64 / opts.restarts as f64);
        let ll = log_lambda_range.0 + frac * (log_lambda_range.1 - log_lambda_range.0);
        starts.push((p, ll));
    }

    let budget = opts.max_evaluations.max(200);
    let per_start = budget / opts.restarts.max(1);
    let mut best_value = f64::NEG_INFINITY;
    let mut best_v = center;
    let mut best_ll = starts[0].1;
    let mut search_err = f64::INFINITY;

    for (start_v, start_ll) in starts {
        let mut v = start_v;
        let mut ll = start_ll;
        let mut value = f64::NEG_INFINITY;
        let mut last_round_gain = f64::INFINITY;
        // alternate golden-section in log λ with a simplex in v
        for round in 0..3 {
            if evals as usize >= budget {
                break;
            }
            let before = value;
            let (ll_new, _) = golden_section_max(
                |l| objective(&v, l, &mut evals, &mut quad_err_at_best),
                if round == 0 { log_lambda_range.0 } else { ll - 2.0 },
                if round == 0 { log_lambda_range.1 } else { ll + 2.0 },
                if round == 0 { 28 } else { 16 },
            );
            ll = ll_new.clamp(log_lambda_range.0, log_lambda_range.1);
            let simplex_scale = [0.15, 0.04, 0.012][round] * d;
            let r = nelder_mead_max(
                |p| objective(p, ll, &mut evals, &mut quad_err_at_best),
                v,
                simplex_scale,
                per_start / 3,
                1e-12,
            );
            v = r.argmax;
            value = r.max;
            last_round_gain = if before.is_finite() { (value - before).abs() } else { f64::INFINITY };
        }
        if value > best_value {
            best_value = value;
            best_v = v;
            best_ll = ll;
            search_err = last_round_gain;
        }
    }

    // recompute at the winner for the quadrature error there
    let mut final_qerr = 0.0;
    let final_value = objective(&best_v, best_ll, &mut evals, &mut final_qerr);
    let budget_exhausted = evals as usize >= budget;
    let error_estimate = final_qerr
        + search_err.min(1.0).max(0.0)
        + if budget_exhausted { search_err.min(1.0) } else { 0.0 };

    Ok(FunctionalReport {
        value: final_value.max(best_value),
        argmax_point: Some(best_v),
        argmax_scale: Some(best_ll.exp()),
        error_estimate,
        evaluations: evals,
    })
}

fn ensure_boundary_matches(mesh: &TriMesh, curve: &Curve<3>) -> Result<()> {
    if mesh.boundary_loops().len() != 1 {
        return Err(GeomError::Precondition(format!(
            "boundary curve supplied but the mesh has {} boundary loops; \
             pass explicit boundary data with matching disabled instead",
            mesh.boundary_loops().len()
        )));
    }
    let tol = 1e-9 * mesh.bbox_diagonal().max(curve.bbox_diagonal());
    let chain = &mesh.boundary_loops()[0];
    if chain.len() != curve.len() {
        return Err(GeomError::Precondition(format!(
            "boundary curve has {} vertices but the mesh boundary loop has {}",
            curve.len(),
            chain.len()
        )));
    }
    // same loop up to rotation and reversal
    let mesh_pts: Vec<P3> = chain.iter().map(|&v| mesh.vertex(v)).collect();
    let n = mesh_pts.len();
    let matches = |reversed: bool| -> bool {
        (0..n).any(|shift| {
            (0..n).all(|i| {
                let j = if reversed {
                    (shift + n - i) % n
                } else {
                    (shift + i) % n
                };
                mesh_pts[j].dist(&curve.vertices()[i]) <= tol
            })
        })
    };
    if matches(false) || matches(true) {
        Ok(())
    } else {
        Err(GeomError::Precondition(
            "boundary curve does not coincide with the mesh boundary loop".into(),
        ))
    }
}
