//! Total-curvature-monotone deformation of simple closed space curves to
//! planar convex curves.
//!
//! The pipeline has three stages, each certified never to raise the
//! exterior angle sum: a brief curve-shortening smoothing, a chordal
//! homotopy onto an inscribed polygon (replacing parameter sub-arcs by
//! their chords), and height-level truncation of the polygon placed in a
//! generic position where every intermediate level meets the curve twice.
//! The truncations shrink the polygon to a triangle; a triangle is planar
//! and convex, and brief smoothing keeps it so.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::flows::csf::csf_run;
use crate::flows::trace::FlowOptions;
use crate::geom::curve::Curve;
use crate::geom::point::P3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Smooth,
    Polygonalize,
    Truncate,
}

impl Stage {
    pub fn label(&self) -> &'static str {
        match self {
            Stage::Smooth => "smooth",
            Stage::Polygonalize => "polygonalize",
            Stage::Truncate => "truncate",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PathSample {
    /// Path parameter in [0, 2].
    pub s: f64,
    pub stage: Stage,
    pub curve: Curve<3>,
    pub total_curvature: f64,
    /// Max deviation from the best-fit plane.
    pub planarity: f64,
    pub simple: bool,
}

/// A one-parameter family of curves with a certified monotone
/// total-curvature series.
#[derive(Debug, Clone)]
pub struct DeformationPath {
    pub samples: Vec<PathSample>,
}

impl DeformationPath {
    pub fn tc_series(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.total_curvature).collect()
    }

    /// The emission certificate: every sample simple, tc nonincreasing
    /// within absolute slack 1e-6.
    pub fn certify(&self) -> Result<()> {
        for (k, sample) in self.samples.iter().enumerate() {
            if !sample.simple {
                return Err(GeomError::Internal(format!(
                    "path sample {k} (s = {}) is not simple",
                    sample.s
                )));
            }
        }
        for pair in self.samples.windows(2) {
            if pair[1].total_curvature > pair[0].total_curvature + 1e-6 {
                return Err(GeomError::Internal(format!(
                    "total curvature increased along the path: {} -> {} at s = {}",
                    pair[0].total_curvature, pair[1].total_curvature, pair[1].s
                )));
            }
        }
        Ok(())
    }

    /// Audit CSV: `s,stage,tc,simple,planarity`.
    pub fn audit_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "# {}", crate::geom::io::ARTIFACT_VERSION);
        let _ = writeln!(out, "s,stage,tc,simple,planarity");
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                s.s,
                s.stage.label(),
                s.total_curvature,
                s.simple,
                s.planarity
            );
        }
        out
    }
}

/// A deformation that failed mid-way; the partial path is kept for
/// inspection.
#[derive(Debug)]
pub struct DeformationAbort {
    pub partial: DeformationPath,
    pub cause: GeomError,
}

impl std::fmt::Display for DeformationAbort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "deformation aborted after {} samples: {}",
            self.partial.samples.len(),
            self.cause
        )
    }
}

impl std::error::Error for DeformationAbort {}

impl From<DeformationAbort> for GeomError {
    fn from(abort: DeformationAbort) -> Self {
        GeomError::Numerical(abort.to_string())
    }
}

/// Chordal homotopy toward an inscribed `n`-gon: for each k the sub-arc
/// over parameters [k/n, (k+t)/n] is replaced by its chord. At t = 0 the
/// curve is unchanged; at t = 1 it is the polygon through the n parameter
/// points. Replacing sub-arcs by chords never increases the exterior angle
/// sum, and larger t replaces supersets of arcs, so the total curvature is
/// nonincreasing in t.
pub fn polygonalize_homotopy(
    curve: &Curve<3>,
    n: usize,
    t: f64,
) -> Result<Curve<3>> {
    if !curve.is_closed() {
        return Err(GeomError::Precondition("polygonalization needs a closed curve".into()));
    }
    if n < 3 {
        return Err(GeomError::Precondition("need at least a triangle (n ≥ 3)".into()));
    }
    if curve.len() < 8 * n {
        return Err(GeomError::Precondition(format!(
            "curve with {} vertices is too sparse for n = {n} (need ≥ {})",
            curve.len(),
            8 * n
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(GeomError::Precondition(format!("t = {t} outside [0, 1]")));
    }

    let m = curve.len();
    let scale = curve.bbox_diagonal();
    let mut pts: Vec<P3> = Vec::with_capacity(m + 2 * n);
    for k in 0..n {
        let t_start = k as f64 / n as f64;
        let t_chord_end = (k as f64 + t) / n as f64;
        let t_next = (k + 1) as f64 / n as f64;
        pts.push(curve.point_at_param(t_start));
        if t > 0.0 {
            pts.push(curve.point_at_param(t_chord_end));
        }
        // retained original vertices strictly inside (t_chord_end, t_next)
        let first = (t_chord_end * m as f64).floor() as usize + 1;
        let last = (t_next * m as f64).ceil() as usize;
        for i in first..last {
            let param = i as f64 / m as f64;
            if param > t_chord_end && param < t_next {
                pts.push(curve.vertices()[i % m]);
            }
        }
    }
    // Merge near-coincident consecutive points (including across the wrap).
    // Dropping points is safe: any subsequence of points on the original
    // curve in cyclic order is inscribed in it, so the total-curvature
    // monotonicity argument is untouched, while sliver edges from chord
    // joints would otherwise strangle the smoothing time step.
    let merge_tol = 1e-7 * scale;
    let mut cleaned: Vec<P3> = Vec::with_capacity(pts.len());
    for p in pts {
        if cleaned.last().map(|q| q.dist(&p) <= merge_tol) != Some(true) {
            cleaned.push(p);
        }
    }
    while cleaned.len() > 3
        && cleaned
            .first()
            .zip(cleaned.last())
            .map(|(a, b)| a.dist(b) <= merge_tol)
            == Some(true)
    {
        cleaned.pop();
    }
    let result = Curve::closed(cleaned)?;
    result.ensure_simple()?;
    Ok(result)
}

#[derive(Debug, Clone)]
pub struct MilnorOptions {
    pub seed: u64,
    pub max_tries: usize,
}

impl Default for MilnorOptions {
    fn default() -> Self {
        MilnorOptions {
            seed: 42,
            max_tries: 1000,
        }
    }
}

/// Place a polygon so that the last-coordinate height function has exactly
/// one local maximum and one local minimum over the vertices (equivalently,
/// every intermediate level meets the curve in exactly two points), with
/// heights scaled to [0, 1]. Such directions exist in positive measure when
/// the total curvature is below 4π; the search is randomized with a fixed
/// seed and a bounded retry budget, and failure is an error, not a loop.
///
/// Returns the repositioned curve and the chosen height axis in the
/// original coordinates.
pub fn milnor_position(curve: &Curve<3>, opts: &MilnorOptions) -> Result<(Curve<3>, P3)> {
    curve.ensure_simple()?;
    if !curve.is_closed() {
        return Err(GeomError::Precondition("positioning needs a closed curve".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let verts = curve.vertices();
    let n = verts.len();
    for _ in 0..opts.max_tries {
        let axis = random_unit(&mut rng);
        let heights: Vec<f64> = verts.iter().map(|p| p.dot(&axis)).collect();
        // reject ties (nearly equal neighbor heights make extrema ambiguous)
        let span = heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - heights.iter().cloned().fold(f64::INFINITY, f64::min);
        if span <= 0.0 {
            continue;
        }
        let distinct = (0..n).all(|i| {
            (heights[i] - heights[(i + 1) % n]).abs() > 1e-9 * span
        });
        if !distinct {
            continue;
        }
        let mut maxima = 0;
        let mut minima = 0;
        for i in 0..n {
            let prev = heights[(i + n - 1) % n];
            let next = heights[(i + 1) % n];
            if heights[i] > prev && heights[i] > next {
                maxima += 1;
            }
            if heights[i] < prev && heights[i] < next {
                minima += 1;
            }
        }
        if maxima == 1 && minima == 1 {
            // rotate axis to e_z, then scale heights to [0, 1]
            let u = orthonormal_to(&axis);
            let w = axis.cross(&u);
            let h_min = heights.iter().cloned().fold(f64::INFINITY, f64::min);
            let h_max = heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let scale = 1.0 / (h_max - h_min);
            let positioned = curve.mapped(|p| {
                P3::new(
                    p.dot(&u) * scale,
                    p.dot(&w) * scale,
                    (p.dot(&axis) - h_min) * scale,
                )
            });
            return Ok((positioned, axis));
        }
    }
    let tc = curve.exterior_angle_sum().unwrap_or(f64::NAN);
    Err(GeomError::Positioning(format!(
        "no direction with two-point level sets found in {} tries \
         (curve total curvature {tc:.4}; guaranteed to exist only below 4π ≈ {:.4})",
        opts.max_tries,
        4.0 * std::f64::consts::PI
    )))
}

fn random_unit(rng: &mut ChaCha8Rng) -> P3 {
    loop {
        let p = P3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = p.norm_sq();
        if n > 1e-4 && n <= 1.0 {
            return p.normalized().unwrap();
        }
    }
}

fn orthonormal_to(axis: &P3) -> P3 {
    let helper = if axis.x().abs() < 0.9 {
        P3::new(1.0, 0.0, 0.0)
    } else {
        P3::new(0.0, 1.0, 0.0)
    };
    axis.cross(&helper).normalized().unwrap()
}

/// Truncate a positioned polygon at height `t ∈ [0, 1)`: keep the part
/// above the level and close it with the segment joining the two crossing
/// points. A level within 1e-9 of a vertex height is nudged up by 1e-9.
/// The retained vertices all lie on the original curve in cyclic order, so
/// the total curvature never increases, and it is nonincreasing in t.
pub fn milnor_truncation(positioned: &Curve<3>, t: f64) -> Result<Curve<3>> {
    if !(0.0..1.0).contains(&t) {
        return Err(GeomError::Precondition(format!("t = {t} outside [0, 1)")));
    }
    if t == 0.0 {
        return Ok(positioned.clone());
    }
    let verts = positioned.vertices();
    let n = verts.len();
    let mut level = t;
    if verts.iter().any(|p| (p.z() - level).abs() < 1e-9) {
        level += 1e-9;
    }
    // walk the loop; collect crossings and the retained chain above level
    let mut crossings: Vec<(usize, P3)> = Vec::new();
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        if (a.z() - level) * (b.z() - level) < 0.0 {
            let f = (level - a.z()) / (b.z() - a.z());
            crossings.push((i, a.lerp(&b, f)));
        }
    }
    if crossings.len() != 2 {
        return Err(GeomError::Internal(format!(
            "level {level} crossed {} times; the curve is not in two-point position",
            crossings.len()
        )));
    }
    // the chain from the first crossing's edge end to the second crossing's
    // edge start is one of the two sides; pick the side above the level
    let (e1, p1) = crossings[0];
    let (e2, p2) = crossings[1];
    let mut chain = vec![p1];
    let mut i = (e1 + 1) % n;
    loop {
        chain.push(verts[i]);
        if i == e2 {
            break;
        }
        i = (i + 1) % n;
    }
    chain.push(p2);
    if chain[1].z() < level {
        // walked the lower side; take the complement
        let mut upper = vec![p2];
        let mut i = (e2 + 1) % n;
        loop {
            upper.push(verts[i]);
            if i == e1 {
                break;
            }
            i = (i + 1) % n;
        }
        upper.push(p1);
        chain = upper;
    }
    let curve = Curve::closed(chain)?;
    curve.ensure_simple()?;
    Ok(curve)
}

/// The height of the second-highest vertex: truncating just above it leaves
/// a triangle (apex plus two crossing points).
pub fn triangle_level(positioned: &Curve<3>) -> f64 {
    let mut heights: Vec<f64> = positioned.vertices().iter().map(|p| p.z()).collect();
    heights.sort_by(|a, b| b.partial_cmp(a).unwrap());
    heights[1]
}

#[derive(Debug, Clone)]
pub struct DeformOptions {
    /// Inscribed polygon size for the chordal stage.
    pub polygon_n: usize,
    /// Samples per stage.
    pub samples_per_stage: usize,
    /// Initial smoothing time as a fraction of diameter².
    pub epsilon_rel: f64,
    pub seed: u64,
    /// Halvings of epsilon before giving up.
    pub max_epsilon_retries: usize,
    /// Doublings of the polygon size on simplicity failures.
    pub max_n_retries: usize,
}

impl Default for DeformOptions {
    fn default() -> Self {
        DeformOptions {
            polygon_n: 16,
            samples_per_stage: 50,
            epsilon_rel: 1e-3,
            seed: 42,
            max_epsilon_retries: 12,
            max_n_retries: 3,
        }
    }
}

/// Deform a simple closed curve of total curvature ≤ `alpha` < 4π to a
/// planar convex curve through simple curves of nonincreasing total
/// curvature: brief smoothing, then the chordal homotopy onto an inscribed
/// polygon, then height truncations down to a triangle, each truncation
/// sample lightly smoothed. Every emitted sample is re-measured and the
/// whole series certified before returning; failures abort with the partial
/// path attached.
pub fn deform_to_convex(
    curve: &Curve<3>,
    alpha: f64,
    opts: &DeformOptions,
) -> std::result::Result<DeformationPath, DeformationAbort> {
    let abort = |partial: Vec<PathSample>, cause: GeomError| DeformationAbort {
        partial: DeformationPath { samples: partial },
        cause,
    };
    if alpha >= 4.0 * std::f64::consts::PI {
        return Err(abort(
            Vec::new(),
            GeomError::Precondition(format!("alpha = {alpha} must be below 4π")),
        ));
    }
    let tc0 = match curve.exterior_angle_sum() {
        Ok(tc) => tc,
        Err(e) => return Err(abort(Vec::new(), e)),
    };
    if tc0 > alpha {
        return Err(abort(
            Vec::new(),
            GeomError::Precondition(format!(
                "curve total curvature {tc0:.6} exceeds alpha = {alpha:.6}"
            )),
        ));
    }
    if let Err(e) = curve.ensure_simple() {
        return Err(abort(Vec::new(), e));
    }

    // halve the smoothing time until the certificate passes; the ladder
    // bottoms out at ε = 0, where the stages are exactly monotone and only
    // simplicity remains to check
    let mut epsilon_rel = opts.epsilon_rel;
    let mut last_failure: Option<DeformationAbort> = None;
    for attempt in 0..=opts.max_epsilon_retries {
        if attempt == opts.max_epsilon_retries {
            epsilon_rel = 0.0;
        }
        match build_path(curve, opts, epsilon_rel) {
            Ok(path) => match path.certify() {
                Ok(()) => return Ok(path),
                Err(cause) => {
                    last_failure = Some(abort(path.samples, cause));
                    epsilon_rel /= 2.0;
                }
            },
            Err(failure) => {
                epsilon_rel /= 2.0;
                last_failure = Some(failure);
            }
        }
    }
    Err(last_failure.unwrap_or_else(|| {
        abort(
            Vec::new(),
            GeomError::Internal("deformation retries exhausted without a failure record".into()),
        )
    }))
}

fn smooth(curve: &Curve<3>, epsilon_rel: f64) -> Result<Curve<3>> {
    let eps = epsilon_rel * curve.bbox_diagonal().powi(2);
    if eps <= 0.0 {
        return Ok(curve.clone());
    }
    let opts = FlowOptions {
        snapshot_dt: Some(eps), // endpoints only
        // resampling jumps discontinuously between neighboring samples and
        // would spoil the monotonicity certificate; these runs are a few
        // steps long and do not need it
        resample: false,
        // a residual short edge pins the CFL step; cap the work and accept
        // a partially smoothed sample instead of grinding
        max_steps: 20_000,
        ..Default::default()
    };
    let trace = csf_run(curve, eps, &opts)?;
    Ok(trace.last().state.clone())
}

fn build_path(
    curve: &Curve<3>,
    opts: &DeformOptions,
    epsilon_rel: f64,
) -> std::result::Result<DeformationPath, DeformationAbort> {
    let mut samples: Vec<PathSample> = Vec::new();
    let abort = |samples: Vec<PathSample>, cause: GeomError| DeformationAbort {
        partial: DeformationPath { samples },
        cause,
    };
    // bail at the first certification violation so failed smoothing times
    // are cheap to discard
    let push = |samples: &mut Vec<PathSample>, s: f64, stage: Stage, c: Curve<3>| -> Result<()> {
        let tc = c.exterior_angle_sum()?;
        if let Some(prev) = samples.last() {
            if tc > prev.total_curvature + 1e-6 {
                return Err(GeomError::Internal(format!(
                    "total curvature increased along the path: {} -> {tc} at s = {s}",
                    prev.total_curvature
                )));
            }
        }
        let simple = c.is_simple();
        if !simple {
            return Err(GeomError::Simplicity {
                min_separation: c.min_nonadjacent_separation(),
                tolerance: crate::geom::curve::SIMPLICITY_REL_TOL * c.bbox_diagonal(),
            });
        }
        samples.push(PathSample {
            s,
            stage,
            total_curvature: tc,
            planarity: c.planarity_deviation(),
            simple,
            curve: c,
        });
        Ok(())
    };

    // stage 1: flow the original curve for time ε (skipped entirely when
    // the retry ladder has bottomed out at ε = 0)
    let k_smooth = (opts.samples_per_stage / 5).max(3);
    let s_smooth_end = 0.15;
    let eps = epsilon_rel * curve.bbox_diagonal().powi(2);
    if eps > 0.0 {
        let flow_opts = FlowOptions {
            snapshot_dt: Some(eps / k_smooth as f64),
            resample: false,
            max_steps: 20_000,
            ..Default::default()
        };
        let trace = match csf_run(curve, eps, &flow_opts) {
            Ok(t) => t,
            Err(e) => return Err(abort(samples, e)),
        };
        for s in &trace.samples {
            let frac = (s.t / eps).clamp(0.0, 1.0);
            if let Err(e) = push(
                &mut samples,
                s_smooth_end * frac,
                Stage::Smooth,
                s.state.clone(),
            ) {
                return Err(abort(samples, e));
            }
        }
    } else if let Err(e) = push(&mut samples, 0.0, Stage::Smooth, curve.clone()) {
        return Err(abort(samples, e));
    }

    // stage 2: chordal homotopy of the ORIGINAL curve, each sample smoothed.
    // Retry with doubled polygon size if a sample loses simplicity; densify
    // the parametrization by midpoint insertion when needed.
    let mut n = opts.polygon_n;
    let mut dense = curve.clone();
    let mut polygonalized: Option<(Vec<(f64, Curve<3>)>, Curve<3>)> = None;
    let mut poly_failure: Option<GeomError> = None;
    'n_retry: for _ in 0..=opts.max_n_retries {
        while dense.len() < 8 * n {
            dense = densify(&dense);
        }
        let mut stage: Vec<(f64, Curve<3>)> = Vec::new();
        for k in 1..=opts.samples_per_stage {
            let t = k as f64 / opts.samples_per_stage as f64;
            match polygonalize_homotopy(&dense, n, t) {
                Ok(c) => stage.push((t, c)),
                Err(e @ GeomError::Simplicity { .. }) => {
                    poly_failure = Some(e);
                    n *= 2;
                    continue 'n_retry;
                }
                Err(e) => return Err(abort(samples, e)),
            }
        }
        let polygon = stage.last().unwrap().1.clone();
        polygonalized = Some((stage, polygon));
        break;
    }
    let Some((poly_stage, polygon)) = polygonalized else {
        return Err(abort(
            samples,
            poly_failure.unwrap_or_else(|| GeomError::Internal("polygonalization failed".into())),
        ));
    };
    for (t, c) in poly_stage {
        let smoothed = match smooth(&c, epsilon_rel) {
            Ok(c) => c,
            Err(e) => return Err(abort(samples, e)),
        };
        let s = s_smooth_end + (1.0 - s_smooth_end) * t;
        if let Err(e) = push(&mut samples, s, Stage::Polygonalize, smoothed) {
            return Err(abort(samples, e));
        }
    }

    // stage 3: position and truncate down to a triangle
    let milnor_opts = MilnorOptions {
        seed: opts.seed,
        ..Default::default()
    };
    let (positioned, _axis) = match milnor_position(&polygon, &milnor_opts) {
        Ok(p) => p,
        Err(e) => return Err(abort(samples, e)),
    };
    let t_tri = triangle_level(&positioned) + 1e-7;
    for k in 1..=opts.samples_per_stage {
        let t = t_tri * k as f64 / opts.samples_per_stage as f64;
        let truncated = match milnor_truncation(&positioned, t.min(0.999_999)) {
            Ok(c) => c,
            Err(e) => return Err(abort(samples, e)),
        };
        let smoothed = match smooth(&truncated, epsilon_rel) {
            Ok(c) => c,
            Err(e) => return Err(abort(samples, e)),
        };
        let s = 1.0 + k as f64 / opts.samples_per_stage as f64;
        if let Err(e) = push(&mut samples, s, Stage::Truncate, smoothed) {
            return Err(abort(samples, e));
        }
    }

    Ok(DeformationPath { samples })
}

/// Insert edge midpoints: the polygon is unchanged as a set and the flat
/// vertices carry zero turning, so the total curvature is untouched.
fn densify(curve: &Curve<3>) -> Curve<3> {
    let verts = curve.vertices();
    let n = verts.len();
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        out.push(verts[i]);
        out.push(verts[i].lerp(&verts[(i + 1) % n], 0.5));
    }
    Curve::closed(out).expect("midpoint densification preserves validity")
}
