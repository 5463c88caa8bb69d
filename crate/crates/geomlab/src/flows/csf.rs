//! Curve-shortening flow: explicit integration of vertex velocity equal to
//! the discrete curvature vector, with arclength resampling when edges
//! degrade and a periodic simplicity watchdog.

use crate::error::{GeomError, Result};
use crate::flows::trace::{FlowOptions, FlowTrace, Sample, TerminationReason};
use crate::geom::curvature::curve_curvature_vectors;
use crate::geom::curve::Curve;
use crate::geom::point::Point;

const CURVE_CFL_DEFAULT: f64 = 0.4;
/// Steps between simplicity checks (each is O(edges²)).
const SIMPLICITY_CHECK_EVERY: usize = 10;

pub fn csf_run<const N: usize>(
    curve: &Curve<N>,
    t_end: f64,
    opts: &FlowOptions,
) -> Result<FlowTrace<Curve<N>>> {
    if !curve.is_closed() {
        return Err(GeomError::Precondition("curve shortening needs a closed curve".into()));
    }
    curve.ensure_simple()?;
    if !(t_end > 0.0) {
        return Err(GeomError::Precondition("t_end must be positive".into()));
    }

    let dt_safety = opts.dt_safety.unwrap_or(CURVE_CFL_DEFAULT);
    let initial_length = curve.total_length();
    let scale_sq = curve.bbox_diagonal().powi(2);
    let snapshot_dt = opts.snapshot_dt.unwrap_or(t_end / 50.0);
    let extinction_len = opts.extinction_rel_tol * initial_length;

    let mut state = curve.clone();
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut samples = Vec::new();
    let mut next_snapshot = snapshot_dt;
    record(&mut samples, t, &state);

    let termination = loop {
        if steps >= opts.max_steps {
            break TerminationReason::TimeBudget;
        }
        let min_edge = state.min_edge_length();
        let dt_cfl = dt_safety * min_edge * min_edge;
        if dt_cfl < 1e-12 * scale_sq {
            break TerminationReason::Singularity;
        }
        let dt = dt_cfl.min(t_end - t).min(next_snapshot - t + 1e-15 * t_end);

        let kappa = curve_curvature_vectors(&state);
        let old_length = state.total_length();
        let moved: Vec<Point<N>> = state
            .vertices()
            .iter()
            .zip(&kappa)
            .map(|(p, k)| *p + *k * dt)
            .collect();
        let new_state = match Curve::closed(moved) {
            Ok(c) => c,
            Err(_) => break TerminationReason::NumericalFailure,
        };
        state = new_state;
        t += dt;
        steps += 1;

        if state.total_length() > old_length * (1.0 + 1e-6) {
            break TerminationReason::NumericalFailure;
        }

        // keep the parametrization healthy
        if opts.resample && state.max_edge_length() > 3.0 * state.min_edge_length() {
            state = state.resample_by_arclength(state.len())?;
        }

        if steps % SIMPLICITY_CHECK_EVERY == 0 && !state.is_simple() {
            break TerminationReason::SimplicityLost;
        }

        if state.total_length() < extinction_len {
            record(&mut samples, t, &state);
            break TerminationReason::Extinction;
        }
        if t >= next_snapshot - 1e-15 * t_end {
            record(&mut samples, t, &state);
            next_snapshot += snapshot_dt;
        }
        if t >= t_end * (1.0 - 1e-12) {
            break TerminationReason::TimeBudget;
        }
    };

    if samples.last().map(|s: &Sample<Curve<N>>| s.t) != Some(t) {
        record(&mut samples, t, &state);
    }
    let trace = FlowTrace {
        samples,
        termination,
        steps,
        measure_monotone: true,
    };
    trace.validate()?;
    Ok(trace)
}

fn record<const N: usize>(samples: &mut Vec<Sample<Curve<N>>>, t: f64, state: &Curve<N>) {
    let kappa = curve_curvature_vectors(state);
    let max_curvature = kappa.iter().map(|k| k.norm()).fold(0.0, f64::max);
    samples.push(Sample {
        t,
        state: state.clone(),
        measure: state.total_length(),
        total_curvature: state.exterior_angle_sum().ok(),
        entropy: None,
        max_curvature,
        min_edge: state.min_edge_length(),
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use std::f64::consts::PI;

    #[test]
    fn shrinking_circle_follows_the_radius_law() {
        // dR/dt = −1/R, so R(t) = √(R₀² − 2t)
        let circle = shapes::circle_curve(1.0, 200);
        let t_end = 0.4; // R(t_end) ≈ 0.447
        let trace = csf_run(&circle, t_end, &FlowOptions::default()).unwrap();
        assert_eq!(trace.termination, TerminationReason::TimeBudget);
        for s in &trace.samples {
            let measured_r = s.measure / (2.0 * PI) / sinc_correction(s.state.len());
            let expected = (1.0 - 2.0 * s.t).sqrt();
            assert!(
                (measured_r - expected).abs() <= 0.01 * expected,
                "t = {}: R = {measured_r}, want {expected}",
                s.t
            );
        }
    }

    /// A regular n-gon inscribed in a circle of radius R has perimeter
    /// 2πR·sinc(π/n); divide it out when reading the radius off the length.
    fn sinc_correction(n: usize) -> f64 {
        let x = PI / n as f64;
        x.sin() / x
    }

    #[test]
    fn convex_polygon_keeps_total_curvature_two_pi() {
        let hexagon = shapes::circle_curve(1.0, 6);
        let trace = csf_run(&hexagon, 0.05, &FlowOptions::default()).unwrap();
        for s in &trace.samples {
            let tc = s.total_curvature.unwrap();
            assert!((tc - 2.0 * PI).abs() < 1e-6, "tc = {tc} at t = {}", s.t);
        }
    }

    #[test]
    fn ellipse_total_curvature_decreases_toward_two_pi() {
        let e = shapes::ellipse_curve(3.0, 1.0, 256);
        let trace = csf_run(&e, 1.2, &FlowOptions::default()).unwrap();
        let tcs: Vec<f64> = trace
            .samples
            .iter()
            .map(|s| s.total_curvature.unwrap())
            .collect();
        for pair in tcs.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-6, "tc increased: {} -> {}", pair[0], pair[1]);
        }
        assert!((tcs[0] - 2.0 * PI).abs() < 1e-6); // planar convex start
        let last = *tcs.last().unwrap();
        assert!((last - 2.0 * PI).abs() < 1e-6);
        // a genuinely non-convex start decreases strictly toward 2π
        let wobble = shapes::twisted_loop(0.6, 256);
        let trace = csf_run(&wobble, 0.3, &FlowOptions::default()).unwrap();
        let tc0 = trace.samples[0].total_curvature.unwrap();
        let tc1 = trace.last().total_curvature.unwrap();
        assert!(tc0 > 2.0 * PI + 0.3);
        assert!(tc1 < tc0 - 0.1, "tc did not drop: {tc0} -> {tc1}");
        for pair in trace.samples.windows(2) {
            assert!(
                pair[1].total_curvature.unwrap() <= pair[0].total_curvature.unwrap() + 1e-6
            );
        }
    }

    #[test]
    fn planar_curve_stays_planar() {
        let e = shapes::ellipse_curve(2.0, 1.0, 128);
        let trace = csf_run(&e, 0.3, &FlowOptions::default()).unwrap();
        for s in &trace.samples {
            for p in s.state.vertices() {
                assert!(p.z().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn extinction_detected_for_long_horizon() {
        let circle = shapes::circle_curve(0.5, 96);
        // lifespan R₀²/2 = 0.125; ask for far more
        let trace = csf_run(&circle, 10.0, &FlowOptions::default()).unwrap();
        assert!(matches!(
            trace.termination,
            TerminationReason::Extinction | TerminationReason::Singularity
        ));
        assert!(trace.last().t < 0.13);
    }

    #[test]
    fn length_never_increases() {
        let loopy = shapes::fourier_loop(3, 4, 220);
        let trace = csf_run(&loopy, 0.05, &FlowOptions::default()).unwrap();
        trace.validate().unwrap();
    }
}
