//! Time series produced by the flow integrators.

use crate::error::{GeomError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    /// Reached the requested end time.
    TimeBudget,
    /// Curve length fell below the extinction tolerance.
    Extinction,
    /// Maximum curvature fell below the stationarity tolerance.
    Stationary,
    /// Curvature blow-up or edge collapse: a singularity is forming.
    Singularity,
    /// A curve stopped being simple.
    SimplicityLost,
    /// Mesh tangling, degenerate elements, or a diagnostics violation.
    NumericalFailure,
}

/// One recorded snapshot along a flow.
#[derive(Debug, Clone)]
pub struct Sample<S> {
    pub t: f64,
    pub state: S,
    /// Area for meshes, length for curves.
    pub measure: f64,
    /// Exterior angle sum; curves only.
    pub total_curvature: Option<f64>,
    /// Boundary entropy; sampled sparsely (it is the expensive diagnostic).
    pub entropy: Option<f64>,
    /// max |H| (meshes) or max |κ| (curves) at the sample time.
    pub max_curvature: f64,
    pub min_edge: f64,
}

#[derive(Debug, Clone)]
pub struct FlowTrace<S> {
    pub samples: Vec<Sample<S>>,
    pub termination: TerminationReason,
    pub steps: usize,
    /// Whether the producing flow guarantees a nonincreasing measure
    /// (true for curve shortening and mean curvature flow; false for the
    /// renormalized flow, which can expand).
    pub measure_monotone: bool,
}

impl<S> FlowTrace<S> {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &Sample<S> {
        self.samples.last().expect("a trace records at least t = 0")
    }

    /// Check the trace invariants: strictly increasing times and (when the
    /// flow promises it) a nonincreasing measure within relative slack 1e-6.
    pub fn validate(&self) -> Result<()> {
        for pair in self.samples.windows(2) {
            if pair[1].t <= pair[0].t {
                return Err(GeomError::Internal(format!(
                    "trace times not strictly increasing: {} then {}",
                    pair[0].t, pair[1].t
                )));
            }
            if self.measure_monotone
                && pair[1].measure > pair[0].measure * (1.0 + 1e-6)
            {
                return Err(GeomError::Internal(format!(
                    "measure increased along the trace: {} -> {} at t = {}",
                    pair[0].measure, pair[1].measure, pair[1].t
                )));
            }
        }
        Ok(())
    }

    /// Diagnostics CSV: `t,measure,tc,entropy,max_curvature,min_edge` per
    /// sample (empty fields for diagnostics that were not computed).
    pub fn diagnostics_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "# {}", crate::geom::io::ARTIFACT_VERSION);
        let _ = writeln!(out, "t,measure,tc,entropy,max_curvature,min_edge");
        for s in &self.samples {
            let tc = s.total_curvature.map(|v| v.to_string()).unwrap_or_default();
            let en = s.entropy.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{tc},{en},{},{}",
                s.t, s.measure, s.max_curvature, s.min_edge
            );
        }
        out
    }
}

/// Options shared by the flow integrators. `Default` gives the documented
/// defaults; the CFL safety factor defaults per flow (0.4 for curves, 0.25
/// for meshes) when left `None`.
#[derive(Debug, Clone)]
pub struct FlowOptions {
    /// Multiplier on (min edge)² for the explicit time step.
    pub dt_safety: Option<f64>,
    /// Semi-implicit stepping for meshes (implicit Laplacian, lagged areas).
    pub semi_implicit: bool,
    /// Time between recorded snapshots; `None` records ~50 per run.
    pub snapshot_dt: Option<f64>,
    /// Evaluate entropy on every k-th snapshot; 0 disables entropy sampling.
    pub entropy_every: usize,
    /// Seed for entropy searches along the trace.
    pub seed: u64,
    /// Allow split/collapse/flip remeshing when mesh quality degrades.
    pub remesh: bool,
    /// Curves: resample by arclength when the edge-length ratio exceeds 3.
    pub resample: bool,
    /// Curves: stop when length < this × initial length.
    pub extinction_rel_tol: f64,
    /// Meshes: stop (Stationary) when max |H| < this / initial diameter.
    pub stationary_factor: f64,
    /// Singularity flag when max curvature > this / initial diameter.
    pub blowup_factor: f64,
    /// Singularity flag when min edge < this × initial diameter.
    pub min_edge_factor: f64,
    /// Hard cap on steps.
    pub max_steps: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            dt_safety: None,
            semi_implicit: false,
            snapshot_dt: None,
            entropy_every: 0,
            seed: 42,
            remesh: true,
            resample: true,
            extinction_rel_tol: 1e-3,
            stationary_factor: 1e-9,
            blowup_factor: 1e3,
            min_edge_factor: 1e-4,
            max_steps: 2_000_000,
        }
    }
}
