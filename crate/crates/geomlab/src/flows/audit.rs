//! Monotonicity auditing of flow traces: entropy must not increase along a
//! flow, and every sample must satisfy the area/vision upper bound
//! e(M(t); Γ) ≤ area(M(T₀)) / (4π (t − T₀)) + vis(Γ).

use crate::error::{GeomError, Result};
use crate::flows::trace::FlowTrace;
use crate::functionals::cone::{vision_number, VisionOptions};
use crate::geom::curve::Curve;
use crate::geom::mesh::TriMesh;

/// Relative slack allowed on both checks (discrete flows and sup searches
/// carry a few-percent noise floor).
pub const AUDIT_REL_SLACK: f64 = 0.02;

#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub entropy_ok: bool,
    /// Worst relative increase e_{k+1}/e_k − 1 over consecutive samples
    /// (negative when entropy strictly decreased everywhere).
    pub worst_entropy_increase: f64,
    pub bound_ok: bool,
    /// Worst relative excess e/bound − 1 over the area/vision bound
    /// (negative when the bound held with room to spare).
    pub worst_bound_excess: f64,
    pub vision: f64,
    pub samples_checked: usize,
}

impl MonotonicityReport {
    pub fn ok(&self) -> bool {
        self.entropy_ok && self.bound_ok
    }
}

/// Audit a mesh-flow trace. Violations are data: they are reported, not
/// raised as errors. Requires at least 3 entropy samples on the trace.
pub fn monotonicity_audit(
    trace: &FlowTrace<TriMesh>,
    boundary: Option<&Curve<3>>,
) -> Result<MonotonicityReport> {
    let entropy_samples: Vec<(f64, f64)> = trace
        .samples
        .iter()
        .filter_map(|s| s.entropy.map(|e| (s.t, e)))
        .collect();
    if entropy_samples.len() < 3 {
        return Err(GeomError::Precondition(format!(
            "monotonicity audit needs ≥ 3 entropy samples, found {}",
            entropy_samples.len()
        )));
    }

    let mut worst_increase = f64::NEG_INFINITY;
    for pair in entropy_samples.windows(2) {
        let rel = pair[1].1 / pair[0].1 - 1.0;
        worst_increase = worst_increase.max(rel);
    }

    let vision = match boundary {
        Some(curve) => vision_number(curve, &VisionOptions::default())?.value,
        None => 0.0,
    };
    let t0 = trace.samples[0].t;
    let area0 = trace.samples[0].measure;
    let mut worst_excess = f64::NEG_INFINITY;
    for &(t, e) in &entropy_samples {
        if t <= t0 {
            continue; // the bound is vacuous at the initial time
        }
        let bound = area0 / (4.0 * std::f64::consts::PI * (t - t0)) + vision;
        worst_excess = worst_excess.max(e / bound - 1.0);
    }

    Ok(MonotonicityReport {
        entropy_ok: worst_increase <= AUDIT_REL_SLACK,
        worst_entropy_increase: worst_increase,
        bound_ok: worst_excess <= AUDIT_REL_SLACK,
        worst_bound_excess: worst_excess,
        vision,
        samples_checked: entropy_samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::mcf::mcf_run;
    use crate::flows::trace::FlowOptions;
    use crate::shapes;

    #[test]
    fn perturbed_disk_entropy_decreases_and_respects_the_bound() {
        let disk = shapes::perturbed_disk(1.0, 8, 32, 0.25);
        let boundary = disk.boundary_curve().unwrap();
        let opts = FlowOptions {
            snapshot_dt: Some(0.002),
            entropy_every: 2,
            ..Default::default()
        };
        let trace = mcf_run(&disk, 0.02, &opts).unwrap();
        let report = monotonicity_audit(&trace, Some(&boundary)).unwrap();
        assert!(report.samples_checked >= 3);
        assert!(
            report.entropy_ok,
            "entropy increased by {}",
            report.worst_entropy_increase
        );
        assert!(
            report.bound_ok,
            "bound violated by {}",
            report.worst_bound_excess
        );
        assert!((report.vision - 1.0).abs() < 1e-2, "vis(circle) = {}", report.vision);
    }

    #[test]
    fn audit_requires_enough_entropy_samples() {
        let disk = shapes::perturbed_disk(1.0, 6, 24, 0.1);
        let trace = mcf_run(&disk, 0.01, &FlowOptions::default()).unwrap();
        assert!(matches!(
            monotonicity_audit(&trace, None),
            Err(GeomError::Precondition(_))
        ));
    }
}
