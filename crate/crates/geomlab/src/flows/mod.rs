//! Time integrators for curve-shortening and mean-curvature flow with fixed
//! boundary, the renormalized flow whose fixed points are shrinkers,
//! singularity detection with parabolic rescaling, and trace audits.

pub mod audit;
pub mod csf;
pub mod mcf;
pub mod remesh;
pub mod rescale;
pub mod trace;

pub use audit::{monotonicity_audit, MonotonicityReport, AUDIT_REL_SLACK};
pub use csf::csf_run;
pub use mcf::{mcf_run, renormalized_mcf_run};
pub use rescale::{detect_and_rescale, ShrinkerCandidate};
pub use trace::{FlowOptions, FlowTrace, Sample, TerminationReason};
