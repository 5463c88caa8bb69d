//! Subcommand implementations. Each reads validated inputs, runs the
//! library operation, writes CSV/OBJ outputs, and prints a short summary.

use std::path::Path;

use geomlab::deform::{deform_to_convex, DeformOptions};
use geomlab::flows::mcf::{mcf_run, renormalized_mcf_run};
use geomlab::flows::{csf_run, detect_and_rescale, monotonicity_audit, FlowOptions, FlowTrace, TerminationReason};
use geomlab::functionals::{entropy, vision_number, EntropyOptions, VisionOptions};
use geomlab::geom::io;
use geomlab::linking::{default_push_depth, is_generalized_mobius, lambda_invariant_at, LinkingOptions};
use geomlab::{Curve, GeomError, TriMesh};

use crate::config::{RunConfig, UsageError};

pub enum CommandError {
    Usage(UsageError),
    Domain(GeomError),
}

impl From<UsageError> for CommandError {
    fn from(e: UsageError) -> Self {
        CommandError::Usage(e)
    }
}

impl From<GeomError> for CommandError {
    fn from(e: GeomError) -> Self {
        CommandError::Domain(e)
    }
}

type CmdResult = Result<(), CommandError>;

fn need_curve(cfg: &RunConfig) -> Result<Curve<3>, CommandError> {
    let path = cfg
        .curve
        .as_ref()
        .ok_or_else(|| UsageError("missing --curve <file.csv>".into()))?;
    Ok(io::load_curve(path)?)
}

fn need_mesh(cfg: &RunConfig) -> Result<TriMesh, CommandError> {
    let path = cfg
        .mesh
        .as_ref()
        .ok_or_else(|| UsageError("missing --mesh <file.obj>".into()))?;
    Ok(io::load_mesh(path)?)
}

fn flow_options(cfg: &RunConfig) -> FlowOptions {
    FlowOptions {
        dt_safety: cfg.dt_safety,
        semi_implicit: cfg.semi_implicit.unwrap_or(false),
        snapshot_dt: cfg.snapshot_every,
        entropy_every: cfg.entropy_every.unwrap_or(0),
        seed: cfg.seed(),
        ..Default::default()
    }
}

pub fn tc(cfg: &RunConfig) -> CmdResult {
    let curve = need_curve(cfg)?;
    let value = curve.exterior_angle_sum()?;
    println!("{value:.5}");
    Ok(())
}

pub fn vision(cfg: &RunConfig) -> CmdResult {
    let curve = need_curve(cfg)?;
    let opts = VisionOptions {
        seed: cfg.seed(),
        restarts: cfg.restarts.unwrap_or(5),
        max_evaluations: cfg.budget.unwrap_or(10_000),
        ..Default::default()
    };
    let report = vision_number(&curve, &opts)?;
    println!("# {}", io::ARTIFACT_VERSION);
    println!("name,value,vx,vy,vz,lambda,error,evals");
    println!("{}", report.csv_row("vision"));
    Ok(())
}

pub fn entropy_cmd(cfg: &RunConfig) -> CmdResult {
    let mesh = need_mesh(cfg)?;
    // a supplied curve is explicit boundary data; otherwise use the mesh's
    // single boundary loop when it has one
    let boundary = match &cfg.curve {
        Some(path) => Some(io::load_curve(path)?),
        None => {
            if mesh.boundary_loops().len() == 1 {
                Some(mesh.boundary_curve()?)
            } else {
                None
            }
        }
    };
    let opts = EntropyOptions {
        seed: cfg.seed(),
        restarts: cfg.restarts.unwrap_or(5),
        max_evaluations: cfg.budget.unwrap_or(10_000),
        check_boundary_match: cfg.curve.is_none(),
    };
    let report = entropy(&mesh, boundary.as_ref(), &opts)?;
    println!("# {}", io::ARTIFACT_VERSION);
    println!("name,value,vx,vy,vz,lambda,error,evals");
    println!("{}", report.csv_row("entropy"));
    Ok(())
}

pub fn link(cfg: &RunConfig) -> CmdResult {
    let mesh = need_mesh(cfg)?;
    let opts = LinkingOptions {
        seed: cfg.seed(),
        ..Default::default()
    };
    let epsilon = match cfg.epsilon {
        Some(e) => e,
        None => default_push_depth(&mesh)?,
    };
    let lambda = lambda_invariant_at(&mesh, epsilon, &opts)?;
    let generalized = is_generalized_mobius(&mesh, &opts)?;
    println!("# {}", io::ARTIFACT_VERSION);
    println!("lambda,lambda_half_odd,generalized_mobius");
    let half_odd = lambda % 2 == 0 && (lambda / 2).rem_euclid(2) == 1;
    println!("{lambda},{half_odd},{generalized}");
    Ok(())
}

fn write_trace_outputs<S>(
    trace: &FlowTrace<S>,
    out_dir: &Path,
    write_state: impl Fn(&S, &Path) -> geomlab::Result<()>,
    state_ext: &str,
) -> geomlab::Result<()> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("diagnostics.csv"), trace.diagnostics_csv())?;
    for (k, sample) in trace.samples.iter().enumerate() {
        let name = format!("snapshot_{k:05}.{state_ext}");
        write_state(&sample.state, &out_dir.join(name))?;
    }
    Ok(())
}

fn describe_termination(t: TerminationReason) -> &'static str {
    match t {
        TerminationReason::TimeBudget => "time budget reached",
        TerminationReason::Extinction => "curve reached extinction size",
        TerminationReason::Stationary => "stationary (max curvature below tolerance)",
        TerminationReason::Singularity => "singularity flag",
        TerminationReason::SimplicityLost => "curve stopped being simple",
        TerminationReason::NumericalFailure => "numerical failure; last good state kept",
    }
}

pub fn flow_curve(cfg: &RunConfig) -> CmdResult {
    let curve = need_curve(cfg)?;
    let t_end = cfg
        .t_end
        .ok_or_else(|| UsageError("missing --t-end <time>".into()))?;
    let trace = csf_run(&curve, t_end, &flow_options(cfg))?;
    if let Some(dir) = &cfg.out_dir {
        write_trace_outputs(&trace, dir, |c, p| io::save_curve(c, p), "csv")?;
    }
    let last = trace.last();
    println!(
        "flow-curve: {} samples, {} steps, t = {:.6}, length {:.6}, tc {:.6} ({})",
        trace.samples.len(),
        trace.steps,
        last.t,
        last.measure,
        last.total_curvature.unwrap_or(f64::NAN),
        describe_termination(trace.termination),
    );
    Ok(())
}

fn mesh_flow(cfg: &RunConfig, renormalized: bool) -> CmdResult {
    let mesh = need_mesh(cfg)?;
    let t_end = cfg
        .t_end
        .ok_or_else(|| UsageError("missing --t-end <time>".into()))?;
    let opts = flow_options(cfg);
    let trace = if renormalized {
        renormalized_mcf_run(&mesh, t_end, &opts)?
    } else {
        mcf_run(&mesh, t_end, &opts)?
    };
    if let Some(dir) = &cfg.out_dir {
        write_trace_outputs(&trace, dir, |m, p| io::save_mesh(m, p), "obj")?;
    }
    let last = trace.last();
    println!(
        "{}: {} samples, {} steps, t = {:.6}, area {:.6}, max|H| {:.4} ({})",
        if renormalized { "renorm-flow" } else { "flow-mesh" },
        trace.samples.len(),
        trace.steps,
        last.t,
        last.measure,
        last.max_curvature,
        describe_termination(trace.termination),
    );
    if trace.termination == TerminationReason::Singularity {
        match detect_and_rescale(&trace) {
            Ok(candidate) => {
                let (p, t_sing) = candidate.spacetime_center;
                println!(
                    "blow-up: p = ({:.5}, {:.5}, {:.5}), T = {:.6}, rescale {:.4}, \
                     shrinker residual sup {:.4}, boundary flag {}",
                    p.x(),
                    p.y(),
                    p.z(),
                    t_sing,
                    candidate.rescale_factor,
                    candidate.residual_sup,
                    candidate.boundary_flag,
                );
                if let Some(dir) = &cfg.out_dir {
                    io::save_mesh(&candidate.mesh, &dir.join("shrinker_candidate.obj"))?;
                }
            }
            Err(e) => println!("blow-up analysis failed: {e}"),
        }
    }
    let entropy_samples = trace.samples.iter().filter(|s| s.entropy.is_some()).count();
    if entropy_samples >= 3 && !renormalized {
        let boundary = if mesh.boundary_loops().len() == 1 {
            Some(mesh.boundary_curve()?)
        } else {
            None
        };
        let report = monotonicity_audit(&trace, boundary.as_ref())?;
        println!(
            "entropy audit: monotone {} (worst increase {:+.4e}), \
             area/vision bound {} (worst excess {:+.4e}), vis {:.4}, {} samples",
            report.entropy_ok,
            report.worst_entropy_increase,
            report.bound_ok,
            report.worst_bound_excess,
            report.vision,
            report.samples_checked,
        );
    }
    Ok(())
}

pub fn flow_mesh(cfg: &RunConfig) -> CmdResult {
    mesh_flow(cfg, false)
}

pub fn renorm_flow(cfg: &RunConfig) -> CmdResult {
    mesh_flow(cfg, true)
}

pub fn deform(cfg: &RunConfig) -> CmdResult {
    let curve = need_curve(cfg)?;
    let alpha = cfg.alpha.unwrap_or(3.6 * std::f64::consts::PI);
    let opts = DeformOptions {
        polygon_n: cfg.polygon_n.unwrap_or(16),
        samples_per_stage: cfg.samples.unwrap_or(50),
        seed: cfg.seed(),
        ..Default::default()
    };
    match deform_to_convex(&curve, alpha, &opts) {
        Ok(path) => {
            if let Some(dir) = &cfg.out_dir {
                std::fs::create_dir_all(dir).map_err(GeomError::from)?;
                std::fs::write(dir.join("path_audit.csv"), path.audit_csv())
                    .map_err(GeomError::from)?;
                for (k, sample) in path.samples.iter().enumerate() {
                    io::save_curve(&sample.curve, &dir.join(format!("sample_{k:04}.csv")))?;
                }
            }
            let tcs = path.tc_series();
            println!(
                "deform: certified path with {} samples, tc {:.6} -> {:.6}",
                path.samples.len(),
                tcs.first().unwrap(),
                tcs.last().unwrap(),
            );
            Ok(())
        }
        Err(abort) => {
            // keep the partial path for inspection, then fail
            if let Some(dir) = &cfg.out_dir {
                let _ = std::fs::create_dir_all(dir);
                let _ = std::fs::write(dir.join("path_audit.csv"), abort.partial.audit_csv());
                for (k, sample) in abort.partial.samples.iter().enumerate() {
                    let _ =
                        io::save_curve(&sample.curve, &dir.join(format!("sample_{k:04}.csv")));
                }
                eprintln!(
                    "partial path ({} samples) written to {}",
                    abort.partial.samples.len(),
                    dir.display()
                );
            }
            Err(CommandError::Domain(abort.into()))
        }
    }
}
