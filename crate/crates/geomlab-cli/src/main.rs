//! `geomlab`: evaluate geometric functionals, run curvature flows, compute
//! the pushed-in-boundary link invariant, and deform curves to convex ones.
//!
//! Exit codes: 0 success, 1 domain error (bad geometry, failed
//! precondition), 2 usage error (unknown flag, bad value, missing input).

mod commands;
mod config;
mod verify;

use commands::CommandError;
use config::{RunConfig, UsageError};

const USAGE: &str = "\
usage: geomlab <command> [--key value]...

commands:
  tc          --curve FILE.csv                     total curvature (exterior angle sum)
  vision      --curve FILE.csv                     vision number report (CSV row)
  entropy     --mesh FILE.obj [--curve FILE.csv]   boundary entropy report (CSV row)
  link        --mesh FILE.obj [--epsilon E]        λ invariant, parity, Möbius verdict
  flow-curve  --curve FILE.csv --t-end T           curve-shortening flow
  flow-mesh   --mesh FILE.obj --t-end T            mean curvature flow, fixed boundary
  renorm-flow --mesh FILE.obj --t-end T            renormalized flow (shrinkers fixed)
  deform      --curve FILE.csv [--alpha A]         certified deformation to planar convex
  verify      [--suite fast|full]                  built-in invariant suite

common options:
  --config FILE      line-oriented `key = value` defaults (flags override)
  --out-dir DIR      write snapshots and CSV outputs here
  --seed N           randomized searches (default 42)
  --threads N        worker pool size (default 1; outputs are
                     byte-reproducible at --threads 1)
flow options:
  --dt-safety F --semi-implicit --snapshot-every T --entropy-every K
deform options:
  --alpha A --samples N --polygon-n N
search options:
  --budget N --restarts N
";

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(run(&args));
}

fn run(args: &[String]) -> i32 {
    let Some(command) = args.first() else {
        eprint!("{USAGE}");
        return 2;
    };
    if command == "--help" || command == "-h" || command == "help" {
        print!("{USAGE}");
        return 0;
    }
    let cfg = match RunConfig::from_args(&args[1..]) {
        Ok(cfg) => cfg,
        Err(UsageError(msg)) => {
            eprintln!("error (usage): {msg}");
            return 2;
        }
    };

    if command == "verify" {
        let suite = cfg.suite.clone().unwrap_or_else(|| "fast".to_string());
        let failures = verify::run(&suite, cfg.threads());
        if failures > 0 {
            eprintln!("{failures} check(s) failed");
            return 1;
        }
        return 0;
    }

    let result = match command.as_str() {
        "tc" => commands::tc(&cfg),
        "vision" => commands::vision(&cfg),
        "entropy" => commands::entropy_cmd(&cfg),
        "link" => commands::link(&cfg),
        "flow-curve" => commands::flow_curve(&cfg),
        "flow-mesh" => commands::flow_mesh(&cfg),
        "renorm-flow" => commands::renorm_flow(&cfg),
        "deform" => commands::deform(&cfg),
        other => {
            eprintln!("error (usage): unknown command {other:?}");
            eprint!("{USAGE}");
            return 2;
        }
    };

    match result {
        Ok(()) => 0,
        Err(CommandError::Usage(UsageError(msg))) => {
            eprintln!("error (usage): {msg}");
            2
        }
        Err(CommandError::Domain(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}
