use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use qoc_core::descent::ADMISSIBILITY_TOL;
use qoc_core::io::read_protocol_file;
use qoc_core::model::propagate_z;
use qoc_core::protocol::constant_guess;
use qoc_core::{
    optimize, AdmissibilityTarget, ControlProtocol, CostFunctional, DescentConfig, PhysicsParams, QocError,
    Termination, TimeGrid,
};
use serde::Serialize;

use crate::{output, OutDir, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    Heating,
    Dispersion,
    Qsl,
}

impl From<Functional> for CostFunctional {
    fn from(f: Functional) -> Self {
        match f {
            Functional::Heating => CostFunctional::Heating,
            Functional::Dispersion => CostFunctional::Dispersion,
            Functional::Qsl => CostFunctional::Qsl,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_enum)]
    pub functional: Functional,
    /// Protocol duration; taken from the file when `--init` names one.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Number of grid intervals; taken from the file when `--init` names one.
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Convergence threshold on the cost change between accepted steps.
    #[arg(long, default_value_t = 1e-5)]
    pub delta: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// `constant` or the path of a protocol CSV.
    #[arg(long, default_value = "constant")]
    pub init: String,
    #[command(flatten)]
    pub out: OutDir,
}

const DEFAULT_TAU: f64 = 1.0;
const DEFAULT_GRID_N: usize = 1000;

/// Every flag with its effective value, enough to rerun the command.
#[derive(Debug, Serialize)]
struct ConfigEcho<'a> {
    command: &'static str,
    functional: Functional,
    tau: f64,
    grid_n: usize,
    epsilon: f64,
    delta: f64,
    max_iter: usize,
    init: &'a str,
    out: &'a PathBuf,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    functional: &'static str,
    initial_cost: f64,
    final_cost: f64,
    iterations: usize,
    converged: bool,
    termination: Termination,
    stalls: usize,
    final_residual: f64,
    config: ConfigEcho<'a>,
}

fn initial_protocol(args: &OptimizeArgs, target: &AdmissibilityTarget) -> Result<ControlProtocol> {
    if args.init == "constant" {
        let grid = TimeGrid::new(args.tau.unwrap_or(DEFAULT_TAU), args.grid_n.unwrap_or(DEFAULT_GRID_N))?;
        return Ok(constant_guess(target, grid));
    }
    let p = read_protocol_file(args.init.as_ref())
        .with_context(|| format!("reading initial protocol {}", args.init))?;
    if let Some(tau) = args.tau {
        if (tau - p.tau()).abs() > 1e-12 * tau.abs().max(1.0) {
            bail!("--tau {tau} disagrees with the duration {} of {}", p.tau(), args.init);
        }
    }
    if let Some(n) = args.grid_n {
        if n != p.grid().intervals() {
            bail!("--grid-n {n} disagrees with the {} intervals of {}", p.grid().intervals(), args.init);
        }
    }
    Ok(p)
}

pub fn run(args: &OptimizeArgs) -> Result<Status> {
    let target = AdmissibilityTarget::default();
    let config = DescentConfig::new(args.epsilon, args.delta, args.max_iter)?;
    let initial = initial_protocol(args, &target)?;
    let adm = initial.is_admissible(&target, ADMISSIBILITY_TOL);
    if !adm.admissible {
        bail!(
            "initial protocol is inadmissible: residual {:e} exceeds {:e}",
            adm.residual,
            ADMISSIBILITY_TOL
        );
    }

    let functional = CostFunctional::from(args.functional);
    let report = match optimize(&functional, &initial, &target, &config) {
        Ok(r) => r,
        Err(e @ QocError::Divergence { .. }) => {
            eprintln!("optimization diverged: {e}");
            return Ok(Status::NotConverged);
        }
        Err(e) => return Err(e.into()),
    };

    let dir = &args.out.out;
    output::prepare_dir(dir)?;
    let protocol = &report.final_protocol;
    output::protocol(dir, protocol)?;
    let traj = propagate_z(protocol, target.z0())?;
    output::trajectory(dir, &traj, &PhysicsParams::default(), false)?;
    output::history(dir, &report.history)?;
    let h = &report.history;
    let final_residual = h.last().map_or(adm.residual, |r| r.residual);
    let summary = Summary {
        functional: functional.name(),
        initial_cost: report.initial_cost(),
        final_cost: report.final_cost(),
        iterations: report.iterations,
        converged: report.converged,
        termination: report.termination,
        stalls: report.stalls,
        final_residual,
        config: ConfigEcho {
            command: "optimize",
            functional: args.functional,
            tau: protocol.tau(),
            grid_n: protocol.grid().intervals(),
            epsilon: args.epsilon,
            delta: args.delta,
            max_iter: args.max_iter,
            init: &args.init,
            out: dir,
        },
    };
    output::json(dir, "summary.json", &summary)?;

    println!(
        "{}: J {:.6e} -> {:.6e} in {} iterations ({:?}), residual {:.2e}",
        summary.functional,
        summary.initial_cost,
        summary.final_cost,
        summary.iterations,
        summary.termination,
        final_residual
    );
    Ok(if report.converged { Status::Success } else { Status::NotConverged })
}
