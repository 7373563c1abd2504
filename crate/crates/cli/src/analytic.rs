use anyhow::Result;
use clap::{Args, ValueEnum};
use qoc_core::model::propagate_z;
use qoc_core::optima::{dispersion_optimum, heating_optimum, AnalyticOptimum};
use qoc_core::pontryagin::{costate_closed_form_heating, solve_costate};
use qoc_core::protocol::constant_guess;
use qoc_core::qsl::minimal_time_certificate;
use qoc_core::{AdmissibilityTarget, CostFunctional, PhysicsParams, TimeGrid};
use serde::Serialize;

use crate::{output, OutDir, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    HeatingOptimum,
    DispersionOptimum,
    MinimalTime,
    CostateOracle,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyticArgs {
    #[arg(long, value_enum)]
    pub case: Case,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 1000)]
    pub grid_n: usize,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Serialize)]
struct OptimumSummary {
    case: Case,
    tau: f64,
    grid_n: usize,
    optimal_cost: f64,
    gamma_start: f64,
    gamma_end: f64,
    clamped_nodes: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct OracleSummary {
    case: Case,
    tau: f64,
    grid_n: usize,
    gamma: f64,
    p0_ode: f64,
    p0_closed_form: f64,
    max_abs_difference: f64,
}

fn write_optimum(args: &AnalyticArgs, opt: &AnalyticOptimum) -> Result<()> {
    let dir = &args.out.out;
    output::table(
        dir,
        "analytic.csv",
        &["t", "gamma", "z"],
        &[opt.times.clone(), opt.gamma.clone(), opt.z.clone()],
    )?;
    let summary = OptimumSummary {
        case: args.case,
        tau: args.tau,
        grid_n: args.grid_n,
        optimal_cost: opt.optimal_cost,
        gamma_start: opt.gamma[0],
        gamma_end: *opt.gamma.last().expect("grid has nodes"),
        clamped_nodes: opt.clamped.clone(),
    };
    output::json(dir, "analytic.json", &summary)?;
    println!("J* = {:.17e}", opt.optimal_cost);
    if !opt.clamped.is_empty() {
        println!("clamped nodes: {:?}", opt.clamped);
    }
    Ok(())
}

pub fn run(args: &AnalyticArgs) -> Result<Status> {
    let grid = TimeGrid::new(args.tau, args.grid_n)?;
    let target = AdmissibilityTarget::default();
    let dir = &args.out.out;
    output::prepare_dir(dir)?;
    match args.case {
        Case::HeatingOptimum => write_optimum(args, &heating_optimum(&target, grid))?,
        Case::DispersionOptimum => write_optimum(args, &dispersion_optimum(&target, grid)?)?,
        Case::MinimalTime => {
            let cert = minimal_time_certificate(&target, grid, &PhysicsParams::default())?;
            output::json(dir, "minimal_time.json", &cert)?;
            println!("tau* = {}, impulse weight = {:.17e}", cert.tau_star, cert.impulse_weight);
        }
        Case::CostateOracle => {
            let protocol = constant_guess(&target, grid);
            let traj = propagate_z(&protocol, target.z0())?;
            let ode = solve_costate(&CostFunctional::Heating, &protocol, &traj)?;
            let closed = costate_closed_form_heating(&protocol, target.z0());
            let gap = ode.p.iter().zip(&closed.p).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            output::table(
                dir,
                "costate.csv",
                &["t", "p_ode", "p_closed_form"],
                &[ode.times.clone(), ode.p.clone(), closed.p.clone()],
            )?;
            let summary = OracleSummary {
                case: args.case,
                tau: args.tau,
                grid_n: args.grid_n,
                gamma: protocol.gamma()[0],
                p0_ode: ode.p[0],
                p0_closed_form: closed.p[0],
                max_abs_difference: gap,
            };
            output::json(dir, "costate.json", &summary)?;
            println!("p0 = {:.17e}, max |dp| = {gap:.3e}", ode.p[0]);
        }
    }
    Ok(Status::Success)
}
