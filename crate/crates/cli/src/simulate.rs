use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use qoc_core::descent::ADMISSIBILITY_TOL;
use qoc_core::io::read_protocol_file;
use qoc_core::model::{propagate_bloch_exact, propagate_z};
use qoc_core::{AdmissibilityTarget, BlochState, PhysicsParams};

use crate::{output, OutDir, Status};

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Protocol CSV with header `t,gamma` or `t,gamma,lambda`.
    #[arg(long)]
    pub protocol: PathBuf,
    /// Propagate the full Bloch vector and add `x,y` columns.
    #[arg(long)]
    pub bloch: bool,
    #[arg(long, default_value_t = 0.0, requires = "bloch")]
    pub x0: f64,
    #[arg(long, default_value_t = 0.0, requires = "bloch")]
    pub y0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub z0: f64,
    /// Qubit frequency `ω₀` (with `ħ = 1`).
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
    #[command(flatten)]
    pub out: OutDir,
}

pub fn run(args: &SimulateArgs) -> Result<Status> {
    let protocol =
        read_protocol_file(&args.protocol).with_context(|| format!("reading {}", args.protocol.display()))?;
    let params = PhysicsParams::new(args.omega0, 1.0)?;
    let traj = if args.bloch {
        let s0 = BlochState::new(args.x0, args.y0, args.z0)?;
        propagate_bloch_exact(&protocol, s0, &params)
    } else {
        propagate_z(&protocol, args.z0)?
    };

    let dir = &args.out.out;
    output::prepare_dir(dir)?;
    let path = output::trajectory(dir, &traj, &params, args.bloch)?;

    println!("final z: {:.17e}", traj.last().z);
    match AdmissibilityTarget::new(args.z0, 0.0) {
        Ok(target) => {
            let adm = protocol.is_admissible(&target, ADMISSIBILITY_TOL);
            println!(
                "admissibility residual: {:.6e} ({})",
                adm.residual,
                if adm.admissible { "admissible" } else { "inadmissible" }
            );
        }
        Err(_) => println!("admissibility residual: undefined for z0 = {}", args.z0),
    }
    println!("wrote {}", path.display());
    Ok(Status::Success)
}
