//! Quantum-speed-limit diagnostics for states on the z axis.

use serde::Serialize;

use crate::error::{QocError, Result};
use crate::model::{propagate_z, PhysicsParams, Trajectory, BLOCH_TOL};
use crate::pontryagin::{evaluate_cost, solve_costate, CostFunctional};
use crate::protocol::{impulse_protocol, AdmissibilityTarget, ControlProtocol, TimeGrid};

/// Slack on the speed bound and on the tightness test.
pub const SPEED_BOUND_TOL: f64 = 1e-12;

/// Impulse widths used to exhibit the divergence of the heating cost.
pub const CERTIFICATE_WIDTHS: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

/// Bures angle between the excited state and `(0, 0, z)`:
/// `arccos √((1 + z)/2)`.
pub fn bures_angle(z: f64) -> Result<f64> {
    if z.is_nan() || z.abs() > 1.0 + BLOCH_TOL {
        return Err(QocError::Domain { what: "z", value: z });
    }
    let overlap = (0.5 * (1.0 + z)).clamp(0.0, 1.0);
    Ok(overlap.sqrt().acos())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedBoundSample {
    pub t: f64,
    /// `2 cos ℓ sin ℓ ℓ̇ = -ż/2`.
    pub lhs: f64,
    /// `‖ρ̇‖_op = |ż|/2`.
    pub rhs: f64,
    pub tight: bool,
}

/// Both sides of the geometric speed bound at every node, with
/// `ż = -γ(z + 1)` taken from the state equation.
pub fn speed_bound_series(protocol: &ControlProtocol, z_traj: &Trajectory) -> Result<Vec<SpeedBoundSample>> {
    if protocol.grid() != z_traj.grid() {
        return Err(QocError::Config("trajectory and protocol grids differ".into()));
    }
    Ok(z_traj
        .times()
        .into_iter()
        .zip(z_traj.states())
        .zip(protocol.gamma())
        .map(|((t, s), g)| {
            let dz = -g * (s.z + 1.0);
            let lhs = -0.5 * dz;
            let rhs = 0.5 * dz.abs();
            SpeedBoundSample { t, lhs, rhs, tight: (rhs - lhs).abs() < SPEED_BOUND_TOL }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpulseCost {
    pub width: f64,
    pub heating_cost: f64,
}

/// Analytic minimal-time result plus a numerical look at its impulse limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalTimeCertificate {
    pub tau_star: f64,
    /// Weight of the delta kick, `γ* = w δ(t)`; equals the decay budget.
    pub impulse_weight: f64,
    /// The costate `p ≡ 0` for every control.
    pub costate_identically_zero: bool,
    /// Largest `|p|` seen when solving the minimal-time costate for the
    /// impulse family.
    pub max_costate_magnitude: f64,
    /// `"unbounded-impulse"`: the heat rate at the optimum is a delta.
    pub heating: &'static str,
    /// Amplitude `(ħω₀/2) w` multiplying `(Θ(-t) + 1) δ(t)`.
    pub heating_impulse_amplitude: f64,
    /// Heaviside factor just before and just after the kick.
    pub heaviside_weight_before: f64,
    pub heaviside_weight_after: f64,
    pub impulse_costs: Vec<ImpulseCost>,
    /// Least-squares slope of `ln J_Q` against `ln w`; `-1` is pure `1/w`.
    pub log_log_slope: f64,
    pub strictly_increasing: bool,
}

/// Heating cost of the finite-width impulse of each width.
pub fn impulse_costs(
    target: &AdmissibilityTarget,
    grid: TimeGrid,
    widths: &[f64],
) -> Result<Vec<ImpulseCost>> {
    widths.iter().map(|&w| impulse_cost(target, grid, w)).collect()
}

pub(crate) fn impulse_cost(target: &AdmissibilityTarget, grid: TimeGrid, width: f64) -> Result<ImpulseCost> {
    let protocol = impulse_protocol(target, grid, width)?;
    let traj = propagate_z(&protocol, target.z0())?;
    let heating_cost = evaluate_cost(&CostFunctional::Heating, &protocol, &traj)?;
    Ok(ImpulseCost { width, heating_cost })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn minimal_time_certificate(
    target: &AdmissibilityTarget,
    grid: TimeGrid,
    params: &PhysicsParams,
) -> Result<MinimalTimeCertificate> {
    let costs = impulse_costs(target, grid, &CERTIFICATE_WIDTHS)?;

    let functional = CostFunctional::MinimalTime { tau: grid.tau() };
    let mut max_p = 0.0f64;
    for &w in &CERTIFICATE_WIDTHS {
        let protocol = impulse_protocol(target, grid, w)?;
        let traj = propagate_z(&protocol, target.z0())?;
        let costate = solve_costate(&functional, &protocol, &traj)?;
        max_p = costate.p.iter().fold(max_p, |m, p| m.max(p.abs()));
    }

    // widths are listed from wide to narrow
    let strictly_increasing = costs.windows(2).all(|w| w[1].heating_cost > w[0].heating_cost);
    let pts: Vec<(f64, f64)> = costs.iter().map(|c| (c.width, c.heating_cost)).collect();
    Ok(MinimalTimeCertificate {
        tau_star: 0.0,
        impulse_weight: target.budget(),
        costate_identically_zero: max_p == 0.0,
        max_costate_magnitude: max_p,
        heating: "unbounded-impulse",
        heating_impulse_amplitude: 0.5 * params.splitting() * target.budget(),
        heaviside_weight_before: 2.0,
        heaviside_weight_after: 1.0,
        log_log_slope: log_log_slope(&pts),
        strictly_increasing,
        impulse_costs: costs,
    })
}
