//! Control Hamiltonians, costates and control gradients.
//!
//! The state equation is `ż = f(z, γ) = -γ(z + 1)` and each cost functional
//! `J = ∫ L(z, γ) dt` defines the control Hamiltonian `H = p f - L`. The
//! costate obeys `ṗ = -∂H/∂z` with `p_τ = 0`; ascending `H` along `∂H/∂γ`
//! descends `J`, since `δJ = -∫ (∂H/∂γ) δγ dt`.

use serde::Serialize;

use crate::error::{QocError, Result};
use crate::model::Trajectory;
use crate::protocol::ControlProtocol;
use crate::quadrature::trapezoid;

/// Which performance measure is being optimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CostFunctional {
    /// `∫ ż² dt = ∫ γ²(z+1)² dt`.
    Heating,
    /// `∫ γ²(1+z)² z² dt`, the squared rate of energy dispersion up to `(ħω₀)⁴/4`.
    Dispersion,
    /// `J = τ`; the Lagrangian is 1 per unit time.
    MinimalTime { tau: f64 },
    /// `-J_Q`: maximal evolution speed.
    Qsl,
}

impl CostFunctional {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Heating => "heating",
            Self::Dispersion => "dispersion",
            Self::MinimalTime { .. } => "minimal-time",
            Self::Qsl => "qsl",
        }
    }

    pub fn lagrangian(&self, z: f64, gamma: f64) -> f64 {
        let u = z + 1.0;
        match self {
            Self::Heating => gamma * gamma * u * u,
            Self::Dispersion => gamma * gamma * u * u * z * z,
            Self::MinimalTime { .. } => 1.0,
            Self::Qsl => -gamma * gamma * u * u,
        }
    }

    pub fn hamiltonian(&self, z: f64, p: f64, gamma: f64) -> f64 {
        let coupling = -gamma * p * (z + 1.0);
        match self {
            Self::MinimalTime { tau } => -tau + coupling,
            _ => coupling - self.lagrangian(z, gamma),
        }
    }

    /// `ṗ = -∂H/∂z`.
    pub fn costate_rhs(&self, z: f64, p: f64, gamma: f64) -> f64 {
        let u = z + 1.0;
        let g2 = gamma * gamma;
        let source = match self {
            Self::Heating => 2.0 * g2 * u,
            // ∂/∂z [(1+z)² z²] = 2(1+z)z(1+2z)
            Self::Dispersion => 2.0 * g2 * u * z * (1.0 + 2.0 * z),
            Self::MinimalTime { .. } => 0.0,
            Self::Qsl => -2.0 * g2 * u,
        };
        gamma * p + source
    }

    /// `∂H/∂γ`.
    pub fn control_gradient(&self, z: f64, p: f64, gamma: f64) -> f64 {
        let u = z + 1.0;
        let coupling = -p * u;
        match self {
            Self::Heating => coupling - 2.0 * gamma * u * u,
            Self::Dispersion => coupling - 2.0 * gamma * u * u * z * z,
            Self::MinimalTime { .. } => coupling,
            Self::Qsl => coupling + 2.0 * gamma * u * u,
        }
    }
}

/// Costate samples on the protocol grid; `p` at the last node is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CostateTrajectory {
    pub times: Vec<f64>,
    pub p: Vec<f64>,
}

fn check_grid(protocol: &ControlProtocol, z_traj: &Trajectory) -> Result<()> {
    if protocol.grid() != z_traj.grid() {
        return Err(QocError::Config(format!(
            "trajectory grid {:?} does not match protocol grid {:?}",
            z_traj.grid(),
            protocol.grid()
        )));
    }
    Ok(())
}

/// Integrates `ṗ = -∂H/∂z` backward from `p_τ = 0` with RK4.
///
/// Between nodes `γ` is linear and `z` is evaluated from the exact
/// exponential solution rather than interpolated.
pub fn solve_costate(
    functional: &CostFunctional,
    protocol: &ControlProtocol,
    z_traj: &Trajectory,
) -> Result<CostateTrajectory> {
    check_grid(protocol, z_traj)?;
    let grid = protocol.grid();
    let h = grid.step();
    let gamma = protocol.gamma();
    let (big_gamma, _) = protocol.cumulative_integral();
    let z = z_traj.z();
    let one_plus_z0 = 1.0 + z[0];

    let n = grid.intervals();
    let mut p = vec![0.0; n + 1];
    let mut acc = 0.0;
    for k in (0..n).rev() {
        let (g_lo, g_hi) = (gamma[k], gamma[k + 1]);
        let g_mid = 0.5 * (g_lo + g_hi);
        let z_mid = one_plus_z0 * (-(big_gamma[k] + 0.25 * h * (g_lo + g_mid))).exp() - 1.0;
        let rhs = |zz: f64, pp: f64, gg: f64| functional.costate_rhs(zz, pp, gg);
        let k1 = rhs(z[k + 1], acc, g_hi);
        let k2 = rhs(z_mid, acc - 0.5 * h * k1, g_mid);
        let k3 = rhs(z_mid, acc - 0.5 * h * k2, g_mid);
        let k4 = rhs(z[k], acc - h * k3, g_lo);
        acc -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        p[k] = acc;
    }
    Ok(CostateTrajectory { times: grid.times(), p })
}

/// Heating costate from its integral representation,
/// `p_t = -2(1 + z₀) e^{Γ_t} ∫_t^τ γ_s² e^{-2Γ_s} ds`.
///
/// The tail integral uses Simpson's rule on each interval with `γ` linear
/// between nodes, so `Γ` at the midpoint is exact. For `z₀ = 1` the
/// prefactor is the familiar `-4`.
pub fn costate_closed_form_heating(protocol: &ControlProtocol, z0: f64) -> CostateTrajectory {
    let grid = protocol.grid();
    let h = grid.step();
    let gamma = protocol.gamma();
    let (big_gamma, _) = protocol.cumulative_integral();
    let integrand = |g: f64, bg: f64| g * g * (-2.0 * bg).exp();
    let n = grid.intervals();
    let mut tail = vec![0.0; n + 1];
    for k in (0..n).rev() {
        let g_mid = 0.5 * (gamma[k] + gamma[k + 1]);
        let bg_mid = big_gamma[k] + 0.25 * h * (gamma[k] + g_mid);
        let lo = integrand(gamma[k], big_gamma[k]);
        let mid = integrand(g_mid, bg_mid);
        let hi = integrand(gamma[k + 1], big_gamma[k + 1]);
        tail[k] = tail[k + 1] + h / 6.0 * (lo + 4.0 * mid + hi);
    }
    let p = tail.iter().zip(&big_gamma).map(|(i, bg)| -2.0 * (1.0 + z0) * bg.exp() * i).collect();
    CostateTrajectory { times: grid.times(), p }
}

/// Trapezoidal quadrature of the Lagrangian.
pub fn evaluate_cost(
    functional: &CostFunctional,
    protocol: &ControlProtocol,
    z_traj: &Trajectory,
) -> Result<f64> {
    check_grid(protocol, z_traj)?;
    if let CostFunctional::MinimalTime { .. } = functional {
        return Ok(protocol.tau());
    }
    let lagrangian: Vec<f64> =
        z_traj.states().iter().zip(protocol.gamma()).map(|(s, g)| functional.lagrangian(s.z, *g)).collect();
    Ok(trapezoid(&lagrangian, protocol.grid().step()))
}

/// `∂H/∂γ` at every node.
pub fn control_gradient_series(
    functional: &CostFunctional,
    protocol: &ControlProtocol,
    z_traj: &Trajectory,
    costate: &CostateTrajectory,
) -> Vec<f64> {
    z_traj
        .states()
        .iter()
        .zip(&costate.p)
        .zip(protocol.gamma())
        .map(|((s, p), g)| functional.control_gradient(s.z, *p, *g))
        .collect()
}

/// `H` at every node.
pub fn hamiltonian_series(
    functional: &CostFunctional,
    protocol: &ControlProtocol,
    z_traj: &Trajectory,
    costate: &CostateTrajectory,
) -> Vec<f64> {
    z_traj
        .states()
        .iter()
        .zip(&costate.p)
        .zip(protocol.gamma())
        .map(|((s, p), g)| functional.hamiltonian(s.z, *p, *g))
        .collect()
}
