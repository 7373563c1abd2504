//! Closed-form optima used as references.
//!
//! Heating: `J = ∫ ż² dt` is minimized by a straight line in `z`.
//! Dispersion: `J = ∫ ż² z² dt = ∫ (d(z²)/dt)² / 4 dt` is minimized by a
//! straight line in `z²`. The control follows from `γ = -ż / (1 + z)`.

use serde::Serialize;

use crate::error::{QocError, Result};
use crate::protocol::{AdmissibilityTarget, ControlProtocol, TimeGrid};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticOptimum {
    pub times: Vec<f64>,
    pub gamma: Vec<f64>,
    pub z: Vec<f64>,
    pub optimal_cost: f64,
    /// Nodes where the exact control is infinite and a finite stand-in was
    /// written instead.
    pub clamped: Vec<usize>,
}

impl AnalyticOptimum {
    pub fn protocol(&self, grid: TimeGrid) -> Result<ControlProtocol> {
        ControlProtocol::new(grid, self.gamma.clone())
    }
}

/// `z*(t) = z0 + (z_τ - z0) t/τ`, `J* = (z0 - z_τ)²/τ`.
pub fn heating_optimum(target: &AdmissibilityTarget, grid: TimeGrid) -> AnalyticOptimum {
    let tau = grid.tau();
    let (z0, z1) = (target.z0(), target.z_tau());
    let slope = (z1 - z0) / tau;
    let times = grid.times();
    let z: Vec<f64> = times.iter().map(|t| z0 + slope * t).collect();
    let gamma = z.iter().map(|zz| -slope / (1.0 + zz)).collect();
    AnalyticOptimum { times, gamma, z, optimal_cost: (z0 - z1).powi(2) / tau, clamped: vec![] }
}

/// `z*(t)² = z0² + (z_τ² - z0²) t/τ`, `J* = (z0² - z_τ²)²/(4τ)`.
///
/// Needs `0 <= z_τ <= z0`. When `z_τ = 0` the control diverges at `t = τ`;
/// the last node then carries the value that reproduces the exact integral
/// of `γ*` over the final interval, and is listed in `clamped`.
pub fn dispersion_optimum(target: &AdmissibilityTarget, grid: TimeGrid) -> Result<AnalyticOptimum> {
    let tau = grid.tau();
    let (z0, z1) = (target.z0(), target.z_tau());
    if z1 < 0.0 {
        return Err(QocError::Config(format!("dispersion optimum needs a non-negative final z, got {z1}")));
    }
    let du = (z1 * z1 - z0 * z0) / tau;
    let times = grid.times();
    let z: Vec<f64> = times.iter().map(|t| (z0 * z0 + du * t).max(0.0).sqrt()).collect();
    let mut gamma: Vec<f64> = z.iter().map(|zz| -du / (2.0 * zz * (1.0 + zz))).collect();
    let mut clamped = vec![];
    let last = grid.intervals();
    if !gamma[last].is_finite() {
        let big_gamma = |zz: f64| ((1.0 + z0) / (1.0 + zz)).ln();
        let tail = big_gamma(z[last]) - big_gamma(z[last - 1]);
        gamma[last] = 2.0 * tail / grid.step() - gamma[last - 1];
        clamped.push(last);
    }
    let optimal_cost = du * du * tau / 4.0;
    Ok(AnalyticOptimum { times, gamma, z, optimal_cost, clamped })
}
