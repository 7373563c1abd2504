//! Batch evaluation over independent protocols, widths or nodes.
//!
//! With the `rayon` feature (on by default) [`Execution::Parallel`] fans the
//! work out over the rayon pool; without it every call runs sequentially.
//! Each item is computed independently, so both modes return identical
//! results in the input order.

#[cfg(feature = "rayon")]
use rayon::prelude::*;
use serde::Serialize;

use crate::descent::{optimize, DescentConfig, DescentReport};
use crate::error::Result;
use crate::model::propagate_z;
use crate::pontryagin::{
    control_gradient_series, costate_closed_form_heating, evaluate_cost, solve_costate, CostFunctional,
};
use crate::protocol::{AdmissibilityTarget, ControlProtocol, TimeGrid};
use crate::qsl::{impulse_cost, ImpulseCost};
use crate::quadrature::trapezoid_weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

fn map_items<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "rayon")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Runs one descent per starting protocol.
pub fn optimize_many(
    functional: &CostFunctional,
    initials: &[ControlProtocol],
    target: &AdmissibilityTarget,
    config: &DescentConfig,
    exec: Execution,
) -> Vec<Result<DescentReport>> {
    map_items(initials, exec, |p| optimize(functional, p, target, config))
}

/// Heating cost of the finite-width impulse for each width.
pub fn impulse_sweep(
    target: &AdmissibilityTarget,
    grid: TimeGrid,
    widths: &[f64],
    exec: Execution,
) -> Result<Vec<ImpulseCost>> {
    map_items(widths, exec, |&w| impulse_cost(target, grid, w)).into_iter().collect()
}

/// Finite-difference slope of `J` against the adjoint prediction at one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientCheck {
    pub node: usize,
    /// `(J(γ + h e_k) − J(γ − h e_k)) / 2h`.
    pub finite_difference: f64,
    /// `−(∂H/∂γ)_k w_k` with `w_k` the trapezoid weight.
    pub adjoint: f64,
    pub relative_error: f64,
}

/// Compares the adjoint gradient with central differences of `J` at the
/// given nodes. `step` is the perturbation added to `γ_k`.
pub fn gradient_check(
    functional: &CostFunctional,
    protocol: &ControlProtocol,
    z0: f64,
    nodes: &[usize],
    step: f64,
    exec: Execution,
) -> Result<Vec<GradientCheck>> {
    let grid = protocol.grid();
    let traj = propagate_z(protocol, z0)?;
    let costate = solve_costate(functional, protocol, &traj)?;
    let grad = control_gradient_series(functional, protocol, &traj, &costate);

    let cost_with = |k: usize, delta: f64| -> Result<f64> {
        let mut gamma = protocol.gamma().to_vec();
        gamma[k] += delta;
        let p = protocol.with_gamma(gamma)?;
        let t = propagate_z(&p, z0)?;
        evaluate_cost(functional, &p, &t)
    };

    map_items(nodes, exec, |&k| {
        let fd = (cost_with(k, step)? - cost_with(k, -step)?) / (2.0 * step);
        let adjoint = -grad[k] * trapezoid_weight(k, grid.len(), grid.step());
        let relative_error = (fd - adjoint).abs() / adjoint.abs().max(f64::MIN_POSITIVE);
        Ok(GradientCheck { node: k, finite_difference: fd, adjoint, relative_error })
    })
    .into_iter()
    .collect()
}

/// Largest `|p_ode − p_closed|` of the heating costate for each protocol.
pub fn costate_oracle_gaps(protocols: &[ControlProtocol], z0: f64, exec: Execution) -> Result<Vec<f64>> {
    map_items(protocols, exec, |p| {
        let traj = propagate_z(p, z0)?;
        let ode = solve_costate(&CostFunctional::Heating, p, &traj)?;
        let closed = costate_closed_form_heating(p, z0);
        Ok(ode.p.iter().zip(&closed.p).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
    })
    .into_iter()
    .collect()
}
