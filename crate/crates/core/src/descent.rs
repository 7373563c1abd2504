//! Modified steepest descent over the admissible set.
//!
//! Each iteration integrates the state forward, the costate backward, and
//! moves the control along `∂H/∂γ` with its time average removed:
//!
//! ```text
//! γ ← γ + ε (g − ḡ),   ḡ = (1/τ) trapz(g)
//! ```
//!
//! Subtracting the average keeps `trapz(γ)` unchanged, so every iterate stays
//! on the constraint surface. A step that raises the cost (or makes it
//! non-finite) is retried with `ε/2`; the reduced step size is kept for later
//! iterations.

use serde::Serialize;

use crate::error::{QocError, Result};
use crate::model::propagate_z;
use crate::pontryagin::{control_gradient_series, evaluate_cost, solve_costate, CostFunctional};
use crate::protocol::{AdmissibilityTarget, ControlProtocol};
use crate::quadrature::trapezoid;

/// Halvings tried per step before the step search reports a stall.
pub const MAX_HALVINGS: usize = 20;

/// Consecutive stalls tolerated before the run is abandoned.
pub const MAX_CONSECUTIVE_STALLS: usize = 3;

/// Admissibility tolerance demanded of the starting protocol and of every
/// accepted iterate.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Projection {
    /// Remove the time average of the gradient.
    MeanSubtract,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DescentConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub max_iter: usize,
    pub projection: Projection,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self { epsilon: 0.1, delta: 1e-5, max_iter: 10_000, projection: Projection::MeanSubtract }
    }
}

impl DescentConfig {
    pub fn new(epsilon: f64, delta: f64, max_iter: usize) -> Result<Self> {
        let cfg = Self { epsilon, delta, max_iter, projection: Projection::MeanSubtract };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(QocError::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(QocError::Config(format!("delta must be positive, got {}", self.delta)));
        }
        if self.max_iter == 0 {
            return Err(QocError::Config("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// One row of the optimization history. Row 0 is the initial protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub cost: f64,
    pub residual: f64,
    pub epsilon_used: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// `|J^{n+1} - J^n| <= δ`.
    CostConverged,
    /// The projected gradient vanished.
    Stationary,
    MaxIterations,
    /// Repeated step searches failed to lower the cost.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentReport {
    pub functional: CostFunctional,
    pub history: Vec<IterationRecord>,
    pub final_protocol: ControlProtocol,
    pub converged: bool,
    pub termination: Termination,
    /// Accepted steps; rejected trial steps are not counted.
    pub iterations: usize,
    pub stalls: usize,
}

impl DescentReport {
    pub fn initial_cost(&self) -> f64 {
        self.history[0].cost
    }

    pub fn final_cost(&self) -> f64 {
        self.history.last().expect("history is never empty").cost
    }

    pub fn admissibility_residuals(&self) -> Vec<f64> {
        self.history.iter().map(|r| r.residual).collect()
    }
}

/// `γ + ε (g − ḡ)` with `ḡ` the trapezoidal time average of `g`.
pub fn projected_update(
    protocol: &ControlProtocol,
    gradient: &[f64],
    epsilon: f64,
) -> Result<ControlProtocol> {
    let direction = projected_direction(protocol, gradient)?;
    let gamma = protocol.gamma().iter().zip(&direction).map(|(g, d)| g + epsilon * d).collect();
    protocol.with_gamma(gamma)
}

/// `g − ḡ`, the component of the gradient tangent to the constraint.
pub fn projected_direction(protocol: &ControlProtocol, gradient: &[f64]) -> Result<Vec<f64>> {
    let grid = protocol.grid();
    if gradient.len() != grid.len() {
        return Err(QocError::Config(format!(
            "gradient has {} samples, grid has {} nodes",
            gradient.len(),
            grid.len()
        )));
    }
    let mean = trapezoid(gradient, grid.step()) / grid.tau();
    Ok(gradient.iter().map(|g| g - mean).collect())
}

/// Cost of a protocol started from `z0`; non-finite inputs give `NaN`.
fn cost_of(functional: &CostFunctional, protocol: &ControlProtocol, z0: f64) -> Result<f64> {
    let traj = propagate_z(protocol, z0)?;
    evaluate_cost(functional, protocol, &traj)
}

/// An accepted step from [`adaptive_step_fallback`].
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptedStep {
    pub protocol: ControlProtocol,
    pub cost: f64,
    pub epsilon_used: f64,
    pub halvings: usize,
}

/// Tries `ε, ε/2, …` (at most [`MAX_HALVINGS`] halvings) until the projected
/// step lowers the cost below `current_cost` while staying admissible to
/// [`ADMISSIBILITY_TOL`].
///
/// Returns [`QocError::Stall`] when no trial qualifies and
/// [`QocError::Divergence`] when every trial cost was non-finite.
pub fn adaptive_step_fallback(
    functional: &CostFunctional,
    protocol: &ControlProtocol,
    gradient: &[f64],
    epsilon: f64,
    target: &AdmissibilityTarget,
    current_cost: f64,
) -> Result<AcceptedStep> {
    let direction = projected_direction(protocol, gradient)?;
    let mut eps = epsilon;
    let mut any_finite = false;
    for halvings in 0..=MAX_HALVINGS {
        let gamma: Vec<f64> = protocol.gamma().iter().zip(&direction).map(|(g, d)| g + eps * d).collect();
        if gamma.iter().all(|g| g.is_finite()) {
            let trial = protocol.with_gamma(gamma)?;
            let cost = cost_of(functional, &trial, target.z0())?;
            if cost.is_finite() {
                any_finite = true;
                // very large controls lose the constraint to rounding
                let admissible = trial.is_admissible(target, ADMISSIBILITY_TOL).admissible;
                if cost < current_cost && admissible {
                    return Ok(AcceptedStep { protocol: trial, cost, epsilon_used: eps, halvings });
                }
            }
        }
        if halvings < MAX_HALVINGS {
            eps *= 0.5;
        }
    }
    if any_finite {
        Err(QocError::Stall { halvings: MAX_HALVINGS, epsilon: eps })
    } else {
        Err(QocError::Divergence { iteration: 0, epsilon: eps })
    }
}

/// Runs the modified steepest descent from an admissible starting protocol.
pub fn optimize(
    functional: &CostFunctional,
    initial: &ControlProtocol,
    target: &AdmissibilityTarget,
    config: &DescentConfig,
) -> Result<DescentReport> {
    config.validate()?;
    let check = initial.is_admissible(target, ADMISSIBILITY_TOL);
    if !check.admissible {
        return Err(QocError::Inadmissible { residual: check.residual, tol: ADMISSIBILITY_TOL });
    }
    let z0 = target.z0();
    let budget = target.budget();

    let mut protocol = initial.clone();
    let mut cost = cost_of(functional, &protocol, z0)?;
    if !cost.is_finite() {
        return Err(QocError::Divergence { iteration: 0, epsilon: config.epsilon });
    }
    let mut history = vec![IterationRecord {
        iter: 0,
        cost,
        residual: (protocol.total_decay() - budget).abs(),
        epsilon_used: 0.0,
    }];

    let mut epsilon = config.epsilon;
    let mut iterations = 0;
    let mut stalls = 0;
    let mut consecutive_stalls = 0;
    let mut termination = Termination::MaxIterations;

    while iterations < config.max_iter {
        let traj = propagate_z(&protocol, z0)?;
        let costate = solve_costate(functional, &protocol, &traj)?;
        let gradient = control_gradient_series(functional, &protocol, &traj, &costate);

        if gradient.iter().any(|g| !g.is_finite()) {
            return Err(QocError::Divergence { iteration: iterations + 1, epsilon });
        }
        let direction = projected_direction(&protocol, &gradient)?;
        let scale = gradient.iter().fold(1.0f64, |m, g| m.max(g.abs()));
        if direction.iter().all(|d| d.abs() <= 1e-14 * scale) {
            termination = Termination::Stationary;
            break;
        }

        match adaptive_step_fallback(functional, &protocol, &gradient, epsilon, target, cost) {
            Ok(step) => {
                consecutive_stalls = 0;
                iterations += 1;
                epsilon = step.epsilon_used;
                let change = (step.cost - cost).abs();
                protocol = step.protocol;
                cost = step.cost;
                history.push(IterationRecord {
                    iter: iterations,
                    cost,
                    residual: (protocol.total_decay() - budget).abs(),
                    epsilon_used: epsilon,
                });
                if change <= config.delta {
                    termination = Termination::CostConverged;
                    break;
                }
            }
            Err(QocError::Stall { epsilon: reached, .. }) => {
                stalls += 1;
                consecutive_stalls += 1;
                epsilon = reached * 0.5;
                if consecutive_stalls >= MAX_CONSECUTIVE_STALLS {
                    termination = Termination::Stalled;
                    break;
                }
            }
            Err(QocError::Divergence { epsilon, .. }) => {
                return Err(QocError::Divergence { iteration: iterations + 1, epsilon });
            }
            Err(e) => return Err(e),
        }
    }

    let converged = matches!(termination, Termination::CostConverged | Termination::Stationary);
    Ok(DescentReport {
        functional: *functional,
        history,
        final_protocol: protocol,
        converged,
        termination,
        iterations,
        stalls,
    })
}
