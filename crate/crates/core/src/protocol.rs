//! Control protocols on a uniform time grid.
//!
//! A protocol holds the decay rate `γ_t` (and optionally the Lamb shift
//! `λ_t`) sampled at the `n + 1` nodes `t_k = k τ / n`. Admissibility is the
//! discrete statement `trapz(γ) = ln((1 + z0) / (1 + z_τ))`, which by the
//! exact `z` solution is equivalent to reaching `z_τ` from `z0`.

use serde::Serialize;

use crate::error::{QocError, Result};
use crate::quadrature::{cumulative_trapezoid, trapezoid};

/// Uniform grid `t_k = k τ / n`, `k = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    tau: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(tau: f64, n: usize) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(QocError::Config(format!("duration must be positive, got {tau}")));
        }
        if n < 2 {
            return Err(QocError::Config(format!("need at least 2 grid intervals, got {n}")));
        }
        Ok(Self { tau, n })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        self.n
    }

    /// Number of nodes, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.tau / self.n as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.tau * k as f64 / self.n as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    /// Samples `f(t_k)` at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.len()).map(|k| f(self.time(k))).collect()
    }
}

/// Sampled controls `γ_t` and `λ_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlProtocol {
    grid: TimeGrid,
    gamma: Vec<f64>,
    lambda: Vec<f64>,
}

impl ControlProtocol {
    /// Protocol with zero Lamb shift.
    pub fn new(grid: TimeGrid, gamma: Vec<f64>) -> Result<Self> {
        let lambda = vec![0.0; gamma.len()];
        Self::with_lamb_shift(grid, gamma, lambda)
    }

    pub fn with_lamb_shift(grid: TimeGrid, gamma: Vec<f64>, lambda: Vec<f64>) -> Result<Self> {
        if gamma.len() != grid.len() || lambda.len() != grid.len() {
            return Err(QocError::Config(format!(
                "grid has {} nodes but got {} decay and {} shift samples",
                grid.len(),
                gamma.len(),
                lambda.len()
            )));
        }
        if let Some(k) = gamma.iter().position(|g| !g.is_finite()) {
            return Err(QocError::Config(format!("decay rate at node {k} is not finite")));
        }
        if let Some(k) = lambda.iter().position(|l| !l.is_finite()) {
            return Err(QocError::Config(format!("lamb shift at node {k} is not finite")));
        }
        Ok(Self { grid, gamma, lambda })
    }

    /// Samples a closed-form decay rate on the grid.
    pub fn from_fn(grid: TimeGrid, gamma: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.sample(gamma))
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn tau(&self) -> f64 {
        self.grid.tau
    }

    /// Same grid and Lamb shift, new decay rate.
    pub fn with_gamma(&self, gamma: Vec<f64>) -> Result<Self> {
        Self::with_lamb_shift(self.grid, gamma, self.lambda.clone())
    }

    /// Cumulative integrals `(Γ_t, Λ_t)` with `Γ_0 = Λ_0 = 0`.
    pub fn cumulative_integral(&self) -> (Vec<f64>, Vec<f64>) {
        let h = self.grid.step();
        (cumulative_trapezoid(&self.gamma, h), cumulative_trapezoid(&self.lambda, h))
    }

    /// `Γ_τ`, the total integrated decay.
    pub fn total_decay(&self) -> f64 {
        trapezoid(&self.gamma, self.grid.step())
    }

    pub fn is_admissible(&self, target: &AdmissibilityTarget, tol: f64) -> Admissibility {
        let residual = (self.total_decay() - target.budget()).abs();
        Admissibility {
            residual,
            admissible: residual < tol,
            negative_samples: self.gamma.iter().filter(|g| **g < 0.0).count(),
        }
    }
}

/// Result of an admissibility test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Admissibility {
    pub residual: f64,
    pub admissible: bool,
    /// Nodes with `γ < 0`. Allowed, but worth knowing about.
    pub negative_samples: usize,
}

/// Fixed endpoints of the `z` coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibilityTarget {
    z0: f64,
    z_tau: f64,
}

impl Default for AdmissibilityTarget {
    /// Excited state to the maximally mixed state: one bit written.
    fn default() -> Self {
        Self { z0: 1.0, z_tau: 0.0 }
    }
}

impl AdmissibilityTarget {
    pub fn new(z0: f64, z_tau: f64) -> Result<Self> {
        if !(z_tau > -1.0 && z_tau <= z0 && z0 <= 1.0) {
            return Err(QocError::Config(format!(
                "endpoints must satisfy -1 < z_tau <= z0 <= 1, got z0 = {z0}, z_tau = {z_tau}"
            )));
        }
        Ok(Self { z0, z_tau })
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn z_tau(&self) -> f64 {
        self.z_tau
    }

    /// Required `Γ_τ = ln((1 + z0) / (1 + z_τ))`.
    pub fn budget(&self) -> f64 {
        ((1.0 + self.z0) / (1.0 + self.z_tau)).ln()
    }
}

/// `γ ≡ budget / τ`.
pub fn constant_guess(target: &AdmissibilityTarget, grid: TimeGrid) -> ControlProtocol {
    let rate = target.budget() / grid.tau();
    ControlProtocol::new(grid, vec![rate; grid.len()]).expect("constant protocol is finite")
}

/// Finite-width stand-in for the delta-kick control: `γ = A` on `[0, width)`
/// and zero afterwards, with `A` fixed so the trapezoidal integral equals the
/// budget exactly. A width equal to `τ` gives the constant protocol.
pub fn impulse_protocol(target: &AdmissibilityTarget, grid: TimeGrid, width: f64) -> Result<ControlProtocol> {
    let h = grid.step();
    let slack = 1e-12 * grid.tau();
    if !(width.is_finite() && width > 0.0) || width > grid.tau() + slack {
        return Err(QocError::Config(format!("impulse width must lie in (0, τ], got {width}")));
    }
    if width < 2.0 * h - slack {
        return Err(QocError::Resolution { width, min: 2.0 * h });
    }
    if width >= grid.tau() - slack {
        return Ok(constant_guess(target, grid));
    }
    let indicator = grid.sample(|t| if t < width - slack { 1.0 } else { 0.0 });
    let amplitude = target.budget() / trapezoid(&indicator, h);
    ControlProtocol::new(grid, indicator.into_iter().map(|s| s * amplitude).collect())
}
