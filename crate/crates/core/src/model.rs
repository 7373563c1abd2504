//! Bloch-vector dynamics of the damped Jaynes-Cummings qubit.
//!
//! With the cavity in its vacuum state the reduced qubit dynamics are
//!
//! ```text
//! ẋ = -(γ/2) x - (λ/2 + ω₀) y
//! ẏ =  (λ/2 + ω₀) x - (γ/2) y
//! ż = -γ (z + 1)
//! ```
//!
//! and are solved exactly in terms of `Γ_t = ∫γ` and `Λ_t = ∫λ`:
//! `z_t = (1 + z₀) e^{-Γ_t} - 1` and
//! `(x + iy)_t = e^{-Γ_t/2} e^{i(ω₀t + Λ_t/2)} (x + iy)_0`.
//! The exact forms are the production path. The RK4 integrators below exist
//! to cross-check them.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{QocError, Result};
use crate::protocol::{ControlProtocol, TimeGrid};

/// Slack allowed on `|r| <= 1` and `|z| <= 1`.
pub const BLOCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicsParams {
    omega0: f64,
    hbar: f64,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        Self { omega0: 1.0, hbar: 1.0 }
    }
}

impl PhysicsParams {
    pub fn new(omega0: f64, hbar: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(QocError::Config(format!("omega0 must be positive, got {omega0}")));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(QocError::Config(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { omega0, hbar })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Level splitting `ħω₀`.
    pub fn splitting(&self) -> f64 {
        self.hbar * self.omega0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochState {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let s = Self { x, y, z };
        let r = s.radius();
        if r.is_nan() || r > 1.0 + BLOCH_TOL {
            return Err(QocError::Domain { what: "Bloch radius", value: r });
        }
        Ok(s)
    }

    /// State on the z axis.
    pub fn polar(z: f64) -> Result<Self> {
        Self::new(0.0, 0.0, z)
    }

    pub fn excited() -> Self {
        Self { x: 0.0, y: 0.0, z: 1.0 }
    }

    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn transverse(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_pure(&self) -> bool {
        (self.radius() - 1.0).abs() <= BLOCH_TOL
    }
}

/// States sampled on a protocol's grid, together with the decay rate that
/// generated them (needed for rates such as `ż = -γ(z+1)`).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: TimeGrid,
    states: Vec<BlochState>,
    gamma: Vec<f64>,
}

impl Trajectory {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }

    pub fn states(&self) -> &[BlochState] {
        &self.states
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn z(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.z).collect()
    }

    pub fn initial(&self) -> BlochState {
        self.states[0]
    }

    pub fn last(&self) -> BlochState {
        *self.states.last().expect("trajectory has at least three nodes")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `ż = -γ(z + 1)` at every node.
    pub fn z_rate(&self) -> Vec<f64> {
        self.states.iter().zip(&self.gamma).map(|(s, g)| -g * (s.z + 1.0)).collect()
    }
}

/// `z_t = z₀ e^{-Γ_t} + (e^{-Γ_t} - 1)` on the protocol grid.
pub fn propagate_z(protocol: &ControlProtocol, z0: f64) -> Result<Trajectory> {
    if z0.is_nan() || z0.abs() > 1.0 + BLOCH_TOL {
        return Err(QocError::Domain { what: "z0", value: z0 });
    }
    let (big_gamma, _) = protocol.cumulative_integral();
    let states = big_gamma
        .iter()
        .map(|g| {
            let decay = (-g).exp();
            BlochState { x: 0.0, y: 0.0, z: z0 * decay + (decay - 1.0) }
        })
        .collect();
    Ok(Trajectory { grid: protocol.grid(), states, gamma: protocol.gamma().to_vec() })
}

/// Full Bloch vector from the closed-form solution.
pub fn propagate_bloch_exact(
    protocol: &ControlProtocol,
    s0: BlochState,
    params: &PhysicsParams,
) -> Trajectory {
    let grid = protocol.grid();
    let (big_gamma, big_lambda) = protocol.cumulative_integral();
    let w0 = Complex64::new(s0.x, s0.y);
    let states = (0..grid.len())
        .map(|k| {
            let phase = params.omega0 * grid.time(k) + 0.5 * big_lambda[k];
            let w = w0 * Complex64::from_polar((-0.5 * big_gamma[k]).exp(), phase);
            let decay = (-big_gamma[k]).exp();
            BlochState { x: w.re, y: w.im, z: s0.z * decay + (decay - 1.0) }
        })
        .collect();
    Trajectory { grid, states, gamma: protocol.gamma().to_vec() }
}

fn bloch_rhs(s: [f64; 3], gamma: f64, lambda: f64, omega0: f64) -> [f64; 3] {
    let rot = 0.5 * lambda + omega0;
    [-0.5 * gamma * s[0] - rot * s[1], rot * s[0] - 0.5 * gamma * s[1], -gamma * (s[2] + 1.0)]
}

fn axpy(a: f64, x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    [y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2]]
}

/// Fixed-step RK4 on the Bloch equations with piecewise-linear controls.
pub fn propagate_bloch(protocol: &ControlProtocol, s0: BlochState, params: &PhysicsParams) -> Trajectory {
    let grid = protocol.grid();
    let h = grid.step();
    let (gamma, lambda) = (protocol.gamma(), protocol.lambda());
    let mut s = [s0.x, s0.y, s0.z];
    let mut states = Vec::with_capacity(grid.len());
    states.push(s0);
    for k in 0..grid.intervals() {
        let (g0, g1) = (gamma[k], gamma[k + 1]);
        let (l0, l1) = (lambda[k], lambda[k + 1]);
        let (gm, lm) = (0.5 * (g0 + g1), 0.5 * (l0 + l1));
        let k1 = bloch_rhs(s, g0, l0, params.omega0);
        let k2 = bloch_rhs(axpy(0.5 * h, k1, s), gm, lm, params.omega0);
        let k3 = bloch_rhs(axpy(0.5 * h, k2, s), gm, lm, params.omega0);
        let k4 = bloch_rhs(axpy(h, k3, s), g1, l1, params.omega0);
        for i in 0..3 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        states.push(BlochState { x: s[0], y: s[1], z: s[2] });
    }
    Trajectory { grid, states, gamma: gamma.to_vec() }
}

/// Instantaneous heat exchange `Q̇ = (ħω₀/2) ż` with `ż` taken from the state
/// equation at each node.
pub fn heating_rate(traj: &Trajectory, params: &PhysicsParams) -> Vec<f64> {
    let scale = 0.5 * params.splitting();
    traj.z_rate().into_iter().map(|dz| scale * dz).collect()
}

/// Energy variance `(ħω₀)²/4 (1 - z²)`.
pub fn energy_variance(z: f64, params: &PhysicsParams) -> Result<f64> {
    if z.is_nan() || z.abs() > 1.0 + BLOCH_TOL {
        return Err(QocError::Domain { what: "z", value: z });
    }
    let e = params.splitting();
    Ok((0.25 * e * e * (1.0 - z * z)).max(0.0))
}

/// Von Neumann entropy in nats from the eigenvalues `(1 ± r)/2`.
pub fn von_neumann_entropy(state: &BlochState) -> Result<f64> {
    let r = state.radius();
    if r.is_nan() || r > 1.0 + BLOCH_TOL {
        return Err(QocError::Domain { what: "Bloch radius", value: r });
    }
    let r = r.min(1.0);
    let term = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    Ok(term(0.5 * (1.0 + r)) + term(0.5 * (1.0 - r)))
}

/// Complex cavity amplitude `c_t` sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityAmplitudeSeries {
    grid: TimeGrid,
    values: Vec<Complex64>,
}

impl CavityAmplitudeSeries {
    pub fn new(grid: TimeGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(QocError::Config(format!(
                "grid has {} nodes but got {} amplitude samples",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, c: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|k| c(grid.time(k))).collect();
        Self { grid, values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Decay rate and Lamb shift from the cavity amplitude:
/// `γ = -2 Re(ċ/c)`, `λ = -2 Im(ċ/c)`.
///
/// `ċ` uses second-order central differences in the interior and first-order
/// one-sided differences at the two ends.
pub fn rates_from_amplitude(series: &CavityAmplitudeSeries) -> Result<ControlProtocol> {
    let c = &series.values;
    if let Some(index) = c.iter().position(|v| v.norm() == 0.0) {
        return Err(QocError::Singularity { index });
    }
    let h = series.grid.step();
    let last = c.len() - 1;
    let mut gamma = Vec::with_capacity(c.len());
    let mut lambda = Vec::with_capacity(c.len());
    for k in 0..=last {
        let dc = match k {
            0 => (c[1] - c[0]) / h,
            k if k == last => (c[last] - c[last - 1]) / h,
            k => (c[k + 1] - c[k - 1]) / (2.0 * h),
        };
        let ratio = dc / c[k];
        gamma.push(-2.0 * ratio.re);
        lambda.push(-2.0 * ratio.im);
    }
    ControlProtocol::with_lamb_shift(series.grid, gamma, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn grid(tau: f64, n: usize) -> TimeGrid {
        TimeGrid::new(tau, n).unwrap()
    }

    fn constant(tau: f64, n: usize, g: f64) -> ControlProtocol {
        ControlProtocol::new(grid(tau, n), vec![g; n + 1]).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(PhysicsParams::new(0.0, 1.0).is_err());
        assert!(PhysicsParams::new(1.0, -1.0).is_err());
        assert_eq!(PhysicsParams::new(2.0, 1.0).unwrap().splitting(), 2.0);
    }

    #[test]
    fn bloch_state_validation() {
        assert!(BlochState::new(1.0, 0.0, 0.1).is_err());
        assert!(BlochState::new(0.6, 0.0, 0.8).unwrap().is_pure());
        assert!(!BlochState::new(0.0, 0.0, 0.5).unwrap().is_pure());
    }

    #[test]
    fn z_constant_ln2_reaches_zero() {
        let traj = propagate_z(&constant(1.0, 1000, LN_2), 1.0).unwrap();
        for (t, s) in traj.times().iter().zip(traj.states()) {
            assert!((s.z - (2.0 * (-t * LN_2).exp() - 1.0)).abs() < 1e-12);
        }
        assert!(traj.last().z.abs() < 1e-12);
    }

    #[test]
    fn z_frozen_without_decay() {
        let traj = propagate_z(&constant(1.0, 50, 0.0), 0.3).unwrap();
        assert!(traj.z().iter().all(|z| *z == 0.3));
    }

    #[test]
    fn z_linear_for_hyperbolic_rate() {
        let p = ControlProtocol::from_fn(grid(1.0, 1000), |t| 1.0 / (2.0 - t)).unwrap();
        let traj = propagate_z(&p, 1.0).unwrap();
        for (t, z) in traj.times().iter().zip(traj.z()) {
            assert!((z - (1.0 - t)).abs() < 1e-6, "t = {t}: {z}");
        }
    }

    #[test]
    fn z_rejects_out_of_range_start() {
        assert!(propagate_z(&constant(1.0, 10, 1.0), 1.5).is_err());
    }

    #[test]
    fn ground_state_is_fixed_point() {
        let p = ControlProtocol::from_fn(grid(1.0, 100), |t| 3.0 + (5.0 * t).sin()).unwrap();
        let traj = propagate_z(&p, -1.0).unwrap();
        assert!(traj.z().iter().all(|z| *z == -1.0));
        assert!(traj.z_rate().iter().all(|dz| *dz == 0.0));
    }

    #[test]
    fn polar_start_has_no_transverse_motion() {
        let p = ControlProtocol::from_fn(grid(1.0, 200), |t| 1.0 + t).unwrap();
        let params = PhysicsParams::new(3.0, 1.0).unwrap();
        for traj in [
            propagate_bloch(&p, BlochState::excited(), &params),
            propagate_bloch_exact(&p, BlochState::excited(), &params),
        ] {
            assert!(traj.states().iter().all(|s| s.x == 0.0 && s.y == 0.0));
        }
    }

    #[test]
    fn free_precession_full_turn() {
        let params = PhysicsParams::new(2.0 * PI, 1.0).unwrap();
        let s0 = BlochState::new(1.0, 0.0, 0.0).unwrap();
        let traj = propagate_bloch(&constant(1.0, 1000, 0.0), s0, &params);
        let end = traj.last();
        assert!((end.x - 1.0).abs() < 1e-6 && end.y.abs() < 1e-6, "{end:?}");
        // a quarter turn lands on +y
        let quarter = traj.states()[250];
        assert!(quarter.x.abs() < 1e-6 && (quarter.y - 1.0).abs() < 1e-6);
    }

    #[test]
    fn transverse_decay_factor() {
        let params = PhysicsParams::default();
        let s0 = BlochState::new(1.0, 0.0, 0.0).unwrap();
        let traj = propagate_bloch(&constant(1.0, 1000, 2.0 * LN_2), s0, &params);
        assert!((traj.last().transverse() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn exact_and_rk4_bloch_agree_with_lamb_shift() {
        let g = grid(2.0, 2000);
        let gamma = g.sample(|t| 0.8 + 0.5 * (1.3 * t).cos());
        let lambda = g.sample(|t| 0.4 * t - 0.3);
        let p = ControlProtocol::with_lamb_shift(g, gamma, lambda).unwrap();
        let params = PhysicsParams::new(1.7, 1.0).unwrap();
        let s0 = BlochState::new(0.3, -0.5, 0.6).unwrap();
        let a = propagate_bloch(&p, s0, &params);
        let b = propagate_bloch_exact(&p, s0, &params);
        for (u, v) in a.states().iter().zip(b.states()) {
            assert!((u.x - v.x).abs() < 1e-9);
            assert!((u.y - v.y).abs() < 1e-9);
            assert!((u.z - v.z).abs() < 1e-9);
        }
    }

    #[test]
    fn heating_rate_examples() {
        let two = PhysicsParams::new(2.0, 1.0).unwrap();
        let frozen = propagate_z(&constant(1.0, 10, 0.0), 1.0).unwrap();
        assert!(heating_rate(&frozen, &two).iter().all(|q| *q == 0.0));

        let p = ControlProtocol::from_fn(grid(1.0, 1000), |t| 1.0 / (2.0 - t)).unwrap();
        let q = heating_rate(&propagate_z(&p, 1.0).unwrap(), &two);
        assert!(q.iter().all(|v| (v + 1.0).abs() < 1e-6));

        let q = heating_rate(&propagate_z(&constant(1.0, 100, LN_2), 1.0).unwrap(), &two);
        assert!((q[0] + 2.0 * LN_2).abs() < 1e-12);
        assert!((q[0] + 1.3863).abs() < 1e-4);
    }

    #[test]
    fn energy_variance_examples() {
        let p = PhysicsParams::default();
        let two = PhysicsParams::new(2.0, 1.0).unwrap();
        assert_eq!(energy_variance(1.0, &p).unwrap(), 0.0);
        assert_eq!(energy_variance(-1.0, &p).unwrap(), 0.0);
        assert_eq!(energy_variance(0.0, &two).unwrap(), 1.0);
        assert!(energy_variance(1.1, &p).is_err());
    }

    #[test]
    fn entropy_examples() {
        let s = |z| von_neumann_entropy(&BlochState::polar(z).unwrap()).unwrap();
        assert_eq!(s(1.0), 0.0);
        assert_eq!(s(0.0), LN_2);
        let expected = -0.75 * 0.75f64.ln() - 0.25 * 0.25f64.ln();
        assert!((s(0.5) - expected).abs() < 1e-15);
        assert!((s(0.5) - 0.5623).abs() < 1e-4);
        let outside = BlochState { x: 0.8, y: 0.8, z: 0.0 };
        assert!(von_neumann_entropy(&outside).is_err());
    }

    #[test]
    fn rates_from_decaying_amplitude() {
        let series =
            CavityAmplitudeSeries::from_fn(grid(2.0, 2000), |t| Complex64::new((-0.5 * t).exp(), 0.0));
        let p = rates_from_amplitude(&series).unwrap();
        let last = p.gamma().len() - 1;
        for (k, (g, l)) in p.gamma().iter().zip(p.lambda()).enumerate() {
            // central: O(h²); one-sided ends: O(h)
            let tol = if k == 0 || k == last { 1e-3 } else { 1e-6 };
            assert!((g - 1.0).abs() < tol, "k = {k}: {g}");
            assert!(l.abs() < 1e-12);
        }
    }

    #[test]
    fn rates_from_rotating_amplitude() {
        let series = CavityAmplitudeSeries::from_fn(grid(2.0, 2000), |t| Complex64::from_polar(1.0, -t));
        let p = rates_from_amplitude(&series).unwrap();
        let last = p.gamma().len() - 1;
        for (k, (g, l)) in p.gamma().iter().zip(p.lambda()).enumerate() {
            let tol = if k == 0 || k == last { 1e-3 } else { 1e-6 };
            assert!(g.abs() < tol, "k = {k}: {g}");
            assert!((l - 2.0).abs() < tol, "k = {k}: {l}");
        }
    }

    #[test]
    fn rates_from_constant_amplitude() {
        let series = CavityAmplitudeSeries::from_fn(grid(1.0, 10), |_| Complex64::new(1.0, 0.0));
        let p = rates_from_amplitude(&series).unwrap();
        assert!(p.gamma().iter().chain(p.lambda()).all(|v| *v == 0.0));
    }

    #[test]
    fn rates_zero_amplitude_is_singular() {
        let series = CavityAmplitudeSeries::from_fn(grid(1.0, 10), |t| Complex64::new(0.5 - t, 0.0));
        assert_eq!(rates_from_amplitude(&series).unwrap_err(), QocError::Singularity { index: 5 });
    }
}
