//! Decay-rate protocols for a dissipative qubit.
//!
//! The qubit follows damped Jaynes-Cummings dynamics in which the decay rate
//! `γ_t` acts as the control. Writing one bit of information (`z: 1 → 0`)
//! constrains `∫γ dt = ln 2`; within that admissible set the crate finds
//! protocols that minimize the heating rate or the energy-dispersion rate by
//! a projected steepest descent on the Pontryagin control Hamiltonian, and
//! analyzes the speed-limit problem whose optimum is a delta kick.
//!
//! * [`model`]: Bloch dynamics, exact propagators and observables.
//! * [`protocol`]: sampled controls, quadrature and admissibility.
//! * [`pontryagin`]: Hamiltonians, costates and gradients per cost functional.
//! * [`descent`]: the constraint-preserving steepest descent.
//! * [`qsl`]: Bures angle, speed bound and the minimal-time certificate.
//! * [`optima`]: closed-form optima for the heating and dispersion costs.
//! * [`batch`]: rayon-backed batch evaluation.
//! * [`io`]: CSV interchange.

pub mod batch;
pub mod descent;
pub mod error;
pub mod io;
pub mod model;
pub mod optima;
pub mod pontryagin;
pub mod protocol;
pub mod qsl;
pub mod quadrature;

pub use descent::{optimize, DescentConfig, DescentReport, IterationRecord, Termination};
pub use error::{QocError, Result};
pub use model::{BlochState, PhysicsParams, Trajectory};
pub use pontryagin::{CostFunctional, CostateTrajectory};
pub use protocol::{AdmissibilityTarget, ControlProtocol, TimeGrid};
