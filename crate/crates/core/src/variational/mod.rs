//! Reduced Gaussian dynamics: the (q, σ, S₀) equations of motion, the
//! linear quantum velocity field with its Bohmian pathlines, the local
//! Taylor coefficients of the potentials, and reconstruction of the
//! explicit wave packet.
//!
//! The packet density is `ρ = (πσ)^(-1/2) exp(-(x-q)²/σ)`, so `σ` has
//! units of length² and the position variance is `σ/2`.

mod dynamics;
mod synth;
mod taylor;
mod trajectory;

pub use dynamics::{derivatives, propagate, step, Integrator, StateRates, StepOutcome};
pub use synth::{synthesize, COVERAGE_HALF_SPAN};
pub use taylor::{taylor_coefficients, TaylorCoefficients};
pub use trajectory::{bohmian_trajectories, velocity_field};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::physics::PhysicsParams;

/// Collapse threshold relative to the initial width.
pub const SIGMA_COLLAPSE_FRACTION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationalState {
    pub t: f64,
    /// Packet centre, ⟨x⟩.
    pub q: f64,
    /// Centre momentum `m·q̇`.
    pub p: f64,
    /// Width parameter (length²); variance is `sigma / 2`.
    pub sigma: f64,
    pub sigma_dot: f64,
    /// Phase at the packet centre.
    pub s0: f64,
}

impl VariationalState {
    /// State at `t = 0` from centre `x0`, velocity `v0`, width `sigma0` and
    /// width rate `sigma_dot0`. The initial phase is `m·v0·x0/ℏ`, so that
    /// `S(x, 0) = m·v0·x/ℏ + ...` is a plain momentum boost.
    pub fn from_initial_conditions(
        params: &PhysicsParams,
        x0: f64,
        v0: f64,
        sigma0: f64,
        sigma_dot0: f64,
    ) -> Self {
        VariationalState {
            t: 0.0,
            q: x0,
            p: params.mass * v0,
            sigma: sigma0,
            sigma_dot: sigma_dot0,
            s0: params.mass * v0 * x0 / params.hbar,
        }
    }

    /// Ground-state width `ℏ/(mω)` for a trap with `omega_sq > 0`.
    pub fn ground_width(params: &PhysicsParams, omega_sq: f64) -> f64 {
        params.hbar / (params.mass * omega_sq.sqrt())
    }

    pub fn is_finite(&self) -> bool {
        [self.t, self.q, self.p, self.sigma, self.sigma_dot, self.s0]
            .iter()
            .all(|v| v.is_finite())
    }

    pub fn q_dot(&self, params: &PhysicsParams) -> f64 {
        self.p / params.mass
    }

    /// Standard deviation of the position density.
    pub fn std_dev(&self) -> f64 {
        (0.5 * self.sigma).sqrt()
    }

    /// On-centre density `(πσ)^(-1/2)`.
    pub fn peak_density(&self) -> f64 {
        1.0 / (PI * self.sigma).sqrt()
    }

    pub fn density_at(&self, x: f64) -> f64 {
        let d = x - self.q;
        self.peak_density() * (-d * d / self.sigma).exp()
    }

    /// Quadratic phase `S₀ + (m q̇/ℏ)(x-q) + (m σ̇/(4ℏσ))(x-q)²`.
    pub fn phase_at(&self, params: &PhysicsParams, x: f64) -> f64 {
        let d = x - self.q;
        let a = params.mass / params.hbar;
        self.s0 + a * self.q_dot(params) * d + a * self.sigma_dot / (4.0 * self.sigma) * d * d
    }

    pub(crate) fn to_vector(self) -> [f64; 5] {
        [self.q, self.p, self.sigma, self.sigma_dot, self.s0]
    }

    pub(crate) fn from_vector(t: f64, y: &[f64; 5]) -> Self {
        VariationalState {
            t,
            q: y[0],
            p: y[1],
            sigma: y[2],
            sigma_dot: y[3],
            s0: y[4],
        }
    }
}

/// Coefficient of the `g·ρ/m` term in the width equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionVariant {
    pub c_int: f64,
}

impl Default for InteractionVariant {
    fn default() -> Self {
        InteractionVariant { c_int: 2.0 }
    }
}

impl InteractionVariant {
    pub fn new(c_int: f64) -> Self {
        InteractionVariant { c_int }
    }
}
