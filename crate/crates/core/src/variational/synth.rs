use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Grid, WaveField};
use crate::physics::PhysicsParams;

use super::VariationalState;

/// Minimum grid half-span around the centre, in standard deviations.
pub const COVERAGE_HALF_SPAN: f64 = 4.0;

/// Samples the explicit Gaussian wave packet
///
/// ```text
/// ψ(x) = (πσ)^(-1/4) exp[(i m σ̇/(4ℏσ) - 1/(2σ))(x-q)² + i(m q̇/ℏ)(x-q) + i S₀]
/// ```
///
/// on `grid`. `S₀` already carries the initial boost phase and the
/// accumulated centre phase.
pub fn synthesize(state: &VariationalState, params: &PhysicsParams, grid: &Grid) -> Result<WaveField> {
    if !state.is_finite() || !(state.sigma > 0.0) {
        return Err(Error::Precondition(format!("invalid state {state:?}")));
    }
    let reach = COVERAGE_HALF_SPAN * state.std_dev();
    if grid.x_min() > state.q - reach || grid.x_max() < state.q + reach {
        return Err(Error::Precondition(format!(
            "grid [{}, {}) does not cover q ± {} std devs = [{}, {}]",
            grid.x_min(),
            grid.x_max(),
            COVERAGE_HALF_SPAN,
            state.q - reach,
            state.q + reach
        )));
    }
    let m_over_hbar = params.mass / params.hbar;
    let quad = Complex64::new(
        -1.0 / (2.0 * state.sigma),
        m_over_hbar * state.sigma_dot / (4.0 * state.sigma),
    );
    let k_centre = m_over_hbar * state.q_dot(params);
    let amplitude = (PI * state.sigma).powf(-0.25);
    WaveField::from_fn(*grid, state.t, |x| {
        let d = x - state.q;
        let exponent = quad * (d * d) + Complex64::new(0.0, k_centre * d + state.s0);
        amplitude * exponent.exp()
    })
}
