use serde::{Deserialize, Serialize};

use crate::physics::PhysicsParams;

use super::VariationalState;

/// Second-order expansions about `x = q` of the quantum potential, the trap
/// potential, the mean-field potential, and the phase. Index `k` is the
/// `k`-th derivative with respect to position at the centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoefficients {
    pub v_qu_0: f64,
    pub v_qu_1: f64,
    pub v_qu_2: f64,
    pub v_0: f64,
    pub v_1: f64,
    pub v_2: f64,
    pub vgp_0: f64,
    pub vgp_1: f64,
    pub vgp_2: f64,
    pub s_1: f64,
    pub s_2: f64,
}

/// Coefficients for the Gaussian state. The mean-field terms use the
/// second-order density expansion `ρ ≈ ρ_pk·(1 + (x-q)²/σ)` evaluated on
/// centre, where the exponential factor is 1.
pub fn taylor_coefficients(state: &VariationalState, params: &PhysicsParams) -> TaylorCoefficients {
    let m = params.mass;
    let hbar = params.hbar;
    let sigma = state.sigma;
    let w2 = params.omega_squared_at(state.t);
    let rho_pk = state.peak_density();
    TaylorCoefficients {
        v_qu_0: hbar * hbar / (2.0 * m * sigma),
        v_qu_1: 0.0,
        v_qu_2: -hbar * hbar / (m * sigma * sigma),
        v_0: 0.5 * m * w2 * state.q * state.q,
        v_1: m * w2 * state.q,
        v_2: m * w2,
        vgp_0: params.g * rho_pk,
        vgp_1: 0.0,
        vgp_2: 2.0 * params.g * rho_pk / sigma,
        s_1: m * state.q_dot(params) / hbar,
        s_2: m / hbar * state.sigma_dot / (2.0 * sigma),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::OmegaSquaredSchedule;

    fn st(q: f64, sigma: f64) -> VariationalState {
        VariationalState { t: 0.0, q, p: 0.0, sigma, sigma_dot: 0.0, s0: 0.0 }
    }

    #[test]
    fn quantum_potential_coefficients() {
        let c = taylor_coefficients(&st(0.0, 1.0), &PhysicsParams::default());
        assert_eq!(c.v_qu_0, 0.5);
        assert_eq!(c.v_qu_2, -1.0);
    }

    #[test]
    fn odd_coefficients_vanish() {
        let p = PhysicsParams::new(2.0, 0.5, -3.0, OmegaSquaredSchedule::constant(2.0));
        let c = taylor_coefficients(&st(1.7, 0.3), &p);
        assert_eq!(c.v_qu_1, 0.0);
        assert_eq!(c.vgp_1, 0.0);
    }

    #[test]
    fn trap_coefficients_match_finite_differences() {
        let p = PhysicsParams::new(1.0, 1.0, 0.0, OmegaSquaredSchedule::constant(4.0));
        let c = taylor_coefficients(&st(0.5, 1.0), &p);
        assert_eq!((c.v_0, c.v_1, c.v_2), (0.5, 2.0, 4.0));

        let v = |x: f64| 0.5 * 4.0 * x * x;
        let h = 1e-3;
        let d1 = (v(0.5 + h) - v(0.5 - h)) / (2.0 * h);
        let d2 = (v(0.5 + h) - 2.0 * v(0.5) + v(0.5 - h)) / (h * h);
        assert!((d1 - c.v_1).abs() / c.v_1 < 1e-6);
        assert!((d2 - c.v_2).abs() / c.v_2 < 1e-6);
    }

    #[test]
    fn mean_field_on_centre_value() {
        let p = PhysicsParams::new(1.0, 1.0, 2.0, OmegaSquaredSchedule::constant(1.0));
        let c = taylor_coefficients(&st(0.0, 1.0), &p);
        assert!((c.vgp_0 - 1.1283791670955126).abs() < 1e-15);
        assert!((c.vgp_2 - 2.0 * 1.1283791670955126).abs() < 1e-15);
    }
}
