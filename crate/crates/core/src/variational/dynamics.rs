use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode;
use crate::physics::PhysicsParams;

use super::{InteractionVariant, VariationalState, SIGMA_COLLAPSE_FRACTION};

/// Time derivatives of the five dynamical fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRates {
    pub q_dot: f64,
    pub p_dot: f64,
    pub sigma_dot: f64,
    pub sigma_ddot: f64,
    pub s0_dot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Integrator {
    Rk4,
    /// Adaptive Dormand-Prince 5(4) with relative tolerance `tol`.
    Rk45 { tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: VariationalState,
    pub dt_taken: f64,
    /// Suggested next step (equals `dt_taken` for RK4).
    pub dt_next: f64,
}

/// Right-hand side of the reduced system:
///
/// ```text
/// q̇  = p/m
/// ṗ  = -m ω² q
/// σ̈  = σ̇²/(2σ) + 2ℏ²/(m²σ) - 2ω²σ - 2 c_int g ρ_pk / m
/// Ṡ₀ = [½ m q̇² - ½ m ω² q² - ℏ²/(2mσ) - g ρ_pk] / ℏ
/// ```
///
/// with `ρ_pk = (πσ)^(-1/2)`.
pub fn derivatives(
    state: &VariationalState,
    params: &PhysicsParams,
    variant: InteractionVariant,
) -> Result<StateRates> {
    let rates = rates_at(state.t, &state.to_vector(), params, variant);
    let all_finite = [
        rates.q_dot,
        rates.p_dot,
        rates.sigma_dot,
        rates.sigma_ddot,
        rates.s0_dot,
    ]
    .iter()
    .all(|v| v.is_finite());
    if all_finite {
        Ok(rates)
    } else {
        Err(Error::NumericalFailure {
            t: state.t,
            reason: format!("non-finite derivative at state {state:?}"),
        })
    }
}

fn rates_at(t: f64, y: &[f64; 5], params: &PhysicsParams, variant: InteractionVariant) -> StateRates {
    let [q, p, sigma, sigma_dot, _] = *y;
    let m = params.mass;
    let hbar = params.hbar;
    let w2 = params.omega_squared_at(t);
    let q_dot = p / m;
    let rho_pk = 1.0 / (std::f64::consts::PI * sigma).sqrt();
    let sigma_ddot = sigma_dot * sigma_dot / (2.0 * sigma) + 2.0 * hbar * hbar / (m * m * sigma)
        - 2.0 * w2 * sigma
        - 2.0 * variant.c_int * params.g * rho_pk / m;
    let s0_dot = (0.5 * m * q_dot * q_dot
        - 0.5 * m * w2 * q * q
        - hbar * hbar / (2.0 * m * sigma)
        - params.g * rho_pk)
        / hbar;
    StateRates {
        q_dot,
        p_dot: -m * w2 * q,
        sigma_dot,
        sigma_ddot,
        s0_dot,
    }
}

fn vector_field<'a>(
    params: &'a PhysicsParams,
    variant: InteractionVariant,
) -> impl FnMut(f64, &[f64; 5]) -> Result<[f64; 5]> + 'a {
    move |t, y| {
        if !(y[2] > 0.0) {
            return Err(Error::NumericalFailure {
                t,
                reason: format!("width parameter sigma = {} is not positive", y[2]),
            });
        }
        let r = rates_at(t, y, params, variant);
        let out = [r.q_dot, r.p_dot, r.sigma_dot, r.sigma_ddot, r.s0_dot];
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(Error::NumericalFailure {
                t,
                reason: "non-finite derivative".into(),
            })
        }
    }
}

fn check_state(state: &VariationalState, sigma_min: f64) -> Result<()> {
    if !state.is_finite() {
        return Err(Error::NumericalFailure {
            t: state.t,
            reason: format!("non-finite state {state:?}"),
        });
    }
    if state.sigma <= sigma_min {
        return Err(Error::NumericalFailure {
            t: state.t,
            reason: format!(
                "width collapsed: sigma = {:e} <= threshold {:e}",
                state.sigma, sigma_min
            ),
        });
    }
    Ok(())
}

/// Advances the state by one step. For RK4 the step is exactly `dt`; for
/// RK45 `dt` is the first trial and the step is retried with smaller sizes
/// until the error estimate passes.
pub fn step(
    state: &VariationalState,
    params: &PhysicsParams,
    variant: InteractionVariant,
    dt: f64,
    method: Integrator,
) -> Result<StepOutcome> {
    step_with_floor(state, params, variant, dt, method, 0.0)
}

fn step_with_floor(
    state: &VariationalState,
    params: &PhysicsParams,
    variant: InteractionVariant,
    dt: f64,
    method: Integrator,
    sigma_min: f64,
) -> Result<StepOutcome> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Precondition(format!("step size must be > 0, got {dt}")));
    }
    check_state(state, sigma_min)?;
    let mut f = vector_field(params, variant);
    let y = state.to_vector();
    match method {
        Integrator::Rk4 => {
            let y1 = ode::rk4_step(&mut f, state.t, &y, dt)?;
            let next = VariationalState::from_vector(state.t + dt, &y1);
            check_state(&next, sigma_min)?;
            Ok(StepOutcome {
                state: next,
                dt_taken: dt,
                dt_next: dt,
            })
        }
        Integrator::Rk45 { tol } => {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::Precondition(format!("rk45 tolerance must be > 0, got {tol}")));
            }
            let mut h = dt;
            let h_floor = 1e-14 * (1.0 + state.t.abs());
            loop {
                // a trial that drives sigma negative is treated as a rejected step
                let trial = ode::dopri5_trial(&mut f, state.t, &y, h, tol);
                let (y1, err) = match trial {
                    Ok(v) => v,
                    Err(_) => (y, f64::INFINITY),
                };
                if err <= 1.0 {
                    let next = VariationalState::from_vector(state.t + h, &y1);
                    check_state(&next, sigma_min)?;
                    return Ok(StepOutcome {
                        state: next,
                        dt_taken: h,
                        dt_next: h * ode::dopri5_factor(err),
                    });
                }
                h *= if err.is_finite() { ode::dopri5_factor(err) } else { 0.25 };
                if h < h_floor {
                    return Err(Error::NumericalFailure {
                        t: state.t,
                        reason: format!("adaptive step size underflow (h = {h:e})"),
                    });
                }
            }
        }
    }
}

/// Integrates from `init` to `t_final`, returning every `output_every`-th
/// state plus the first and last.
///
/// Fixed-step runs place step `i` at `init.t + i·dt`, shortening only the
/// final step so the series ends exactly at `t_final`. On failure the
/// error carries the last good state.
pub fn propagate(
    init: &VariationalState,
    params: &PhysicsParams,
    variant: InteractionVariant,
    t_final: f64,
    dt: f64,
    method: Integrator,
    output_every: usize,
) -> Result<Vec<VariationalState>> {
    if !(t_final > init.t) {
        return Err(Error::Precondition(format!(
            "t_final = {t_final} must exceed the initial time {}",
            init.t
        )));
    }
    if output_every == 0 {
        return Err(Error::Precondition("output_every must be >= 1".into()));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Precondition(format!("step size must be > 0, got {dt}")));
    }
    let sigma_min = SIGMA_COLLAPSE_FRACTION * init.sigma;
    check_state(init, sigma_min)?;

    let fail = |last: &VariationalState, e: Error| match e {
        Error::NumericalFailure { t, reason } => Error::PropagationFailed {
            last_good: Box::new(*last),
            t,
            reason,
        },
        other => other,
    };

    let mut out = vec![*init];
    let mut state = *init;
    match method {
        Integrator::Rk4 => {
            let span = t_final - init.t;
            let n_steps = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
            for i in 0..n_steps {
                let t_next = if i + 1 == n_steps {
                    t_final
                } else {
                    init.t + (i + 1) as f64 * dt
                };
                let h = t_next - state.t;
                let mut next = step_with_floor(&state, params, variant, h, method, sigma_min)
                    .map_err(|e| fail(&state, e))?
                    .state;
                next.t = t_next;
                state = next;
                if (i + 1) % output_every == 0 || i + 1 == n_steps {
                    out.push(state);
                }
            }
        }
        Integrator::Rk45 { .. } => {
            let mut h = dt;
            let mut count = 0usize;
            while state.t < t_final {
                let remaining = t_final - state.t;
                let last = h >= remaining;
                let trial = if last { remaining } else { h };
                let o = step_with_floor(&state, params, variant, trial, method, sigma_min)
                    .map_err(|e| fail(&state, e))?;
                let landed = last && o.dt_taken == trial;
                state = o.state;
                if landed {
                    state.t = t_final;
                }
                h = o.dt_next;
                count += 1;
                if landed {
                    out.push(state);
                    break;
                }
                if count % output_every == 0 {
                    out.push(state);
                }
            }
        }
    }
    Ok(out)
}
