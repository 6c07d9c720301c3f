//! Physical constants of a run and the time-dependent trap.
//!
//! The trap enters every solver only through ω²(t), so schedules are
//! parametrized by the squared frequency. Negative values describe an
//! inverted (expulsive) trap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// Squared trap frequency as a function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OmegaSquaredSchedule {
    Constant {
        omega0_sq: f64,
    },
    /// `values[i]` holds on `[breakpoints[i-1], breakpoints[i])`, with
    /// `values[0]` before the first breakpoint and the last value after
    /// the final one. Requires `values.len() == breakpoints.len() + 1`.
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// ω²(t) = ω₀²·(1 + ε·sin(Ωt)).
    Modulated {
        omega0_sq: f64,
        epsilon: f64,
        big_omega: f64,
    },
    /// Linear interpolation between `(t, ω²)` samples, clamped outside.
    Tabulated {
        samples: Vec<(f64, f64)>,
    },
}

impl OmegaSquaredSchedule {
    pub fn constant(omega0_sq: f64) -> Self {
        OmegaSquaredSchedule::Constant { omega0_sq }
    }

    pub fn omega_squared_at(&self, t: f64) -> f64 {
        match self {
            OmegaSquaredSchedule::Constant { omega0_sq } => *omega0_sq,
            OmegaSquaredSchedule::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let idx = breakpoints.partition_point(|&b| b <= t);
                values[idx.min(values.len() - 1)]
            }
            OmegaSquaredSchedule::Modulated {
                omega0_sq,
                epsilon,
                big_omega,
            } => omega0_sq * (1.0 + epsilon * (big_omega * t).sin()),
            OmegaSquaredSchedule::Tabulated { samples } => interpolate_clamped(samples, t),
        }
    }

    /// True when ω² does not depend on time.
    pub fn is_constant(&self) -> bool {
        match self {
            OmegaSquaredSchedule::Constant { .. } => true,
            OmegaSquaredSchedule::Modulated { epsilon, .. } => *epsilon == 0.0,
            OmegaSquaredSchedule::PiecewiseConstant { values, .. } => {
                values.windows(2).all(|w| w[0] == w[1])
            }
            OmegaSquaredSchedule::Tabulated { samples } => {
                samples.windows(2).all(|w| w[0].1 == w[1].1)
            }
        }
    }

    fn violations(&self, out: &mut Vec<Violation>) {
        let bad = |message: String| Violation {
            field: "trap",
            message,
        };
        match self {
            OmegaSquaredSchedule::Constant { omega0_sq } => {
                if !omega0_sq.is_finite() {
                    out.push(bad(format!("omega0_sq must be finite, got {omega0_sq}")));
                }
            }
            OmegaSquaredSchedule::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                if values.len() != breakpoints.len() + 1 {
                    out.push(bad(format!(
                        "piecewise schedule needs {} values for {} breakpoints, got {}",
                        breakpoints.len() + 1,
                        breakpoints.len(),
                        values.len()
                    )));
                }
                if breakpoints.iter().chain(values).any(|v| !v.is_finite()) {
                    out.push(bad("piecewise schedule contains non-finite entries".into()));
                }
                if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    out.push(bad("breakpoints must be strictly ascending".into()));
                }
            }
            OmegaSquaredSchedule::Modulated {
                omega0_sq,
                epsilon,
                big_omega,
            } => {
                if ![omega0_sq, epsilon, big_omega].iter().all(|v| v.is_finite()) {
                    out.push(bad("modulated schedule parameters must be finite".into()));
                }
            }
            OmegaSquaredSchedule::Tabulated { samples } => {
                if samples.len() < 2 {
                    out.push(bad(format!(
                        "tabulated schedule needs at least 2 samples, got {}",
                        samples.len()
                    )));
                }
                if samples.iter().any(|(t, w)| !t.is_finite() || !w.is_finite()) {
                    out.push(bad("tabulated schedule contains non-finite entries".into()));
                }
                if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
                    out.push(bad("tabulated sample times must be strictly ascending".into()));
                }
            }
        }
    }
}

fn interpolate_clamped(samples: &[(f64, f64)], t: f64) -> f64 {
    let (first, last) = (samples[0], samples[samples.len() - 1]);
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    let hi = samples.partition_point(|&(ts, _)| ts <= t);
    let (t0, w0) = samples[hi - 1];
    if t == t0 {
        return w0;
    }
    let (t1, w1) = samples[hi];
    w0 + (w1 - w0) * (t - t0) / (t1 - t0)
}

/// Mass, Planck constant, mean-field coupling and trap of a run.
///
/// `g` is the 1D coupling in `V_GP = g·ρ`; positive is repulsive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicsParams {
    pub mass: f64,
    pub hbar: f64,
    pub g: f64,
    pub trap: OmegaSquaredSchedule,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        PhysicsParams {
            mass: 1.0,
            hbar: 1.0,
            g: 0.0,
            trap: OmegaSquaredSchedule::constant(1.0),
        }
    }
}

impl PhysicsParams {
    pub fn new(mass: f64, hbar: f64, g: f64, trap: OmegaSquaredSchedule) -> Self {
        PhysicsParams {
            mass,
            hbar,
            g,
            trap,
        }
    }

    #[inline]
    pub fn omega_squared_at(&self, t: f64) -> f64 {
        self.trap.omega_squared_at(t)
    }

    /// Returns `self` unchanged if every invariant holds, otherwise all
    /// violations at once.
    pub fn validate(self) -> Result<Self> {
        let mut v = Vec::new();
        if !(self.mass.is_finite() && self.mass > 0.0) {
            v.push(Violation {
                field: "mass",
                message: format!("must be finite and > 0, got {}", self.mass),
            });
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            v.push(Violation {
                field: "hbar",
                message: format!("must be finite and > 0, got {}", self.hbar),
            });
        }
        if !self.g.is_finite() {
            v.push(Violation {
                field: "g",
                message: format!("must be finite, got {}", self.g),
            });
        }
        self.trap.violations(&mut v);
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(v))
        }
    }
}

pub fn validate_params(raw: PhysicsParams) -> Result<PhysicsParams> {
    raw.validate()
}
