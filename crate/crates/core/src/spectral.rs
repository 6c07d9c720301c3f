//! Strang split-step Fourier solver for
//!
//! ```text
//! iℏ ∂ψ/∂t = -ℏ²/(2m) ∂²ψ/∂x² + ½ m ω²(t) x² ψ + g|ψ|² ψ
//! ```
//!
//! on a periodic grid. Each sub-step is a pointwise unitary multiplication,
//! so the discrete norm is conserved to roundoff.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, SpectralDiff, WaveField};
use crate::physics::PhysicsParams;
use crate::variational::{synthesize, VariationalState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub t: f64,
    pub norm: f64,
    pub mean_x: f64,
    pub var_x: f64,
    pub energy: f64,
}

/// Split-step propagator with a cached transform plan and kinetic factors.
pub struct SplitStepper {
    grid: Grid,
    params: PhysicsParams,
    dt: f64,
    fft: SpectralDiff,
    kinetic: Vec<Complex64>,
    x_sq: Vec<f64>,
}

impl SplitStepper {
    pub fn new(grid: Grid, params: PhysicsParams, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Precondition(format!("time step must be > 0, got {dt}")));
        }
        let fft = SpectralDiff::new(&grid);
        let x_sq = grid.points().iter().map(|x| x * x).collect();
        let mut s = SplitStepper {
            grid,
            params,
            dt,
            fft,
            kinetic: Vec::new(),
            x_sq,
        };
        s.set_dt(dt);
        Ok(s)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn set_dt(&mut self, dt: f64) {
        self.dt = dt;
        let c = self.params.hbar * dt / (2.0 * self.params.mass);
        self.kinetic = self
            .fft
            .wavenumbers()
            .iter()
            .map(|k| Complex64::from_polar(1.0, -c * k * k))
            .collect();
    }

    fn local_half_step(&self, values: &mut [Complex64], w2: f64) {
        let m = self.params.mass;
        let g = self.params.g;
        let c = self.dt / (2.0 * self.params.hbar);
        for (v, &x2) in values.iter_mut().zip(&self.x_sq) {
            let potential = 0.5 * m * w2 * x2 + g * v.norm_sqr();
            *v *= Complex64::from_polar(1.0, -potential * c);
        }
    }

    /// Advances `field` in place from `t` to `t + dt`; ω² is frozen at the
    /// step midpoint.
    pub fn step(&mut self, field: &mut WaveField, t: f64) -> Result<()> {
        if field.grid != self.grid {
            return Err(Error::GridMismatch("field and stepper grids differ".into()));
        }
        let w2 = self.params.omega_squared_at(t + 0.5 * self.dt);
        self.local_half_step(&mut field.values, w2);
        self.fft.forward(&mut field.values);
        for (v, k) in field.values.iter_mut().zip(&self.kinetic) {
            *v *= k;
        }
        self.fft.inverse(&mut field.values);
        self.local_half_step(&mut field.values, w2);
        field.t = t + self.dt;
        if field.values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NumericalFailure {
                t: field.t,
                reason: "non-finite wavefunction after split step".into(),
            });
        }
        Ok(())
    }
}

/// One Strang step from `t` to `t + dt`.
pub fn split_step(field: &WaveField, params: &PhysicsParams, t: f64, dt: f64) -> Result<WaveField> {
    let mut stepper = SplitStepper::new(field.grid, params.clone(), dt)?;
    let mut out = field.clone();
    stepper.step(&mut out, t)?;
    Ok(out)
}

/// Evolves `field` from `t0` to `t_final`. Observables are emitted at the
/// start, every `snapshot_every` steps, and at the end; `observer` sees the
/// field at the same instants. Step `i` ends at `t0 + (i+1)·dt` except the
/// last, which is shortened to land on `t_final`.
pub fn evolve(
    field: &WaveField,
    params: &PhysicsParams,
    t0: f64,
    t_final: f64,
    dt: f64,
    snapshot_every: usize,
    mut observer: impl FnMut(&WaveField),
) -> Result<Vec<Observables>> {
    if !(t_final > t0) {
        return Err(Error::Precondition(format!(
            "t_final = {t_final} must exceed t0 = {t0}"
        )));
    }
    if snapshot_every == 0 {
        return Err(Error::Precondition("snapshot_every must be >= 1".into()));
    }
    let mut stepper = SplitStepper::new(field.grid, params.clone(), dt)?;
    let mut psi = field.clone();
    psi.t = t0;
    let mut diff = SpectralDiff::new(&field.grid);
    let mut out = vec![observables_with(&psi, params, &mut diff)];
    observer(&psi);

    let n_steps = (((t_final - t0) / dt) - 1e-9).ceil().max(1.0) as usize;
    let mut t = t0;
    for i in 0..n_steps {
        let t_next = if i + 1 == n_steps {
            t_final
        } else {
            t0 + (i + 1) as f64 * dt
        };
        let h = t_next - t;
        if h != stepper.dt() {
            stepper.set_dt(h);
        }
        stepper.step(&mut psi, t).map_err(|e| match e {
            Error::NumericalFailure { t, reason } => Error::NumericalFailure {
                t,
                reason: format!("{reason} (step {i})"),
            },
            other => other,
        })?;
        psi.t = t_next;
        t = t_next;
        if (i + 1) % snapshot_every == 0 || i + 1 == n_steps {
            out.push(observables_with(&psi, params, &mut diff));
            observer(&psi);
        }
    }
    Ok(out)
}

/// Norm, normalized first two moments, and the mean-field energy
/// `∫[ℏ²/(2m)|∂ₓψ|² + ½mω²x²|ψ|² + (g/2)|ψ|⁴] dx`.
pub fn observables(field: &WaveField, params: &PhysicsParams) -> Observables {
    let mut diff = SpectralDiff::new(&field.grid);
    observables_with(field, params, &mut diff)
}

fn observables_with(field: &WaveField, params: &PhysicsParams, diff: &mut SpectralDiff) -> Observables {
    let grid = field.grid;
    let dx = grid.dx();
    let rho = field.density();
    let mass: f64 = rho.iter().sum();
    let norm = mass * dx;
    let mean_x = rho.iter().enumerate().map(|(j, r)| grid.x(j) * r).sum::<f64>() / mass;
    let var_x = rho
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let d = grid.x(j) - mean_x;
            d * d * r
        })
        .sum::<f64>()
        / mass;

    let dpsi = diff.derivative(&field.values, 1);
    let w2 = params.omega_squared_at(field.t);
    let (m, hbar, g) = (params.mass, params.hbar, params.g);
    let energy = (0..grid.n())
        .map(|j| {
            let x = grid.x(j);
            hbar * hbar / (2.0 * m) * dpsi[j].norm_sqr()
                + 0.5 * m * w2 * x * x * rho[j]
                + 0.5 * g * rho[j] * rho[j]
        })
        .sum::<f64>()
        * dx;

    Observables {
        t: field.t,
        norm,
        mean_x,
        var_x,
        energy,
    }
}

/// Fraction of spectral power carried by the top `fraction` of
/// wavenumber magnitudes.
pub fn top_band_power_fraction(field: &WaveField, fraction: f64) -> f64 {
    let n = field.grid.n();
    let mut diff = SpectralDiff::new(&field.grid);
    let mut spec = field.values.clone();
    diff.forward(&mut spec);
    let half = (n / 2) as f64;
    let cutoff = half * (1.0 - fraction);
    let mut total = 0.0;
    let mut top = 0.0;
    for (j, v) in spec.iter().enumerate() {
        let idx = if j <= n / 2 { j } else { n - j } as f64;
        let p = v.norm_sqr();
        total += p;
        if idx > cutoff {
            top += p;
        }
    }
    if total > 0.0 {
        top / total
    } else {
        0.0
    }
}

/// Unit-norm initial field for the PDE from a variational state.
pub fn initial_field_from_state(
    state: &VariationalState,
    params: &PhysicsParams,
    grid: &Grid,
) -> Result<WaveField> {
    let mut field = synthesize(state, params, grid)?;
    field.normalize();
    Ok(field)
}
