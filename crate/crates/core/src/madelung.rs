//! Hydrodynamic (Madelung) view of a sampled wavefunction `ψ = √ρ·e^{iS}`
//! and the residuals of the continuity, Hamilton-Jacobi and Euler
//! equations between two snapshots.
//!
//! Only smooth periodic signals (ψ and √ρ) are differentiated spectrally.
//! Gradients of `v` and `V_qu` are assembled from those derivatives
//! pointwise, since `v` and `V_qu` themselves grow linearly and
//! quadratically and are not periodic.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{SpectralDiff, WaveField};
use crate::physics::PhysicsParams;

pub const DEFAULT_EPS_MASK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct MadelungFields {
    /// `|ψ|²`
    pub rho: Vec<f64>,
    /// Unwrapped phase, anchored at the density peak.
    pub phase: Vec<f64>,
    /// Quantum velocity `(ℏ/m)∂ₓS`.
    pub v_qu: Vec<f64>,
    /// Bohm potential `-(ℏ²/2m)(∂ₓ²√ρ)/√ρ`.
    pub quantum_potential: Vec<f64>,
    /// Mean-field potential `g·ρ`.
    pub gp_potential: Vec<f64>,
    /// `ρ ≥ eps_mask·max ρ`; values outside are not trustworthy.
    pub mask: Vec<bool>,
}

/// Pointwise local quantities of one snapshot.
struct Local {
    rho: Vec<f64>,
    rho_x: Vec<f64>,
    current_x: Vec<f64>,
    v: Vec<f64>,
    v_x: Vec<f64>,
    vqu: Vec<f64>,
    vqu_x: Vec<f64>,
    mask: Vec<bool>,
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

fn density_mask(rho: &[f64], eps_mask: f64) -> Result<Vec<bool>> {
    let peak = rho.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Precondition("field has zero density everywhere".into()));
    }
    let threshold = eps_mask * peak;
    Ok(rho.iter().map(|&r| r >= threshold).collect())
}

fn check_eps(eps_mask: f64) -> Result<()> {
    if eps_mask > 0.0 && eps_mask < 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "mask threshold must lie in (0, 1), got {eps_mask}"
        )))
    }
}

fn local_fields(field: &WaveField, params: &PhysicsParams, eps_mask: f64, diff: &mut SpectralDiff) -> Result<Local> {
    let psi = &field.values;
    let n = psi.len();
    let hm = params.hbar / params.mass;
    let rho = field.density();
    let mask = density_mask(&rho, eps_mask)?;

    let d = diff.derivatives(psi, &[1, 2]);
    let (dpsi, d2psi) = (&d[0], &d[1]);
    let amp: Vec<f64> = rho.iter().map(|r| r.sqrt()).collect();
    let da = diff.real_derivatives(&amp, &[1, 2, 3]);
    let kinetic = -params.hbar * params.hbar / (2.0 * params.mass);

    let mut l = Local {
        rho_x: vec![0.0; n],
        current_x: vec![0.0; n],
        v: vec![0.0; n],
        v_x: vec![0.0; n],
        vqu: vec![0.0; n],
        vqu_x: vec![0.0; n],
        rho,
        mask,
    };
    for j in 0..n {
        let c = psi[j].conj();
        let r = l.rho[j];
        let p1 = c * dpsi[j];
        let p2 = c * d2psi[j];
        let current = hm * p1.im;
        l.rho_x[j] = 2.0 * p1.re;
        l.current_x[j] = hm * p2.im;
        l.v[j] = finite_or_zero(current / r);
        l.v_x[j] = finite_or_zero(l.current_x[j] / r - current * l.rho_x[j] / (r * r));
        let a = amp[j];
        l.vqu[j] = finite_or_zero(kinetic * da[1][j] / a);
        l.vqu_x[j] = finite_or_zero(kinetic * (da[2][j] / a - da[1][j] * da[0][j] / (a * a)));
    }
    Ok(l)
}

fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// Unwraps `arg ψ` outward from the density peak in both directions.
pub fn unwrap_phase_from_peak(values: &[Complex64]) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let args: Vec<f64> = values.iter().map(|v| v.arg()).collect();
    let peak = (0..n)
        .max_by(|&a, &b| values[a].norm_sqr().total_cmp(&values[b].norm_sqr()))
        .unwrap_or(0);
    let mut out = vec![0.0; n];
    out[peak] = args[peak];
    for j in peak + 1..n {
        out[j] = out[j - 1] + wrap_angle(args[j] - args[j - 1]);
    }
    for j in (0..peak).rev() {
        out[j] = out[j + 1] + wrap_angle(args[j] - args[j + 1]);
    }
    out
}

/// Madelung fields of a sampled wavefunction. The velocity comes from the
/// probability current `J = (ℏ/m) Im(ψ*∂ₓψ)` as `v = J/ρ`.
pub fn decompose(field: &WaveField, params: &PhysicsParams, eps_mask: f64) -> Result<MadelungFields> {
    check_eps(eps_mask)?;
    let mut diff = SpectralDiff::new(&field.grid);
    let l = local_fields(field, params, eps_mask, &mut diff)?;
    let gp_potential = l.rho.iter().map(|r| params.g * r).collect();
    Ok(MadelungFields {
        phase: unwrap_phase_from_peak(&field.values),
        gp_potential,
        v_qu: l.v,
        quantum_potential: l.vqu,
        rho: l.rho,
        mask: l.mask,
    })
}

/// Residual of one hydrodynamic equation on the joint mask of a snapshot
/// pair. Entries outside the mask are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub t_mid: f64,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
    pub max_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSet {
    pub continuity: Residual,
    pub hamilton_jacobi: Residual,
    pub euler: Residual,
}

/// All three residuals between `before` and `after`. Time derivatives are
/// centred differences across the pair; every other term is the average
/// of its values at the two snapshots, and ω² is taken at the midpoint.
///
/// ```text
/// continuity:      ∂ₜρ + ∂ₓ(ρ v)
/// Hamilton-Jacobi: ℏ∂ₜS + ½ m v² + ½ m ω² x² + V_qu + V_GP
/// Euler:           ∂ₜv + v ∂ₓv + ω² x + (1/m) ∂ₓ(V_qu + V_GP)
/// ```
///
/// `∂ₜS` uses the pointwise phase increment `arg(ψ_after·ψ_before*)`, which
/// is branch-consistent between the snapshots as long as no point rotates
/// by more than π.
pub fn residuals(
    before: &WaveField,
    after: &WaveField,
    params: &PhysicsParams,
    eps_mask: f64,
) -> Result<ResidualSet> {
    check_eps(eps_mask)?;
    if before.grid != after.grid {
        return Err(Error::GridMismatch(format!(
            "snapshot grids differ: {:?} vs {:?}",
            before.grid, after.grid
        )));
    }
    let dt = after.t - before.t;
    if !(dt > 0.0) {
        return Err(Error::Precondition(format!(
            "after.t must exceed before.t (gap {dt})"
        )));
    }
    let grid = before.grid;
    let mut diff = SpectralDiff::new(&grid);
    let a = local_fields(before, params, eps_mask, &mut diff)?;
    let b = local_fields(after, params, eps_mask, &mut diff)?;
    let t_mid = 0.5 * (before.t + after.t);
    let w2 = params.omega_squared_at(t_mid);
    let (m, hbar, g) = (params.mass, params.hbar, params.g);
    let mask: Vec<bool> = a.mask.iter().zip(&b.mask).map(|(x, y)| *x && *y).collect();

    let n = grid.n();
    let mut cont = vec![0.0; n];
    let mut hj = vec![0.0; n];
    let mut eu = vec![0.0; n];
    for j in 0..n {
        if !mask[j] {
            continue;
        }
        let x = grid.x(j);
        let avg = |p: f64, q: f64| 0.5 * (p + q);
        cont[j] = (b.rho[j] - a.rho[j]) / dt + avg(a.current_x[j], b.current_x[j]);

        let dphase = (after.values[j] * before.values[j].conj()).arg();
        hj[j] = hbar * dphase / dt
            + avg(0.5 * m * a.v[j] * a.v[j], 0.5 * m * b.v[j] * b.v[j])
            + 0.5 * m * w2 * x * x
            + avg(a.vqu[j], b.vqu[j])
            + g * avg(a.rho[j], b.rho[j]);

        eu[j] = (b.v[j] - a.v[j]) / dt
            + avg(a.v[j] * a.v_x[j], b.v[j] * b.v_x[j])
            + w2 * x
            + avg(a.vqu_x[j] + g * a.rho_x[j], b.vqu_x[j] + g * b.rho_x[j]) / m;
    }
    let pack = |values: Vec<f64>| {
        let max_norm = values
            .iter()
            .zip(&mask)
            .filter(|(_, &k)| k)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max);
        Residual {
            t_mid,
            values,
            mask: mask.clone(),
            max_norm,
        }
    };
    Ok(ResidualSet {
        continuity: pack(cont),
        hamilton_jacobi: pack(hj),
        euler: pack(eu),
    })
}

pub fn continuity_residual(before: &WaveField, after: &WaveField, params: &PhysicsParams) -> Result<Residual> {
    Ok(residuals(before, after, params, DEFAULT_EPS_MASK)?.continuity)
}

pub fn hamilton_jacobi_residual(before: &WaveField, after: &WaveField, params: &PhysicsParams) -> Result<Residual> {
    Ok(residuals(before, after, params, DEFAULT_EPS_MASK)?.hamilton_jacobi)
}

pub fn euler_residual(before: &WaveField, after: &WaveField, params: &PhysicsParams) -> Result<Residual> {
    Ok(residuals(before, after, params, DEFAULT_EPS_MASK)?.euler)
}
