//! Resolution ladders and observed orders of accuracy.
//!
//! Integrator studies use successive differences: the error of rung `i` is
//! the distance between rungs `i` and `i+1`. For an order-`p` method this
//! is `C·hᵢᵖ·(1 - 2⁻ᵖ)`, so the ratio between neighbours is still `2ᵖ`
//! and no rung is used as a stand-in for the exact answer. Residual
//! studies need no reference since the exact residual is zero.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, WaveField};
use crate::madelung::residuals;
use crate::spectral::{evolve, initial_field_from_state, split_step};
use crate::variational::{propagate, step, Integrator, VariationalState};

use super::config::{ResidualSource, RunConfig};
use super::io::{fmt_f64, Csv};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rung {
    /// Time step of this rung.
    pub dt: f64,
    /// Grid spacing of this rung.
    pub dx: f64,
    pub error: f64,
    /// `error(previous) / error(this)`; absent on the first rung.
    pub ratio: Option<f64>,
    /// `log₂(ratio)` for a halving ladder.
    pub order: Option<f64>,
    /// False when the error failed to decrease from the previous rung.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub study: String,
    pub rungs: Vec<Rung>,
}

impl ConvergenceTable {
    pub fn from_errors(study: &str, dts: &[f64], dxs: &[f64], errors: &[f64]) -> Self {
        let mut rungs = Vec::with_capacity(errors.len());
        for i in 0..errors.len() {
            let (ratio, order, monotone) = if i == 0 {
                (None, None, true)
            } else {
                let r = errors[i - 1] / errors[i];
                let h_ratio = if dts[i - 1] != dts[i] {
                    dts[i - 1] / dts[i]
                } else {
                    dxs[i - 1] / dxs[i]
                };
                (Some(r), Some(r.ln() / h_ratio.ln()), errors[i] < errors[i - 1])
            };
            rungs.push(Rung {
                dt: dts[i],
                dx: dxs[i],
                error: errors[i],
                ratio,
                order,
                monotone,
            });
        }
        ConvergenceTable {
            study: study.into(),
            rungs,
        }
    }

    pub fn orders(&self) -> Vec<f64> {
        self.rungs.iter().filter_map(|r| r.order).collect()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.rungs.iter().filter_map(|r| r.ratio).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.rungs.iter().all(|r| r.monotone)
    }
}

pub const COLUMNS: [&str; 8] = ["study", "rung", "dt", "dx", "error", "ratio", "order", "monotone"];

pub fn tables_to_csv(tables: &[ConvergenceTable]) -> Csv {
    let mut csv = Csv::new(&COLUMNS);
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for t in tables {
        for (i, r) in t.rungs.iter().enumerate() {
            csv.push_cells(&[
                t.study.clone(),
                i.to_string(),
                fmt_f64(r.dt),
                fmt_f64(r.dx),
                fmt_f64(r.error),
                opt(r.ratio),
                opt(r.order),
                r.monotone.to_string(),
            ]);
        }
    }
    csv
}

fn ladder(cfg: &RunConfig) -> Vec<f64> {
    (0..cfg.run.levels).map(|i| cfg.run.dt / (1u64 << i) as f64).collect()
}

/// Largest difference in `(q, σ)` between two RK4 runs, over the samples
/// of the coarser run that the finer one also visits.
fn series_distance(coarse: &[VariationalState], fine: &[VariationalState], dt_coarse: f64) -> f64 {
    let tol = 1e-9 * dt_coarse;
    let mut j = 0;
    let mut worst: f64 = 0.0;
    for c in coarse {
        while j < fine.len() && fine[j].t < c.t - tol {
            j += 1;
        }
        if let Some(f) = fine.get(j).filter(|f| (f.t - c.t).abs() <= tol) {
            worst = worst.max((c.q - f.q).abs()).max((c.sigma - f.sigma).abs());
        }
    }
    worst
}

/// RK4 on the reduced system, halving `dt` from `[run].dt` over
/// `[run].levels` runs to `[run].t_final`.
pub fn rk4_study(cfg: &RunConfig) -> Result<ConvergenceTable> {
    let init = cfg.initial_state();
    let dts = ladder(cfg);
    let runs = dts
        .iter()
        .map(|&dt| propagate(&init, &cfg.physics, cfg.variant(), cfg.run.t_final, dt, Integrator::Rk4, 1))
        .collect::<Result<Vec<_>>>()?;
    let errors: Vec<f64> = runs
        .windows(2)
        .zip(&dts)
        .map(|(w, &dt)| series_distance(&w[0], &w[1], dt))
        .collect();
    let k = errors.len();
    Ok(ConvergenceTable::from_errors("rk4", &dts[..k], &vec![cfg.grid.dx(); k], &errors))
}

fn final_field(cfg: &RunConfig, grid: &Grid, dt: f64, t_end: f64) -> Result<WaveField> {
    let start = initial_field_from_state(&cfg.initial_state(), &cfg.physics, grid)?;
    let mut last = None;
    evolve(&start, &cfg.physics, 0.0, t_end, dt, usize::MAX, |f| last = Some(f.clone()))?;
    last.ok_or_else(|| Error::Precondition("evolution produced no output".into()))
}

fn l2_distance(a: &WaveField, b: &WaveField) -> f64 {
    let s: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm_sqr()).sum();
    (s * a.grid.dx()).sqrt()
}

/// Strang splitting at fixed grid: L² distance between final fields of
/// neighbouring time steps.
pub fn strang_study(cfg: &RunConfig) -> Result<ConvergenceTable> {
    let dts = ladder(cfg);
    let finals = dts
        .iter()
        .map(|&dt| final_field(cfg, &cfg.grid, dt, cfg.run.t_final))
        .collect::<Result<Vec<_>>>()?;
    let errors: Vec<f64> = finals.windows(2).map(|w| l2_distance(&w[0], &w[1])).collect();
    let k = errors.len();
    Ok(ConvergenceTable::from_errors("strang", &dts[..k], &vec![cfg.grid.dx(); k], &errors))
}

/// Snapshot pair `(t_final, t_final + dt)` on `grid` from the configured
/// source.
pub fn residual_pair(cfg: &RunConfig, grid: &Grid, dt: f64) -> Result<(WaveField, WaveField)> {
    let t = cfg.run.t_final;
    match cfg.run.residual_source {
        ResidualSource::Synthesized => {
            let series = propagate(&cfg.initial_state(), &cfg.physics, cfg.variant(), t, dt, Integrator::Rk4, usize::MAX)?;
            let s0 = *series.last().expect("propagate returns at least the initial state");
            let s1 = step(&s0, &cfg.physics, cfg.variant(), dt, Integrator::Rk4)?.state;
            let a = crate::variational::synthesize(&s0, &cfg.physics, grid)?;
            let b = crate::variational::synthesize(&s1, &cfg.physics, grid)?;
            Ok((a, b))
        }
        ResidualSource::Spectral => {
            let a = final_field(cfg, grid, dt, t)?;
            let b = split_step(&a, &cfg.physics, t, dt)?;
            Ok((a, b))
        }
    }
}

/// Madelung residual max-norms under simultaneous halving of `dx` and `dt`.
/// Returns one table per equation: continuity, Hamilton-Jacobi, Euler.
pub fn residual_study(cfg: &RunConfig) -> Result<Vec<ConvergenceTable>> {
    let dts = ladder(cfg);
    let mut grid = cfg.grid;
    let mut dxs = Vec::new();
    let mut errs = [Vec::new(), Vec::new(), Vec::new()];
    for &dt in &dts {
        let (a, b) = residual_pair(cfg, &grid, dt)?;
        let r = residuals(&a, &b, &cfg.physics, cfg.run.eps_mask)?;
        errs[0].push(r.continuity.max_norm);
        errs[1].push(r.hamilton_jacobi.max_norm);
        errs[2].push(r.euler.max_norm);
        dxs.push(grid.dx());
        grid = grid.refined();
    }
    Ok(["residual_continuity", "residual_hamilton_jacobi", "residual_euler"]
        .iter()
        .zip(errs)
        .map(|(name, e)| ConvergenceTable::from_errors(name, &dts, &dxs, &e))
        .collect())
}

/// All ladders: RK4, Strang, then the three residuals.
pub fn convergence_study(cfg: &RunConfig) -> Result<Vec<ConvergenceTable>> {
    let mut out = vec![rk4_study(cfg)?, strang_study(cfg)?];
    out.extend(residual_study(cfg)?);
    Ok(out)
}
