//! Time-aligned comparison of a variational run with the PDE oracle.
//!
//! The variational centre `q` is compared with `⟨x⟩`, and the width
//! parameter through `σ/2` against the position variance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::Observables;
use crate::variational::VariationalState;

use super::io::{fmt_f64, Csv};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub t: f64,
    pub q_var: f64,
    pub mean_x_pde: f64,
    pub abs_err_x: f64,
    pub half_sigma_var: f64,
    pub var_x_pde: f64,
    pub abs_err_var: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub c_int: f64,
    pub rows: Vec<ComparisonRow>,
    pub max_abs_err_x: f64,
    pub max_abs_err_var: f64,
    /// Largest `abs_err_var / var_x_pde`.
    pub max_rel_err_var: f64,
}

pub const ROW_COLUMNS: [&str; 7] = [
    "t",
    "q_var",
    "mean_x_pde",
    "abs_err_x",
    "half_sigma_var",
    "var_x_pde",
    "abs_err_var",
];

impl ComparisonReport {
    pub fn to_csv(&self) -> Csv {
        let mut csv = Csv::new(&ROW_COLUMNS);
        for r in &self.rows {
            csv.push(&[
                r.t,
                r.q_var,
                r.mean_x_pde,
                r.abs_err_x,
                r.half_sigma_var,
                r.var_x_pde,
                r.abs_err_var,
            ]);
        }
        csv
    }

    pub fn summary_cells(&self) -> Vec<String> {
        vec![
            fmt_f64(self.c_int),
            "ok".into(),
            fmt_f64(self.max_abs_err_x),
            fmt_f64(self.max_abs_err_var),
            fmt_f64(self.max_rel_err_var),
        ]
    }
}

pub const SUMMARY_COLUMNS: [&str; 5] = [
    "c_int",
    "status",
    "max_abs_err_x",
    "max_abs_err_var",
    "max_rel_err_var",
];

/// Linear interpolation of `(ts, ys)` at `t`; `ts` ascending, `t` inside.
fn interp(ts: &[f64], ys: &[f64], t: f64) -> f64 {
    let i = ts.partition_point(|&s| s < t);
    if i == 0 {
        return ys[0];
    }
    if i == ts.len() {
        return ys[ts.len() - 1];
    }
    if ts[i] == t {
        return ys[i];
    }
    let (t0, t1) = (ts[i - 1], ts[i]);
    let w = (t - t0) / (t1 - t0);
    ys[i - 1] + w * (ys[i] - ys[i - 1])
}

fn check_ascending(ts: &[f64], what: &str) -> Result<()> {
    if ts.is_empty() {
        return Err(Error::Precondition(format!("{what} series is empty")));
    }
    if ts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition(format!("{what} times are not strictly ascending")));
    }
    Ok(())
}

/// Compares the two series over their common time range, sampling on
/// whichever has fewer points there and interpolating the other linearly.
pub fn compare(var_series: &[VariationalState], pde_series: &[Observables], c_int: f64) -> Result<ComparisonReport> {
    let tv: Vec<f64> = var_series.iter().map(|s| s.t).collect();
    let tp: Vec<f64> = pde_series.iter().map(|o| o.t).collect();
    check_ascending(&tv, "variational")?;
    check_ascending(&tp, "PDE")?;
    let lo = tv[0].max(tp[0]);
    let hi = tv[tv.len() - 1].min(tp[tp.len() - 1]);
    if lo > hi {
        return Err(Error::Precondition(format!(
            "time ranges are disjoint: variational [{}, {}], PDE [{}, {}]",
            tv[0],
            tv[tv.len() - 1],
            tp[0],
            tp[tp.len() - 1]
        )));
    }
    let inside = |ts: &[f64]| -> Vec<f64> { ts.iter().copied().filter(|&t| t >= lo && t <= hi).collect() };
    let (in_v, in_p) = (inside(&tv), inside(&tp));
    let base = if in_v.len() <= in_p.len() { in_v } else { in_p };

    let q: Vec<f64> = var_series.iter().map(|s| s.q).collect();
    let half_sigma: Vec<f64> = var_series.iter().map(|s| 0.5 * s.sigma).collect();
    let mean_x: Vec<f64> = pde_series.iter().map(|o| o.mean_x).collect();
    let var_x: Vec<f64> = pde_series.iter().map(|o| o.var_x).collect();

    let rows: Vec<ComparisonRow> = base
        .iter()
        .map(|&t| {
            let q_var = interp(&tv, &q, t);
            let half_sigma_var = interp(&tv, &half_sigma, t);
            let mean_x_pde = interp(&tp, &mean_x, t);
            let var_x_pde = interp(&tp, &var_x, t);
            ComparisonRow {
                t,
                q_var,
                mean_x_pde,
                abs_err_x: (q_var - mean_x_pde).abs(),
                half_sigma_var,
                var_x_pde,
                abs_err_var: (half_sigma_var - var_x_pde).abs(),
            }
        })
        .collect();
    let max_of = |f: &dyn Fn(&ComparisonRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    Ok(ComparisonReport {
        c_int,
        max_abs_err_x: max_of(&|r| r.abs_err_x),
        max_abs_err_var: max_of(&|r| r.abs_err_var),
        max_rel_err_var: max_of(&|r| r.abs_err_var / r.var_x_pde.abs()),
        rows,
    })
}

/// File-name label for an interaction coefficient: `2` → `2`, `-2` → `m2`,
/// `2.5` → `2p5`.
pub fn c_int_label(c: f64) -> String {
    let s = if c.fract() == 0.0 && c.abs() < 1e15 {
        format!("{}", c as i64)
    } else {
        format!("{c}")
    };
    s.replace('-', "m").replace('.', "p")
}
