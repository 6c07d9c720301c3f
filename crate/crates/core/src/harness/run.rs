//! Mode dispatch and output layout.

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde_json::json;

use crate::error::Error;
use crate::grid::WaveField;
use crate::madelung::residuals;
use crate::spectral::{evolve, initial_field_from_state, top_band_power_fraction, Observables};
use crate::variational::{
    bohmian_trajectories, propagate, synthesize, taylor_coefficients, InteractionVariant, Integrator,
    VariationalState,
};

use super::compare::{c_int_label, compare, SUMMARY_COLUMNS};
use super::config::{flatten, with_override, ConfigError, Mode, ResidualSource, RunConfig};
use super::convergence::{convergence_study, tables_to_csv};
use super::io::{fmt_f64, write_atomic, write_metadata, write_snapshot, Csv};

/// Fraction of the wavenumber range watched by the aliasing guard.
pub const ALIAS_BAND: f64 = 1.0 / 8.0;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    /// Solver failure; a `failure.json` report was written to `report`.
    Numerical { error: Error, report: Option<PathBuf> },
    Io(io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical { .. } => 3,
            RunError::Io(_) => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config error: {e}"),
            RunError::Numerical { error, report } => {
                write!(f, "{error}")?;
                if let Some(p) = report {
                    write!(f, " (report: {})", p.display())?;
                }
                Ok(())
            }
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

/// Internal failure type for mode bodies: solver errors are turned into a
/// report at the top level.
enum Failure {
    Solver(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type ModeResult = std::result::Result<Vec<PathBuf>, Failure>;

/// Files written by a successful run, relative to its output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Executes `cfg.run.mode`. `workers` bounds sweep parallelism; `None`
/// lets the thread pool pick.
pub fn run(cfg: &RunConfig, workers: Option<usize>) -> Result<RunOutcome, RunError> {
    let dir = cfg.run.out_dir.clone();
    std::fs::create_dir_all(&dir)?;
    let result = match cfg.run.mode {
        Mode::Variational => run_variational(cfg, &dir),
        Mode::Spectral => run_spectral(cfg, &dir).map(|(files, _)| files),
        Mode::Compare => run_compare(cfg, &dir),
        Mode::Residuals => run_residuals(cfg, &dir),
        Mode::Converge => run_converge(cfg, &dir),
        Mode::Sweep => run_sweep(cfg, &dir, workers),
    };
    match result {
        Ok(mut files) => {
            files.push(PathBuf::from("metadata.json"));
            write_metadata(&dir, &metadata(cfg, "ok", &files))?;
            Ok(RunOutcome { out_dir: dir, files })
        }
        Err(Failure::Io(e)) => Err(RunError::Io(e)),
        Err(Failure::Solver(error)) => {
            let report = dir.join("failure.json");
            write_failure(&report, cfg, &error)?;
            write_metadata(&dir, &metadata(cfg, "failed", &[PathBuf::from("failure.json")]))?;
            Err(RunError::Numerical {
                error,
                report: Some(report),
            })
        }
    }
}

fn metadata(cfg: &RunConfig, status: &str, files: &[PathBuf]) -> serde_json::Value {
    let written = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "program": "gpwave",
        "version": env!("CARGO_PKG_VERSION"),
        "mode": cfg.run.mode.name(),
        "status": status,
        "config_file": cfg.source.display().to_string(),
        "config": flatten(&cfg.raw),
        "files": files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
        "written_unix_s": written,
    })
}

fn write_failure(path: &Path, cfg: &RunConfig, error: &Error) -> io::Result<()> {
    let (t, reason, last_good) = match error {
        Error::NumericalFailure { t, reason } => (Some(*t), reason.clone(), None),
        Error::PropagationFailed { last_good, t, reason } => (Some(*t), reason.clone(), Some(**last_good)),
        other => (None, other.to_string(), None),
    };
    let report = json!({
        "mode": cfg.run.mode.name(),
        "error": error.to_string(),
        "t": t,
        "reason": reason,
        "last_good_state": last_good,
    });
    let mut text = serde_json::to_string_pretty(&report).map_err(io::Error::other)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn variational_series(cfg: &RunConfig, variant: InteractionVariant) -> crate::Result<Vec<VariationalState>> {
    propagate(
        &cfg.initial_state(),
        &cfg.physics,
        variant,
        cfg.run.t_final,
        cfg.run.dt,
        cfg.run.method,
        cfg.run.output_every,
    )
}

/// Seeds spaced evenly over `q₀ ± 3` standard deviations.
pub fn trajectory_seeds(state: &VariationalState, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![state.q],
        k => {
            let half = 3.0 * state.std_dev();
            (0..k)
                .map(|i| state.q - half + 2.0 * half * i as f64 / (k - 1) as f64)
                .collect()
        }
    }
}

fn run_variational(cfg: &RunConfig, dir: &Path) -> ModeResult {
    let series = variational_series(cfg, cfg.variant())?;
    let mut files = Vec::new();

    let mut csv = Csv::new(&["t", "q", "p", "sigma", "sigma_dot", "s0"]);
    for s in &series {
        csv.push(&[s.t, s.q, s.p, s.sigma, s.sigma_dot, s.s0]);
    }
    csv.write(&dir.join("variational.csv"))?;
    files.push("variational.csv".into());

    let mut taylor = Csv::new(&[
        "t", "v_qu_0", "v_qu_1", "v_qu_2", "v_0", "v_1", "v_2", "vgp_0", "vgp_1", "vgp_2", "s_1", "s_2",
    ]);
    for s in &series {
        let c = taylor_coefficients(s, &cfg.physics);
        taylor.push(&[
            s.t, c.v_qu_0, c.v_qu_1, c.v_qu_2, c.v_0, c.v_1, c.v_2, c.vgp_0, c.vgp_1, c.vgp_2, c.s_1, c.s_2,
        ]);
    }
    taylor.write(&dir.join("taylor.csv"))?;
    files.push("taylor.csv".into());

    let seeds = trajectory_seeds(&series[0], cfg.run.trajectory_seeds);
    if !seeds.is_empty() {
        let paths = bohmian_trajectories(&seeds, &series);
        let names: Vec<String> = std::iter::once("t".to_string())
            .chain((0..seeds.len()).map(|i| format!("x_{i:02}")))
            .collect();
        let cols: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut traj = Csv::new(&cols);
        for (k, s) in series.iter().enumerate() {
            let row: Vec<f64> = std::iter::once(s.t).chain(paths.iter().map(|p| p[k])).collect();
            traj.push(&row);
        }
        traj.write(&dir.join("trajectories.csv"))?;
        files.push("trajectories.csv".into());
    }

    if cfg.run.snapshot_every > 0 {
        for (k, s) in series.iter().enumerate().step_by(cfg.run.snapshot_every) {
            let psi = synthesize(s, &cfg.physics, &cfg.grid)?;
            let name = PathBuf::from("snapshots").join(format!("psi_{k:06}.csv"));
            write_snapshot(&dir.join(&name), &psi)?;
            files.push(name);
        }
    }
    Ok(files)
}

/// Spectral run writing `spectral.csv` (and snapshots if requested).
/// Fails after writing the CSV if the aliasing guard trips.
fn run_spectral(cfg: &RunConfig, dir: &Path) -> std::result::Result<(Vec<PathBuf>, Vec<Observables>), Failure> {
    let start = initial_field_from_state(&cfg.initial_state(), &cfg.physics, &cfg.grid)?;
    let mut files = Vec::new();
    let mut top_band = Vec::new();
    let mut io_err: Option<io::Error> = None;
    let mut emitted = 0usize;
    let obs = evolve(
        &start,
        &cfg.physics,
        0.0,
        cfg.run.t_final,
        cfg.run.dt,
        cfg.run.output_every,
        |f: &WaveField| {
            top_band.push(top_band_power_fraction(f, ALIAS_BAND));
            if cfg.run.snapshot_every > 0 && emitted % cfg.run.snapshot_every == 0 && io_err.is_none() {
                let name = PathBuf::from("snapshots").join(format!("psi_{emitted:06}.csv"));
                match write_snapshot(&dir.join(&name), f) {
                    Ok(()) => files.push(name),
                    Err(e) => io_err = Some(e),
                }
            }
            emitted += 1;
        },
    )?;
    if let Some(e) = io_err {
        return Err(e.into());
    }
    let mut csv = Csv::new(&["t", "norm", "mean_x", "var_x", "energy", "top_band_fraction"]);
    for (o, f) in obs.iter().zip(&top_band) {
        csv.push(&[o.t, o.norm, o.mean_x, o.var_x, o.energy, *f]);
    }
    csv.write(&dir.join("spectral.csv"))?;
    files.insert(0, "spectral.csv".into());

    if let Some((o, f)) = obs
        .iter()
        .zip(&top_band)
        .find(|(_, f)| **f > cfg.run.alias_tol)
    {
        return Err(Failure::Solver(Error::NumericalFailure {
            t: o.t,
            reason: format!(
                "aliasing guard: top-band power fraction {f:e} exceeds {:e}; refine the grid",
                cfg.run.alias_tol
            ),
        }));
    }
    Ok((files, obs))
}

fn sanitize(s: &str) -> String {
    s.replace([',', '\n'], ";")
}

fn run_compare(cfg: &RunConfig, dir: &Path) -> ModeResult {
    let (mut files, pde) = run_spectral(cfg, dir)?;
    let mut summary = Csv::new(&SUMMARY_COLUMNS);
    for &c in &cfg.run.c_int_variants {
        let report = variational_series(cfg, InteractionVariant::new(c)).and_then(|s| compare(&s, &pde, c));
        match report {
            Ok(r) => {
                let name = PathBuf::from(format!("compare_cint_{}.csv", c_int_label(c)));
                r.to_csv().write(&dir.join(&name))?;
                files.push(name);
                summary.push_cells(&r.summary_cells());
            }
            // A diverging variant is itself a finding; record it and go on.
            Err(e) => summary.push_cells(&[
                fmt_f64(c),
                sanitize(&format!("failed: {e}")),
                String::new(),
                String::new(),
                String::new(),
            ]),
        }
    }
    summary.write(&dir.join("compare_summary.csv"))?;
    files.push("compare_summary.csv".into());
    Ok(files)
}

fn run_residuals(cfg: &RunConfig, dir: &Path) -> ModeResult {
    let mut csv = Csv::new(&["t_mid", "continuity", "hamilton_jacobi", "euler"]);
    let every = cfg.run.output_every;
    let eps = cfg.run.eps_mask;
    match cfg.run.residual_source {
        ResidualSource::Synthesized => {
            let series = propagate(
                &cfg.initial_state(),
                &cfg.physics,
                cfg.variant(),
                cfg.run.t_final,
                cfg.run.dt,
                Integrator::Rk4,
                1,
            )?;
            for k in (0..series.len() - 1).step_by(every) {
                let a = synthesize(&series[k], &cfg.physics, &cfg.grid)?;
                let b = synthesize(&series[k + 1], &cfg.physics, &cfg.grid)?;
                let r = residuals(&a, &b, &cfg.physics, eps)?;
                csv.push(&[r.continuity.t_mid, r.continuity.max_norm, r.hamilton_jacobi.max_norm, r.euler.max_norm]);
            }
        }
        ResidualSource::Spectral => {
            let start = initial_field_from_state(&cfg.initial_state(), &cfg.physics, &cfg.grid)?;
            let mut prev: Option<WaveField> = None;
            let mut k = 0usize;
            let mut failure: Option<Error> = None;
            evolve(&start, &cfg.physics, 0.0, cfg.run.t_final, cfg.run.dt, 1, |f| {
                if let (Some(a), None) = (&prev, &failure) {
                    if (k - 1) % every == 0 {
                        match residuals(a, f, &cfg.physics, eps) {
                            Ok(r) => csv.push(&[
                                r.continuity.t_mid,
                                r.continuity.max_norm,
                                r.hamilton_jacobi.max_norm,
                                r.euler.max_norm,
                            ]),
                            Err(e) => failure = Some(e),
                        }
                    }
                }
                prev = Some(f.clone());
                k += 1;
            })?;
            if let Some(e) = failure {
                return Err(e.into());
            }
        }
    }
    csv.write(&dir.join("residuals.csv"))?;
    Ok(vec!["residuals.csv".into()])
}

fn run_converge(cfg: &RunConfig, dir: &Path) -> ModeResult {
    let tables = convergence_study(cfg)?;
    tables_to_csv(&tables).write(&dir.join("convergence.csv"))?;
    Ok(vec!["convergence.csv".into()])
}

fn run_sweep(cfg: &RunConfig, dir: &Path, workers: Option<usize>) -> ModeResult {
    let sweep = cfg.sweep.as_ref().expect("validated at load time");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| io::Error::other(e.to_string()))?;

    let points: Vec<(usize, String)> = sweep
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| (i, v.to_string()))
        .collect();
    let results: Vec<(String, i32, String)> = pool.install(|| {
        points
            .par_iter()
            .map(|(i, value)| {
                let point_dir = dir.join(format!("point_{i:03}"));
                let dir_override = format!("run.out_dir={}", toml::Value::String(point_dir.display().to_string()));
                let built = with_override(cfg, &format!("{}={value}", sweep.param))
                    .and_then(|c| with_override(&c, &format!("run.mode=\"{}\"", sweep.mode)))
                    .and_then(|c| with_override(&c, &dir_override));
                match built {
                    Err(e) => {
                        // Keep the point directory so the layout stays one per value.
                        let _ = std::fs::create_dir_all(&point_dir);
                        let _ = write_atomic(&point_dir.join("config_error.txt"), format!("{e}\n").as_bytes());
                        ("config_error".to_string(), 2, e.to_string())
                    }
                    Ok(point_cfg) => match run(&point_cfg, Some(1)) {
                        Ok(_) => ("ok".to_string(), 0, String::new()),
                        Err(e) => ("failed".to_string(), e.exit_code(), e.to_string()),
                    },
                }
            })
            .collect()
    });

    let mut index = Csv::new(&["point", "dir", "value", "status", "exit_code", "message"]);
    let mut files = Vec::new();
    let mut failed = 0;
    for ((i, value), (status, code, message)) in points.iter().zip(&results) {
        let name = format!("point_{i:03}");
        index.push_cells(&[
            i.to_string(),
            name.clone(),
            sanitize(value),
            status.clone(),
            code.to_string(),
            sanitize(message),
        ]);
        files.push(PathBuf::from(name));
        failed += usize::from(*code != 0);
    }
    index.write(&dir.join("sweep_index.csv"))?;
    files.push("sweep_index.csv".into());
    if failed > 0 {
        return Err(Failure::Solver(Error::Precondition(format!(
            "{failed} of {} sweep points failed; see sweep_index.csv",
            points.len()
        ))));
    }
    Ok(files)
}
