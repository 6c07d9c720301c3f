//! Sectioned key-value run configuration.
//!
//! The file is TOML restricted to a fixed schema:
//!
//! ```toml
//! [physics]
//! mass = 1.0
//! hbar = 1.0
//! g = 1.0
//! trap = "modulated"      # constant | piecewise | modulated | tabulated
//! omega0_sq = 1.0
//! epsilon = 0.2
//! big_omega = 2.0
//!
//! [initial]
//! x0 = 1.0
//! sigma0 = 1.0
//!
//! [grid]
//! x_min = -16.0
//! x_max = 16.0
//! n = 512
//!
//! [run]
//! t_final = 10.0
//! dt = 1e-3
//! ```
//!
//! Unknown sections and keys are rejected with a nearest-match suggestion.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use toml::{Table, Value};

use crate::grid::Grid;
use crate::physics::{OmegaSquaredSchedule, PhysicsParams};
use crate::variational::{Integrator, InteractionVariant, VariationalState, COVERAGE_HALF_SPAN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Variational,
    Spectral,
    Compare,
    Residuals,
    Converge,
    Sweep,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::Variational,
        Mode::Spectral,
        Mode::Compare,
        Mode::Residuals,
        Mode::Converge,
        Mode::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Variational => "variational",
            Mode::Spectral => "spectral",
            Mode::Compare => "compare",
            Mode::Residuals => "residuals",
            Mode::Converge => "converge",
            Mode::Sweep => "sweep",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.name() == s)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the wavefunction pairs for residual evaluation come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualSource {
    /// Packets synthesized from the variational solution.
    Synthesized,
    /// Fields from the split-step solver.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialConditions {
    pub x0: f64,
    pub v0: f64,
    pub sigma0: f64,
    pub sigma_dot0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSettings {
    pub mode: Mode,
    pub t_final: f64,
    pub dt: f64,
    pub output_every: usize,
    pub out_dir: PathBuf,
    pub c_int: f64,
    /// Interaction coefficients evaluated side by side in compare mode.
    pub c_int_variants: Vec<f64>,
    pub method: Integrator,
    pub eps_mask: f64,
    /// Write a wavefunction snapshot every this many output rows; 0 = none.
    pub snapshot_every: usize,
    pub residual_source: ResidualSource,
    /// Number of rungs in convergence ladders.
    pub levels: usize,
    /// Bohmian trajectory seeds, spread evenly over ±3 standard deviations.
    pub trajectory_seeds: usize,
    /// Largest admissible fraction of spectral power in the top eighth of
    /// wavenumbers before a spectral run is declared invalid.
    pub alias_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSettings {
    /// Dotted `section.key` to vary.
    pub param: String,
    pub values: Vec<Value>,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub physics: PhysicsParams,
    pub initial: InitialConditions,
    pub grid: Grid,
    pub run: RunSettings,
    pub sweep: Option<SweepSettings>,
    /// Merged key-value tree the config was built from. Sweep points are
    /// derived by editing this and rebuilding.
    #[serde(skip)]
    pub raw: Table,
    #[serde(skip)]
    pub source: PathBuf,
}

impl RunConfig {
    pub fn initial_state(&self) -> VariationalState {
        let i = &self.initial;
        VariationalState::from_initial_conditions(&self.physics, i.x0, i.v0, i.sigma0, i.sigma_dot0)
    }

    pub fn variant(&self) -> InteractionVariant {
        InteractionVariant::new(self.run.c_int)
    }
}

/// Configuration problem, located by file, section and key where possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub file: PathBuf,
    pub section: Option<String>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.file.display())?;
        match (&self.section, &self.key) {
            (Some(s), Some(k)) => write!(f, ": [{s}].{k}")?,
            (Some(s), None) => write!(f, ": [{s}]")?,
            _ => {}
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

const SCHEMA: &[(&str, &[&str])] = &[
    (
        "physics",
        &[
            "mass",
            "hbar",
            "g",
            "trap",
            "omega0_sq",
            "epsilon",
            "big_omega",
            "breakpoints",
            "values",
            "samples",
        ],
    ),
    ("initial", &["x0", "v0", "sigma0", "sigma_dot0"]),
    ("grid", &["x_min", "x_max", "n"]),
    (
        "run",
        &[
            "mode",
            "t_final",
            "dt",
            "output_every",
            "out_dir",
            "c_int",
            "c_int_variants",
            "method",
            "tol",
            "eps_mask",
            "snapshot_every",
            "residual_source",
            "levels",
            "trajectory_seeds",
            "alias_tol",
        ],
    ),
    ("sweep", &["param", "values", "mode"]),
];

fn suggest<'a>(word: &str, candidates: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
    candidates
        .into_iter()
        .map(|c| (strsim::damerau_levenshtein(word, c), c))
        .filter(|(d, c)| *d <= 2.max(c.len() / 3))
        .min_by_key(|(d, _)| *d)
        .map(|(_, c)| c)
}

/// Reads and validates a config file, applying `overrides` of the form
/// `section.key=value` on top of it. `out_dir_env`, when set, replaces
/// `[run].out_dir` unless an override sets it explicitly.
pub fn load_config(
    path: &Path,
    overrides: &[String],
    out_dir_env: Option<&str>,
) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        file: path.to_path_buf(),
        section: None,
        key: None,
        message: format!("cannot read file: {e}"),
    })?;
    parse_config(&text, path, overrides, out_dir_env)
}

/// Like [`load_config`] but from in-memory text; `path` is used only in
/// error messages.
pub fn parse_config(
    text: &str,
    path: &Path,
    overrides: &[String],
    out_dir_env: Option<&str>,
) -> Result<RunConfig, ConfigError> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| ConfigError {
        file: path.to_path_buf(),
        section: None,
        key: None,
        message: format!("parse error: {}", e.message()),
    })?;
    let cli = Path::new("<--set>");
    let mut explicit_out_dir = false;
    for o in overrides {
        let (section, key) = apply_override(&mut table, o).map_err(|mut e| {
            e.file = cli.to_path_buf();
            e
        })?;
        explicit_out_dir |= section == "run" && key == "out_dir";
    }
    if let (Some(dir), false) = (out_dir_env, explicit_out_dir) {
        section_mut(&mut table, "run").insert("out_dir".into(), Value::String(dir.into()));
    }
    from_table(table, path)
}

fn section_mut<'a>(table: &'a mut Table, name: &str) -> &'a mut Table {
    let entry = table
        .entry(name.to_string())
        .or_insert_with(|| Value::Table(Table::new()));
    if !entry.is_table() {
        *entry = Value::Table(Table::new());
    }
    entry.as_table_mut().expect("just ensured a table")
}

/// Parses a `--set` value: TOML literal if it parses as one, bare string
/// otherwise (so `method=rk45` needs no quoting).
fn parse_value(raw: &str) -> Value {
    let doc = format!("v = {raw}");
    match doc.parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.into())),
        Err(_) => Value::String(raw.into()),
    }
}

/// Applies one `section.key=value` override and returns the location it set.
pub fn apply_override(table: &mut Table, spec: &str) -> Result<(String, String), ConfigError> {
    let err = |section: Option<&str>, key: Option<&str>, message: String| ConfigError {
        file: PathBuf::new(),
        section: section.map(Into::into),
        key: key.map(Into::into),
        message,
    };
    let (lhs, rhs) = spec
        .split_once('=')
        .ok_or_else(|| err(None, None, format!("override `{spec}` is not of the form section.key=value")))?;
    let (section, key) = lhs
        .trim()
        .split_once('.')
        .ok_or_else(|| err(None, None, format!("override target `{lhs}` is not of the form section.key")))?;
    check_known(section, key).map_err(|m| err(Some(section), Some(key), m))?;
    section_mut(table, section).insert(key.to_string(), parse_value(rhs.trim()));
    Ok((section.to_string(), key.to_string()))
}

fn check_known(section: &str, key: &str) -> Result<(), String> {
    let Some((_, keys)) = SCHEMA.iter().find(|(s, _)| *s == section) else {
        let hint = suggest(section, SCHEMA.iter().map(|(s, _)| *s))
            .map(|s| format!("; did you mean [{s}]?"))
            .unwrap_or_default();
        return Err(format!("unknown section [{section}]{hint}"));
    };
    if keys.contains(&key) {
        return Ok(());
    }
    let hint = suggest(key, keys.iter().copied())
        .map(|k| format!("; did you mean `{k}`?"))
        .unwrap_or_default();
    Err(format!("unknown key `{key}`{hint}"))
}

/// Typed accessor over one section that records which keys were consumed.
struct Section<'a> {
    file: &'a Path,
    name: &'static str,
    table: Table,
}

impl<'a> Section<'a> {
    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            file: self.file.to_path_buf(),
            section: Some(self.name.into()),
            key: Some(key.into()),
            message: message.into(),
        }
    }

    fn has(&self, key: &str) -> bool {
        self.table.contains_key(key)
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.table.get(key) {
            None => Ok(default),
            Some(Value::Float(v)) => Ok(*v),
            Some(Value::Integer(v)) => Ok(*v as f64),
            Some(Value::String(s)) if s.eq_ignore_ascii_case("nan") => Ok(f64::NAN),
            Some(other) => Err(self.err(key, format!("expected a number, got {}", other.type_str()))),
        }
    }

    fn f64_required(&self, key: &str) -> Result<f64, ConfigError> {
        if !self.has(key) {
            return Err(self.err(key, "required key is missing"));
        }
        self.f64_or(key, 0.0)
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.table.get(key) {
            None => Ok(default),
            Some(Value::Integer(v)) if *v >= 0 => Ok(*v as usize),
            Some(other) => Err(self.err(
                key,
                format!("expected a non-negative integer, got {other}"),
            )),
        }
    }

    fn str_or(&self, key: &str, default: &str) -> Result<String, ConfigError> {
        match self.table.get(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(other) => Err(self.err(key, format!("expected a string, got {}", other.type_str()))),
        }
    }

    fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(v) = self.table.get(key) else {
            return Ok(None);
        };
        let arr = v
            .as_array()
            .ok_or_else(|| self.err(key, "expected an array of numbers"))?;
        arr.iter()
            .map(|x| match x {
                Value::Float(f) => Ok(*f),
                Value::Integer(i) => Ok(*i as f64),
                _ => Err(self.err(key, "expected an array of numbers")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

fn take_section<'a>(root: &mut Table, file: &'a Path, name: &'static str) -> Result<Section<'a>, ConfigError> {
    let table = match root.remove(name) {
        None => Table::new(),
        Some(Value::Table(t)) => t,
        Some(_) => {
            return Err(ConfigError {
                file: file.to_path_buf(),
                section: Some(name.into()),
                key: None,
                message: "expected a section, found a plain value".into(),
            })
        }
    };
    for key in table.keys() {
        check_known(name, key).map_err(|m| ConfigError {
            file: file.to_path_buf(),
            section: Some(name.into()),
            key: Some(key.clone()),
            message: m,
        })?;
    }
    Ok(Section { file, name, table })
}

fn build_trap(s: &Section) -> Result<OmegaSquaredSchedule, ConfigError> {
    let kind = s.str_or("trap", "constant")?;
    let allowed: &[&str] = match kind.as_str() {
        "constant" => &["omega0_sq"],
        "modulated" => &["omega0_sq", "epsilon", "big_omega"],
        "piecewise" => &["breakpoints", "values"],
        "tabulated" => &["samples"],
        other => {
            let hint = suggest(other, ["constant", "modulated", "piecewise", "tabulated"])
                .map(|k| format!("; did you mean `{k}`?"))
                .unwrap_or_default();
            return Err(s.err("trap", format!("unknown trap kind `{other}`{hint}")));
        }
    };
    for key in ["omega0_sq", "epsilon", "big_omega", "breakpoints", "values", "samples"] {
        if s.has(key) && !allowed.contains(&key) {
            return Err(s.err(key, format!("not used by trap = \"{kind}\"")));
        }
    }
    Ok(match kind.as_str() {
        "constant" => OmegaSquaredSchedule::Constant {
            omega0_sq: s.f64_or("omega0_sq", 1.0)?,
        },
        "modulated" => OmegaSquaredSchedule::Modulated {
            omega0_sq: s.f64_or("omega0_sq", 1.0)?,
            epsilon: s.f64_required("epsilon")?,
            big_omega: s.f64_required("big_omega")?,
        },
        "piecewise" => OmegaSquaredSchedule::PiecewiseConstant {
            breakpoints: s
                .f64_list("breakpoints")?
                .ok_or_else(|| s.err("breakpoints", "required for a piecewise trap"))?,
            values: s
                .f64_list("values")?
                .ok_or_else(|| s.err("values", "required for a piecewise trap"))?,
        },
        _ => {
            let raw = s
                .table
                .get("samples")
                .and_then(Value::as_array)
                .ok_or_else(|| s.err("samples", "required for a tabulated trap: [[t, omega_sq], ...]"))?;
            let samples = raw
                .iter()
                .map(|pair| {
                    let p = pair.as_array().filter(|p| p.len() == 2);
                    let num = |v: &Value| v.as_float().or_else(|| v.as_integer().map(|i| i as f64));
                    match p.map(|p| (num(&p[0]), num(&p[1]))) {
                        Some((Some(t), Some(w))) => Ok((t, w)),
                        _ => Err(s.err("samples", "each sample must be a [t, omega_sq] pair")),
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            OmegaSquaredSchedule::Tabulated { samples }
        }
    })
}

fn physics_field_key(field: &str) -> &'static str {
    match field {
        "mass" => "mass",
        "hbar" => "hbar",
        "g" => "g",
        _ => "trap",
    }
}

fn parse_mode(s: &Section, key: &str, raw: &str) -> Result<Mode, ConfigError> {
    Mode::parse(raw).ok_or_else(|| {
        let hint = suggest(raw, Mode::ALL.iter().map(|m| m.name()))
            .map(|m| format!("; did you mean `{m}`?"))
            .unwrap_or_default();
        s.err(key, format!("unknown mode `{raw}`{hint}"))
    })
}

/// Builds and validates a config from a merged key-value tree.
pub fn from_table(table: Table, file: &Path) -> Result<RunConfig, ConfigError> {
    let raw = table.clone();
    let mut root = table;
    for (name, value) in &root {
        if !value.is_table() || !SCHEMA.iter().any(|(s, _)| s == name) {
            let hint = suggest(name, SCHEMA.iter().map(|(s, _)| *s))
                .map(|s| format!("; did you mean [{s}]?"))
                .unwrap_or_default();
            return Err(ConfigError {
                file: file.to_path_buf(),
                section: None,
                key: Some(name.clone()),
                message: format!("unknown top-level entry `{name}`{hint}"),
            });
        }
    }

    let ps = take_section(&mut root, file, "physics")?;
    let trap = build_trap(&ps)?;
    let physics = PhysicsParams::new(
        ps.f64_or("mass", 1.0)?,
        ps.f64_or("hbar", 1.0)?,
        ps.f64_or("g", 0.0)?,
        trap,
    );
    let physics = physics.validate().map_err(|e| match e {
        crate::Error::InvalidParams(v) => {
            let key = physics_field_key(v[0].field);
            ps.err(key, v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "))
        }
        other => ps.err("mass", other.to_string()),
    })?;

    let is = take_section(&mut root, file, "initial")?;
    let initial = InitialConditions {
        x0: is.f64_or("x0", 0.0)?,
        v0: is.f64_or("v0", 0.0)?,
        sigma0: is.f64_or("sigma0", 1.0)?,
        sigma_dot0: is.f64_or("sigma_dot0", 0.0)?,
    };
    for (key, v) in [("x0", initial.x0), ("v0", initial.v0), ("sigma_dot0", initial.sigma_dot0)] {
        if !v.is_finite() {
            return Err(is.err(key, format!("must be finite, got {v}")));
        }
    }
    if !(initial.sigma0 > 0.0 && initial.sigma0.is_finite()) {
        return Err(is.err("sigma0", format!("must be positive and finite, got {}", initial.sigma0)));
    }

    let gs = take_section(&mut root, file, "grid")?;
    let x_min = gs.f64_or("x_min", -16.0)?;
    let x_max = gs.f64_or("x_max", 16.0)?;
    let n = gs.usize_or("n", 512)?;
    let grid = Grid::new(x_min, x_max, n).map_err(|e| {
        let key = if !(n >= 16 && n.is_power_of_two()) { "n" } else { "x_max" };
        gs.err(key, e.to_string())
    })?;

    let rs = take_section(&mut root, file, "run")?;
    let mode_raw = rs.str_or("mode", "variational")?;
    let mode = parse_mode(&rs, "mode", &mode_raw)?;
    let t_final = rs.f64_or("t_final", 10.0)?;
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(rs.err("t_final", format!("must be positive and finite, got {t_final}")));
    }
    let dt = rs.f64_or("dt", 1e-3)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(rs.err("dt", format!("must be positive and finite, got {dt}")));
    }
    let output_every = rs.usize_or("output_every", 1)?;
    if output_every == 0 {
        return Err(rs.err("output_every", "must be at least 1"));
    }
    let c_int = rs.f64_or("c_int", 2.0)?;
    if !c_int.is_finite() {
        return Err(rs.err("c_int", "must be finite"));
    }
    let c_int_variants = rs.f64_list("c_int_variants")?.unwrap_or_else(|| vec![c_int]);
    if c_int_variants.is_empty() || c_int_variants.iter().any(|c| !c.is_finite()) {
        return Err(rs.err("c_int_variants", "must be a non-empty list of finite numbers"));
    }
    let method_raw = rs.str_or("method", "rk4")?;
    let tol = rs.f64_or("tol", 1e-10)?;
    let method = match method_raw.as_str() {
        "rk4" => {
            if rs.has("tol") {
                return Err(rs.err("tol", "only used with method = \"rk45\""));
            }
            Integrator::Rk4
        }
        "rk45" => {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(rs.err("tol", format!("must be positive, got {tol}")));
            }
            Integrator::Rk45 { tol }
        }
        other => {
            let hint = suggest(other, ["rk4", "rk45"])
                .map(|m| format!("; did you mean `{m}`?"))
                .unwrap_or_default();
            return Err(rs.err("method", format!("unknown method `{other}`{hint}")));
        }
    };
    let eps_mask = rs.f64_or("eps_mask", crate::madelung::DEFAULT_EPS_MASK)?;
    if !(eps_mask > 0.0 && eps_mask < 1.0) {
        return Err(rs.err("eps_mask", format!("must lie in (0, 1), got {eps_mask}")));
    }
    let snapshot_every = rs.usize_or("snapshot_every", 0)?;
    let residual_source = match rs.str_or("residual_source", "synthesized")?.as_str() {
        "synthesized" => ResidualSource::Synthesized,
        "spectral" => ResidualSource::Spectral,
        other => {
            return Err(rs.err(
                "residual_source",
                format!("unknown source `{other}` (expected synthesized or spectral)"),
            ))
        }
    };
    let levels = rs.usize_or("levels", 4)?;
    if levels < 3 {
        return Err(rs.err("levels", format!("a convergence ladder needs at least 3 rungs, got {levels}")));
    }
    let trajectory_seeds = rs.usize_or("trajectory_seeds", 11)?;
    let alias_tol = rs.f64_or("alias_tol", 1e-10)?;
    if !(alias_tol > 0.0) {
        return Err(rs.err("alias_tol", format!("must be positive, got {alias_tol}")));
    }
    let out_dir = PathBuf::from(rs.str_or("out_dir", "out")?);

    let sweep = if root.contains_key("sweep") {
        let ss = take_section(&mut root, file, "sweep")?;
        let param = ss.str_or("param", "")?;
        let (sec, key) = param
            .split_once('.')
            .ok_or_else(|| ss.err("param", format!("expected section.key, got `{param}`")))?;
        check_known(sec, key).map_err(|m| ss.err("param", m))?;
        if sec == "sweep" || (sec == "run" && key == "mode") {
            return Err(ss.err("param", format!("`{param}` cannot be swept")));
        }
        let values = ss
            .table
            .get("values")
            .and_then(Value::as_array)
            .cloned()
            .ok_or_else(|| ss.err("values", "required: array of values for the swept key"))?;
        if values.is_empty() {
            return Err(ss.err("values", "must not be empty"));
        }
        let point_mode_raw = ss.str_or("mode", "variational")?;
        let point_mode = parse_mode(&ss, "mode", &point_mode_raw)?;
        if point_mode == Mode::Sweep {
            return Err(ss.err("mode", "sweep points cannot themselves be sweeps"));
        }
        Some(SweepSettings {
            param,
            values,
            mode: point_mode,
        })
    } else {
        None
    };
    if mode == Mode::Sweep && sweep.is_none() {
        return Err(ConfigError {
            file: file.to_path_buf(),
            section: Some("sweep".into()),
            key: None,
            message: "sweep mode requires a [sweep] section".into(),
        });
    }

    let config = RunConfig {
        physics,
        initial,
        grid,
        run: RunSettings {
            mode,
            t_final,
            dt,
            output_every,
            out_dir,
            c_int,
            c_int_variants,
            method,
            eps_mask,
            snapshot_every,
            residual_source,
            levels,
            trajectory_seeds,
            alias_tol,
        },
        sweep,
        raw,
        source: file.to_path_buf(),
    };

    // Grid-based modes synthesize the initial packet; it has to fit.
    if mode != Mode::Variational && mode != Mode::Sweep {
        let s = config.initial_state();
        let half = COVERAGE_HALF_SPAN * s.std_dev();
        if s.q - half < grid.x_min() || s.q + half > grid.x_max() {
            return Err(ConfigError {
                file: file.to_path_buf(),
                section: Some("grid".into()),
                key: None,
                message: format!(
                    "grid [{}, {}] does not cover the initial packet q ± {COVERAGE_HALF_SPAN} std = [{}, {}]",
                    grid.x_min(),
                    grid.x_max(),
                    s.q - half,
                    s.q + half
                ),
            });
        }
    }
    Ok(config)
}

/// Rebuilds `base` with one extra override applied, keeping its source path.
pub fn with_override(base: &RunConfig, spec: &str) -> Result<RunConfig, ConfigError> {
    let mut table = base.raw.clone();
    apply_override(&mut table, spec).map_err(|mut e| {
        e.file = base.source.clone();
        e
    })?;
    from_table(table, &base.source)
}

/// Flat `section.key -> value` view of the merged config, for metadata.
pub fn flatten(table: &Table) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for (section, v) in table {
        if let Some(t) = v.as_table() {
            for (k, v) in t {
                out.insert(format!("{section}.{k}"), v.to_string());
            }
        }
    }
    out
}
