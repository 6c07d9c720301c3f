//! Python bindings for `gpwave`.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gpwave::{madelung, spectral, variational};

create_exception!(gpwave_py, NumericalFailure, PyRuntimeError);

fn to_py(e: gpwave::Error) -> PyErr {
    if e.is_numerical() {
        NumericalFailure::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

#[pyclass(name = "PhysicsParams", module = "gpwave_py")]
#[derive(Clone)]
struct PyPhysicsParams {
    inner: gpwave::PhysicsParams,
}

#[pymethods]
impl PyPhysicsParams {
    /// Constant trap ω² = `omega0_sq`.
    #[new]
    #[pyo3(signature = (mass=1.0, hbar=1.0, g=0.0, omega0_sq=1.0))]
    fn new(mass: f64, hbar: f64, g: f64, omega0_sq: f64) -> PyResult<Self> {
        let trap = gpwave::OmegaSquaredSchedule::constant(omega0_sq);
        Self::checked(gpwave::PhysicsParams::new(mass, hbar, g, trap))
    }

    /// ω²(t) = ω₀²·(1 + ε·sin(Ωt)).
    #[staticmethod]
    #[pyo3(signature = (omega0_sq, epsilon, big_omega, mass=1.0, hbar=1.0, g=0.0))]
    fn modulated(omega0_sq: f64, epsilon: f64, big_omega: f64, mass: f64, hbar: f64, g: f64) -> PyResult<Self> {
        let trap = gpwave::OmegaSquaredSchedule::Modulated {
            omega0_sq,
            epsilon,
            big_omega,
        };
        Self::checked(gpwave::PhysicsParams::new(mass, hbar, g, trap))
    }

    /// Linear interpolation through `(t, ω²)` samples, clamped outside.
    #[staticmethod]
    #[pyo3(signature = (samples, mass=1.0, hbar=1.0, g=0.0))]
    fn tabulated(samples: Vec<(f64, f64)>, mass: f64, hbar: f64, g: f64) -> PyResult<Self> {
        let trap = gpwave::OmegaSquaredSchedule::Tabulated { samples };
        Self::checked(gpwave::PhysicsParams::new(mass, hbar, g, trap))
    }

    #[staticmethod]
    #[pyo3(signature = (breakpoints, values, mass=1.0, hbar=1.0, g=0.0))]
    fn piecewise(breakpoints: Vec<f64>, values: Vec<f64>, mass: f64, hbar: f64, g: f64) -> PyResult<Self> {
        let trap = gpwave::OmegaSquaredSchedule::PiecewiseConstant { breakpoints, values };
        Self::checked(gpwave::PhysicsParams::new(mass, hbar, g, trap))
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.inner.mass
    }

    #[getter]
    fn hbar(&self) -> f64 {
        self.inner.hbar
    }

    #[getter]
    fn g(&self) -> f64 {
        self.inner.g
    }

    fn omega_squared_at(&self, t: f64) -> f64 {
        self.inner.omega_squared_at(t)
    }

    fn __repr__(&self) -> String {
        format!(
            "PhysicsParams(mass={}, hbar={}, g={}, trap={:?})",
            self.inner.mass, self.inner.hbar, self.inner.g, self.inner.trap
        )
    }
}

impl PyPhysicsParams {
    fn checked(p: gpwave::PhysicsParams) -> PyResult<Self> {
        Ok(PyPhysicsParams {
            inner: p.validate().map_err(to_py)?,
        })
    }
}

#[pyclass(name = "VariationalState", module = "gpwave_py")]
#[derive(Clone, Copy)]
struct PyVariationalState {
    inner: gpwave::VariationalState,
}

#[pymethods]
impl PyVariationalState {
    #[new]
    #[pyo3(signature = (t, q, p, sigma, sigma_dot, s0))]
    fn new(t: f64, q: f64, p: f64, sigma: f64, sigma_dot: f64, s0: f64) -> Self {
        PyVariationalState {
            inner: gpwave::VariationalState {
                t,
                q,
                p,
                sigma,
                sigma_dot,
                s0,
            },
        }
    }

    #[staticmethod]
    #[pyo3(signature = (params, x0=0.0, v0=0.0, sigma0=1.0, sigma_dot0=0.0))]
    fn from_initial_conditions(params: &PyPhysicsParams, x0: f64, v0: f64, sigma0: f64, sigma_dot0: f64) -> Self {
        PyVariationalState {
            inner: gpwave::VariationalState::from_initial_conditions(&params.inner, x0, v0, sigma0, sigma_dot0),
        }
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t
    }

    #[getter]
    fn q(&self) -> f64 {
        self.inner.q
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    #[getter]
    fn sigma_dot(&self) -> f64 {
        self.inner.sigma_dot
    }

    #[getter]
    fn s0(&self) -> f64 {
        self.inner.s0
    }

    fn std_dev(&self) -> f64 {
        self.inner.std_dev()
    }

    fn density_at(&self, x: f64) -> f64 {
        self.inner.density_at(x)
    }

    fn phase_at(&self, params: &PyPhysicsParams, x: f64) -> f64 {
        self.inner.phase_at(&params.inner, x)
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!(
            "VariationalState(t={}, q={}, p={}, sigma={}, sigma_dot={}, s0={})",
            s.t, s.q, s.p, s.sigma, s.sigma_dot, s.s0
        )
    }
}

#[pyclass(name = "Grid", module = "gpwave_py")]
#[derive(Clone, Copy)]
struct PyGrid {
    inner: gpwave::Grid,
}

#[pymethods]
impl PyGrid {
    #[new]
    fn new(x_min: f64, x_max: f64, n: usize) -> PyResult<Self> {
        Ok(PyGrid {
            inner: gpwave::Grid::new(x_min, x_max, n).map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.inner.dx()
    }

    fn points(&self) -> Vec<f64> {
        self.inner.points()
    }
}

#[pyclass(name = "WaveField", module = "gpwave_py")]
#[derive(Clone)]
struct PyWaveField {
    inner: gpwave::WaveField,
}

#[pymethods]
impl PyWaveField {
    #[new]
    fn new(grid: &PyGrid, values: Vec<Complex64>, t: f64) -> PyResult<Self> {
        Ok(PyWaveField {
            inner: gpwave::WaveField::new(grid.inner, values, t).map_err(to_py)?,
        })
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid { inner: self.inner.grid }
    }

    #[getter]
    fn values(&self) -> Vec<Complex64> {
        self.inner.values.clone()
    }

    fn density(&self) -> Vec<f64> {
        self.inner.density()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }
}

fn integrator(method: &str, tol: f64) -> PyResult<variational::Integrator> {
    match method {
        "rk4" => Ok(variational::Integrator::Rk4),
        "rk45" => Ok(variational::Integrator::Rk45 { tol }),
        other => Err(PyValueError::new_err(format!("unknown method `{other}` (rk4 or rk45)"))),
    }
}

/// Integrates the reduced equations; returns every `output_every`-th state
/// plus the first and last.
#[pyfunction]
#[pyo3(signature = (state, params, t_final, dt, c_int=2.0, method="rk4", tol=1e-10, output_every=1))]
#[allow(clippy::too_many_arguments)]
fn propagate(
    state: &PyVariationalState,
    params: &PyPhysicsParams,
    t_final: f64,
    dt: f64,
    c_int: f64,
    method: &str,
    tol: f64,
    output_every: usize,
) -> PyResult<Vec<PyVariationalState>> {
    let series = variational::propagate(
        &state.inner,
        &params.inner,
        gpwave::InteractionVariant::new(c_int),
        t_final,
        dt,
        integrator(method, tol)?,
        output_every,
    )
    .map_err(to_py)?;
    Ok(series.into_iter().map(|inner| PyVariationalState { inner }).collect())
}

#[pyfunction]
#[pyo3(signature = (state, params, c_int=2.0))]
fn derivatives<'py>(
    py: Python<'py>,
    state: &PyVariationalState,
    params: &PyPhysicsParams,
    c_int: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = variational::derivatives(&state.inner, &params.inner, gpwave::InteractionVariant::new(c_int))
        .map_err(to_py)?;
    let d = PyDict::new_bound(py);
    d.set_item("q_dot", r.q_dot)?;
    d.set_item("p_dot", r.p_dot)?;
    d.set_item("sigma_dot", r.sigma_dot)?;
    d.set_item("sigma_ddot", r.sigma_ddot)?;
    d.set_item("s0_dot", r.s0_dot)?;
    Ok(d)
}

#[pyfunction]
fn velocity_field(state: &PyVariationalState, params: &PyPhysicsParams, x: f64) -> f64 {
    variational::velocity_field(&state.inner, &params.inner, x)
}

/// One pathline per seed, sampled at the states of `series`.
#[pyfunction]
fn bohmian_trajectories(seeds: Vec<f64>, series: Vec<PyVariationalState>) -> Vec<Vec<f64>> {
    let states: Vec<gpwave::VariationalState> = series.iter().map(|s| s.inner).collect();
    variational::bohmian_trajectories(&seeds, &states)
}

#[pyfunction]
fn taylor_coefficients<'py>(
    py: Python<'py>,
    state: &PyVariationalState,
    params: &PyPhysicsParams,
) -> PyResult<Bound<'py, PyDict>> {
    let c = variational::taylor_coefficients(&state.inner, &params.inner);
    let d = PyDict::new_bound(py);
    for (k, v) in [
        ("v_qu_0", c.v_qu_0),
        ("v_qu_1", c.v_qu_1),
        ("v_qu_2", c.v_qu_2),
        ("v_0", c.v_0),
        ("v_1", c.v_1),
        ("v_2", c.v_2),
        ("vgp_0", c.vgp_0),
        ("vgp_1", c.vgp_1),
        ("vgp_2", c.vgp_2),
        ("s_1", c.s_1),
        ("s_2", c.s_2),
    ] {
        d.set_item(k, v)?;
    }
    Ok(d)
}

#[pyfunction]
fn synthesize(state: &PyVariationalState, params: &PyPhysicsParams, grid: &PyGrid) -> PyResult<PyWaveField> {
    Ok(PyWaveField {
        inner: variational::synthesize(&state.inner, &params.inner, &grid.inner).map_err(to_py)?,
    })
}

fn observables_dict<'py>(py: Python<'py>, o: &spectral::Observables) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new_bound(py);
    d.set_item("t", o.t)?;
    d.set_item("norm", o.norm)?;
    d.set_item("mean_x", o.mean_x)?;
    d.set_item("var_x", o.var_x)?;
    d.set_item("energy", o.energy)?;
    Ok(d)
}

#[pyfunction]
fn observables<'py>(py: Python<'py>, field: &PyWaveField, params: &PyPhysicsParams) -> PyResult<Bound<'py, PyDict>> {
    observables_dict(py, &spectral::observables(&field.inner, &params.inner))
}

/// Split-step evolution; returns `(observables, final_field)`.
#[pyfunction]
#[pyo3(signature = (field, params, t0, t_final, dt, snapshot_every=1))]
fn evolve<'py>(
    py: Python<'py>,
    field: &PyWaveField,
    params: &PyPhysicsParams,
    t0: f64,
    t_final: f64,
    dt: f64,
    snapshot_every: usize,
) -> PyResult<(Vec<Bound<'py, PyDict>>, PyWaveField)> {
    let mut last = None;
    let obs = spectral::evolve(&field.inner, &params.inner, t0, t_final, dt, snapshot_every, |f| {
        last = Some(f.clone())
    })
    .map_err(to_py)?;
    let rows = obs.iter().map(|o| observables_dict(py, o)).collect::<PyResult<Vec<_>>>()?;
    let inner = last.ok_or_else(|| PyRuntimeError::new_err("evolution produced no output"))?;
    Ok((rows, PyWaveField { inner }))
}

/// Madelung fields: `rho`, `phase`, `v_qu`, `quantum_potential`,
/// `gp_potential` and the boolean `mask`.
#[pyfunction]
#[pyo3(signature = (field, params, eps_mask=madelung::DEFAULT_EPS_MASK))]
fn decompose<'py>(
    py: Python<'py>,
    field: &PyWaveField,
    params: &PyPhysicsParams,
    eps_mask: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let m = madelung::decompose(&field.inner, &params.inner, eps_mask).map_err(to_py)?;
    let d = PyDict::new_bound(py);
    d.set_item("rho", m.rho)?;
    d.set_item("phase", m.phase)?;
    d.set_item("v_qu", m.v_qu)?;
    d.set_item("quantum_potential", m.quantum_potential)?;
    d.set_item("gp_potential", m.gp_potential)?;
    d.set_item("mask", m.mask)?;
    Ok(d)
}

/// Max-norms of the continuity, Hamilton-Jacobi and Euler residuals.
#[pyfunction]
#[pyo3(signature = (before, after, params, eps_mask=madelung::DEFAULT_EPS_MASK))]
fn residuals<'py>(
    py: Python<'py>,
    before: &PyWaveField,
    after: &PyWaveField,
    params: &PyPhysicsParams,
    eps_mask: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = madelung::residuals(&before.inner, &after.inner, &params.inner, eps_mask).map_err(to_py)?;
    let d = PyDict::new_bound(py);
    d.set_item("t_mid", r.continuity.t_mid)?;
    d.set_item("continuity", r.continuity.max_norm)?;
    d.set_item("hamilton_jacobi", r.hamilton_jacobi.max_norm)?;
    d.set_item("euler", r.euler.max_norm)?;
    Ok(d)
}

#[pymodule]
fn gpwave_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericalFailure", m.py().get_type_bound::<NumericalFailure>())?;
    m.add_class::<PyPhysicsParams>()?;
    m.add_class::<PyVariationalState>()?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyWaveField>()?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(derivatives, m)?)?;
    m.add_function(wrap_pyfunction!(velocity_field, m)?)?;
    m.add_function(wrap_pyfunction!(bohmian_trajectories, m)?)?;
    m.add_function(wrap_pyfunction!(taylor_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(observables, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(residuals, m)?)?;
    Ok(())
}
