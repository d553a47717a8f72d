//! Python bindings for the decaylab core library.

use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use decaylab::character::{self, DecayEstimate};
use decaylab::experiment::{self, ExperimentConfig};
use decaylab::profile::ProfileSpec;
use decaylab::solver::{self, SolverConfig};
use decaylab::{field_file, fit, propagator, spectral, splitting, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::BlowUp { .. } | Error::NonContraction { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Periodic lattice with `n` points per side on a box of length `box_length`.
#[pyclass(name = "Grid", frozen, eq, from_py_object)]
#[derive(Clone, Copy, PartialEq)]
struct PyGrid(decaylab::Grid);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(n: usize, box_length: f64) -> PyResult<Self> {
        decaylab::Grid::new(n, box_length)
            .map(PyGrid)
            .map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn box_length(&self) -> f64 {
        self.0.box_length
    }

    /// Wavenumber spacing `2π/L`.
    #[getter]
    fn spacing(&self) -> f64 {
        self.0.spacing()
    }

    #[getter]
    fn max_wavenumber(&self) -> f64 {
        self.0.max_wavenumber()
    }

    fn __repr__(&self) -> String {
        format!("Grid(n={}, box_length={})", self.0.n, self.0.box_length)
    }
}

/// Spectral velocity field: three arrays of complex Fourier amplitudes.
#[pyclass(name = "SpectralField", from_py_object)]
#[derive(Clone)]
struct PyField(decaylab::SpectralField);

#[pymethods]
impl PyField {
    #[staticmethod]
    fn zeros(grid: PyGrid) -> Self {
        PyField(decaylab::SpectralField::zeros(grid.0))
    }

    /// Builds a field from three flat row-major lists of `n³` complex amplitudes.
    #[staticmethod]
    fn from_components(grid: PyGrid, components: [Vec<Complex64>; 3]) -> PyResult<Self> {
        decaylab::SpectralField::from_components(grid.0, components)
            .map(PyField)
            .map_err(py_err)
    }

    /// Random solenoidal field with `|û| ∝ |ξ|^{r*} e^{−|ξ|²}` and `‖u‖_{Ḣ^{1/2}} = amplitude`.
    #[staticmethod]
    #[pyo3(signature = (r_star, grid, seed, amplitude=1.0))]
    fn synthesize(r_star: f64, grid: PyGrid, seed: u64, amplitude: f64) -> PyResult<Self> {
        character::synthesize_with_character(r_star, grid.0, seed, amplitude)
            .map(PyField)
            .map_err(py_err)
    }

    /// Like `synthesize`, parametrised by the decay character of `Λ^{1/2}u`.
    #[staticmethod]
    #[pyo3(signature = (q_star, grid, seed, amplitude=1.0))]
    fn synthesize_hhalf(q_star: f64, grid: PyGrid, seed: u64, amplitude: f64) -> PyResult<Self> {
        character::synthesize_with_hhalf_character(q_star, grid.0, seed, amplitude)
            .map(PyField)
            .map_err(py_err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        field_file::read_field(&path).map(PyField).map_err(py_err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        field_file::write_field(&self.0, &path).map_err(py_err)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(self.0.grid())
    }

    fn components(&self) -> [Vec<Complex64>; 3] {
        self.0.components().clone()
    }

    /// Physical-space velocity as three flat lists of `n³` reals.
    fn to_physical(&self) -> [Vec<f64>; 3] {
        let u = self.0.to_physical();
        [0, 1, 2].map(|j| u.component(j).to_vec())
    }

    /// `‖u‖²_{Ḣ^s}`.
    fn sobolev_norm_sq(&self, s: f64) -> f64 {
        spectral::sobolev_seminorm_sq(&self.0, s)
    }

    fn sobolev_inner(&self, other: &PyField, s: f64) -> PyResult<f64> {
        spectral::sobolev_inner(&self.0, &other.0, s).map_err(py_err)
    }

    fn leray_project(&self) -> Self {
        PyField(spectral::leray_project(&self.0))
    }

    fn riesz(&self, s: f64) -> Self {
        PyField(spectral::riesz_apply(&self.0, s))
    }

    fn dealias(&self) -> Self {
        PyField(spectral::dealias(&self.0))
    }

    fn scaled(&self, c: f64) -> Self {
        PyField(self.0.scaled(c))
    }

    fn divergence_defect(&self) -> f64 {
        self.0.divergence_defect()
    }

    fn __sub__(&self, other: &PyField) -> PyResult<Self> {
        self.0.sub(&other.0).map(PyField).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        let g = self.0.grid();
        format!("SpectralField(n={}, box_length={})", g.n, g.box_length)
    }
}

/// `e^{tM}u₀`: exact heat flow with Coriolis rotation at speed `omega`.
#[pyfunction]
#[pyo3(signature = (u, t, omega=0.0))]
fn semigroup_apply(u: &PyField, t: f64, omega: f64) -> PyResult<PyField> {
    let params = propagator::RotationParams::new(omega).map_err(py_err)?;
    propagator::semigroup_apply(&u.0, t, params)
        .map(PyField)
        .map_err(py_err)
}

#[pyfunction]
fn coriolis_term(u: &PyField) -> PyField {
    PyField(propagator::coriolis_term(&u.0))
}

/// `−ℙ∇·(u⊗u)`.
#[pyfunction]
#[pyo3(signature = (u, dealias=true))]
fn nonlinear_term(u: &PyField, dealias: bool) -> PyField {
    PyField(solver::nonlinear_term(&u.0, dealias))
}

/// One integrating-factor RK4 step.
#[pyfunction]
#[pyo3(signature = (u, dt, omega=0.0))]
fn step(u: &PyField, dt: f64, omega: f64) -> PyResult<PyField> {
    let params = propagator::RotationParams::new(omega).map_err(py_err)?;
    solver::step(&u.0, dt, params).map(PyField).map_err(py_err)
}

/// Picard iteration of the mild-solution map; returns `(u(T), distances)`.
#[pyfunction]
#[pyo3(signature = (u0, t_final, k_max, quad_points, omega=0.0))]
fn picard_solve(
    u0: &PyField,
    t_final: f64,
    k_max: usize,
    quad_points: usize,
    omega: f64,
) -> PyResult<(PyField, Vec<f64>)> {
    let params = propagator::RotationParams::new(omega).map_err(py_err)?;
    let out = solver::picard_solve(&u0.0, t_final, k_max, quad_points, params).map_err(py_err)?;
    Ok((PyField(out.solution), out.distances))
}

/// Runs the solver; `config` is the JSON of a solver config. Returns the
/// time series as CSV text.
#[pyfunction]
fn run_simulation(config: &str, u0: &PyField) -> PyResult<String> {
    let config: SolverConfig = serde_json::from_str(config).map_err(json_err)?;
    let series = solver::run_simulation(&config, &u0.0).map_err(py_err)?;
    Ok(series.to_csv_string())
}

#[pyfunction]
fn bilinear_ratio(u: &PyField) -> PyResult<f64> {
    splitting::bilinear_ratio(&u.0).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (t, variant="power_schedule", alpha=4.0))]
fn splitting_radius(t: f64, variant: &str, alpha: f64) -> PyResult<f64> {
    let schedule = match variant {
        "log_schedule" => splitting::SplittingSchedule::log(),
        "power_schedule" => splitting::SplittingSchedule::power(alpha).map_err(py_err)?,
        other => return Err(PyValueError::new_err(format!("unknown schedule {other}"))),
    };
    Ok(schedule.radius(t))
}

fn estimate_json(e: DecayEstimate) -> PyResult<String> {
    serde_json::to_string(&e).map_err(json_err)
}

/// Decay-character estimate of a lattice field, as JSON.
#[pyfunction]
fn estimate_decay_character(u: &PyField) -> PyResult<String> {
    estimate_json(character::estimate_decay_character(&u.0, None).map_err(py_err)?)
}

/// Decay-character estimate of a profile spec such as
/// `{"family": "power_gauss", "r_star": 0}`, as JSON.
#[pyfunction]
fn profile_decay_character(spec: &str) -> PyResult<String> {
    let spec: ProfileSpec = serde_json::from_str(spec).map_err(json_err)?;
    let profile = spec.build().map_err(py_err)?;
    estimate_json(character::estimate_decay_character(&profile, None).map_err(py_err)?)
}

/// `‖e^{tΔ}u₀‖²_{Ḣ^s}` for a radial profile spec, by quadrature.
#[pyfunction]
fn continuum_linear_norm(spec: &str, s: f64, t: f64) -> PyResult<f64> {
    let spec: ProfileSpec = serde_json::from_str(spec).map_err(json_err)?;
    let profile = spec.build().map_err(py_err)?;
    character::continuum_linear_norm(&profile, s, t).map_err(py_err)
}

/// Fits `y ~ (1+t)^{−β}` on `[t0, t1]`; returns `(beta, r_squared)`.
#[pyfunction]
fn fit_power_law(t: Vec<f64>, y: Vec<f64>, t0: f64, t1: f64) -> PyResult<(f64, f64)> {
    if t.len() != y.len() {
        return Err(PyValueError::new_err("t and y differ in length"));
    }
    let series: Vec<(f64, f64)> = t.into_iter().zip(y).collect();
    let f = fit::fit_power_law(&series, [t0, t1]).map_err(py_err)?;
    Ok((f.beta, f.r_squared))
}

/// Runs the experiment in a JSON config file; returns the report as JSON.
#[pyfunction]
fn run_experiment(config_path: PathBuf) -> PyResult<String> {
    let config = ExperimentConfig::load(&config_path).map_err(py_err)?;
    Ok(experiment::run_experiment(&config)
        .map_err(py_err)?
        .to_json())
}

#[pymodule]
fn decaylab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(semigroup_apply, m)?)?;
    m.add_function(wrap_pyfunction!(coriolis_term, m)?)?;
    m.add_function(wrap_pyfunction!(nonlinear_term, m)?)?;
    m.add_function(wrap_pyfunction!(step, m)?)?;
    m.add_function(wrap_pyfunction!(picard_solve, m)?)?;
    m.add_function(wrap_pyfunction!(run_simulation, m)?)?;
    m.add_function(wrap_pyfunction!(bilinear_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(splitting_radius, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_decay_character, m)?)?;
    m.add_function(wrap_pyfunction!(profile_decay_character, m)?)?;
    m.add_function(wrap_pyfunction!(continuum_linear_norm, m)?)?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
