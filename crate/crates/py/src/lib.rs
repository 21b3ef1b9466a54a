//! Python bindings. Configurations cross the boundary as dicts with the same
//! keys as the TOML sections; reports come back as dicts.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use radswap_cli::config::ConfigFile;
use radswap_cli::verify::{run_verify, Fault};
use radswap_core::estimators;
use radswap_core::kmc_sim::{self, EncounterClass, RecombinationTally, SimConfig, SpinOutcome};
use radswap_core::pde_solver::{self, CoupledConfig, KineticParams, RadialGrid};
use radswap_core::spin_algebra::{self, rho_n, werner_param};
use radswap_core::swap_calculus::{self, IndexSequence};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::path::PathBuf;

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(value_err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(value_err)
}

fn label<T: DeserializeOwned>(s: &str) -> PyResult<T> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(value_err)
}

fn load(path: PathBuf) -> PyResult<ConfigFile> {
    ConfigFile::load(&path).map_err(|e| match e {
        radswap_cli::config::ConfigError::Read { .. } => PyIOError::new_err(e.to_string()),
        other => value_err(other),
    })
}

fn sequence(v: Vec<f64>) -> PyResult<IndexSequence> {
    IndexSequence::new(v).map_err(value_err)
}

/// ξ = (−1/3)ⁿ of Werner index n.
#[pyfunction]
fn xi_of_index(n: u32) -> f64 {
    spin_algebra::xi_of_index(n)
}

/// Exact swap of ρ_n ⊗ ρ_m conditioned on the meeting-pair outcome.
/// Returns (outcome probability, Werner parameter of the orphan pair).
#[pyfunction]
#[pyo3(signature = (n, m, outcome = "singlet"))]
fn swap_exact(n: u32, m: u32, outcome: &str) -> PyResult<(f64, f64)> {
    let (a, b) = (rho_n(n), rho_n(m));
    let r = match label::<SpinOutcome>(outcome)? {
        SpinOutcome::Singlet => spin_algebra::swap_singlet_exact(&a, &b),
        SpinOutcome::Triplet => spin_algebra::swap_triplet_exact(&a, &b),
    }
    .map_err(value_err)?;
    Ok((r.probability, werner_param(&r.state).map_err(value_err)?))
}

/// Werner index of the orphan pair: n+m after a singlet, n+m+1 after a triplet.
#[pyfunction]
#[pyo3(signature = (n, m, outcome = "singlet"))]
fn swap_index(n: u32, m: u32, outcome: &str) -> PyResult<Option<u32>> {
    Ok(match label::<SpinOutcome>(outcome)? {
        SpinOutcome::Singlet => spin_algebra::swap_singlet_closed(n, m),
        SpinOutcome::Triplet => spin_algebra::swap_triplet_closed(n, m),
    }
    .index())
}

/// Singlet recombination probability (1 + 3ξ)/4.
#[pyfunction]
fn singlet_probability(xi: f64) -> PyResult<f64> {
    let state = spin_algebra::WernerState::from_param(xi).map_err(value_err)?;
    Ok(spin_algebra::singlet_probability(state))
}

#[pyfunction]
fn swap_gain(a: Vec<f64>, b: Vec<f64>) -> PyResult<Vec<f64>> {
    let g = swap_calculus::swap_gain(&sequence(a)?, &sequence(b)?).map_err(value_err)?;
    Ok(g.values().to_vec())
}

/// Σₙ(−1/3)ⁿ of the swap gain; zero up to round-off.
#[pyfunction]
fn cancellation_residual(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    Ok(swap_calculus::cancellation_residual(&sequence(a)?, &sequence(b)?))
}

#[pyfunction]
fn nu_ratio_from_xi(xi0: f64) -> PyResult<f64> {
    pde_solver::nu_ratio_from_xi(xi0).map_err(value_err)
}

#[pyfunction]
fn xi0_from_ratio(ratio: f64) -> f64 {
    estimators::xi0_from_ratio(ratio)
}

#[pyfunction]
fn nu_ratio_from_counts(py: Python<'_>, singlets: u64, triplets: u64) -> PyResult<Py<PyAny>> {
    to_py(py, &estimators::nu_ratio_from_counts(singlets, triplets).map_err(value_err)?)
}

/// Two-proportion test of (singlets, triplets) count pairs.
#[pyfunction]
fn compare_counts(py: Python<'_>, exact: (u64, u64), reset: (u64, u64)) -> PyResult<Py<PyAny>> {
    to_py(py, &estimators::compare_counts(exact, reset).map_err(value_err)?)
}

/// The algebra self-check behind `radswap verify`.
#[pyfunction]
fn verify(py: Python<'_>) -> PyResult<Py<PyAny>> {
    to_py(py, &run_verify(Fault::None))
}

/// Steady-state ξ(r) of the scalar equation at density g. Returns (radii, xi).
#[pyfunction]
fn xi_steady_state(params: &Bound<'_, PyAny>, r_max: f64, shells: usize, g: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let params: KineticParams = from_py(params)?;
    let grid = RadialGrid::new(r_max, shells).map_err(value_err)?;
    let xi = pde_solver::xi_steady_state(&grid, &params, g).map_err(value_err)?;
    Ok((grid.radii(), xi.values().to_vec()))
}

/// Hierarchy-vs-scalar solver run.
#[pyclass(name = "PdeConfig", module = "radswap")]
struct PyPdeConfig {
    inner: CoupledConfig,
}

#[pymethods]
impl PyPdeConfig {
    #[staticmethod]
    fn from_dict(d: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner: CoupledConfig = from_py(d)?;
        inner.validate().map_err(value_err)?;
        Ok(Self { inner })
    }

    /// Reads the [pde] section of a config file.
    #[staticmethod]
    fn from_toml(path: PathBuf) -> PyResult<Self> {
        let file = load(path.clone())?;
        let inner = file.pde(&path).map_err(value_err)?.clone();
        Ok(Self { inner })
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner)
    }

    /// Runs both solvers. The report carries the final ξ profiles of each.
    fn run(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let cfg = self.inner.clone();
        let report = py.detach(move || pde_solver::run_coupled(&cfg)).map_err(value_err)?;
        let out = to_py(py, &report)?;
        if let Some(last) = report.checkpoints.last() {
            let d = out.bind(py);
            d.set_item("xi_hierarchy", last.xi_hierarchy.clone())?;
            d.set_item("xi_scalar", last.xi_scalar.clone())?;
        }
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "PdeConfig(shells={}, truncation={}, dt={}, t_end={})",
            self.inner.shells, self.inner.truncation, self.inner.dt, self.inner.t_end
        )
    }
}

/// Kinetic Monte Carlo configuration.
#[pyclass(name = "KmcConfig", module = "radswap")]
struct PyKmcConfig {
    inner: SimConfig,
    replicas: u64,
}

#[pymethods]
impl PyKmcConfig {
    #[staticmethod]
    #[pyo3(signature = (d, replicas = 1))]
    fn from_dict(d: &Bound<'_, PyAny>, replicas: u64) -> PyResult<Self> {
        let inner: SimConfig = from_py(d)?;
        inner.validate().map_err(value_err)?;
        Ok(Self { inner, replicas })
    }

    /// Reads the [kmc] and [ensemble] sections of a config file.
    #[staticmethod]
    fn from_toml(path: PathBuf) -> PyResult<Self> {
        let file = load(path.clone())?;
        let inner = file.kmc(&path).map_err(value_err)?.clone();
        Ok(Self {
            inner,
            replicas: file.replicas(),
        })
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner)
    }

    #[getter]
    fn replicas(&self) -> u64 {
        self.replicas
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.inner.seed = seed;
    }

    #[getter]
    fn swap_mode(&self) -> &'static str {
        match self.inner.swap_mode {
            radswap_core::SwapMode::Exact => "exact",
            radswap_core::SwapMode::ClassicalReset => "classical-reset",
        }
    }

    #[setter]
    fn set_swap_mode(&mut self, mode: &str) -> PyResult<()> {
        self.inner.swap_mode = label(mode)?;
        Ok(())
    }

    fn __repr__(&self) -> String {
        format!(
            "KmcConfig(box_side={}, seed={}, swap_mode={}, replicas={})",
            self.inner.box_side,
            self.inner.seed,
            self.swap_mode(),
            self.replicas
        )
    }
}

/// Recombination counts by encounter class and outcome.
#[pyclass(name = "Tally", module = "radswap")]
struct PyTally {
    inner: RecombinationTally,
}

#[pymethods]
impl PyTally {
    #[getter]
    fn singlets(&self) -> u64 {
        self.inner.singlets()
    }

    #[getter]
    fn triplets(&self) -> u64 {
        self.inner.triplets()
    }

    #[getter]
    fn total(&self) -> u64 {
        self.inner.total()
    }

    /// Event-weighted ξ̂(0); None for an empty tally.
    #[getter]
    fn xi_mean(&self) -> Option<f64> {
        self.inner.xi_mean()
    }

    fn count(&self, class: &str, outcome: &str) -> PyResult<u64> {
        Ok(self.inner.count(label(class)?, label(outcome)?))
    }

    fn class_total(&self, class: &str) -> PyResult<u64> {
        Ok(self.inner.class_total(label(class)?))
    }

    /// (index, singlets, triplets) of correlated-pair recombinations.
    fn index_counts(&self) -> Vec<(u32, u64, u64)> {
        self.inner.index_counts().collect()
    }

    fn nu_ratio(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &estimators::nu_ratio(&self.inner).map_err(value_err)?)
    }

    #[pyo3(signature = (resamples = 1000, seed = 0))]
    fn nu_ratio_bootstrap(&self, py: Python<'_>, resamples: usize, seed: u64) -> PyResult<Py<PyAny>> {
        to_py(
            py,
            &estimators::nu_ratio_bootstrap(&self.inner, resamples, seed).map_err(value_err)?,
        )
    }

    fn ratio_consistency(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &estimators::ratio_consistency(&self.inner).map_err(value_err)?)
    }

    fn merge(&mut self, other: &PyTally) {
        self.inner.merge(&other.inner);
    }

    /// Counts per class as {class: {outcome: n}}.
    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let mut m = serde_json::Map::new();
        for c in EncounterClass::ALL {
            let mut row = serde_json::Map::new();
            for o in [SpinOutcome::Singlet, SpinOutcome::Triplet] {
                row.insert(o.label().into(), self.inner.count(c, o).into());
            }
            m.insert(c.label().into(), row.into());
        }
        to_py(py, &m)
    }

    fn __repr__(&self) -> String {
        format!(
            "Tally(singlets={}, triplets={})",
            self.inner.singlets(),
            self.inner.triplets()
        )
    }
}

/// Runs the replica ensemble and returns the merged tally. `replicas`
/// defaults to the config's; `workers = 0` uses every core.
#[pyfunction]
#[pyo3(signature = (config, replicas = None, workers = 0))]
fn run_kmc(py: Python<'_>, config: &PyKmcConfig, replicas: Option<u64>, workers: usize) -> PyResult<PyTally> {
    let cfg = config.inner.clone();
    let n = replicas.unwrap_or(config.replicas);
    let ens = py
        .detach(move || kmc_sim::run_ensemble(&cfg, n, workers))
        .map_err(value_err)?;
    Ok(PyTally { inner: ens.merged })
}

#[pyfunction]
fn compare_modes(py: Python<'_>, exact: &PyTally, reset: &PyTally) -> PyResult<Py<PyAny>> {
    let c = estimators::compare_modes(&exact.inner, &reset.inner).map_err(value_err)?;
    to_py(py, &c)
}

#[pymodule]
fn radswap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(xi_of_index, m)?)?;
    m.add_function(wrap_pyfunction!(swap_exact, m)?)?;
    m.add_function(wrap_pyfunction!(swap_index, m)?)?;
    m.add_function(wrap_pyfunction!(singlet_probability, m)?)?;
    m.add_function(wrap_pyfunction!(swap_gain, m)?)?;
    m.add_function(wrap_pyfunction!(cancellation_residual, m)?)?;
    m.add_function(wrap_pyfunction!(nu_ratio_from_xi, m)?)?;
    m.add_function(wrap_pyfunction!(xi0_from_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(nu_ratio_from_counts, m)?)?;
    m.add_function(wrap_pyfunction!(compare_counts, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(xi_steady_state, m)?)?;
    m.add_function(wrap_pyfunction!(run_kmc, m)?)?;
    m.add_function(wrap_pyfunction!(compare_modes, m)?)?;
    m.add_class::<PyPdeConfig>()?;
    m.add_class::<PyKmcConfig>()?;
    m.add_class::<PyTally>()?;
    Ok(())
}
