//! Python bindings. Matrices cross the boundary as nested lists of complex.

use ::fockport as core;
use core::metrics::{self, Estimate};
use core::resources::{self, build_resource, parse_resource};
use core::validation::{run_validation, ValidationOptions};
use core::{ResourceState, C64};
use nalgebra::DMatrix;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn estimate<'py>(py: Python<'py>, e: Estimate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("mean", e.mean)?;
    d.set_item("std_error", e.std_error)?;
    d.set_item("samples", e.samples)?;
    Ok(d)
}

/// Two-mode resource state on the sector with `nu` particles.
#[pyclass(frozen, module = "fockport")]
struct Resource {
    state: ResourceState,
    descriptor: Option<String>,
}

#[pymethods]
impl Resource {
    /// Build from a descriptor such as `maxent` or `bh:gamma=-0.5`.
    #[new]
    fn new(descriptor: &str, nu: usize) -> PyResult<Self> {
        let spec = parse_resource(descriptor, nu).map_err(err)?;
        Ok(Self { state: build_resource(&spec).map_err(err)?, descriptor: Some(spec.descriptor()) })
    }

    /// Density matrix in the `|k, nu-k>` basis.
    #[staticmethod]
    fn from_matrix(rows: Vec<Vec<C64>>) -> PyResult<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let m = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        Ok(Self { state: ResourceState::new(m).map_err(err)?, descriptor: None })
    }

    /// Pure state from amplitudes `c_k` of `|k, nu-k>`.
    #[staticmethod]
    fn from_amplitudes(amplitudes: Vec<C64>) -> PyResult<Self> {
        let psi = core::PureNumberState::normalized(amplitudes).map_err(err)?;
        Ok(Self { state: ResourceState::pure(&psi), descriptor: None })
    }

    #[getter]
    fn nu(&self) -> usize {
        self.state.n_particles()
    }

    #[getter]
    fn descriptor(&self) -> Option<String> {
        self.descriptor.clone()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        let m = self.state.matrix();
        (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
    }

    fn fidelity(&self, n: usize) -> PyResult<f64> {
        metrics::fidelity_closed_form(&self.state, n).map_err(err)
    }

    fn entanglement(&self, n: usize) -> f64 {
        metrics::avg_final_entanglement(&self.state, n)
    }

    fn perfect_probability(&self, n: usize) -> f64 {
        metrics::perfect_outcome_probability(&self.state, n)
    }

    #[pyo3(signature = (n, m = 1))]
    fn fidelity_multimode(&self, n: usize, m: usize) -> PyResult<f64> {
        core::multimode::fidelity_multimode(&self.state, n, m).map_err(err)
    }

    #[pyo3(signature = (n, samples = 10_000, seed = 1))]
    fn fidelity_monte_carlo<'py>(&self, py: Python<'py>, n: usize, samples: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        let e = py.detach(|| metrics::fidelity_monte_carlo(&self.state, n, samples, seed)).map_err(err)?;
        estimate(py, e)
    }

    #[pyo3(signature = (n, samples = 10_000, seed = 1))]
    fn entanglement_monte_carlo<'py>(&self, py: Python<'py>, n: usize, samples: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        let e = py.detach(|| metrics::avg_entanglement_monte_carlo(&self.state, n, samples, seed)).map_err(err)?;
        estimate(py, e)
    }

    /// Haar-averaged summary with one entry per measurement outcome.
    fn report<'py>(&self, py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyDict>> {
        let rep = metrics::teleport_report(&self.state, n).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("N", rep.n_in)?;
        d.set_item("nu", rep.n_res)?;
        d.set_item("fidelity", rep.fidelity)?;
        d.set_item("entanglement", rep.avg_entanglement)?;
        let mut outcomes = Vec::with_capacity(rep.per_outcome.len());
        for o in &rep.per_outcome {
            let row = PyDict::new(py);
            row.set_item("l", o.outcome.l)?;
            row.set_item("lambda", o.outcome.lambda)?;
            row.set_item("probability", o.probability)?;
            row.set_item("fidelity", o.conditional_fidelity)?;
            row.set_item("negativity", o.conditional_negativity)?;
            outcomes.push(row);
        }
        d.set_item("outcomes", outcomes)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        match &self.descriptor {
            Some(s) => format!("Resource({s:?}, nu={})", self.nu()),
            None => format!("Resource(<matrix>, nu={})", self.nu()),
        }
    }
}

#[pyfunction]
#[pyo3(signature = (alpha, n, beta = None))]
fn haar_moment(alpha: f64, n: usize, beta: Option<f64>) -> PyResult<f64> {
    metrics::haar_moment(alpha, beta, n).map_err(err)
}

#[pyfunction]
fn classify_regime(nu: usize, gamma: f64) -> String {
    resources::classify_regime(nu, gamma).to_string()
}

/// Ground-state amplitudes of the two-site Bose-Hubbard model.
#[pyfunction]
#[pyo3(signature = (nu, gamma, tau = 1.0))]
fn bose_hubbard_ground_state(nu: usize, gamma: f64, tau: f64) -> PyResult<Vec<f64>> {
    let g = resources::bose_hubbard_ground_state(nu, gamma, tau).map_err(err)?;
    Ok(g.coeffs().iter().map(|c| c.re).collect())
}

#[pyfunction]
fn multimode_dimension(n: usize, m: usize) -> PyResult<u64> {
    core::multimode::total_dimension(n, m).map_err(err)
}

/// Run a sweep config and return the CSV text.
#[pyfunction]
#[pyo3(signature = (config, seed = 1))]
fn run_sweep(py: Python<'_>, config: &str, seed: u64) -> PyResult<String> {
    let cfg = core::sweep::SweepConfig::parse(config, seed).map_err(err)?;
    py.detach(|| core::sweep::run_sweep(&cfg).and_then(|rows| core::sweep::csv_string(&rows)))
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (name, samples = 0, seed = 1))]
fn preset(py: Python<'_>, name: &str, samples: usize, seed: u64) -> PyResult<String> {
    let mut cfg = core::sweep::preset(name, seed).map_err(err)?;
    cfg.samples = samples;
    cfg.validate().map_err(err)?;
    py.detach(|| core::sweep::run_sweep(&cfg).and_then(|rows| core::sweep::csv_string(&rows)))
        .map_err(err)
}

/// Every acceptance criterion and invariant check as a list of dicts.
#[pyfunction]
#[pyo3(signature = (samples = 100_000, seed = 1))]
fn validate<'py>(py: Python<'py>, samples: usize, seed: u64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let results = py.detach(|| run_validation(&ValidationOptions { samples: samples.max(2), seed }));
    results
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("name", r.name)?;
            d.set_item("passed", r.passed)?;
            d.set_item("expected", r.expected)?;
            d.set_item("observed", r.observed)?;
            d.set_item("tolerance", r.tolerance)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn fockport(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Resource>()?;
    m.add_function(wrap_pyfunction!(haar_moment, m)?)?;
    m.add_function(wrap_pyfunction!(classify_regime, m)?)?;
    m.add_function(wrap_pyfunction!(bose_hubbard_ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(multimode_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(preset, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
