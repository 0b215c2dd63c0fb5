//! Python bindings: scenarios and their audit reports, the CLI commands,
//! the sphere cell grid and Whitney decompositions of planar regions.

use std::collections::BTreeMap;
use std::path::PathBuf;

use curvlab::degree;
use curvlab::fractal::{verify_whitney, whitney_census_slope, whitney_decompose};
use curvlab::harness::{self, FractalRegion, Overrides};
use curvlab::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "AuditReport", frozen)]
struct PyAuditReport(harness::AuditReport);

#[pymethods]
impl PyAuditReport {
    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }

    #[getter]
    fn kind(&self) -> &str {
        &self.0.kind
    }

    #[getter]
    fn status(&self) -> &'static str {
        self.0.status.as_str()
    }

    #[getter]
    fn metrics(&self) -> BTreeMap<String, f64> {
        self.0.metrics.clone()
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.0.notes.clone()
    }

    /// Table name → (columns, rows).
    #[getter]
    fn tables(&self) -> BTreeMap<String, (Vec<String>, Vec<Vec<f64>>)> {
        self.0.tables.iter().map(|(k, t)| (k.clone(), (t.columns.clone(), t.rows.clone()))).collect()
    }

    fn __repr__(&self) -> String {
        format!("AuditReport(name={:?}, kind={:?}, status={:?})", self.0.name, self.0.kind, self.0.status.as_str())
    }
}

#[pyclass(name = "Scenario", frozen)]
struct PyScenario(harness::Scenario);

#[pymethods]
impl PyScenario {
    #[new]
    #[pyo3(signature = (config = "{}"))]
    fn new(config: &str) -> PyResult<Self> {
        harness::Scenario::from_json(config).map(Self).map_err(to_py)
    }

    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    #[getter]
    fn resolutions(&self) -> Vec<usize> {
        self.0.resolutions.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    /// Runs every audit; reports are also written to `out` when given.
    #[pyo3(signature = (out = None))]
    fn run(&self, py: Python<'_>, out: Option<PathBuf>) -> PyResult<Vec<PyAuditReport>> {
        let s = self.0.clone();
        let (_, reports) = py.detach(move || harness::run(&s, out.as_deref())).map_err(to_py)?;
        Ok(reports.into_iter().map(PyAuditReport).collect())
    }
}

/// Runs a CLI subcommand and returns (summary, reports).
#[pyfunction]
#[pyo3(signature = (command, config = None, seed = None, resolution = None, out = None))]
fn run_command<'py>(
    py: Python<'py>,
    command: &str,
    config: Option<String>,
    seed: Option<u64>,
    resolution: Option<usize>,
    out: Option<PathBuf>,
) -> PyResult<(Bound<'py, PyAny>, Vec<PyAuditReport>)> {
    let cmd = harness::Command::parse(command).ok_or_else(|| PyValueError::new_err(format!("unknown command {command:?}")))?;
    let ov = Overrides { seed, resolution };
    let (summary, reports) = py.detach(move || harness::execute(cmd, config.as_deref(), ov, out.as_deref())).map_err(to_py)?;
    let text = serde_json::to_string(&summary).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((json_to_py(py, &text)?, reports.into_iter().map(PyAuditReport).collect()))
}

#[pyclass(name = "SphereCellGrid", frozen)]
struct PySphereCellGrid(degree::SphereCellGrid);

#[pymethods]
impl PySphereCellGrid {
    /// Cube-face grid on Sⁿ with k cells per face axis.
    #[new]
    fn new(n: usize, k: usize) -> PyResult<Self> {
        degree::SphereCellGrid::new(n, k).map(Self).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    fn areas(&self) -> Vec<f64> {
        self.0.areas().to_vec()
    }

    fn total_area(&self) -> f64 {
        self.0.total_area()
    }

    fn locate(&self, p: Vec<f64>) -> PyResult<usize> {
        if p.len() != self.0.n() + 1 {
            return Err(PyValueError::new_err(format!("point needs {} components", self.0.n() + 1)));
        }
        Ok(self.0.locate(&p))
    }

    fn cell_center(&self, cell: usize) -> PyResult<Vec<f64>> {
        if cell >= self.0.len() {
            return Err(PyValueError::new_err("cell index out of range"));
        }
        Ok(self.0.cell_center(cell))
    }
}

/// Volume of the unit n-sphere.
#[pyfunction]
fn sphere_volume(n: usize) -> f64 {
    degree::sphere_volume(n)
}

/// Whitney decomposition of a region given as JSON, e.g.
/// `{"shape": "disk", "center": [0, 0], "radius": 1}`.
#[pyfunction]
#[pyo3(signature = (region, k_max, gap = 1e-3))]
fn whitney<'py>(py: Python<'py>, region: &str, k_max: i32, gap: f64) -> PyResult<Bound<'py, PyDict>> {
    let spec: FractalRegion = serde_json::from_str(region).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let r = spec.build().map_err(to_py)?;
    let w = py.detach(|| whitney_decompose(r.as_ref(), k_max)).map_err(to_py)?;
    let audit = py.detach(|| verify_whitney(&w, r.as_ref(), gap));
    let d = PyDict::new(py);
    d.set_item("cubes", w.cubes.len())?;
    d.set_item("census", w.census.clone())?;
    d.set_item("volume", w.cubes.iter().map(|q| q.volume()).sum::<f64>())?;
    d.set_item("unresolved_volume", w.unresolved_volume)?;
    d.set_item("uncertified", w.uncertified)?;
    d.set_item("violations", audit.violations)?;
    d.set_item("outside", audit.outside)?;
    d.set_item("passed", audit.passed())?;
    let lo = w.census.keys().next().copied().unwrap_or(0).max(k_max - 5);
    d.set_item("census_slope", whitney_census_slope(&w, lo, k_max).ok())?;
    Ok(d)
}

#[pymodule(name = "curvlab")]
fn curvlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyAuditReport>()?;
    m.add_class::<PySphereCellGrid>()?;
    m.add_function(wrap_pyfunction!(run_command, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_volume, m)?)?;
    m.add_function(wrap_pyfunction!(whitney, m)?)?;
    Ok(())
}
