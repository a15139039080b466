//! Python bindings: torus geometry, walk grids with the vacancy detectors,
//! the lattice numerics and the config-driven experiment runner.
//! Structured results come back as plain dicts and lists.

use std::fs::File;
use std::io::{BufReader, BufWriter};

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;
use torus_vacant::experiments::{self, Command, RunOptions};
use torus_vacant::lattice::TorusGeometry;
use torus_vacant::walk_engine::{run_walk, OccupancyGrid, StartRule, WalkConfig};
use torus_vacant::{coupling_lab, potential_theory as pt, vacancy_analysis as va, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        Error::Config(_) | Error::Format(_) | Error::Json(_) | Error::Parameter(_) | Error::Geometry(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for torus_vacant::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Serializable value to a Python object through `json.loads`.
fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

/// The discrete torus `(Z/NZ)^d`.
#[pyclass(name = "Geometry", module = "torus_vacant", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGeometry {
    inner: TorusGeometry,
}

#[pymethods]
impl PyGeometry {
    #[new]
    fn new(d: usize, n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: TorusGeometry::new(d, n).py()?,
        })
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.side()
    }

    #[getter]
    fn cell_count(&self) -> usize {
        self.inner.cell_count()
    }

    /// Linear index of a cell; coordinates are reduced modulo N.
    fn index(&self, coords: Vec<i64>) -> PyResult<usize> {
        Ok(self.inner.index(&self.inner.point(&coords).py()?))
    }

    fn coords(&self, index: usize) -> PyResult<Vec<usize>> {
        if index >= self.inner.cell_count() {
            return Err(PyValueError::new_err(format!("index {index} out of range")));
        }
        Ok(self.inner.point_at(index).coords().to_vec())
    }

    /// Torus L-infinity distance.
    fn distance(&self, a: Vec<i64>, b: Vec<i64>) -> PyResult<usize> {
        Ok(self.inner.linf_dist(&self.inner.point(&a).py()?, &self.inner.point(&b).py()?))
    }

    fn __repr__(&self) -> String {
        format!("Geometry(d={}, n={})", self.inner.dim(), self.inner.side())
    }
}

/// First-visit times of one walk; every query takes the time `t`.
#[pyclass(name = "Grid", module = "torus_vacant", frozen)]
struct PyGrid {
    inner: OccupancyGrid,
}

impl PyGrid {
    fn point(&self, x: &[i64]) -> PyResult<torus_vacant::lattice::TorusPoint> {
        self.inner.geometry().point(x).py()
    }

    fn time(&self, t: Option<u64>) -> u64 {
        t.unwrap_or(self.inner.total_steps())
    }
}

#[pymethods]
impl PyGrid {
    /// Runs `floor(u N^d)` steps from a uniform start, or from `start`.
    #[staticmethod]
    #[pyo3(signature = (d, n, u, seed, replica=0, start=None))]
    fn walk(py: Python<'_>, d: usize, n: usize, u: f64, seed: u64, replica: u64, start: Option<Vec<i64>>) -> PyResult<Self> {
        let g = TorusGeometry::new(d, n).py()?;
        let mut cfg = WalkConfig::new(g, u, seed, replica);
        if let Some(s) = start {
            cfg = cfg.with_start(StartRule::Fixed(s));
        }
        let inner = py.detach(|| run_walk(&cfg, &mut [])).py()?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        let f = File::open(path).map_err(|e| PyOSError::new_err(e.to_string()))?;
        Ok(Self {
            inner: OccupancyGrid::read_from(BufReader::new(f)).py()?,
        })
    }

    fn write(&self, path: &str) -> PyResult<()> {
        let f = File::create(path).map_err(|e| PyOSError::new_err(e.to_string()))?;
        self.inner.write_to(BufWriter::new(f)).py()
    }

    #[getter]
    fn geometry(&self) -> PyGeometry {
        PyGeometry {
            inner: self.inner.geometry().clone(),
        }
    }

    #[getter]
    fn total_steps(&self) -> u64 {
        self.inner.total_steps()
    }

    /// First-visit time per cell, `None` for cells never visited.
    fn first_visit(&self) -> Vec<Option<u32>> {
        self.inner
            .first_visit()
            .iter()
            .map(|&v| (v != torus_vacant::walk_engine::NEVER).then_some(v))
            .collect()
    }

    #[pyo3(signature = (t=None))]
    fn vacant_mask(&self, t: Option<u64>) -> PyResult<Vec<bool>> {
        let t = self.time(t);
        self.inner.check_time(t).py()?;
        Ok(self.inner.vacant_mask(t))
    }

    #[pyo3(signature = (t=None))]
    fn vacant_fraction(&self, t: Option<u64>) -> PyResult<f64> {
        va::vacant_fraction(&self.inner, self.time(t)).py()
    }

    #[pyo3(signature = (k, beta, t=None))]
    fn event_v(&self, k: f64, beta: f64, t: Option<u64>) -> PyResult<bool> {
        Ok(va::detect_v(&self.inner, self.time(t), k, beta).py()?.holds)
    }

    #[pyo3(signature = (k, t=None))]
    fn event_u(&self, k: f64, t: Option<u64>) -> PyResult<bool> {
        Ok(va::detect_u(&self.inner, self.time(t), k).py()?.holds)
    }

    #[pyo3(signature = (k, x, t=None))]
    fn event_c(&self, k: f64, x: Vec<i64>, t: Option<u64>) -> PyResult<bool> {
        va::detect_c(&self.inner, self.time(t), k, &self.point(&x)?).py()
    }

    /// Full report for G = V and U with the giant component.
    #[pyo3(signature = (k, beta, t=None))]
    fn event_g<'py>(&self, py: Python<'py>, k: f64, beta: f64, t: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        let r = va::detect_g(&self.inner, self.time(t), k, beta).py()?;
        to_py(py, &r)
    }

    #[pyo3(signature = (t=None))]
    fn largest_vacant_ball(&self, t: Option<u64>) -> PyResult<usize> {
        va::largest_vacant_ball(&self.inner, self.time(t)).py()
    }

    #[pyo3(signature = (t=None))]
    fn longest_axis_run(&self, t: Option<u64>) -> PyResult<usize> {
        va::longest_axis_run(&self.inner, self.time(t)).py()
    }

    /// Component label per cell (`None` where visited) and, per label,
    /// whether it holds an axis run of `run_cells` vacant cells.
    #[pyo3(signature = (run_cells, t=None))]
    fn components(&self, run_cells: usize, t: Option<u64>) -> PyResult<(Vec<Option<usize>>, Vec<bool>)> {
        let c = va::vacant_components(&self.inner, self.time(t), run_cells).py()?;
        let labels = (0..self.inner.geometry().cell_count()).map(|i| c.label(i)).collect();
        Ok((labels, c.has_run.clone()))
    }

    fn __repr__(&self) -> String {
        let g = self.inner.geometry();
        format!("Grid(d={}, n={}, steps={})", g.dim(), g.side(), self.inner.total_steps())
    }
}

/// Return probability of the walk on `Z^nu`.
#[pyfunction]
#[pyo3(signature = (nu, tolerance=pt::DEFAULT_TOLERANCE))]
fn q_nu<'py>(py: Python<'py>, nu: u32, tolerance: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &pt::q_nu(nu, tolerance).py()?)
}

#[pyfunction]
#[pyo3(signature = (d, tolerance=pt::DEFAULT_TOLERANCE))]
fn constants<'py>(py: Python<'py>, d: Vec<u32>, tolerance: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &pt::constants_report(d, tolerance).py()?)
}

/// Number of n-step self-avoiding paths with king moves on Z^2.
#[pyfunction]
fn star_saw_count(py: Python<'_>, n: usize) -> PyResult<u64> {
    py.detach(|| pt::star_saw_count(n)).py()
}

/// Equilibrium measure of the box of radius `radius` in `Z^d`.
#[pyfunction]
#[pyo3(signature = (radius, d, escape_radius, samples, seed))]
fn harmonic_measure<'py>(
    py: Python<'py>,
    radius: usize,
    d: usize,
    escape_radius: usize,
    samples: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let p = py.detach(|| pt::harmonic_measure(radius, d, escape_radius, samples, seed)).py()?;
    to_py(py, &p)
}

/// Maximal coupling of two laws: `(joint as rows, mismatch mass)`.
#[pyfunction]
fn maximal_coupling(p: Vec<f64>, q: Vec<f64>) -> PyResult<(Vec<Vec<f64>>, f64)> {
    let c = coupling_lab::maximal_coupling(&p, &q).py()?;
    let rows = c.joint.chunks(c.atoms.max(1)).map(|r| r.to_vec()).collect();
    Ok((rows, c.mismatch))
}

/// Runs an experiment command from a JSON config. Returns
/// `(csv, passed)`; outputs are written only when `out` is given.
#[pyfunction]
#[pyo3(signature = (command, config="{}", out=None, jobs=None, seed=None))]
fn run(
    py: Python<'_>,
    command: &str,
    config: &str,
    out: Option<std::path::PathBuf>,
    jobs: Option<usize>,
    seed: Option<u64>,
) -> PyResult<(String, bool)> {
    let cmd: Command = command.parse().py()?;
    let opts = RunOptions { out, jobs, seed };
    let o = py.detach(|| experiments::run_command(cmd, config, &opts)).py()?;
    Ok((o.csv(), o.passed))
}

/// JSON Schema of a command's config.
#[pyfunction]
fn schema<'py>(py: Python<'py>, command: &str) -> PyResult<Bound<'py, PyAny>> {
    let cmd: Command = command.parse().py()?;
    to_py(py, &cmd.schema())
}

#[pyfunction]
fn commands() -> Vec<&'static str> {
    Command::ALL.iter().map(|c| c.name()).collect()
}

#[pymodule]
#[pyo3(name = "torus_vacant")]
fn torus_vacant_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGeometry>()?;
    m.add_class::<PyGrid>()?;
    m.add_function(wrap_pyfunction!(q_nu, m)?)?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(star_saw_count, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic_measure, m)?)?;
    m.add_function(wrap_pyfunction!(maximal_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(schema, m)?)?;
    m.add_function(wrap_pyfunction!(commands, m)?)?;
    Ok(())
}
