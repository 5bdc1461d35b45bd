//! Python bindings: meshes, dual meshes, coefficient models, the transient
//! solver, norms, and the verification harness.

use std::cell::RefCell;

use boxtherm::coefficients::{Coefficient, CoefficientModel};
use boxtherm::operators::compute_norms;
use boxtherm::solver::{BoxScheme, SolverConfig, Trajectory};
use boxtherm::verification::{self, ConvergenceStudy, ManufacturedProblem};
use boxtherm::{DualMesh, Mesh, NodalField};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn field(mesh: &Mesh, values: Vec<f64>) -> PyResult<NodalField> {
    NodalField::new(mesh, values).map_err(value_err)
}

/// Conforming non-obtuse triangulation.
#[pyclass(name = "Mesh", module = "boxtherm_py")]
pub struct PyMesh {
    inner: Mesh,
}

#[pymethods]
impl PyMesh {
    /// Unit square with `n` cells per side, each split along its diagonal.
    #[staticmethod]
    fn structured(n: usize) -> PyResult<Self> {
        Mesh::structured(n).map(|inner| PyMesh { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn structured_level(level: u32) -> PyResult<Self> {
        Mesh::structured_level(level).map(|inner| PyMesh { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Mesh::from_text(text).map(|inner| PyMesh { inner }).map_err(value_err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn refine(&self) -> Self {
        PyMesh {
            inner: self.inner.refine_uniform(),
        }
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_triangles(&self) -> usize {
        self.inner.num_triangles()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.h()
    }

    fn vertices(&self) -> Vec<(f64, f64)> {
        self.inner.vertices().iter().map(|p| (p[0], p[1])).collect()
    }

    fn triangles(&self) -> Vec<(usize, usize, usize)> {
        self.inner.triangles().iter().map(|t| (t[0], t[1], t[2])).collect()
    }

    fn boundary_flags(&self) -> Vec<bool> {
        self.inner.boundary_flags().to_vec()
    }

    /// Shape-regularity report as a dict.
    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = self.inner.validate();
        let d = PyDict::new(py);
        d.set_item("h", r.h)?;
        d.set_item("min_angle_deg", r.min_angle_deg)?;
        d.set_item("max_angle_deg", r.max_angle_deg)?;
        d.set_item("quasi_uniformity", r.quasi_uniformity)?;
        d.set_item("conforming", r.conforming)?;
        d.set_item("non_obtuse", r.non_obtuse)?;
        d.set_item("partition_defect", r.partition_defect)?;
        d.set_item("valid", r.is_valid())?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh(vertices={}, triangles={}, h={:.4e})",
            self.inner.num_vertices(),
            self.inner.num_triangles(),
            self.inner.h()
        )
    }
}

/// Circumcenter dual mesh (one box per vertex).
#[pyclass(name = "DualMesh", module = "boxtherm_py")]
pub struct PyDualMesh {
    inner: DualMesh,
}

#[pymethods]
impl PyDualMesh {
    #[new]
    fn new(mesh: &PyMesh) -> PyResult<Self> {
        DualMesh::build(&mesh.inner).map(|inner| PyDualMesh { inner }).map_err(value_err)
    }

    fn box_areas(&self) -> Vec<f64> {
        self.inner.box_areas().to_vec()
    }

    fn total_area(&self) -> f64 {
        self.inner.total_area()
    }

    #[getter]
    fn num_segments(&self) -> usize {
        self.inner.segments().len()
    }

    fn max_orthogonality_defect(&self) -> f64 {
        self.inner.max_orthogonality_defect()
    }

    fn box_polygon(&self, mesh: &PyMesh, vertex: usize) -> PyResult<Vec<(f64, f64)>> {
        if vertex >= mesh.inner.num_vertices() {
            return Err(value_err(format!("vertex {vertex} out of range")));
        }
        Ok(self.inner.box_polygon(&mesh.inner, vertex).iter().map(|p| (p[0], p[1])).collect())
    }
}

/// Conductivity and source presets plus λ, validated against the
/// coefficient hypotheses.
#[pyclass(name = "CoefficientModel", module = "boxtherm_py")]
pub struct PyCoefficientModel {
    inner: CoefficientModel,
}

#[pymethods]
impl PyCoefficientModel {
    #[new]
    #[pyo3(signature = (k = "const:1", f = "const:1", lam = 1.0))]
    fn new(k: &str, f: &str, lam: f64) -> PyResult<Self> {
        let k: Coefficient = k.parse().map_err(value_err)?;
        let f: Coefficient = f.parse().map_err(value_err)?;
        CoefficientModel::new(k, f, lam)
            .map(|inner| PyCoefficientModel { inner })
            .map_err(value_err)
    }

    fn k(&self, s: f64) -> f64 {
        self.inner.k.eval(s)
    }

    fn f(&self, s: f64) -> f64 {
        self.inner.f.eval(s)
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda
    }

    /// `c_k`, `nu`, `c1`, `c2` and the joint Lipschitz constant.
    fn constants<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let c = self.inner.constants();
        let d = PyDict::new(py);
        d.set_item("c_k", c.c_k)?;
        d.set_item("nu", c.nu)?;
        d.set_item("c1", c.c1)?;
        d.set_item("c2", c.c2)?;
        d.set_item("lipschitz", c.lipschitz)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "CoefficientModel(k={}, f={}, lam={})",
            self.inner.k, self.inner.f, self.inner.lambda
        )
    }
}

/// Snapshots of a transient run.
#[pyclass(name = "Trajectory", module = "boxtherm_py")]
pub struct PyTrajectory {
    inner: Trajectory,
}

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.times.clone()
    }

    #[getter]
    fn fields(&self) -> Vec<Vec<f64>> {
        self.inner.fields.iter().map(|f| f.values().to_vec()).collect()
    }

    fn final_field(&self) -> Vec<f64> {
        self.inner.final_field().values().to_vec()
    }

    /// Per-step diagnostics as a list of dicts.
    fn steps<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .steps
            .iter()
            .map(|s| {
                let d = PyDict::new(py);
                d.set_item("time", s.time)?;
                d.set_item("tau", s.tau)?;
                d.set_item("picard_iterations", s.picard_iterations)?;
                d.set_item("cg_iterations", s.cg_iterations)?;
                d.set_item("contraction_ratio", s.contraction_ratio)?;
                d.set_item("source_integral", s.source_integral)?;
                d.set_item("backoffs", s.backoffs)?;
                Ok(d)
            })
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Backward-Euler box scheme on a fixed mesh.
#[pyclass(name = "Solver", module = "boxtherm_py")]
pub struct PySolver {
    inner: BoxScheme,
}

#[pymethods]
impl PySolver {
    #[new]
    #[pyo3(signature = (mesh, coefficients, tau = 0.01, t_final = 0.1, picard_tol = 1e-10))]
    fn new(mesh: &PyMesh, coefficients: &PyCoefficientModel, tau: f64, t_final: f64, picard_tol: f64) -> PyResult<Self> {
        let config = SolverConfig {
            tau,
            t_final,
            picard_tol,
            ..SolverConfig::default()
        };
        BoxScheme::new(mesh.inner.clone(), coefficients.inner.clone(), config)
            .map(|inner| PySolver { inner })
            .map_err(value_err)
    }

    /// Runs from `P_h u0`; `u0` is a callable `(x, y) -> float`, or `None`
    /// for a zero start.
    #[pyo3(signature = (u0 = None))]
    fn solve(&self, py: Python<'_>, u0: Option<Py<PyAny>>) -> PyResult<PyTrajectory> {
        let failure: RefCell<Option<PyErr>> = RefCell::new(None);
        let initial = |p: [f64; 2]| -> f64 {
            let Some(func) = &u0 else { return 0.0 };
            match func.call1(py, (p[0], p[1])).and_then(|v| v.extract::<f64>(py)) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        let result = self.inner.solve_transient(initial, None);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        result.map(|inner| PyTrajectory { inner }).map_err(runtime_err)
    }

    /// Steady state `A(u) u = b(u)`.
    fn steady_state(&self) -> PyResult<Vec<f64>> {
        self.inner
            .steady_state()
            .map(|f| f.values().to_vec())
            .map_err(runtime_err)
    }
}

/// `l2`, `h1_semi`, `norm_0h` and `norm_1h` of a nodal field.
#[pyfunction]
fn norms<'py>(py: Python<'py>, mesh: &PyMesh, dual: &PyDualMesh, values: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let v = field(&mesh.inner, values)?;
    let n = compute_norms(&mesh.inner, &dual.inner, &v);
    let d = PyDict::new(py);
    d.set_item("l2", n.l2)?;
    d.set_item("h1_semi", n.h1_semi)?;
    d.set_item("norm_0h", n.norm_0h)?;
    d.set_item("norm_1h", n.norm_1h)?;
    Ok(d)
}

/// Cotangent-formula P1 stiffness as `(rows, cols, values)`.
#[pyfunction]
fn fem_stiffness(mesh: &PyMesh) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
    let k = verification::fem_stiffness_oracle(&mesh.inner);
    let (mut rows, mut cols, mut vals) = (Vec::new(), Vec::new(), Vec::new());
    for r in 0..k.dim() {
        for (c, v) in k.row(r) {
            rows.push(r);
            cols.push(c);
            vals.push(v);
        }
    }
    (rows, cols, vals)
}

/// Invariant suite; returns `(all_pass, table_csv)`.
#[pyfunction]
#[pyo3(signature = (levels, samples = 100, seed = 2024))]
fn verify(levels: Vec<u32>, samples: usize, seed: u64) -> PyResult<(bool, String)> {
    let report = verification::invariant_suite(&levels, samples, seed).map_err(runtime_err)?;
    Ok((report.all_pass(), report.to_table()))
}

/// Manufactured-solution study; returns `(rates, all_pass, csv)`.
#[pyfunction]
#[pyo3(signature = (levels, variable_k = false, tau_factor = 0.1, t_final = 0.5))]
fn converge(levels: Vec<u32>, variable_k: bool, tau_factor: f64, t_final: f64) -> PyResult<([f64; 3], bool, String)> {
    let k = if variable_k {
        Coefficient::Sigmoid { lo: 0.5, hi: 2.0 }
    } else {
        Coefficient::Const(1.0)
    };
    let study = ConvergenceStudy {
        problem: ManufacturedProblem::standard(k, 1.0).map_err(value_err)?,
        levels,
        tau_factor,
        config: SolverConfig {
            t_final,
            ..SolverConfig::default()
        },
        threads: verification::thread_cap(),
    };
    let report = study.run().map_err(runtime_err)?;
    Ok((report.rates, report.all_pass(), report.to_csv()))
}

#[pymodule]
fn boxtherm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<PyDualMesh>()?;
    m.add_class::<PyCoefficientModel>()?;
    m.add_class::<PySolver>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(norms, m)?)?;
    m.add_function(wrap_pyfunction!(fem_stiffness, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(converge, m)?)?;
    Ok(())
}
