//! Python bindings. Matrices cross the boundary as nested lists of complex numbers.

use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use cocycle_lab::algebra;
use cocycle_lab::cocycle::{self, AxiomSample, CocycleGenerator, Evolved, GrowthGrid};
use cocycle_lab::demos::{self, DemoOptions};
use cocycle_lab::dynamics::{RationalMap, SemigroupModel};
use cocycle_lab::linearize::{LinearizeOptions, DEFAULT_SPECTRAL_TOL};
use cocycle_lab::scenario::Scenario;
use cocycle_lab::series::DEFAULT_ORDER;
use cocycle_lab::{CMatrix, C64};

create_exception!(cocycle_lab, CocycleError, PyException);

fn err(e: cocycle_lab::Error) -> PyErr {
    match e {
        cocycle_lab::Error::InvalidInput(_)
        | cocycle_lab::Error::DimensionMismatch { .. }
        | cocycle_lab::Error::OutOfDomain { .. } => PyValueError::new_err(e.to_string()),
        other => CocycleError::new_err(other.to_string()),
    }
}

fn json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| CocycleError::new_err(e.to_string()))
}

fn to_matrix(rows: Vec<Vec<C64>>) -> PyResult<CMatrix> {
    CMatrix::from_rows(rows).map_err(err)
}

fn from_matrix(a: &CMatrix) -> Vec<Vec<C64>> {
    (0..a.dim()).map(|i| (0..a.dim()).map(|j| a[(i, j)]).collect()).collect()
}

#[pyfunction]
fn mat_exp(a: Vec<Vec<C64>>) -> PyResult<Vec<Vec<C64>>> {
    Ok(from_matrix(&algebra::mat_exp(&to_matrix(a)?)))
}

#[pyfunction]
fn mat_inv(a: Vec<Vec<C64>>) -> PyResult<Vec<Vec<C64>>> {
    Ok(from_matrix(&algebra::mat_inv(&to_matrix(a)?).map_err(err)?))
}

#[pyfunction]
fn eigenvalues(a: Vec<Vec<C64>>) -> PyResult<Vec<C64>> {
    algebra::eigenvalues(&to_matrix(a)?).map_err(err)
}

#[pyfunction]
fn singular_values(a: Vec<Vec<C64>>) -> PyResult<Vec<f64>> {
    algebra::singular_values(&to_matrix(a)?).map_err(err)
}

#[pyfunction]
fn operator_norm(a: Vec<Vec<C64>>) -> PyResult<f64> {
    Ok(algebra::operator_norm(&to_matrix(a)?))
}

#[pyfunction]
fn log_norm(a: Vec<Vec<C64>>) -> PyResult<f64> {
    algebra::log_norm(&to_matrix(a)?).map_err(err)
}

#[pyfunction]
fn ad_matrix(a: Vec<Vec<C64>>) -> PyResult<Vec<Vec<C64>>> {
    Ok(from_matrix(&algebra::ad_matrix(&to_matrix(a)?)))
}

/// Semigroup generated by the rational map `f_num / f_den`.
#[pyclass(name = "SemigroupModel", module = "cocycle_lab", frozen)]
struct PySemigroupModel {
    inner: SemigroupModel,
}

#[pymethods]
impl PySemigroupModel {
    #[new]
    #[pyo3(signature = (f_num, f_den = vec![C64::new(1.0, 0.0)], fixed_point_hint = None, order = DEFAULT_ORDER))]
    fn new(f_num: Vec<C64>, f_den: Vec<C64>, fixed_point_hint: Option<C64>, order: usize) -> PyResult<Self> {
        let f = RationalMap::new(f_num, f_den).map_err(err)?;
        Ok(Self { inner: SemigroupModel::auto(f, fixed_point_hint, order).map_err(err)? })
    }

    /// Interior fixed point, or None for a boundary model.
    #[getter]
    fn z0(&self) -> Option<C64> {
        self.inner.z0()
    }

    #[getter]
    fn rate(&self) -> Option<C64> {
        self.inner.lambda()
    }

    fn flow(&self, py: Python<'_>, t: f64, z: C64) -> PyResult<C64> {
        py.detach(|| self.inner.flow(t, z)).map_err(err)
    }

    fn koenigs(&self, z: C64) -> PyResult<C64> {
        self.inner.koenigs_eval(z).map_err(err)
    }

    fn koenigs_inv(&self, w: C64) -> PyResult<C64> {
        self.inner.koenigs_inv_eval(w).map_err(err)
    }

    fn __repr__(&self) -> String {
        match self.inner.z0() {
            Some(z0) => format!("SemigroupModel(z0={z0}, rate={})", self.inner.lambda().unwrap_or_default()),
            None => "SemigroupModel(boundary)".into(),
        }
    }
}

/// `B(z)`: a rational matrix generator or a named catalog entry.
#[pyclass(name = "Generator", module = "cocycle_lab", frozen)]
struct PyGenerator {
    inner: Arc<dyn cocycle::Generator>,
}

#[pymethods]
impl PyGenerator {
    /// `B(z) = (Σ A_k z^k) / (Σ d_k z^k)`.
    #[new]
    #[pyo3(signature = (num_coeffs, den_coeffs = vec![C64::new(1.0, 0.0)]))]
    fn new(num_coeffs: Vec<Vec<Vec<C64>>>, den_coeffs: Vec<C64>) -> PyResult<Self> {
        let mats = num_coeffs.into_iter().map(to_matrix).collect::<PyResult<Vec<_>>>()?;
        Ok(Self { inner: Arc::new(CocycleGenerator::new(mats, den_coeffs).map_err(err)?) })
    }

    #[staticmethod]
    fn named(name: &str) -> PyResult<Self> {
        Ok(Self { inner: demos::named_generator(name).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, z: C64) -> PyResult<Vec<Vec<C64>>> {
        Ok(from_matrix(&self.inner.eval(z).map_err(err)?))
    }
}

/// Model and generator described by a scenario JSON document.
#[pyfunction]
fn load_scenario(text: &str) -> PyResult<(PySemigroupModel, PyGenerator)> {
    let sc = Scenario::from_json(text).map_err(err)?;
    Ok((PySemigroupModel { inner: sc.model().map_err(err)? }, PyGenerator { inner: sc.generator().map_err(err)? }))
}

#[pyfunction]
#[pyo3(signature = (model, generator, t, z, tol = cocycle::DEFAULT_EVOLVE_TOL))]
fn evolve(
    py: Python<'_>,
    model: &PySemigroupModel,
    generator: &PyGenerator,
    t: f64,
    z: C64,
    tol: f64,
) -> PyResult<Vec<Vec<C64>>> {
    let g = py.detach(|| cocycle::evolve(&model.inner, generator.inner.as_ref(), t, z, tol)).map_err(err)?;
    Ok(from_matrix(&g))
}

/// Axiom report on the standard grid, as JSON.
#[pyfunction]
#[pyo3(signature = (model, generator, tol = 1e-7))]
fn check_axioms(py: Python<'_>, model: &PySemigroupModel, generator: &PyGenerator, tol: f64) -> PyResult<String> {
    let report = py
        .detach(|| {
            let source = Evolved::new(&model.inner, generator.inner.as_ref());
            cocycle::check_axioms(&model.inner, &source, &AxiomSample::standard(), tol)
        })
        .map_err(err)?;
    json(&report)
}

/// `(K_mu, max_violation)` on the circle of radius `r` about the fixed point.
#[pyfunction]
fn growth(py: Python<'_>, model: &PySemigroupModel, generator: &PyGenerator, r: f64) -> PyResult<(f64, f64)> {
    let report = py
        .detach(|| {
            cocycle::growth_report(&model.inner, generator.inner.as_ref(), None, r, None, &GrowthGrid::default())
        })
        .map_err(err)?;
    Ok((report.k_mu, report.max_violation))
}

#[pyfunction]
fn extract_generator(
    py: Python<'_>,
    model: &PySemigroupModel,
    generator: &PyGenerator,
    z: C64,
) -> PyResult<Vec<Vec<C64>>> {
    let b = py
        .detach(|| {
            let source = Evolved::new(&model.inner, generator.inner.as_ref());
            cocycle::extract_generator_auto(&source, &model.inner.f, z)
        })
        .map_err(err)?;
    Ok(from_matrix(&b))
}

/// Linearization outcome as JSON.
#[pyfunction]
#[pyo3(signature = (model, generator, order = DEFAULT_ORDER))]
fn linearize(py: Python<'_>, model: &PySemigroupModel, generator: &PyGenerator, order: usize) -> PyResult<String> {
    let opts = LinearizeOptions { order, ..LinearizeOptions::default() };
    let out =
        py.detach(|| cocycle_lab::linearize::linearize(&model.inner, generator.inner.as_ref(), &opts)).map_err(err)?;
    json(&out)
}

/// Resonance report for `b0` against multiples of `rate`, as JSON.
#[pyfunction]
#[pyo3(signature = (b0, rate, tol = DEFAULT_SPECTRAL_TOL))]
fn condition_check(b0: Vec<Vec<C64>>, rate: C64, tol: f64) -> PyResult<String> {
    json(&cocycle_lab::linearize::condition_check(&to_matrix(b0)?, rate, tol).map_err(err)?)
}

#[pyfunction]
fn demo_names() -> Vec<&'static str> {
    demos::demo_catalog().iter().map(|d| d.name).collect()
}

/// Demo report as JSON.
#[pyfunction]
#[pyo3(signature = (name, growth_radius = None))]
fn run_demo(py: Python<'_>, name: &str, growth_radius: Option<f64>) -> PyResult<String> {
    let demo = demos::find_demo(name).map_err(err)?;
    let opts = DemoOptions { growth_radius, extract_points: 0 };
    let report = py.detach(|| demos::run_demo(&demo, &opts)).map_err(err)?;
    json(&report)
}

#[pymodule(name = "cocycle_lab")]
fn cocycle_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CocycleError", m.py().get_type::<CocycleError>())?;
    m.add_class::<PySemigroupModel>()?;
    m.add_class::<PyGenerator>()?;
    m.add_function(wrap_pyfunction!(mat_exp, m)?)?;
    m.add_function(wrap_pyfunction!(mat_inv, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(singular_values, m)?)?;
    m.add_function(wrap_pyfunction!(operator_norm, m)?)?;
    m.add_function(wrap_pyfunction!(log_norm, m)?)?;
    m.add_function(wrap_pyfunction!(ad_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(load_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(check_axioms, m)?)?;
    m.add_function(wrap_pyfunction!(growth, m)?)?;
    m.add_function(wrap_pyfunction!(extract_generator, m)?)?;
    m.add_function(wrap_pyfunction!(linearize, m)?)?;
    m.add_function(wrap_pyfunction!(condition_check, m)?)?;
    m.add_function(wrap_pyfunction!(demo_names, m)?)?;
    m.add_function(wrap_pyfunction!(run_demo, m)?)?;
    Ok(())
}
