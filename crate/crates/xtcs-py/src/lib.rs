//! Python bindings for `xtcs`.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde_json::{json, Value};

use xtcs::catalog::{verify_catalog, Catalog as CoreCatalog};
use xtcs::config::{ConfigDocument, Configuration as CoreConfiguration, GluingAngle};
use xtcs::invariants::{compare_2connected, full_report, InvariantReport};
use xtcs::search::{cross_term_search, rank1_pi4_search, rank1_pi6_search, SearchOutcome};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<PyObject> {
    let json = py.import_bound("json")?;
    Ok(json.call_method1("loads", (v.to_string(),))?.unbind())
}

#[pyclass(module = "xtcs_py")]
struct Catalog {
    inner: CoreCatalog,
}

#[pymethods]
impl Catalog {
    /// The catalog compiled into the library.
    #[staticmethod]
    fn shipped() -> Self {
        Catalog { inner: CoreCatalog::shipped() }
    }

    #[staticmethod]
    fn parse(src: &str) -> PyResult<Self> {
        CoreCatalog::parse(src).map(|inner| Catalog { inner }).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        CoreCatalog::load(path.as_ref()).map(|inner| Catalog { inner }).map_err(err)
    }

    fn ids(&self) -> Vec<String> {
        self.inner.blocks().iter().map(|b| b.id.clone()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, id: &str) -> bool {
        self.inner.get(id).is_some()
    }

    /// The stored record of one block as a dict.
    fn block(&self, py: Python<'_>, id: &str) -> PyResult<PyObject> {
        let b = self.inner.get(id).ok_or_else(|| PyKeyError::new_err(id.to_string()))?;
        to_py(py, &serde_json::to_value(b.to_record()).map_err(err)?)
    }

    /// Number of re-derived fields that disagree with the stored values.
    fn mismatches(&self) -> usize {
        verify_catalog(&self.inner).mismatches().len()
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml()
    }
}

#[pyclass(module = "xtcs_py")]
struct Configuration {
    inner: CoreConfiguration,
}

#[pymethods]
impl Configuration {
    /// Resolves a TOML configuration document against a catalog.
    #[staticmethod]
    fn from_toml(src: &str, catalog: &Catalog) -> PyResult<Self> {
        let doc = ConfigDocument::parse(src).map_err(err)?;
        doc.resolve(&catalog.inner).map(|inner| Configuration { inner }).map_err(err)
    }

    /// `(violations, warnings)`
    fn validate(&self) -> (Vec<String>, Vec<String>) {
        let v = self.inner.validate();
        (v.violations, v.warnings)
    }

    fn report(&self) -> PyResult<Report> {
        full_report(&self.inner).map(|inner| Report { inner }).map_err(err)
    }

    #[getter]
    fn plus(&self) -> String {
        self.inner.plus.id.clone()
    }

    #[getter]
    fn minus(&self) -> String {
        self.inner.minus.id.clone()
    }

    #[getter]
    fn theta(&self) -> String {
        self.inner.angle.label()
    }
}

#[pyclass(module = "xtcs_py")]
#[derive(Clone)]
struct Report {
    inner: InvariantReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn b2(&self) -> usize {
        self.inner.b2
    }

    #[getter]
    fn b3(&self) -> i64 {
        self.inner.b3
    }

    #[getter]
    fn nu_bar(&self) -> i64 {
        self.inner.nu_bar
    }

    #[getter]
    fn d_free(&self) -> Option<u64> {
        self.inner.d_free
    }

    #[getter]
    fn d_full(&self) -> Option<u64> {
        self.inner.d_full
    }

    #[getter]
    fn torsion(&self) -> String {
        self.inner.torsion_label()
    }

    #[getter]
    fn linking(&self) -> String {
        self.inner.linking_label()
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<PyObject> {
        to_py(py, &self.inner.to_json())
    }

    fn __repr__(&self) -> String {
        format!("Report({} x {} at {}: b3={}, nu_bar={})", self.inner.plus_id, self.inner.minus_id, self.inner.theta, self.inner.b3, self.inner.nu_bar)
    }
}

fn matches(outcome: SearchOutcome) -> Vec<Report> {
    outcome.matches.into_iter().map(|m| Report { inner: m.report }).collect()
}

/// All rank-one matchings at 1/4pi or 1/6pi.
#[pyfunction]
fn rank1_search(catalog: &Catalog, theta: &str) -> PyResult<Vec<Report>> {
    let angle = GluingAngle::parse(theta).map_err(err)?.label();
    let out = if angle == GluingAngle::parse("1/4pi").map_err(err)?.label() {
        rank1_pi4_search(&catalog.inner)
    } else if angle == GluingAngle::parse("1/6pi").map_err(err)?.label() {
        rank1_pi6_search(&catalog.inner)
    } else {
        return Err(PyValueError::new_err("rank-one search runs at 1/4pi or 1/6pi"));
    };
    out.map(matches).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (catalog, plus, minus, theta, bound, pure=false))]
fn cross_search(catalog: &Catalog, plus: &str, minus: &str, theta: &str, bound: u32, pure: bool) -> PyResult<Vec<Report>> {
    let get = |id: &str| catalog.inner.get(id).ok_or_else(|| PyKeyError::new_err(id.to_string()));
    let angle = GluingAngle::parse(theta).map_err(err)?;
    cross_term_search(get(plus)?, get(minus)?, &angle, bound, pure).map(matches).map_err(err)
}

/// Compares two 2-connected reports; returns a dict of verdicts.
#[pyfunction]
fn compare<'py>(py: Python<'py>, a: &Report, b: &Report) -> PyResult<Bound<'py, PyDict>> {
    let c = compare_2connected(&a.inner, &b.inner).map_err(err)?;
    let v = json!({
        "oriented": c.oriented.to_string(),
        "reversed": c.reversed.to_string(),
        "nu_equal": c.nu_equal,
        "xi_determined": c.xi_determined,
    });
    Ok(to_py(py, &v)?.into_bound(py).downcast_into::<PyDict>()?)
}

#[pymodule]
fn xtcs_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Catalog>()?;
    m.add_class::<Configuration>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(rank1_search, m)?)?;
    m.add_function(wrap_pyfunction!(cross_search, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
