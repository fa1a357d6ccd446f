// SPDX-License-Identifier: Apache-2.0

//! Python bindings. Results that have a JSON form in the Rust crate come
//! back as plain dicts and lists with rationals as `"p/q"` strings.

use pbcore::core_check::CheckMode;
use pbcore::satisfaction::sat_voter_ids;
use pbcore::theorems::{TheoremError, TheoremParams};
use pbcore::{json, parse_rational, Allocation, BigRational, CoreError, CoreOptions, SatError, SatKind};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

pyo3::create_exception!(pbcore_py, IndeterminateComparison, PyRuntimeError);
pyo3::create_exception!(pbcore_py, LimitExceeded, PyRuntimeError);

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn core_error(e: CoreError) -> PyErr {
    match e {
        CoreError::Sat(SatError::IndeterminateComparison { .. }) => {
            IndeterminateComparison::new_err(e.to_string())
        }
        CoreError::EnumerationLimitExceeded { .. } => LimitExceeded::new_err(e.to_string()),
        CoreError::Sat(_) => value_error(e),
    }
}

fn kind(name: &str) -> PyResult<SatKind> {
    name.parse().map_err(value_error)
}

fn rational(text: &str) -> PyResult<BigRational> {
    parse_rational(text).map_err(value_error)
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

/// A validated election.
#[pyclass(name = "Election", frozen, module = "pbcore_py")]
struct PyElection {
    inner: pbcore::Election,
}

#[pymethods]
impl PyElection {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        pbcore::Election::from_json(text)
            .map(|inner| PyElection { inner })
            .map_err(value_error)
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        pbcore::Election::from_file(path)
            .map(|inner| PyElection { inner })
            .map_err(value_error)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn budget(&self) -> String {
        self.inner.budget().to_string()
    }

    #[getter]
    fn project_ids(&self) -> Vec<String> {
        self.inner.projects().iter().map(|p| p.id.clone()).collect()
    }

    #[getter]
    fn voter_ids(&self) -> Vec<String> {
        self.inner.voter_ids().to_vec()
    }

    fn cost(&self, project: &str) -> PyResult<String> {
        let i = self.inner.project_index(project).map_err(value_error)?;
        Ok(self.inner.project(i).cost.to_string())
    }

    fn approvals(&self, voter: &str) -> PyResult<Vec<String>> {
        let i = self.inner.voter_index(voter).map_err(value_error)?;
        Ok(self.inner.project_ids(self.inner.approvals(i)))
    }

    fn total_cost(&self, projects: Vec<String>) -> PyResult<String> {
        Ok(self.inner.total_cost_of(&projects).map_err(value_error)?.to_string())
    }

    fn is_feasible(&self, projects: Vec<String>) -> PyResult<bool> {
        Ok(self.inner.is_feasible(self.inner.project_set(&projects).map_err(value_error)?))
    }

    fn is_exhaustive(&self, projects: Vec<String>) -> PyResult<bool> {
        Ok(self.inner.is_exhaustive(self.inner.project_set(&projects).map_err(value_error)?))
    }

    /// Exhaustive allocations in bitmask order.
    fn exhaustive_allocations(&self) -> Vec<Vec<String>> {
        self.inner.exhaustive_sets().map(|s| self.inner.project_ids(s)).collect()
    }

    fn canonical_key(&self) -> String {
        pbcore::canonical_key(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.num_voters()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Election(projects={}, voters={}, budget={})",
            self.inner.num_projects(),
            self.inner.num_voters(),
            self.inner.budget()
        )
    }
}

#[pyfunction]
fn build_thm1() -> PyElection {
    PyElection {
        inner: pbcore::build_thm1(),
    }
}

#[pyfunction]
fn build_thm2(b: &str, eps: &str) -> PyResult<PyElection> {
    pbcore::build_thm2(&rational(b)?, &rational(eps)?)
        .map(|inner| PyElection { inner })
        .map_err(value_error)
}

#[pyfunction]
fn build_thm3() -> PyElection {
    PyElection {
        inner: pbcore::build_thm3(),
    }
}

#[pyfunction]
fn gadget(k: usize, joint: &str, large: &str, small: &str, b: &str) -> PyResult<PyElection> {
    pbcore::gadget(k, &rational(joint)?, &rational(large)?, &rational(small)?, &rational(b)?)
        .map(|inner| PyElection { inner })
        .map_err(value_error)
}

/// Satisfaction of `voter` with `allocation`: a `"p/q"` string when exact,
/// otherwise `{"lo", "hi", "precision_bits"}`.
#[pyfunction]
fn sat<'py>(
    py: Python<'py>,
    kind_name: &str,
    election: &PyElection,
    voter: &str,
    allocation: Vec<String>,
) -> PyResult<Bound<'py, PyAny>> {
    let value = sat_voter_ids(kind(kind_name)?, &election.inner, voter, &allocation).map_err(value_error)?;
    to_py(py, &json::sat_value(&value))
}

/// The first blocking certificate against `allocation`, or `None`.
#[pyfunction]
fn find_blocking<'py>(
    py: Python<'py>,
    kind_name: &str,
    election: &PyElection,
    allocation: Vec<String>,
) -> PyResult<Bound<'py, PyAny>> {
    let e = &election.inner;
    let pi = Allocation::from_ids(e, &allocation).map_err(value_error)?;
    let cert = py
        .detach(|| pbcore::find_blocking(kind(kind_name)?, e, &pi).map_err(core_error))?;
    match cert {
        Some(c) => to_py(py, &json::certificate(e, &c)),
        None => Ok(py.None().into_bound(py)),
    }
}

#[pyfunction]
fn in_core(kind_name: &str, election: &PyElection, allocation: Vec<String>) -> PyResult<bool> {
    let e = &election.inner;
    let pi = Allocation::from_ids(e, &allocation).map_err(value_error)?;
    pbcore::in_core(kind(kind_name)?, e, &pi).map_err(core_error)
}

/// Decides core emptiness; returns the verdict in its JSON form.
#[pyfunction]
#[pyo3(signature = (kind_name, election, naive = false, parallel = false))]
fn core_empty<'py>(
    py: Python<'py>,
    kind_name: &str,
    election: &PyElection,
    naive: bool,
    parallel: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let k = kind(kind_name)?;
    let e = &election.inner;
    let options = CoreOptions {
        mode: if naive { CheckMode::Naive } else { CheckMode::Pruned },
        parallel,
        ..CoreOptions::default()
    };
    let verdict = py.detach(|| pbcore::core_empty(k, e, &options)).map_err(core_error)?;
    to_py(py, &json::verdict(k, e, &verdict))
}

/// Runs a theorem verification. A failed condition comes back as a report
/// with `"failed_condition"` set rather than as an exception.
#[pyfunction]
#[pyo3(signature = (theorem, kind_name = None, b = None, eps = None, witnesses = false))]
fn verify_theorem<'py>(
    py: Python<'py>,
    theorem: u8,
    kind_name: Option<&str>,
    b: Option<&str>,
    eps: Option<&str>,
    witnesses: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let params = match (kind_name, b, eps) {
        (None, None, None) => None,
        (Some(k), Some(b), Some(eps)) => Some(TheoremParams {
            kind: kind(k)?,
            budget: rational(b)?,
            eps: Some(rational(eps)?),
        }),
        _ => return Err(value_error("kind_name, b and eps go together")),
    };
    let result = py.detach(|| pbcore::verify_theorem(theorem, params, &CoreOptions::default()));
    match result {
        Ok(report) => to_py(py, &report.to_json(witnesses)),
        Err(TheoremError::ConditionFailed { condition, report }) => {
            let mut v = report.to_json(false);
            v["failed_condition"] = condition.into();
            to_py(py, &v)
        }
        Err(TheoremError::Core(e)) => Err(core_error(e)),
        Err(e) => Err(value_error(e)),
    }
}

#[pymodule]
fn pbcore_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyElection>()?;
    m.add_function(wrap_pyfunction!(build_thm1, m)?)?;
    m.add_function(wrap_pyfunction!(build_thm2, m)?)?;
    m.add_function(wrap_pyfunction!(build_thm3, m)?)?;
    m.add_function(wrap_pyfunction!(gadget, m)?)?;
    m.add_function(wrap_pyfunction!(sat, m)?)?;
    m.add_function(wrap_pyfunction!(find_blocking, m)?)?;
    m.add_function(wrap_pyfunction!(in_core, m)?)?;
    m.add_function(wrap_pyfunction!(core_empty, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem, m)?)?;
    m.add("IndeterminateComparison", m.py().get_type::<IndeterminateComparison>())?;
    m.add("LimitExceeded", m.py().get_type::<LimitExceeded>())?;
    m.add("SAT_KINDS", SatKind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>())?;
    Ok(())
}
