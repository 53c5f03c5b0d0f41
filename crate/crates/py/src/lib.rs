//! Python bindings. Rationals cross the boundary as `"p/q"` strings;
//! allocations, audits, certificates and reports as plain dicts with the
//! same layout as the JSON files.

#![allow(clippy::result_large_err)]

use cakecut::gadget::{self, GadgetState};
use cakecut::strategy::{self, DeviationGrid, Scenario};
use cakecut::{Allocation, Error, Mechanism, MechanismId, Piece, PiecewiseConstant, Rational};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyList;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(s: &str) -> PyResult<Rational> {
    s.parse().map_err(value_error)
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn mechanism_id(name: &str) -> PyResult<MechanismId> {
    name.parse().map_err(value_error)
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = obj
        .py()
        .import("json")?
        .call_method1("dumps", (obj,))?
        .extract()?;
    serde_json::from_str(&text).map_err(value_error)
}

fn profile_of(densities: Vec<Density>) -> Vec<PiecewiseConstant> {
    densities.into_iter().map(|d| d.inner).collect()
}

/// A piecewise-constant density on [0, 1].
#[pyclass(name = "Density", module = "pycakecut", from_py_object, eq)]
#[derive(Clone, PartialEq)]
pub struct Density {
    inner: PiecewiseConstant,
}

impl From<PiecewiseConstant> for Density {
    fn from(inner: PiecewiseConstant) -> Self {
        Density { inner }
    }
}

#[pymethods]
impl Density {
    #[new]
    fn new(breakpoints: Vec<String>, densities: Vec<String>) -> PyResult<Self> {
        let bps = breakpoints
            .iter()
            .map(|s| rational(s))
            .collect::<PyResult<_>>()?;
        let ds = densities
            .iter()
            .map(|s| rational(s))
            .collect::<PyResult<_>>()?;
        PiecewiseConstant::new(bps, ds)
            .map(Density::from)
            .map_err(value_error)
    }

    #[staticmethod]
    fn uniform() -> Self {
        PiecewiseConstant::uniform().into()
    }

    #[staticmethod]
    fn ell(n: usize) -> PyResult<Self> {
        if n == 0 {
            return Err(value_error("n must be positive"));
        }
        Ok(cakecut::ell(n).into())
    }

    #[staticmethod]
    fn rr(n: usize) -> PyResult<Self> {
        if n == 0 {
            return Err(value_error("n must be positive"));
        }
        Ok(cakecut::rr(n).into())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str::<PiecewiseConstant>(text)
            .map(Density::from)
            .map_err(value_error)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("serializable")
    }

    #[getter]
    fn breakpoints(&self) -> Vec<String> {
        strings(self.inner.breakpoints())
    }

    #[getter]
    fn densities(&self) -> Vec<String> {
        strings(self.inner.densities())
    }

    fn total(&self) -> String {
        self.inner.total().to_string()
    }

    fn eval_interval(&self, a: &str, b: &str) -> PyResult<String> {
        let (a, b) = (rational(a)?, rational(b)?);
        let piece = Piece::interval(a, b).map_err(value_error)?;
        Ok(self.inner.eval(&piece).to_string())
    }

    /// Value of a union of `(left, right)` intervals.
    fn eval(&self, intervals: Vec<(String, String)>) -> PyResult<String> {
        let piece = Piece::from_intervals(
            intervals
                .iter()
                .map(|(l, r)| Ok((rational(l)?, rational(r)?)))
                .collect::<PyResult<Vec<_>>>()?,
        )
        .map_err(value_error)?;
        Ok(self.inner.eval(&piece).to_string())
    }

    /// Leftmost `y` with value `r` on `[x, y]`.
    fn cut(&self, x: &str, r: &str) -> PyResult<String> {
        self.inner
            .cut(&rational(x)?, &rational(r)?)
            .map(|y| y.to_string())
            .map_err(value_error)
    }

    fn mark_points(&self, n: usize) -> PyResult<Vec<String>> {
        self.inner
            .mark_points(n)
            .map(|m| strings(&m))
            .map_err(value_error)
    }

    fn normalized(&self) -> PyResult<Self> {
        self.inner
            .normalized()
            .map(Density::from)
            .map_err(value_error)
    }

    fn is_hungry(&self) -> bool {
        self.inner.is_hungry()
    }

    fn __repr__(&self) -> String {
        format!("Density({:?}, {:?})", self.breakpoints(), self.densities())
    }
}

#[pyfunction]
fn mechanisms() -> Vec<&'static str> {
    MechanismId::ALL.iter().map(|m| m.as_str()).collect()
}

/// Runs a named mechanism; returns `{"shares": [...]}`.
#[pyfunction]
fn run<'py>(
    py: Python<'py>,
    mechanism: &str,
    profile: Vec<Density>,
) -> PyResult<Bound<'py, PyAny>> {
    let id = mechanism_id(mechanism)?;
    let allocation = id.run(&profile_of(profile)).map_err(value_error)?;
    to_py(py, &allocation)
}

#[pyfunction]
fn audit<'py>(
    py: Python<'py>,
    profile: Vec<Density>,
    allocation: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let allocation: Allocation = from_py(allocation)?;
    let report = cakecut::audit(&profile_of(profile), &allocation).map_err(value_error)?;
    to_py(py, &report)
}

/// Whether an audit dict satisfies everything `mechanism` promises.
#[pyfunction]
fn guarantees_hold(mechanism: &str, report: &Bound<'_, PyAny>) -> PyResult<bool> {
    Ok(mechanism_id(mechanism)?.guarantees_hold(&from_py(report)?))
}

#[pyfunction]
fn classify_deviation<'py>(
    py: Python<'py>,
    mechanism: &str,
    agent: usize,
    true_f: Density,
    deviation_f: Density,
    opponent_profiles: Vec<Vec<Density>>,
) -> PyResult<Bound<'py, PyAny>> {
    let family = opponent_profiles.into_iter().map(profile_of).collect();
    let scenario = Scenario::new(
        mechanism_id(mechanism)?,
        agent,
        true_f.inner,
        deviation_f.inner,
        family,
    )
    .map_err(value_error)?;
    let cert = py
        .detach(|| strategy::classify_deviation(&scenario))
        .map_err(value_error)?;
    to_py(py, &cert)
}

/// Certificate for one of the built-in manipulation constructions:
/// `movingknife`, `evenpaz`, `simpleef` or `rotatingef`.
#[pyfunction]
#[pyo3(signature = (generator, n=None, eps=None))]
fn attack<'py>(
    py: Python<'py>,
    generator: &str,
    n: Option<usize>,
    eps: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let eps = |p, q| {
        eps.map(rational)
            .unwrap_or_else(|| Ok(Rational::ratio(p, q)))
    };
    let scenario = match generator {
        "movingknife" => strategy::movingknife_counterexample(n.unwrap_or(3)),
        "evenpaz" => strategy::evenpaz_counterexample(&eps(1, 20)?),
        "simpleef" => strategy::simpleef_counterexample(n.unwrap_or(2)),
        "rotatingef" => strategy::rotatingef_counterexample(n.unwrap_or(2), &eps(1, 100)?),
        other => return Err(value_error(format!("unknown generator {other:?}"))),
    }
    .map_err(value_error)?;
    let cert = py
        .detach(|| strategy::classify_deviation(&scenario))
        .map_err(value_error)?;
    to_py(py, &cert)
}

#[pyfunction]
#[pyo3(signature = (mechanism, agent, true_f, opponents, breakpoints=None, levels=None))]
fn best_response<'py>(
    py: Python<'py>,
    mechanism: &str,
    agent: usize,
    true_f: Density,
    opponents: Vec<Density>,
    breakpoints: Option<Vec<String>>,
    levels: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut grid = DeviationGrid::default();
    if let Some(b) = breakpoints {
        grid.breakpoints = b.iter().map(|s| rational(s)).collect::<PyResult<_>>()?;
    }
    if let Some(l) = levels {
        grid.levels = l.iter().map(|s| rational(s)).collect::<PyResult<_>>()?;
    }
    let id = mechanism_id(mechanism)?;
    let opponents = profile_of(opponents);
    let best = py
        .detach(|| strategy::brute_force_best_response(id, agent, &true_f.inner, &opponents, &grid))
        .map_err(value_error)?;
    to_py(py, &best)
}

/// A Python callable taking a list of `Density` and returning an allocation
/// dict.
struct PyMechanism(Py<PyAny>);

impl Mechanism for PyMechanism {
    fn allocate(&self, profile: &[PiecewiseConstant]) -> cakecut::Result<Allocation> {
        Python::attach(|py| {
            let args = PyList::new(py, profile.iter().cloned().map(Density::from))
                .map_err(|e| Error::Mechanism(e.to_string()))?;
            let out = self
                .0
                .bind(py)
                .call1((args,))
                .map_err(|e| Error::Mechanism(e.to_string()))?;
            from_py(&out).map_err(|e| Error::Mechanism(e.to_string()))
        })
    }
}

/// Runs the six-instance driver. `mechanism` is a mechanism name or a
/// callable.
#[pyfunction]
#[pyo3(signature = (mechanism, eps="1/100"))]
fn run_gadget<'py>(
    py: Python<'py>,
    mechanism: &Bound<'py, PyAny>,
    eps: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let eps = rational(eps)?;
    let report = if let Ok(name) = mechanism.extract::<String>() {
        let id = mechanism_id(&name)?;
        gadget::run_gadget(&id, &eps)
    } else if mechanism.is_callable() {
        gadget::run_gadget(&PyMechanism(mechanism.clone().unbind()), &eps)
    } else {
        return Err(value_error("mechanism must be a name or a callable"));
    }
    .map_err(value_error)?;
    to_py(py, &report)
}

#[pyfunction]
fn final_inequality_check(eps: &str) -> PyResult<bool> {
    Ok(gadget::final_inequality_check(&rational(eps)?))
}

/// The six instances on the layout `X1 = [0, 1/2)`, `X11 = [0, 1/4)`, ...
#[pyfunction]
#[pyo3(signature = (eps="1/100"))]
fn canonical_instances(eps: &str) -> PyResult<Vec<Vec<Density>>> {
    let state = GadgetState::canonical(rational(eps)?);
    let all = gadget::build_instances(&state).map_err(value_error)?;
    Ok(all
        .into_iter()
        .map(|p| p.into_iter().map(Density::from).collect())
        .collect())
}

#[pymodule]
fn pycakecut(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Density>()?;
    m.add_function(wrap_pyfunction!(mechanisms, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    m.add_function(wrap_pyfunction!(guarantees_hold, m)?)?;
    m.add_function(wrap_pyfunction!(classify_deviation, m)?)?;
    m.add_function(wrap_pyfunction!(attack, m)?)?;
    m.add_function(wrap_pyfunction!(best_response, m)?)?;
    m.add_function(wrap_pyfunction!(run_gadget, m)?)?;
    m.add_function(wrap_pyfunction!(final_inequality_check, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_instances, m)?)?;
    Ok(())
}
