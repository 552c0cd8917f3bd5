//! Python bindings. Families are built from ints, floats, `Fraction`s or
//! `"p/q"` strings; results come back as plain dicts and lists decoded from
//! the same JSON the command-line tool writes.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyList;

use oscillift::cli::candidates;
use oscillift::lift::{self, SolveOptions};
use oscillift::oracle::{gauss_quadrature, quadrature_orthogonality, verify_all, VerifyTolerances};
use oscillift::oscillator::{dimension_check, hamiltonian_spectrum, verify_algebra_relations, DimensionVerdict, OscillatorTruncation};
use oscillift::rational::{parse, Rational};
use oscillift::records::{parse_definiteness, FamilyRecord, SolutionRecord};
use oscillift::{CaseTag, PeriodicRecurrence};

fn err(e: oscillift::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(x: &Bound<'_, PyAny>) -> PyResult<Rational> {
    parse(&x.str()?.to_cow()?).map_err(err)
}

fn rationals(xs: &Bound<'_, PyAny>) -> PyResult<Vec<Rational>> {
    xs.try_iter()?.map(|x| rational(&x?)).collect()
}

fn to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// A `k`-periodic recurrence `x P_n = P_{n+1} + β_n P_n + γ_n P_{n-1}`.
#[pyclass(name = "Family", frozen)]
struct PyFamily {
    inner: PeriodicRecurrence,
}

#[pymethods]
impl PyFamily {
    #[new]
    #[pyo3(signature = (beta, gamma, k = 2, definiteness = "positive"))]
    fn new(beta: &Bound<'_, PyAny>, gamma: &Bound<'_, PyAny>, k: usize, definiteness: &str) -> PyResult<Self> {
        let d = parse_definiteness(definiteness).map_err(err)?;
        let inner = PeriodicRecurrence::new(k, rationals(beta)?, rationals(gamma)?, d).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn beta(&self, n: usize) -> String {
        self.inner.beta(n).to_string()
    }

    fn gamma(&self, n: usize) -> PyResult<String> {
        self.inner.gamma(n).map(|g| g.to_string()).map_err(err)
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &FamilyRecord::of(&self.inner))
    }

    fn __repr__(&self) -> String {
        let show = |xs: &[Rational]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        format!("Family(k={}, beta=[{}], gamma=[{}])", self.inner.k(), show(self.inner.beta_coeffs()), show(self.inner.gamma_coeffs()))
    }
}

fn solutions(
    p: &PeriodicRecurrence,
    case: &str,
    lambdas: Vec<f64>,
    thetas: Vec<f64>,
    paper_literal: bool,
) -> PyResult<Vec<lift::LiftSolution>> {
    let tag = if case.eq_ignore_ascii_case("all") { None } else { Some(case.parse::<CaseTag>().map_err(err)?) };
    let opts = if paper_literal { SolveOptions::paper_literal() } else { SolveOptions::default() };
    candidates(p, tag, &lambdas, &thetas, &opts).map_err(err)
}

/// Every candidate lift, admissible or not, as solution records.
#[pyfunction]
#[pyo3(signature = (family, case = "all", lambdas = vec![], thetas = vec![], paper_literal = false))]
fn solve(
    py: Python<'_>,
    family: &PyFamily,
    case: &str,
    lambdas: Vec<f64>,
    thetas: Vec<f64>,
    paper_literal: bool,
) -> PyResult<Py<PyAny>> {
    let all = solutions(&family.inner, case, lambdas, thetas, paper_literal)?;
    to_py(py, &all.iter().map(SolutionRecord::of).collect::<Vec<_>>())
}

/// Verification reports for the admissible solutions of `solve`.
#[pyfunction]
#[pyo3(signature = (family, case = "all", lambdas = vec![], thetas = vec![]))]
fn verify(py: Python<'_>, family: &PyFamily, case: &str, lambdas: Vec<f64>, thetas: Vec<f64>) -> PyResult<Py<PyAny>> {
    let good: Vec<_> = solutions(&family.inner, case, lambdas, thetas, false)?.into_iter().filter(|s| s.admissible).collect();
    to_py(py, &verify_all(&family.inner, &good, &VerifyTolerances::default()))
}

/// `{"branch": "i" | "ii" | "iii" | "iv", "lambda" | "theta": …}`
#[pyfunction]
fn classify(py: Python<'_>, a1: f64, a2: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &lift::theorem11_classify(a1, a2).map_err(err)?)
}

/// Truncated Hamiltonian spectrum, relation deviations and dimension verdict.
#[pyfunction]
#[pyo3(signature = (family, dim = 64))]
fn spectrum(py: Python<'_>, family: &PyFamily, dim: usize) -> PyResult<Py<PyAny>> {
    let t = OscillatorTruncation::build(&family.inner, dim).map_err(err)?;
    let out = serde_json::json!({
        "spectrum": hamiltonian_spectrum(&t),
        "relations": verify_algebra_relations(&t).ok(),
        "infinite": dimension_check(&family.inner).map_err(err)? == DimensionVerdict::Infinite,
    });
    to_py(py, &out)
}

/// Gauss rule of order `m` as `(nodes, weights)`.
#[pyfunction]
fn quadrature<'py>(py: Python<'py>, family: &PyFamily, m: usize) -> PyResult<(Bound<'py, PyList>, Bound<'py, PyList>)> {
    let rule = gauss_quadrature(&family.inner, m).map_err(err)?;
    Ok((PyList::new(py, rule.nodes)?, PyList::new(py, rule.weights)?))
}

/// `(max off-diagonal, max |G_nn - 1|)` of the Gram matrix of `φ_0..φ_n`.
#[pyfunction]
fn gram(family: &PyFamily, n_max: usize) -> PyResult<(f64, f64)> {
    let g = quadrature_orthogonality(&family.inner, n_max).map_err(err)?;
    Ok((g.offdiag, g.diag_dev))
}

#[pymodule]
fn oscillift_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(gram, m)?)?;
    Ok(())
}
