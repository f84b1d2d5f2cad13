//! Python bindings. Numbers cross the boundary as strings such as `"1/3"`
//! so exact values survive; reports come back as plain dicts.
use std::time::Duration;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use maxpareto::bench::{self, GenSpec};
use maxpareto::matching::{self, BipartiteInstance, BlockingSet, Edge, Matching};
use maxpareto::model::{self, MaxParetoInstance};
use maxpareto::pareto::{self, Verdict};
use maxpareto::solver::{self, ExactConfig, HeuristicConfig};
use maxpareto::{NumericMode, Rational};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mode(name: &str) -> PyResult<NumericMode> {
    match name {
        "rational" => Ok(NumericMode::ExactRational),
        "float" => Ok(NumericMode::default_float()),
        other => Err(err(format!("unknown mode {other:?}, expected 'rational' or 'float'"))),
    }
}

fn rat(s: &str) -> PyResult<Rational> {
    s.trim().parse::<Rational>().map_err(err)
}

fn rats(v: &[String]) -> PyResult<Vec<Rational>> {
    v.iter().map(|s| rat(s)).collect()
}

fn strs(v: &[Rational]) -> Vec<String> {
    v.iter().map(Rational::to_string).collect()
}

fn to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// A Max-Pareto instance `max cᵀx` over Pareto-optimal `x ∈ {Ax ≤ b}`.
#[pyclass(name = "Instance", module = "maxpareto_py")]
struct PyInstance {
    inner: MaxParetoInstance,
}

#[pymethods]
impl PyInstance {
    #[new]
    fn new(a: Vec<Vec<String>>, b: Vec<String>, u: Vec<Vec<String>>, c: Vec<String>) -> PyResult<Self> {
        let a = a.iter().map(|r| rats(r)).collect::<PyResult<_>>()?;
        let u = u.iter().map(|r| rats(r)).collect::<PyResult<_>>()?;
        let inner = MaxParetoInstance::new(a, rats(&b)?, u, rats(&c)?).map_err(err)?;
        Ok(PyInstance { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyInstance { inner: MaxParetoInstance::from_json_str(text).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyInstance { inner: model::load_instance(path).map_err(err)? })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        model::save_instance(&self.inner, path).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn payoff(&self, x: Vec<String>) -> PyResult<Vec<String>> {
        Ok(strs(&model::payoff(&self.inner, &rats(&x)?).map_err(err)?.0))
    }

    /// Returns `None` when `x` is Pareto-optimal, else a dominating point.
    #[pyo3(signature = (x, mode = "rational"))]
    fn verify(&self, x: Vec<String>, mode: &str) -> PyResult<Option<Vec<String>>> {
        let r = pareto::verify_pareto(&self.inner, &rats(&x)?, &self::mode(mode)?).map_err(err)?;
        Ok(match r.verdict {
            Verdict::NotDominated => None,
            Verdict::Dominated { by } => Some(strs(&by)),
        })
    }

    #[pyo3(signature = (x, w_cap = None, mode = "rational"))]
    fn certify<'py>(&self, py: Python<'py>, x: Vec<String>, w_cap: Option<String>, mode: &str) -> PyResult<Option<Bound<'py, PyAny>>> {
        let cap = w_cap.as_deref().map(rat).transpose()?;
        let cert = pareto::find_support_certificate(&self.inner, &rats(&x)?, cap.as_ref(), &self::mode(mode)?).map_err(err)?;
        cert.map(|c| to_py(py, &c.to_json_value())).transpose()
    }

    #[pyo3(signature = (mode = "rational"))]
    fn aligned_weights(&self, mode: &str) -> PyResult<Option<Vec<String>>> {
        let w = pareto::detect_aligned_interests(&self.inner, &self::mode(mode)?).map_err(err)?;
        Ok(w.map(|v| strs(&v)))
    }

    #[pyo3(signature = (w_cap = "10", starts = 8, local_steps = 10, step_factor = "2", time_limit = 60.0, seed = 0, mode = "float"))]
    #[allow(clippy::too_many_arguments)]
    fn solve_heuristic<'py>(
        &self,
        py: Python<'py>,
        w_cap: &str,
        starts: usize,
        local_steps: usize,
        step_factor: &str,
        time_limit: f64,
        seed: u64,
        mode: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cfg = HeuristicConfig {
            w_cap: rat(w_cap)?,
            starts,
            local_steps,
            step_factor: rat(step_factor)?,
            time_limit: Duration::try_from_secs_f64(time_limit).map_err(err)?,
            seed,
            mode: self::mode(mode)?,
        };
        let report = py.detach(|| solver::solve_heuristic(&self.inner, &cfg)).map_err(err)?;
        to_py(py, &report.to_json_value())
    }

    #[pyo3(signature = (time_limit = None, cap_k = 12, cap_m = 24))]
    fn solve_exact<'py>(&self, py: Python<'py>, time_limit: Option<f64>, cap_k: usize, cap_m: usize) -> PyResult<Bound<'py, PyAny>> {
        let time_limit = time_limit.map(Duration::try_from_secs_f64).transpose().map_err(err)?;
        let cfg = ExactConfig { cap_k, cap_m, time_limit, ..ExactConfig::default() };
        let report = py.detach(|| solver::solve_exact(&self.inner, &cfg)).map_err(err)?;
        to_py(py, &report.to_json_value())
    }

    fn __repr__(&self) -> String {
        format!("Instance(k={}, m={}, n={})", self.inner.k(), self.inner.m(), self.inner.n())
    }
}

/// Weighted bipartite graph of agents and objects.
#[pyclass(name = "Graph", module = "maxpareto_py")]
struct PyGraph {
    inner: BipartiteInstance,
}

impl PyGraph {
    fn matching(&self, pairs: &[(usize, usize)]) -> PyResult<Matching> {
        Matching::from_pairs(&self.inner, pairs).map_err(err)
    }
}

fn members(b: &BlockingSet) -> Vec<usize> {
    b.members().to_vec()
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n1: usize, n2: usize, edges: Vec<(usize, usize, String)>) -> PyResult<Self> {
        let edges = edges.iter().map(|(i, j, w)| Ok(Edge { i: *i, j: *j, w: rat(w)? })).collect::<PyResult<_>>()?;
        Ok(PyGraph { inner: BipartiteInstance::new(n1, n2, edges).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyGraph { inner: BipartiteInstance::load(path).map_err(err)? })
    }

    #[staticmethod]
    fn example() -> Self {
        PyGraph { inner: matching::example1() }
    }

    fn payoff(&self, pairs: Vec<(usize, usize)>) -> PyResult<Vec<String>> {
        Ok(strs(&matching::payoff_vector(&self.inner, &self.matching(&pairs)?).map_err(err)?.0))
    }

    fn is_po(&self, pairs: Vec<(usize, usize)>) -> PyResult<bool> {
        matching::is_po_matching(&self.inner, &self.matching(&pairs)?).map_err(err)
    }

    #[pyo3(signature = (pairs, mode = "rational"))]
    fn is_fpo(&self, pairs: Vec<(usize, usize)>, mode: &str) -> PyResult<bool> {
        matching::is_fpo_matching(&self.inner, &self.matching(&pairs)?, &self::mode(mode)?).map_err(err)
    }

    fn blocking_set(&self, pairs: Vec<(usize, usize)>, agent: usize, object: usize) -> PyResult<Vec<usize>> {
        Ok(members(&matching::find_blocking_set(&self.inner, &self.matching(&pairs)?, agent, object).map_err(err)?))
    }

    fn all_blocking_sets(&self, pairs: Vec<(usize, usize)>) -> PyResult<Vec<Vec<usize>>> {
        Ok(matching::all_blocking_sets(&self.inner, &self.matching(&pairs)?).map_err(err)?.iter().map(members).collect())
    }

    /// The matching polytope as an instance, objective `c` per edge.
    #[pyo3(signature = (c = None))]
    fn polytope(&self, c: Option<Vec<String>>) -> PyResult<PyInstance> {
        let c = c.as_deref().map(rats).transpose()?;
        Ok(PyInstance { inner: matching::matching_polytope(&self.inner, c).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("Graph(n1={}, n2={}, edges={})", self.inner.n1(), self.inner.n2(), self.inner.edges().len())
    }
}

/// Minimal supporting weights for the size-`n` exponential family and the
/// ratio `w₁/w_n`.
#[pyfunction]
#[pyo3(signature = (n, mode = "rational"))]
fn prop9(n: usize, mode: &str) -> PyResult<(Vec<String>, String)> {
    let (cert, ratio) = solver::prop9_certificate(n, &self::mode(mode)?).map_err(err)?;
    Ok((strs(&cert.w), ratio.to_string()))
}

/// Random allocation instance with welfare objective.
#[pyfunction]
#[pyo3(signature = (agents, mult = 1, seed = 0))]
fn generate(agents: usize, mult: usize, seed: u64) -> PyResult<PyInstance> {
    let spec = GenSpec::new(agents, mult, seed).map_err(err)?;
    Ok(PyInstance { inner: bench::generate_allocation(&spec).to_instance().map_err(err)? })
}

#[pymodule]
fn maxpareto_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(prop9, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
