//! Python bindings. Graphs cross the boundary as `(n, edges)`, metrics as
//! lists of rows, and structured reports as JSON strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;
use sgl_core::graph::{self, Graph, MetricMatrix};
use sgl_core::poincare::{self, VertexMap};
use sgl_core::{compression, constants, spectral, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Parameter(_) | Error::Precondition(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json<T: Serialize>(x: &T) -> PyResult<String> {
    serde_json::to_string(x).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

fn graph(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Graph> {
    Graph::from_edges(n, &edges).map_err(py_err)
}

fn metric(rows: Vec<Vec<f64>>) -> PyResult<MetricMatrix> {
    MetricMatrix::from_rows(rows).map_err(py_err)
}

/// Uniform random d-regular graph as `(n, edges)`.
#[pyfunction]
fn sample_regular_graph(n: usize, d: usize, seed: u64) -> PyResult<(usize, Vec<(usize, usize)>)> {
    let g = graph::sample_regular_graph(n, d, seed).map_err(py_err)?;
    Ok((g.n(), g.edges()))
}

/// Shortest-path distances as rows; unreachable pairs are `inf`.
#[pyfunction]
fn distances(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Vec<Vec<f64>>> {
    Ok(graph::all_pairs_distances(&graph(n, edges)?).rows())
}

#[pyfunction]
fn lambda2(n: usize, edges: Vec<(usize, usize)>) -> PyResult<f64> {
    spectral::lambda2(&graph(n, edges)?, spectral::DEFAULT_TOL).map_err(py_err)
}

#[pyfunction]
fn cheeger(n: usize, edges: Vec<(usize, usize)>) -> PyResult<f64> {
    spectral::cheeger_exact(&graph(n, edges)?).map_err(py_err)
}

/// `avg_{u,v} ϱ(f(u),f(v))^p / avg_{edges} ϱ(f(u),f(v))^p`
#[pyfunction]
#[pyo3(signature = (n, edges, rows, values, p=1.0))]
fn ratio(n: usize, edges: Vec<(usize, usize)>, rows: Vec<Vec<f64>>, values: Vec<usize>, p: f64) -> PyResult<f64> {
    let m = metric(rows)?;
    let f = VertexMap::new(values, m.k()).map_err(py_err)?;
    poincare::ratio(&graph(n, edges)?, &m, &f, p).map_err(py_err)
}

/// Exact γ over all maps.
#[pyfunction]
#[pyo3(signature = (n, edges, rows, p=1.0))]
fn gamma_bruteforce(n: usize, edges: Vec<(usize, usize)>, rows: Vec<Vec<f64>>, p: f64) -> PyResult<f64> {
    let est = poincare::gamma_bruteforce(&graph(n, edges)?, &metric(rows)?, p).map_err(py_err)?;
    est.lower.map(|l| l.value).ok_or_else(|| PyRuntimeError::new_err("every map is degenerate"))
}

#[pyfunction]
#[pyo3(signature = (n, edges, rows, restarts, seed, p=1.0))]
fn gamma_local_search(
    n: usize,
    edges: Vec<(usize, usize)>,
    rows: Vec<Vec<f64>>,
    restarts: usize,
    seed: u64,
    p: f64,
) -> PyResult<String> {
    json(&poincare::gamma_local_search(&graph(n, edges)?, &metric(rows)?, p, restarts, seed).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (d, eps, ln_alpha=None, p=1.0, m=None))]
fn constants_table(d: usize, eps: f64, ln_alpha: Option<f64>, p: f64, m: Option<u64>) -> PyResult<String> {
    json(&constants::constants_table(d, eps, ln_alpha, p, m).map_err(py_err)?)
}

/// Dyadic decomposition of a map `values` into `m` targets.
#[pyfunction]
fn dyadic(values: Vec<usize>, m: usize, eps: f64) -> PyResult<String> {
    let f = VertexMap::new(values, m).map_err(py_err)?;
    json(&compression::dyadic(&f, m, eps).map_err(py_err)?)
}

/// Runs the command line with `args` (without the program name) and returns
/// `(exit code, stdout, stderr)`.
#[pyfunction]
fn run(args: Vec<String>) -> (i32, String, String) {
    let out = sgl_core::cli::run(std::iter::once("sgl".to_string()).chain(args));
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
fn sgl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(sample_regular_graph, m)?)?;
    m.add_function(wrap_pyfunction!(distances, m)?)?;
    m.add_function(wrap_pyfunction!(lambda2, m)?)?;
    m.add_function(wrap_pyfunction!(cheeger, m)?)?;
    m.add_function(wrap_pyfunction!(ratio, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_local_search, m)?)?;
    m.add_function(wrap_pyfunction!(constants_table, m)?)?;
    m.add_function(wrap_pyfunction!(dyadic, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
