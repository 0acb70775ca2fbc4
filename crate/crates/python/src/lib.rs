//! Python bindings. Results that are plain records (metrics, ensemble
//! reports, snapshots) cross the boundary as dicts and lists.

use std::fs::File;
use std::io::BufReader;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use lambda3::experiments::{self as exp, SettingPreset, SnapshotSchedule};
use lambda3::metrics::{MetricsReport, PathMode};
use lambda3::rng::RngState;
use lambda3::{ingest, Error, Partition, TemporalGraph};

const DEFAULT_SEED: u64 = 12345;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn setting(preset: Option<&str>, lambdas: Option<(f64, f64, f64)>) -> PyResult<SettingPreset> {
    match (preset, lambdas) {
        (Some(name), None) => SettingPreset::by_name(name)
            .ok_or_else(|| PyValueError::new_err(format!("unknown preset {name:?}"))),
        (None, Some(lambdas)) => Ok(SettingPreset { name: "custom", lambdas }),
        _ => Err(PyValueError::new_err("pass exactly one of preset or lambdas")),
    }
}

fn path_mode(n: usize, exact: bool, sources: Option<usize>, seed: u64) -> PathMode {
    match (exact, sources) {
        (true, _) => PathMode::Exact,
        (_, Some(sources)) => PathMode::Sampled { sources, seed },
        _ => PathMode::auto(n, seed),
    }
}

fn open(path: &str) -> PyResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| PyIOError::new_err(format!("{path}: {e}")))
}

/// Undirected weighted interaction graph.
#[pyclass(name = "Graph", module = "lambda3", frozen)]
struct PyGraph {
    inner: TemporalGraph,
}

#[pymethods]
impl PyGraph {
    /// Builds a graph from `(u, v)` or `(u, v, weight)` tuples.
    #[staticmethod]
    #[pyo3(signature = (edges, min_nodes = 0))]
    fn from_edges(edges: Vec<Vec<u32>>, min_nodes: usize) -> PyResult<Self> {
        let triples = edges
            .into_iter()
            .map(|e| match e.as_slice() {
                [u, v] => Ok((*u, *v, 1)),
                [u, v, w] => Ok((*u, *v, *w)),
                _ => Err(PyValueError::new_err("edges must be (u, v) or (u, v, weight)")),
            })
            .collect::<PyResult<Vec<_>>>()?;
        TemporalGraph::from_weighted_edges(triples, min_nodes)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    /// Reads a `src,dst,weight` CSV.
    #[staticmethod]
    fn read_edge_list(path: &str) -> PyResult<Self> {
        let inner = lambda3::graph::read_edge_list(open(path)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    fn write_edge_list(&self, path: &str) -> PyResult<()> {
        let f = File::create(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        lambda3::graph::write_edge_list(&self.inner, std::io::BufWriter::new(f)).map_err(py_err)
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn degree(&self, v: u32) -> PyResult<usize> {
        self.inner.degree(v).map_err(py_err)
    }

    fn neighbors(&self, v: u32) -> PyResult<Vec<u32>> {
        self.inner.neighbors(v).map(<[u32]>::to_vec).map_err(py_err)
    }

    fn edge_weight(&self, u: u32, v: u32) -> Option<u32> {
        self.inner.edge_weight(u, v)
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn interaction_counts(&self) -> Vec<u32> {
        self.inner.interaction_counts().to_vec()
    }

    /// Sorted `(u, v, weight)` triples with `u < v`.
    fn edges(&self) -> Vec<(u32, u32, u32)> {
        self.inner.edges()
    }

    fn component_count(&self) -> usize {
        self.inner.component_count()
    }

    #[pyo3(signature = (exact = false, sources = None, seed = DEFAULT_SEED))]
    fn metrics<'py>(
        &self,
        py: Python<'py>,
        exact: bool,
        sources: Option<usize>,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mode = path_mode(self.inner.node_count(), exact, sources, seed);
        let report = py.detach(|| MetricsReport::compute(&self.inner, Some(mode)));
        to_py(py, &report)
    }

    /// Louvain community label per node.
    #[pyo3(signature = (seed = DEFAULT_SEED))]
    fn louvain(&self, py: Python<'_>, seed: u64) -> Vec<u32> {
        py.detach(|| lambda3::louvain(&self.inner, seed)).assignment().to_vec()
    }

    fn modularity(&self, labels: Vec<u32>) -> PyResult<f64> {
        if labels.len() != self.inner.node_count() {
            return Err(PyValueError::new_err(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.inner.node_count()
            )));
        }
        lambda3::modularity(&self.inner, &Partition::from_labels(&labels)).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.node_count()
    }

    fn __repr__(&self) -> String {
        format!("Graph(nodes={}, edges={})", self.inner.node_count(), self.inner.edge_count())
    }
}

/// Grows a network. Returns `(graph, log)` where `log` is a list of
/// interaction dicts, genesis first.
#[pyfunction]
#[pyo3(signature = (n, lambda1 = 0.0, lambda2 = 1.0, lambda3 = 0.0, seed = DEFAULT_SEED))]
fn generate<'py>(
    py: Python<'py>,
    n: usize,
    lambda1: f64,
    lambda2: f64,
    lambda3: f64,
    seed: u64,
) -> PyResult<(PyGraph, Bound<'py, PyAny>)> {
    let cfg = lambda3::GeneratorConfig::new(n, (lambda1, lambda2, lambda3), seed);
    let out = py.detach(|| lambda3::generate(cfg)).map_err(py_err)?;
    let log = to_py(py, &out.log)?;
    Ok((PyGraph { inner: out.graph }, log))
}

#[pyfunction]
fn interaction_size(b: usize, n: usize, e: usize) -> usize {
    lambda3::interaction_size(b, n, e)
}

/// `(min, max)` new edges created by an interaction with these role counts.
#[pyfunction]
fn edge_bounds(b: usize, n: usize, e: usize) -> (usize, usize) {
    lambda3::edge_bounds(b, n, e)
}

/// `count` Poisson variates from a fresh seeded stream.
#[pyfunction]
#[pyo3(signature = (lam, count, seed = DEFAULT_SEED))]
fn poisson(lam: f64, count: usize, seed: u64) -> PyResult<Vec<u64>> {
    let mut rng = RngState::new(seed);
    (0..count).map(|_| rng.poisson(lam).map_err(py_err)).collect()
}

#[pyfunction]
#[pyo3(signature = (preset = None, lambdas = None, n = 10_000, runs = exp::DEFAULT_RUNS, seed = DEFAULT_SEED, exact = None))]
fn run_ensemble<'py>(
    py: Python<'py>,
    preset: Option<&str>,
    lambdas: Option<(f64, f64, f64)>,
    n: usize,
    runs: usize,
    seed: u64,
    exact: Option<bool>,
) -> PyResult<Bound<'py, PyAny>> {
    let s = setting(preset, lambdas)?;
    let mode = exact.map(|e| if e { PathMode::Exact } else { PathMode::Sampled { sources: 1000, seed } });
    let report = py.detach(|| exp::run_ensemble(&s, n, runs, seed, mode)).map_err(py_err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (preset = None, lambdas = None, thresholds = None, seed = DEFAULT_SEED))]
fn run_evolution<'py>(
    py: Python<'py>,
    preset: Option<&str>,
    lambdas: Option<(f64, f64, f64)>,
    thresholds: Option<Vec<usize>>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let s = setting(preset, lambdas)?;
    let schedule = match thresholds {
        Some(t) => SnapshotSchedule::new(t).map_err(py_err)?,
        None => SnapshotSchedule::default(),
    };
    let snaps = py.detach(|| exp::run_evolution(&s, &schedule, seed)).map_err(py_err)?;
    to_py(py, &snaps)
}

#[pyfunction]
#[pyo3(signature = (preset = None, lambdas = None, n = 100_000, seed = DEFAULT_SEED))]
fn run_correlations<'py>(
    py: Python<'py>,
    preset: Option<&str>,
    lambdas: Option<(f64, f64, f64)>,
    n: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let s = setting(preset, lambdas)?;
    let c = py.detach(|| exp::run_correlations(&s, n, seed)).map_err(py_err)?;
    to_py(py, &c)
}

/// Classifies a `year,month,authors` CSV and fits a Poisson to the
/// co-author counts of the retained publications.
#[pyfunction]
#[pyo3(signature = (path, seed = DEFAULT_SEED, top = 15))]
fn analyze_publications<'py>(py: Python<'py>, path: &str, seed: u64, top: usize) -> PyResult<Bound<'py, PyAny>> {
    let raw = ingest::read_publications(open(path)?).map_err(py_err)?;
    let mut records = ingest::assign_months(&raw, seed).map_err(py_err)?;
    ingest::sort_by_time(&mut records);
    let classified = ingest::classify_stream(&records).map_err(py_err)?;
    let hist = ingest::coauthor_histogram(&classified.publications).map_err(py_err)?;
    let fit = ingest::poisson_fit_report(&hist, hist.lambda_hat);
    let top_authors = ingest::top_main_authors(&classified.publications, top);
    let (graph, authors) = ingest::build_coauthorship_network(&records);

    let out = PyDict::new(py);
    out.set_item("publications", records.len())?;
    out.set_item("retained", classified.publications.len())?;
    out.set_item("dropped", classified.dropped)?;
    out.set_item("lambda_hat", hist.lambda_hat)?;
    out.set_item("histogram", to_py(py, &hist.counts)?)?;
    out.set_item("fit", to_py(py, &fit)?)?;
    out.set_item("top_authors", to_py(py, &top_authors)?)?;
    out.set_item("classified", to_py(py, &classified.publications)?)?;
    out.set_item("authors", authors)?;
    out.set_item("network", Bound::new(py, PyGraph { inner: graph })?)?;
    Ok(out.into_any())
}

#[pymodule(name = "lambda3")]
fn lambda3_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(interaction_size, m)?)?;
    m.add_function(wrap_pyfunction!(edge_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(poisson, m)?)?;
    m.add_function(wrap_pyfunction!(run_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(run_evolution, m)?)?;
    m.add_function(wrap_pyfunction!(run_correlations, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_publications, m)?)?;
    m.add("PRESETS", exp::PRESETS.iter().map(|p| p.name).collect::<Vec<_>>())?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    Ok(())
}
