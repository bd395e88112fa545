//! Python bindings. Graphs cross the boundary as `(n, [(u, v, w), ...])`,
//! vectors as lists of floats and matrices as lists of rows.

use std::collections::{BTreeMap, HashMap};

use graphsamp::completion::{active_sample_greedy, bl_cross_sample, dglr_solve, default_max_iter, CompletionProblem};
use graphsamp::experiments::{run_experiment as run, ExperimentConfig, ExperimentId};
use graphsamp::filtering::KernelSpec;
use graphsamp::generators::GeneratorSpec;
use graphsamp::recovery::{build_generator, recover, SubspaceModel};
use graphsamp::sampling::{SamplingMatrixView, VertexSampler};
use graphsamp::selection::{
    coherence_distribution, greedy_select, greedy_select_localized, random_select, Criterion, SamplingDistribution,
};
use graphsamp::{build_laplacian, Graph, SpectralDecomposition, VariationOperatorKind};
use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

type Edges = Vec<(usize, usize, f64)>;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn operator(name: &str) -> PyResult<VariationOperatorKind> {
    match name {
        "combinatorial" => Ok(VariationOperatorKind::Combinatorial),
        "normalized" => Ok(VariationOperatorKind::SymmetricNormalized),
        other => Err(err(format!("unknown operator `{other}`"))),
    }
}

fn graph(n: usize, edges: Edges) -> PyResult<Graph> {
    Graph::new(n, edges).map_err(err)
}

fn decompose(n: usize, edges: Edges, op: &str) -> PyResult<SpectralDecomposition> {
    Ok(SpectralDecomposition::of_graph(&graph(n, edges)?, operator(op)?))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Generates a graph from a JSON generator spec, e.g. `{"kind": "path", "n": 5}`.
#[pyfunction]
#[pyo3(signature = (spec_json, seed=0))]
fn gen_graph(spec_json: &str, seed: u64) -> PyResult<(usize, Edges)> {
    let spec: GeneratorSpec = serde_json::from_str(spec_json).map_err(err)?;
    let g = graphsamp::generators::gen_graph(&spec, seed).map_err(err)?;
    Ok((g.node_count(), g.edges().iter().map(|e| (e.u, e.v, e.weight)).collect()))
}

#[pyfunction]
#[pyo3(signature = (n, edges, op="combinatorial"))]
fn laplacian(n: usize, edges: Edges, op: &str) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(&build_laplacian(&graph(n, edges)?, operator(op)?)))
}

/// Ascending eigenvalues and the eigenvector matrix (columns are modes).
#[pyfunction]
#[pyo3(signature = (n, edges, op="combinatorial"))]
fn eigendecompose(n: usize, edges: Edges, op: &str) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let dec = decompose(n, edges, op)?;
    Ok((dec.eigenvalues().iter().copied().collect(), rows(dec.eigenvectors())))
}

/// Selects `m` nodes with `eopt`, `aopt`, `coherence` (these need `k`),
/// `localized` (needs `kernel`) or `uniform`.
#[pyfunction]
#[pyo3(signature = (n, edges, method, m, k=None, kernel=None, seed=0, op="combinatorial"))]
#[allow(clippy::too_many_arguments)]
fn select(
    n: usize,
    edges: Edges,
    method: &str,
    m: usize,
    k: Option<usize>,
    kernel: Option<&str>,
    seed: u64,
    op: &str,
) -> PyResult<Vec<usize>> {
    let dec = decompose(n, edges, op)?;
    let need_k = || k.ok_or_else(|| err(format!("`{method}` needs k")));
    let result = match method {
        "eopt" => greedy_select(&dec, need_k()?, m, Criterion::EOpt),
        "aopt" => greedy_select(&dec, need_k()?, m, Criterion::AOpt),
        "coherence" => coherence_distribution(&dec, need_k()?).and_then(|d| random_select(&d, m, seed)),
        "uniform" => random_select(&SamplingDistribution::uniform(n), m, seed),
        "localized" => {
            let spec = kernel.ok_or_else(|| err("`localized` needs kernel"))?;
            let kern = spec.parse::<KernelSpec>().and_then(|s| s.resolve(dec.eigenvalues())).map_err(err)?;
            greedy_select_localized(&dec, &kern, m)
        }
        other => return Err(err(format!("unknown method `{other}`"))),
    };
    Ok(result.map_err(err)?.ordered_nodes)
}

/// Values of `signal` at `nodes`, in order.
#[pyfunction]
fn sample_vertex(n: usize, edges: Edges, signal: Vec<f64>, nodes: Vec<usize>) -> PyResult<Vec<f64>> {
    let g = graph(n, edges)?;
    let dec = SpectralDecomposition::of_graph(&g, VariationOperatorKind::Combinatorial);
    let vs = VertexSampler::ordered(nodes, n).map_err(err)?;
    let view = SamplingMatrixView::vertex(&g, &dec, &vs).map_err(err)?;
    Ok(view.apply(&DVector::from_vec(signal)).map_err(err)?.iter().copied().collect())
}

/// Reconstructs a `k`-bandlimited signal from vertex samples; returns the
/// signal and whether the sampling set determines the model.
#[pyfunction]
#[pyo3(signature = (n, edges, nodes, samples, k, op="combinatorial"))]
fn recover_bandlimited(
    n: usize,
    edges: Edges,
    nodes: Vec<usize>,
    samples: Vec<f64>,
    k: usize,
    op: &str,
) -> PyResult<(Vec<f64>, bool)> {
    let g = graph(n, edges)?;
    let dec = SpectralDecomposition::of_graph(&g, operator(op)?);
    let vs = VertexSampler::ordered(nodes, n).map_err(err)?;
    let view = SamplingMatrixView::vertex(&g, &dec, &vs).map_err(err)?;
    let a = build_generator(&dec, &SubspaceModel::Bandlimited(k)).map_err(err)?;
    let report = recover(&a, &view, &DVector::from_vec(samples)).map_err(err)?;
    Ok((report.reconstruction.iter().copied().collect(), report.ds_condition_held))
}

/// Completes a matrix from `(row, col, value)` observations.
#[pyfunction]
#[pyo3(signature = (row_graph, col_graph, observed, alpha=0.1, beta=0.1, tol=1e-10))]
fn mc_solve(
    row_graph: (usize, Edges),
    col_graph: (usize, Edges),
    observed: Vec<(usize, usize, f64)>,
    alpha: f64,
    beta: f64,
    tol: f64,
) -> PyResult<Vec<Vec<f64>>> {
    let (rg, cg) = (graph(row_graph.0, row_graph.1)?, graph(col_graph.0, col_graph.1)?);
    let mut x = DMatrix::zeros(rg.node_count(), cg.node_count());
    let mut mask = Vec::with_capacity(observed.len());
    for (i, j, v) in observed {
        if i >= x.nrows() || j >= x.ncols() {
            return Err(err(format!("entry ({i}, {j}) outside the matrix")));
        }
        x[(i, j)] = v;
        mask.push((i, j));
    }
    let prob = CompletionProblem::new(x, mask, &rg, &cg, alpha, beta).map_err(err)?;
    let max_iter = default_max_iter(&prob);
    Ok(rows(&dglr_solve(&prob, tol, max_iter).map_err(err)?))
}

/// Entries to observe: `greedy` uses `budget`, `blcross` uses `kr` and `kc`.
#[pyfunction]
#[pyo3(signature = (row_graph, col_graph, strategy, budget=None, kr=None, kc=None, alpha=0.1, beta=0.1))]
#[allow(clippy::too_many_arguments)]
fn mc_sample(
    row_graph: (usize, Edges),
    col_graph: (usize, Edges),
    strategy: &str,
    budget: Option<usize>,
    kr: Option<usize>,
    kc: Option<usize>,
    alpha: f64,
    beta: f64,
) -> PyResult<Vec<(usize, usize)>> {
    let (rg, cg) = (graph(row_graph.0, row_graph.1)?, graph(col_graph.0, col_graph.1)?);
    let missing = |name: &str| err(format!("`{strategy}` needs {name}"));
    match strategy {
        "greedy" => active_sample_greedy(&rg, &cg, alpha, beta, budget.ok_or_else(|| missing("budget"))?),
        "blcross" => bl_cross_sample(&rg, &cg, kr.ok_or_else(|| missing("kr"))?, kc.ok_or_else(|| missing("kc"))?),
        other => return Err(err(format!("unknown strategy `{other}`"))),
    }
    .map_err(err)
}

/// Runs a named experiment; returns `(passed, metrics)`.
#[pyfunction]
#[pyo3(signature = (id, seed=0, overrides=None))]
fn run_experiment(
    id: &str,
    seed: u64,
    overrides: Option<HashMap<String, String>>,
) -> PyResult<(bool, BTreeMap<String, f64>)> {
    let mut cfg = ExperimentConfig::new(id.parse::<ExperimentId>().map_err(err)?, seed);
    for (k, v) in overrides.unwrap_or_default() {
        cfg = cfg.with(&k, &v);
    }
    let report = run(&cfg).map_err(err)?;
    Ok((report.passed, report.metrics))
}

/// Runs the built-in oracle checks; returns `(name, passed)` pairs.
#[pyfunction]
fn selftest() -> Vec<(String, bool)> {
    graphsamp::selftest::run_all().into_iter().map(|c| (c.name.to_string(), c.passed)).collect()
}

#[pymodule]
fn graphsamp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(gen_graph, m)?)?;
    m.add_function(wrap_pyfunction!(laplacian, m)?)?;
    m.add_function(wrap_pyfunction!(eigendecompose, m)?)?;
    m.add_function(wrap_pyfunction!(select, m)?)?;
    m.add_function(wrap_pyfunction!(sample_vertex, m)?)?;
    m.add_function(wrap_pyfunction!(recover_bandlimited, m)?)?;
    m.add_function(wrap_pyfunction!(mc_solve, m)?)?;
    m.add_function(wrap_pyfunction!(mc_sample, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
