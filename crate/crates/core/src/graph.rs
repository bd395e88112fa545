//! Undirected weighted graphs and their variation operators.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparseSymmetric;

/// An undirected edge. Stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Undirected weighted graph without self-loops.
///
/// Edges are kept as a list sorted by `(u, v)` with `u < v`; dense operators
/// are only materialized on request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VariationOperatorKind {
    /// `L = D - W`
    Combinatorial,
    /// `D^{-1/2} (D - W) D^{-1/2}`, zero rows for isolated nodes.
    SymmetricNormalized,
}

impl Graph {
    /// Builds a graph from `(u, v, weight)` triples. Each unordered pair may
    /// appear at most once, in either orientation.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidGraph("graph must have at least one node".into()));
        }
        let mut list = Vec::new();
        for (a, b, w) in edges {
            if a >= node_count || b >= node_count {
                return Err(Error::IndexOutOfRange {
                    index: a.max(b),
                    len: node_count,
                });
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) has invalid weight {w}")));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            list.push(Edge { u, v, weight: w });
        }
        list.sort_by_key(|e| (e.u, e.v));
        if let Some(w) = list.windows(2).find(|w| w[0].u == w[1].u && w[0].v == w[1].v) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].u, w[0].v
            )));
        }
        Ok(Self {
            node_count,
            edges: list,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.node_count];
        for e in &self.edges {
            d[e.u] += e.weight;
            d[e.v] += e.weight;
        }
        d
    }

    /// Dense symmetric weight matrix `W`.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let n = self.node_count;
        let mut w = DMatrix::zeros(n, n);
        for e in &self.edges {
            w[(e.u, e.v)] = e.weight;
            w[(e.v, e.u)] = e.weight;
        }
        w
    }

    /// Neighbor lists, ignoring zero-weight edges.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for e in self.edges.iter().filter(|e| e.weight > 0.0) {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        adj
    }

    /// Connected components as a label per node (labels `0..count`).
    pub fn component_labels(&self) -> (usize, Vec<usize>) {
        let adj = self.neighbors();
        let mut label = vec![usize::MAX; self.node_count];
        let mut count = 0;
        for start in 0..self.node_count {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for &j in &adj[i] {
                    if label[j] == usize::MAX {
                        label[j] = count;
                        queue.push_back(j);
                    }
                }
            }
            count += 1;
        }
        (count, label)
    }

    pub fn is_connected(&self) -> bool {
        self.component_labels().0 == 1
    }

    /// Returns true when the given node subset induces a connected subgraph.
    pub fn is_connected_subset(&self, nodes: &[usize]) -> bool {
        if nodes.is_empty() {
            return false;
        }
        let mut member = vec![false; self.node_count];
        for &n in nodes {
            member[n] = true;
        }
        let adj = self.neighbors();
        let mut seen = vec![false; self.node_count];
        seen[nodes[0]] = true;
        let mut queue = VecDeque::from([nodes[0]]);
        let mut reached = 1;
        while let Some(i) = queue.pop_front() {
            for &j in &adj[i] {
                if member[j] && !seen[j] {
                    seen[j] = true;
                    reached += 1;
                    queue.push_back(j);
                }
            }
        }
        reached == nodes.len()
    }

    fn inv_sqrt_degrees(&self) -> Vec<f64> {
        self.degrees()
            .into_iter()
            .map(|d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
            .collect()
    }

    /// Sparse form of the variation operator for matrix-free filtering.
    pub fn sparse_laplacian(&self, kind: VariationOperatorKind) -> SparseSymmetric {
        let n = self.node_count;
        let deg = self.degrees();
        let scale = match kind {
            VariationOperatorKind::Combinatorial => vec![1.0; n],
            VariationOperatorKind::SymmetricNormalized => self.inv_sqrt_degrees(),
        };
        let mut triplets = Vec::with_capacity(n + 2 * self.edges.len());
        for (i, &d) in deg.iter().enumerate() {
            triplets.push((i, i, d * scale[i] * scale[i]));
        }
        for e in &self.edges {
            let w = -e.weight * scale[e.u] * scale[e.v];
            triplets.push((e.u, e.v, w));
            triplets.push((e.v, e.u, w));
        }
        SparseSymmetric::from_triplets(n, triplets)
    }
}

/// Dense variation operator of `g`.
pub fn build_laplacian(g: &Graph, kind: VariationOperatorKind) -> DMatrix<f64> {
    let n = g.node_count();
    let deg = g.degrees();
    let mut l = DMatrix::zeros(n, n);
    for (i, &d) in deg.iter().enumerate() {
        l[(i, i)] = d;
    }
    for e in g.edges() {
        l[(e.u, e.v)] -= e.weight;
        l[(e.v, e.u)] -= e.weight;
    }
    if kind == VariationOperatorKind::SymmetricNormalized {
        let s = g.inv_sqrt_degrees();
        for j in 0..n {
            for i in 0..n {
                l[(i, j)] *= s[i] * s[j];
            }
        }
    }
    l
}
