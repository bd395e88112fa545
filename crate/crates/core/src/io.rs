//! CSV readers and writers for graphs, signals, samples and sparse matrices.
//!
//! * edge list: optional `# nodes=N` line, header `src,dst,weight`
//! * signal: header `node,value`
//! * samples: header `index,value`
//! * matrix / mask triples: `# rows=R cols=C` line, header `row,col,value`
//! * node set: header `node`; partition: header `node,cell`

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRow {
    src: usize,
    dst: usize,
    weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SignalRow {
    node: usize,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleRow {
    index: usize,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct TripleRow {
    row: usize,
    col: usize,
    value: f64,
}

#[derive(Debug, Deserialize)]
struct NodeRow {
    node: usize,
}

#[derive(Debug, Deserialize)]
struct CellRow {
    node: usize,
    cell: usize,
}

/// Splits leading `# key=value ...` lines from the CSV body.
fn split_directives(text: &str) -> (Vec<(String, String)>, String) {
    let mut directives = Vec::new();
    let mut body = String::new();
    let mut in_header = true;
    for line in text.lines() {
        let trimmed = line.trim();
        if in_header && trimmed.starts_with('#') {
            for tok in trimmed.trim_start_matches('#').split_whitespace() {
                if let Some((k, v)) = tok.split_once('=') {
                    directives.push((k.to_string(), v.to_string()));
                }
            }
            continue;
        }
        in_header = false;
        body.push_str(line);
        body.push('\n');
    }
    (directives, body)
}

fn directive(directives: &[(String, String)], key: &str) -> Result<Option<usize>> {
    directives
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| {
            v.parse::<usize>()
                .map_err(|_| Error::Parse(format!("directive {key}={v} is not an integer")))
        })
        .transpose()
}

fn read_all(mut r: impl Read) -> Result<String> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    Ok(s)
}

fn rows<T: for<'de> Deserialize<'de>>(body: &str) -> Result<Vec<T>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes())
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

pub fn write_edge_list(g: &Graph, w: impl Write) -> Result<()> {
    let mut w = w;
    writeln!(w, "# nodes={}", g.node_count())?;
    let mut out = csv::Writer::from_writer(w);
    for e in g.edges() {
        out.serialize(EdgeRow {
            src: e.u,
            dst: e.v,
            weight: e.weight,
        })?;
    }
    if g.edges().is_empty() {
        out.write_record(["src", "dst", "weight"])?;
    }
    out.flush()?;
    Ok(())
}

/// Without a `# nodes=N` line the node count is one past the largest index.
pub fn read_edge_list(r: impl Read) -> Result<Graph> {
    let (directives, body) = split_directives(&read_all(r)?);
    let edges: Vec<EdgeRow> = rows(&body)?;
    let inferred = edges.iter().map(|e| e.src.max(e.dst) + 1).max().unwrap_or(0);
    let n = directive(&directives, "nodes")?.unwrap_or(inferred);
    Graph::new(n, edges.into_iter().map(|e| (e.src, e.dst, e.weight)))
}

pub fn write_signal(x: &DVector<f64>, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (node, &value) in x.iter().enumerate() {
        out.serialize(SignalRow { node, value })?;
    }
    out.flush()?;
    Ok(())
}

/// Every node `0..N` must appear exactly once.
pub fn read_signal(r: impl Read) -> Result<DVector<f64>> {
    let entries: Vec<SignalRow> = rows(&read_all(r)?)?;
    dense_from_indexed(entries.into_iter().map(|e| (e.node, e.value)), "node")
}

pub fn write_samples(c: &DVector<f64>, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (index, &value) in c.iter().enumerate() {
        out.serialize(SampleRow { index, value })?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_samples(r: impl Read) -> Result<DVector<f64>> {
    let entries: Vec<SampleRow> = rows(&read_all(r)?)?;
    dense_from_indexed(entries.into_iter().map(|e| (e.index, e.value)), "index")
}

fn dense_from_indexed(entries: impl Iterator<Item = (usize, f64)>, what: &str) -> Result<DVector<f64>> {
    let entries: Vec<(usize, f64)> = entries.collect();
    let n = entries.len();
    let mut out = vec![None; n];
    for (i, v) in entries {
        if i >= n {
            return Err(Error::Parse(format!("{what} {i} out of range for {n} rows")));
        }
        if out[i].replace(v).is_some() {
            return Err(Error::Parse(format!("{what} {i} listed twice")));
        }
    }
    Ok(DVector::from_iterator(n, out.into_iter().map(|v| v.expect("all indices seen"))))
}

/// Writes the listed entries of `m` (all entries when `entries` is `None`).
pub fn write_matrix_triples(m: &DMatrix<f64>, entries: Option<&[(usize, usize)]>, w: impl Write) -> Result<()> {
    let mut w = w;
    writeln!(w, "# rows={} cols={}", m.nrows(), m.ncols())?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["row", "col", "value"])?;
    let all: Vec<(usize, usize)>;
    let list = match entries {
        Some(e) => e,
        None => {
            all = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| (i, j))).collect();
            &all
        }
    };
    for &(row, col) in list {
        out.write_record([row.to_string(), col.to_string(), m[(row, col)].to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Sparse matrix file contents: shape plus `(row, col, value)` triples.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTriples {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl MatrixTriples {
    /// Dense matrix with unlisted entries set to zero.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for &(i, j, v) in &self.entries {
            m[(i, j)] = v;
        }
        m
    }

    pub fn positions(&self) -> Vec<(usize, usize)> {
        self.entries.iter().map(|&(i, j, _)| (i, j)).collect()
    }
}

pub fn read_matrix_triples(r: impl Read) -> Result<MatrixTriples> {
    let (directives, body) = split_directives(&read_all(r)?);
    let (Some(nr), Some(nc)) = (directive(&directives, "rows")?, directive(&directives, "cols")?) else {
        return Err(Error::Parse("matrix file needs a `# rows=R cols=C` line".into()));
    };
    let raw: Vec<TripleRow> = rows(&body)?;
    let mut entries = Vec::with_capacity(raw.len());
    for t in raw {
        if t.row >= nr || t.col >= nc {
            return Err(Error::Parse(format!("entry ({}, {}) outside {nr}x{nc}", t.row, t.col)));
        }
        entries.push((t.row, t.col, t.value));
    }
    Ok(MatrixTriples {
        rows: nr,
        cols: nc,
        entries,
    })
}

/// Ordered node list (header `node`).
pub fn read_node_set(r: impl Read) -> Result<Vec<usize>> {
    Ok(rows::<NodeRow>(&read_all(r)?)?.into_iter().map(|r| r.node).collect())
}

pub fn write_node_set(nodes: &[usize], w: impl Write) -> Result<()> {
    let mut w = w;
    writeln!(w, "node")?;
    for n in nodes {
        writeln!(w, "{n}")?;
    }
    Ok(())
}

/// Partition cells from `node,cell` rows; cells are numbered `0..K`.
pub fn read_partition(r: impl Read) -> Result<Vec<Vec<usize>>> {
    let entries: Vec<CellRow> = rows(&read_all(r)?)?;
    let k = entries.iter().map(|e| e.cell + 1).max().unwrap_or(0);
    let mut cells = vec![Vec::new(); k];
    for e in entries {
        cells[e.cell].push(e.node);
    }
    Ok(cells)
}

pub fn open(path: impl AsRef<Path>) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

pub fn create(path: impl AsRef<Path>) -> Result<File> {
    if let Some(parent) = path.as_ref().parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(File::create(path)?)
}
