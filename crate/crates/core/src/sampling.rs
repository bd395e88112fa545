//! Vertex-domain and graph-frequency-domain sampling operators.
//!
//! A sampler maps a length-`N` signal to `M` samples, `c = Sᵀ x`. Both kinds
//! are exposed through [`SamplingMatrixView`], which applies `Sᵀ` and `S`
//! without materializing them and can also produce the dense `M × N` matrix.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};
use crate::filtering::{PolynomialFilter, SpectralKernel};
use crate::graph::{build_laplacian, Graph, VariationOperatorKind};
use crate::spectral::SpectralDecomposition;

/// Filter applied before node-wise sampling (the `G` in `c = I_TV G x`).
#[derive(Debug, Clone)]
pub enum Prefilter {
    Spectral(SpectralKernel),
    Polynomial(PolynomialFilter),
}

/// Node-wise sampling on an ordered sampling set.
#[derive(Debug, Clone)]
pub struct VertexSampler {
    nodes: Vec<usize>,
    prefilter: Option<Prefilter>,
}

impl VertexSampler {
    /// Keeps the given order; `c[j]` pairs with `nodes[j]`.
    pub fn ordered(nodes: Vec<usize>, n: usize) -> Result<Self> {
        if nodes.is_empty() || nodes.len() > n {
            return Err(Error::InvalidConfig(format!(
                "sampling set size {} must be in 1..={n}",
                nodes.len()
            )));
        }
        let mut seen = vec![false; n];
        for &i in &nodes {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidConfig(format!("node {i} appears twice in sampling set")));
            }
        }
        Ok(Self { nodes, prefilter: None })
    }

    /// Sorts the set ascending.
    pub fn sorted(mut nodes: Vec<usize>, n: usize) -> Result<Self> {
        nodes.sort_unstable();
        Self::ordered(nodes, n)
    }

    pub fn with_prefilter(mut self, prefilter: Prefilter) -> Self {
        self.prefilter = Some(prefilter);
        self
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn prefilter(&self) -> Option<&Prefilter> {
        self.prefilter.as_ref()
    }
}

/// Spectral filtering followed by spectrum folding with period `ratio`.
#[derive(Debug, Clone)]
pub struct FrequencySampler {
    kernel: SpectralKernel,
    ratio: usize,
}

impl FrequencySampler {
    pub fn new(kernel: SpectralKernel, ratio: usize, n: usize) -> Result<Self> {
        if ratio == 0 || !n.is_multiple_of(ratio) {
            return Err(Error::NotDivisible { n, m: ratio });
        }
        Ok(Self { kernel, ratio })
    }

    pub fn kernel(&self) -> &SpectralKernel {
        &self.kernel
    }

    pub fn ratio(&self) -> usize {
        self.ratio
    }
}

#[derive(Debug, Clone)]
enum ViewKind {
    Vertex {
        nodes: Vec<usize>,
        /// Symmetric `G`; `None` means `G = I`.
        filter: Option<DMatrix<f64>>,
    },
    Frequency {
        basis: DMatrix<f64>,
        response: DVector<f64>,
        ratio: usize,
    },
    Dense(DMatrix<f64>),
}

/// Linear sampling operator `Sᵀ: R^N -> R^M` with its transpose.
#[derive(Debug, Clone)]
pub struct SamplingMatrixView {
    rows: usize,
    cols: usize,
    kind: ViewKind,
}

impl SamplingMatrixView {
    pub fn vertex(g: &Graph, dec: &SpectralDecomposition, vs: &VertexSampler) -> Result<Self> {
        let n = dec.size();
        check_len("vertex sampler (graph size)", n, g.node_count())?;
        if let Some(&bad) = vs.nodes.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, len: n });
        }
        let filter = match &vs.prefilter {
            None => None,
            Some(Prefilter::Spectral(k)) => Some(dec.filter_matrix(&k.response(dec))),
            Some(Prefilter::Polynomial(p)) => {
                let kind = dec.operator_kind().unwrap_or(VariationOperatorKind::Combinatorial);
                let l = build_laplacian(g, kind);
                let mut power = DMatrix::identity(n, n);
                let mut acc = DMatrix::identity(n, n) * p.coefficients[0];
                for &c in &p.coefficients[1..] {
                    power = &l * power;
                    acc += &power * c;
                }
                Some(acc)
            }
        };
        Ok(Self {
            rows: vs.nodes.len(),
            cols: n,
            kind: ViewKind::Vertex {
                nodes: vs.nodes.clone(),
                filter,
            },
        })
    }

    pub fn frequency(dec: &SpectralDecomposition, fs: &FrequencySampler) -> Result<Self> {
        let n = dec.size();
        if !n.is_multiple_of(fs.ratio) {
            return Err(Error::NotDivisible { n, m: fs.ratio });
        }
        Ok(Self {
            rows: fs.ratio,
            cols: n,
            kind: ViewKind::Frequency {
                basis: dec.eigenvectors().clone(),
                response: fs.kernel.response(dec),
                ratio: fs.ratio,
            },
        })
    }

    /// Wraps an explicit `M × N` matrix `Sᵀ`.
    pub fn from_dense(st: DMatrix<f64>) -> Self {
        Self {
            rows: st.nrows(),
            cols: st.ncols(),
            kind: ViewKind::Dense(st),
        }
    }

    /// Direct sampling `c = x[T]` on the given nodes.
    pub fn identity_on(nodes: Vec<usize>, n: usize) -> Result<Self> {
        let vs = VertexSampler::ordered(nodes, n)?;
        Ok(Self {
            rows: vs.nodes.len(),
            cols: n,
            kind: ViewKind::Vertex {
                nodes: vs.nodes,
                filter: None,
            },
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `c = Sᵀ x`
    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("sampling apply", self.cols, x.len())?;
        Ok(match &self.kind {
            ViewKind::Vertex { nodes, filter } => match filter {
                None => DVector::from_iterator(nodes.len(), nodes.iter().map(|&i| x[i])),
                Some(g) => DVector::from_iterator(nodes.len(), nodes.iter().map(|&i| g.row(i).dot(&x.transpose()))),
            },
            ViewKind::Frequency {
                basis,
                response,
                ratio,
            } => fold(&basis.tr_mul(x).component_mul(response), *ratio),
            ViewKind::Dense(st) => st * x,
        })
    }

    /// `S c`
    pub fn apply_transpose(&self, c: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("sampling apply_transpose", self.rows, c.len())?;
        Ok(match &self.kind {
            ViewKind::Vertex { nodes, filter } => {
                let mut scattered = DVector::zeros(self.cols);
                for (j, &i) in nodes.iter().enumerate() {
                    scattered[i] = c[j];
                }
                match filter {
                    None => scattered,
                    Some(g) => g.tr_mul(&scattered),
                }
            }
            ViewKind::Frequency {
                basis,
                response,
                ratio,
            } => {
                let unfolded = DVector::from_fn(self.cols, |i, _| c[i % ratio] * response[i]);
                basis * unfolded
            }
            ViewKind::Dense(st) => st.tr_mul(c),
        })
    }

    /// Materializes `Sᵀ` (`M × N`) column by column through [`Self::apply`].
    pub fn to_dense(&self) -> DMatrix<f64> {
        if let ViewKind::Dense(st) = &self.kind {
            return st.clone();
        }
        let mut st = DMatrix::zeros(self.rows, self.cols);
        let mut e = DVector::zeros(self.cols);
        for j in 0..self.cols {
            e[j] = 1.0;
            st.set_column(j, &self.apply(&e).expect("length matches"));
            e[j] = 0.0;
        }
        st
    }

    /// `Sᵀ A` computed column by column.
    pub fn sample_columns(&self, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        check_len("sample_columns (rows of A)", self.cols, a.nrows())?;
        let mut out = DMatrix::zeros(self.rows, a.ncols());
        for (j, col) in a.column_iter().enumerate() {
            out.set_column(j, &self.apply(&col.into_owned())?);
        }
        Ok(out)
    }
}

fn fold(xhat: &DVector<f64>, m: usize) -> DVector<f64> {
    let mut c = DVector::zeros(m);
    for (i, v) in xhat.iter().enumerate() {
        c[i % m] += v;
    }
    c
}

/// Spectrum folding `D_samp x̂` with `D_samp = [I_M I_M ...]`.
pub fn fold_spectrum(xhat: &DVector<f64>, m: usize) -> Result<DVector<f64>> {
    let n = xhat.len();
    if m == 0 || !n.is_multiple_of(m) {
        return Err(Error::NotDivisible { n, m });
    }
    Ok(fold(xhat, m))
}

/// `K × N` folding matrix `[I_K I_K ...]`.
pub fn folding_matrix(k: usize, n: usize) -> Result<DMatrix<f64>> {
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::NotDivisible { n, m: k });
    }
    Ok(DMatrix::from_fn(k, n, |r, c| if c % k == r { 1.0 } else { 0.0 }))
}

/// `c = I_TV G x`
pub fn vertex_sample(
    g: &Graph,
    dec: &SpectralDecomposition,
    vs: &VertexSampler,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    SamplingMatrixView::vertex(g, dec, vs)?.apply(x)
}

/// `c = D_samp ĝ(Λ) Uᵀ x`
pub fn frequency_sample(
    dec: &SpectralDecomposition,
    fs: &FrequencySampler,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    let xhat = dec.gft_vec(x)?.component_mul(&fs.kernel.response(dec));
    fold_spectrum(&xhat, fs.ratio)
}
