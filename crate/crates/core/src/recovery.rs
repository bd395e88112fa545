//! Subspace signal models and their recovery from samples.
//!
//! Every model is a generator matrix `A` (`x = A d`). Given samples
//! `c = Sᵀ x`, the reconstruction is `x̃ = A (SᵀA)† c`, which is exact
//! whenever `SᵀA` has full column rank.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::filtering::SpectralKernel;
use crate::graph::Graph;
use crate::linalg::{conjugate_gradient, pseudo_inverse, singular_values, FnOperator};
use crate::sampling::SamplingMatrixView;
use crate::spectral::SpectralDecomposition;

/// Relative singular-value cutoff for pseudoinverses.
pub const PINV_RTOL: f64 = 1e-10;
/// Smallest singular value of `SᵀA` above which the direct-sum condition holds.
pub const DS_THRESHOLD: f64 = 1e-8;
/// `|R̃_ga(λ_i)|` at or below this gets a zero correction response.
pub const PGS_ZERO_TOL: f64 = 1e-12;
/// Tolerance of the conjugate-gradient solve in [`regularized_recover`].
pub const REGULARIZED_CG_TOL: f64 = 1e-10;
/// Largest system solved densely when conjugate gradients fail.
pub const DENSE_FALLBACK_MAX_N: usize = 200;

/// Generator recipe for a `K`-dimensional signal subspace.
#[derive(Debug, Clone)]
pub enum SubspaceModel {
    /// Span of the first `K` eigenvectors.
    Bandlimited(usize),
    /// Column `i` is `Σ_j â_i(λ_j) u_j`.
    SpectralShapes(Vec<SpectralKernel>),
    /// Periodic graph spectrum: `A = U â(Λ) D_sampᵀ` with a `K`-periodic folding.
    Pgs { generator: SpectralKernel, k: usize },
    /// Indicator vectors of a partition of the nodes.
    PiecewiseConstant(Vec<Vec<usize>>),
}

impl SubspaceModel {
    pub fn dimension(&self) -> usize {
        match self {
            Self::Bandlimited(k) => *k,
            Self::SpectralShapes(ks) => ks.len(),
            Self::Pgs { k, .. } => *k,
            Self::PiecewiseConstant(cells) => cells.len(),
        }
    }
}

/// Output of [`recover`].
#[derive(Debug, Clone, Serialize)]
pub struct RecoveryReport {
    #[serde(skip)]
    pub reconstruction: DVector<f64>,
    /// `||Sᵀ x̃ - c||`
    pub residual_norm: f64,
    pub ds_condition_held: bool,
    /// Smallest singular value of `SᵀA`.
    pub smallest_singular_value: f64,
}

/// Builds the `N × K` generator matrix of `m`.
pub fn build_generator(dec: &SpectralDecomposition, m: &SubspaceModel) -> Result<DMatrix<f64>> {
    let n = dec.size();
    let k = m.dimension();
    if k == 0 || k > n {
        return Err(Error::ModelInvalid(format!("subspace dimension {k} must be in 1..={n}")));
    }
    match m {
        SubspaceModel::Bandlimited(k) => Ok(dec.low_band(*k)),
        SubspaceModel::SpectralShapes(kernels) => {
            let u = dec.eigenvectors();
            let mut a = DMatrix::zeros(n, kernels.len());
            for (i, kernel) in kernels.iter().enumerate() {
                a.set_column(i, &(u * kernel.response(dec)));
            }
            Ok(a)
        }
        SubspaceModel::Pgs { generator, k } => {
            if !n.is_multiple_of(*k) {
                return Err(Error::ModelInvalid(format!("PGS dimension {k} must divide N = {n}")));
            }
            Ok(pgs_generator_wrapping(dec, generator, *k))
        }
        SubspaceModel::PiecewiseConstant(cells) => {
            let mut owner = vec![usize::MAX; n];
            for (c, cell) in cells.iter().enumerate() {
                if cell.is_empty() {
                    return Err(Error::ModelInvalid(format!("partition cell {c} is empty")));
                }
                for &i in cell {
                    if i >= n {
                        return Err(Error::ModelInvalid(format!("node {i} out of range in cell {c}")));
                    }
                    if owner[i] != usize::MAX {
                        return Err(Error::ModelInvalid(format!("node {i} belongs to two cells")));
                    }
                    owner[i] = c;
                }
            }
            if let Some(i) = owner.iter().position(|&o| o == usize::MAX) {
                return Err(Error::ModelInvalid(format!("node {i} is not covered by the partition")));
            }
            Ok(DMatrix::from_fn(n, cells.len(), |i, c| if owner[i] == c { 1.0 } else { 0.0 }))
        }
    }
}

/// PGS generator with mode `i` folded onto coefficient `i mod K`.
///
/// When `K` does not divide `N` the trailing partial period wraps onto the
/// first `N mod K` coefficients; for `K | N` this is exactly `U â(Λ) D_sampᵀ`.
pub fn pgs_generator_wrapping(dec: &SpectralDecomposition, generator: &SpectralKernel, k: usize) -> DMatrix<f64> {
    let n = dec.size();
    let u = dec.eigenvectors();
    let response = generator.response(dec);
    let mut a = DMatrix::zeros(n, k);
    for mode in 0..n {
        let mut col = a.column_mut(mode % k);
        col.axpy(response[mode], &u.column(mode), 1.0);
    }
    a
}

/// Indices of partition cells that do not induce a connected subgraph.
pub fn disconnected_cells(g: &Graph, cells: &[Vec<usize>]) -> Vec<usize> {
    cells
        .iter()
        .enumerate()
        .filter(|(_, cell)| !g.is_connected_subset(cell))
        .map(|(i, _)| i)
        .collect()
}

/// `x = A d`
pub fn synthesize(a: &DMatrix<f64>, d: &DVector<f64>) -> Result<DVector<f64>> {
    check_len("synthesize", a.ncols(), d.len())?;
    Ok(a * d)
}

/// Checks whether `SᵀA` has full column rank. Returns the flag and the
/// smallest singular value of `SᵀA`.
pub fn check_ds_condition(a: &DMatrix<f64>, s: &SamplingMatrixView) -> Result<(bool, f64)> {
    check_len("check_ds_condition (signal length)", s.cols(), a.nrows())?;
    if s.rows() < a.ncols() {
        return Err(Error::DimensionMismatch {
            context: "check_ds_condition (need at least K samples)",
            expected: a.ncols(),
            found: s.rows(),
        });
    }
    let sa = s.sample_columns(a)?;
    let smin = singular_values(&sa).last().copied().unwrap_or(0.0);
    Ok((smin > DS_THRESHOLD, smin))
}

/// `x̃ = A (SᵀA)† c`. Exact when the direct-sum condition holds and `c`
/// comes from a signal in the range of `A`; the least-squares solution
/// within that range otherwise.
pub fn recover(a: &DMatrix<f64>, s: &SamplingMatrixView, c: &DVector<f64>) -> Result<RecoveryReport> {
    check_len("recover (signal length)", s.cols(), a.nrows())?;
    check_len("recover (samples)", s.rows(), c.len())?;
    let sa = s.sample_columns(a)?;
    let sv = singular_values(&sa);
    let smin = if s.rows() < a.ncols() {
        0.0
    } else {
        sv.last().copied().unwrap_or(0.0)
    };
    let coeffs = pseudo_inverse(&sa, PINV_RTOL) * c;
    let reconstruction = a * coeffs;
    let residual_norm = (s.apply(&reconstruction)? - c).norm();
    Ok(RecoveryReport {
        reconstruction,
        residual_norm,
        ds_condition_held: smin > DS_THRESHOLD,
        smallest_singular_value: smin,
    })
}

/// `R̃_ga(λ_i) = Σ_ℓ ĝ(λ_{i+Kℓ}) â(λ_{i+Kℓ})` for `i < K`.
pub fn pgs_aliased_response(
    g: &SpectralKernel,
    a: &SpectralKernel,
    eigenvalues: &DVector<f64>,
    k: usize,
) -> DVector<f64> {
    let mut r = DVector::zeros(k);
    for (mode, &l) in eigenvalues.iter().enumerate() {
        r[mode % k] += g.eval(l) * a.eval(l);
    }
    r
}

/// Correction filter `ĥ(λ_i) = 1 / R̃_ga(λ_i)`, zero where `R̃_ga` vanishes.
pub fn pgs_correction_kernel(
    g: &SpectralKernel,
    a: &SpectralKernel,
    eigenvalues: &DVector<f64>,
    k: usize,
) -> DVector<f64> {
    pgs_aliased_response(g, a, eigenvalues, k).map(|r| if r.abs() <= PGS_ZERO_TOL { 0.0 } else { 1.0 / r })
}

/// PGS recovery from frequency-domain samples (`M = K`) by spectral
/// correction filtering instead of a pseudoinverse.
pub fn recover_pgs_filtering(
    dec: &SpectralDecomposition,
    generator: &SpectralKernel,
    sampling_kernel: &SpectralKernel,
    k: usize,
    c: &DVector<f64>,
) -> Result<DVector<f64>> {
    check_len("recover_pgs_filtering (samples)", k, c.len())?;
    let h = pgs_correction_kernel(sampling_kernel, generator, dec.eigenvalues(), k);
    let d = c.component_mul(&h);
    Ok(pgs_generator_wrapping(dec, generator, k) * d)
}

/// Bandlimited recovery from vertex samples: `x̃ = U_VB (G_TV U_VB)† c`,
/// with `G = I` when no prefilter is given.
pub fn recover_bandlimited_vertex(
    dec: &SpectralDecomposition,
    k: usize,
    nodes: &[usize],
    c: &DVector<f64>,
    prefilter: Option<&SpectralKernel>,
) -> Result<DVector<f64>> {
    let n = dec.size();
    if k == 0 || k > n {
        return Err(Error::ModelInvalid(format!("bandwidth {k} must be in 1..={n}")));
    }
    check_len("recover_bandlimited_vertex (samples)", nodes.len(), c.len())?;
    if nodes.len() < k {
        return Err(Error::DimensionMismatch {
            context: "recover_bandlimited_vertex (need at least K samples)",
            expected: k,
            found: nodes.len(),
        });
    }
    if let Some(&bad) = nodes.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let ub = dec.low_band(k);
    let filtered = match prefilter {
        Some(kernel) => {
            let mut f = ub.clone();
            for j in 0..k {
                f.column_mut(j).scale_mut(kernel.eval(dec.eigenvalues()[j]));
            }
            f
        }
        None => ub.clone(),
    };
    let utb = filtered.select_rows(nodes.iter());
    Ok(ub * (pseudo_inverse(&utb, PINV_RTOL) * c))
}

/// Smoothness-regularized recovery `x* = (S Sᵀ + γ L)^{-1} S c`.
pub fn regularized_recover(
    s: &SamplingMatrixView,
    c: &DVector<f64>,
    l: &DMatrix<f64>,
    gamma: f64,
) -> Result<DVector<f64>> {
    assert!(gamma > 0.0, "gamma must be positive");
    let n = s.cols();
    check_len("regularized_recover (operator size)", n, l.nrows())?;
    check_len("regularized_recover (samples)", s.rows(), c.len())?;
    let rhs = s.apply_transpose(c)?;
    let op = FnOperator::new(n, |v: &DVector<f64>| {
        s.apply_transpose(&s.apply(v).expect("length checked")).expect("length checked") + l * v * gamma
    });
    match conjugate_gradient(&op, &rhs, None, REGULARIZED_CG_TOL, 10 * n, None) {
        Ok(out) => Ok(out.solution),
        Err(e) if n <= DENSE_FALLBACK_MAX_N => {
            let st = s.to_dense();
            let system = st.tr_mul(&st) + l * gamma;
            system.lu().solve(&rhs).ok_or(e)
        }
        Err(e) => Err(e),
    }
}
