//! Spectral decomposition of variation operators and the graph Fourier transform.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::graph::{build_laplacian, Graph, VariationOperatorKind};
use crate::linalg::max_asymmetry;

/// Tolerance on `|A - A^T|` accepted by [`eigendecompose`].
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Components at or below this magnitude are skipped by the sign convention.
pub const SIGN_THRESHOLD: f64 = 1e-8;

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// symmetric variation operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    operator_kind: Option<VariationOperatorKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignalDomain {
    Vertex,
    Spectral,
}

/// A signal tagged with the domain its coefficients live in.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSignal {
    pub values: DVector<f64>,
    pub domain: SignalDomain,
}

impl GraphSignal {
    pub fn vertex(values: DVector<f64>) -> Self {
        Self {
            values,
            domain: SignalDomain::Vertex,
        }
    }

    pub fn spectral(values: DVector<f64>) -> Self {
        Self {
            values,
            domain: SignalDomain::Spectral,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl SpectralDecomposition {
    /// Decomposes the variation operator of `g`.
    pub fn of_graph(g: &Graph, kind: VariationOperatorKind) -> Self {
        let mut dec = eigendecompose(&build_laplacian(g, kind)).expect("Laplacians are symmetric");
        dec.operator_kind = Some(kind);
        dec
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Column `k` is the `k`-th graph Fourier basis vector.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn operator_kind(&self) -> Option<VariationOperatorKind> {
        self.operator_kind
    }

    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.size() - 1]
    }

    /// `U_{VB}`: the first `k` eigenvectors.
    pub fn low_band(&self, k: usize) -> DMatrix<f64> {
        self.eigenvectors.columns(0, k).into_owned()
    }

    /// `U ĝ(Λ) Uᵀ` for an arbitrary spectral response vector.
    pub fn filter_matrix(&self, response: &DVector<f64>) -> DMatrix<f64> {
        let mut scaled = self.eigenvectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= response[k];
        }
        scaled * self.eigenvectors.transpose()
    }

    pub fn gft_vec(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("gft", self.size(), x.len())?;
        Ok(self.eigenvectors.tr_mul(x))
    }

    pub fn igft_vec(&self, xhat: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("igft", self.size(), xhat.len())?;
        Ok(&self.eigenvectors * xhat)
    }
}

/// Dense symmetric eigendecomposition with ascending eigenvalues and a
/// deterministic sign convention: the first component of each eigenvector
/// exceeding [`SIGN_THRESHOLD`] in magnitude is positive.
pub fn eigendecompose(operator: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    let (r, c) = operator.shape();
    if r != c {
        return Err(Error::DimensionMismatch {
            context: "eigendecompose (square operator)",
            expected: r,
            found: c,
        });
    }
    let asym = max_asymmetry(operator);
    if asym > SYMMETRY_TOL {
        return Err(Error::NonSymmetric { max_asymmetry: asym });
    }
    let n = r;
    // Symmetrize exactly so the solver sees a bit-symmetric input.
    let sym = (operator + operator.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        col /= col.norm();
        if let Some(first) = col.iter().find(|v| v.abs() > SIGN_THRESHOLD) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
        eigenvectors.set_column(dst, &col);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        operator_kind: None,
    })
}

/// Graph Fourier transform `x̂ = Uᵀ x`.
pub fn gft(dec: &SpectralDecomposition, x: &GraphSignal) -> Result<GraphSignal> {
    if x.domain != SignalDomain::Vertex {
        return Err(Error::DomainMismatch { expected: "vertex" });
    }
    Ok(GraphSignal::spectral(dec.gft_vec(&x.values)?))
}

/// Inverse graph Fourier transform `x = U x̂`.
pub fn igft(dec: &SpectralDecomposition, xhat: &GraphSignal) -> Result<GraphSignal> {
    if xhat.domain != SignalDomain::Spectral {
        return Err(Error::DomainMismatch { expected: "spectral" });
    }
    Ok(GraphSignal::vertex(dec.igft_vec(&xhat.values)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    #[test]
    fn path3_eigenvalues() {
        let dec = SpectralDecomposition::of_graph(&path(3), VariationOperatorKind::Combinatorial);
        // 2 - 2 cos(k pi / 3) for k = 0, 1, 2
        let expected = [0.0, 1.0, 3.0];
        for (a, b) in dec.eigenvalues().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn identity_input() {
        let dec = eigendecompose(&DMatrix::identity(4, 4)).unwrap();
        assert!(dec.eigenvalues().iter().all(|&l| (l - 1.0).abs() < 1e-15));
        let u = dec.eigenvectors();
        assert!((u.tr_mul(u) - DMatrix::identity(4, 4)).norm() < 1e-12);
        // identity eigenvectors are standard basis vectors, made positive
        assert!(u.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn rejects_non_symmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(eigendecompose(&m), Err(Error::NonSymmetric { .. })));
        let rect = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(eigendecompose(&rect), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gft_of_eigenvector_is_basis_vector() {
        let dec = SpectralDecomposition::of_graph(&path(5), VariationOperatorKind::Combinatorial);
        let x = GraphSignal::vertex(dec.eigenvectors().column(2).into_owned());
        let xhat = gft(&dec, &x).unwrap();
        for (k, v) in xhat.values.iter().enumerate() {
            let e = if k == 2 { 1.0 } else { 0.0 };
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn gft_of_constant_concentrates_on_dc() {
        let n = 6;
        let dec = SpectralDecomposition::of_graph(&path(n), VariationOperatorKind::Combinatorial);
        let c = 2.5;
        let xhat = dec.gft_vec(&DVector::from_element(n, c)).unwrap();
        assert!((xhat[0] - c * (n as f64).sqrt()).abs() < 1e-12);
        assert!(xhat.rows(1, n - 1).amax() < 1e-12);
    }

    #[test]
    fn domain_and_length_checks() {
        let dec = SpectralDecomposition::of_graph(&path(3), VariationOperatorKind::Combinatorial);
        let wrong_domain = GraphSignal::spectral(DVector::zeros(3));
        assert!(matches!(gft(&dec, &wrong_domain), Err(Error::DomainMismatch { .. })));
        assert!(matches!(
            dec.gft_vec(&DVector::zeros(4)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            igft(&dec, &GraphSignal::spectral(DVector::zeros(2))),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sign_convention_first_significant_component_positive() {
        let dec = SpectralDecomposition::of_graph(&path(7), VariationOperatorKind::Combinatorial);
        for col in dec.eigenvectors().column_iter() {
            let first = col.iter().find(|v| v.abs() > SIGN_THRESHOLD).unwrap();
            assert!(*first > 0.0);
        }
    }
}
