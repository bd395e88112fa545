//! Dense helpers and matrix-free solvers shared by the higher-level modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{check_len, Error, Result};

/// A square linear operator applied by matrix-vector products.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &DVector<f64>) -> DVector<f64>;
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        self * x
    }
}

/// Wraps a closure as a [`LinearOperator`].
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&DVector<f64>) -> DVector<f64>> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&DVector<f64>) -> DVector<f64>> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.f)(x)
    }
}

/// Compressed-row symmetric sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetric {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymmetric {
    /// Duplicate `(row, col)` entries are summed. The caller supplies both
    /// triangles.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
            last = Some((r, c));
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.col_idx[k])] += self.values[k];
            }
        }
        m
    }
}

impl LinearOperator for SparseSymmetric {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.n, |r, _| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .map(|k| self.values[k] * x[self.col_idx[k]])
                .sum()
        })
    }
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..j {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Largest eigenvalue of a symmetric positive semidefinite operator by power
/// iteration, stopping when the Rayleigh quotient changes by less than
/// `rel_tol` (relative).
pub fn power_iteration_lambda_max(op: &impl LinearOperator, rel_tol: f64, max_iter: usize) -> f64 {
    let n = op.dim();
    // Deterministic start from the golden-ratio sequence.
    let mut x = DVector::from_fn(n, |i, _| 1.0 + 0.5 * (i as f64 * 0.618_033_988_749_895).fract());
    x /= x.norm();
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        let y = op.apply(&x);
        let next = x.dot(&y);
        let norm = y.norm();
        if norm == 0.0 {
            return 0.0;
        }
        x = y / norm;
        if (next - estimate).abs() <= rel_tol * next.abs() {
            return next;
        }
        estimate = next;
    }
    estimate
}

pub fn symmetric_lambda_min(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Smallest eigenvalue of `M + z zᵀ` given the ascending eigenvalues of the
/// symmetric `M` and the coordinates `z` of the update vector in `M`'s
/// eigenbasis. Solves the secular equation `1 + Σ z_i² / (λ_i - μ) = 0` on
/// the interlacing interval by bisection.
pub fn rank_one_update_lambda_min(eigenvalues: &[f64], z: &[f64]) -> f64 {
    let n = eigenvalues.len();
    assert_eq!(n, z.len());
    let scale = eigenvalues.iter().fold(1.0f64, |a, l| a.max(l.abs()));
    let cluster = 1e-12 * scale;
    let lo0 = eigenvalues[0];
    let group = eigenvalues.iter().take_while(|&&l| l - lo0 <= cluster).count();
    if group > 1 {
        // One vector of the repeated cluster is orthogonal to z.
        return lo0;
    }
    if z[0] * z[0] <= 1e-30 {
        return lo0;
    }
    let norm_sq: f64 = z.iter().map(|v| v * v).sum();
    let hi0 = if n > 1 { eigenvalues[1].min(lo0 + norm_sq) } else { lo0 + norm_sq };
    // Increasing in mu on (λ_1, hi0); bisection converges to hi0 when the
    // root lies at or beyond it.
    let secular = |mu: f64| {
        1.0 + eigenvalues
            .iter()
            .zip(z)
            .filter(|(_, zi)| **zi != 0.0)
            .map(|(l, zi)| zi * zi / (l - mu))
            .sum::<f64>()
    };
    let (mut lo, mut hi) = (lo0, hi0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if secular(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Moore-Penrose pseudoinverse; singular values below `rel_tol * sigma_max`
/// are treated as zero.
pub fn pseudo_inverse(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return DMatrix::zeros(c, r);
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_tol * smax;
    let mut out = DMatrix::zeros(c, r);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            out += (vt.row(k).transpose() * u.column(k).transpose()) / s;
        }
    }
    out
}

/// Result of a conjugate-gradient run.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub solution: DVector<f64>,
    pub iterations: usize,
    /// `||b - A x|| / ||b||` at exit.
    pub relative_residual: f64,
}

/// Callback receiving the iteration count and current iterate.
pub type IterObserver<'a> = &'a mut dyn FnMut(usize, &DVector<f64>);

/// Conjugate gradients for symmetric positive (semi)definite systems.
///
/// `observer` is called with `(iteration, iterate)` after every update.
/// Returns [`Error::SingularSystem`] when a search direction has no
/// curvature while the residual is still above tolerance, and
/// [`Error::SolverDiverged`] when `max_iter` is exhausted.
pub fn conjugate_gradient(
    op: &impl LinearOperator,
    b: &DVector<f64>,
    x0: Option<&DVector<f64>>,
    tol: f64,
    max_iter: usize,
    mut observer: Option<IterObserver<'_>>,
) -> Result<CgOutcome> {
    let n = op.dim();
    check_len("conjugate_gradient rhs", n, b.len())?;
    let b_norm = b.norm();
    if b_norm == 0.0 {
        return Ok(CgOutcome {
            solution: DVector::zeros(n),
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut x = match x0 {
        Some(x0) => {
            check_len("conjugate_gradient initial guess", n, x0.len())?;
            x0.clone()
        }
        None => DVector::zeros(n),
    };
    // Rough operator magnitude for the zero-curvature test.
    let scale = (op.apply(b).norm() / b_norm).max(f64::MIN_POSITIVE);
    let mut r = b - op.apply(&x);
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    for it in 0..max_iter {
        if rr.sqrt() <= tol * b_norm {
            return Ok(CgOutcome {
                solution: x,
                iterations: it,
                relative_residual: rr.sqrt() / b_norm,
            });
        }
        let ap = op.apply(&p);
        let curvature = p.dot(&ap);
        if curvature <= 1e-13 * scale * p.norm_squared() {
            return Err(Error::SingularSystem);
        }
        let alpha = rr / curvature;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let rr_next = r.dot(&r);
        p = &r + (rr_next / rr) * &p;
        rr = rr_next;
        if let Some(obs) = observer.as_mut() {
            obs(it + 1, &x);
        }
    }
    // Recompute the true residual before deciding.
    let true_res = (b - op.apply(&x)).norm() / b_norm;
    if true_res <= tol {
        return Ok(CgOutcome {
            solution: x,
            iterations: max_iter,
            relative_residual: true_res,
        });
    }
    Err(Error::SolverDiverged {
        iterations: max_iter,
        residual: true_res,
    })
}
