//! Matrix completion with double graph Laplacian regularization (DGLR).
//!
//! Minimizes
//! `½‖A_Ω∘(X−Y)‖²_F + (α/2) tr(Xᵀ L_r X) + (β/2) tr(X L_c Xᵀ)`
//! whose stationarity condition is the linear system
//! `(diag(vec A_Ω) + α I⊗L_r + β L_c⊗I) vec X = vec(A_Ω∘Y)`.
//! Vectors use column-major `vec(·)`, matching nalgebra's storage order.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{check_len, Error, Result};
use crate::graph::{build_laplacian, Graph, VariationOperatorKind};
use crate::linalg::{conjugate_gradient, rank_one_update_lambda_min, FnOperator, IterObserver};
use crate::selection::{greedy_select, pick_best, Criterion};
use crate::spectral::SpectralDecomposition;

/// Observed entries as `(row, col)` pairs.
pub type EntryMask = Vec<(usize, usize)>;

#[derive(Debug, Clone)]
pub struct CompletionProblem {
    observed: DMatrix<f64>,
    mask: EntryMask,
    indicator: DMatrix<f64>,
    row_laplacian: DMatrix<f64>,
    col_laplacian: DMatrix<f64>,
    alpha: f64,
    beta: f64,
}

impl CompletionProblem {
    /// Entries of `observed` outside the mask are ignored.
    pub fn new(
        observed: DMatrix<f64>,
        mask: EntryMask,
        row_graph: &Graph,
        col_graph: &Graph,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        let (nr, nc) = observed.shape();
        check_len("completion row graph", nr, row_graph.node_count())?;
        check_len("completion column graph", nc, col_graph.node_count())?;
        if !(alpha >= 0.0 && beta >= 0.0) {
            return Err(Error::InvalidConfig("alpha and beta must be nonnegative".into()));
        }
        let mut indicator = DMatrix::zeros(nr, nc);
        let mut entries = Vec::with_capacity(mask.len());
        for (i, j) in mask {
            if i >= nr {
                return Err(Error::IndexOutOfRange { index: i, len: nr });
            }
            if j >= nc {
                return Err(Error::IndexOutOfRange { index: j, len: nc });
            }
            if indicator[(i, j)] == 0.0 {
                indicator[(i, j)] = 1.0;
                entries.push((i, j));
            }
        }
        entries.sort_unstable();
        Ok(Self {
            observed,
            mask: entries,
            indicator,
            row_laplacian: build_laplacian(row_graph, VariationOperatorKind::Combinatorial),
            col_laplacian: build_laplacian(col_graph, VariationOperatorKind::Combinatorial),
            alpha,
            beta,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.observed.shape()
    }

    pub fn unknowns(&self) -> usize {
        self.observed.len()
    }

    pub fn mask(&self) -> &[(usize, usize)] {
        &self.mask
    }

    /// `A_Ω` as a 0/1 matrix.
    pub fn indicator(&self) -> &DMatrix<f64> {
        &self.indicator
    }

    pub fn observed(&self) -> &DMatrix<f64> {
        &self.observed
    }

    pub fn row_laplacian(&self) -> &DMatrix<f64> {
        &self.row_laplacian
    }

    pub fn col_laplacian(&self) -> &DMatrix<f64> {
        &self.col_laplacian
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `vec(A_Ω ∘ Y)`
    pub fn rhs(&self) -> DVector<f64> {
        let masked = self.indicator.component_mul(&self.observed);
        DVector::from_column_slice(masked.as_slice())
    }

    fn check_shape(&self, x: &DMatrix<f64>) -> Result<()> {
        check_len("completion matrix rows", self.observed.nrows(), x.nrows())?;
        check_len("completion matrix cols", self.observed.ncols(), x.ncols())
    }

    fn apply_matrix(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = self.indicator.component_mul(v);
        if self.alpha != 0.0 {
            out += &self.row_laplacian * v * self.alpha;
        }
        if self.beta != 0.0 {
            out += v * &self.col_laplacian * self.beta;
        }
        out
    }
}

/// Objective value at `x`.
pub fn dglr_objective(x: &DMatrix<f64>, prob: &CompletionProblem) -> Result<f64> {
    prob.check_shape(x)?;
    let fit = prob.indicator.component_mul(&(x - &prob.observed)).norm_squared();
    let row = (x.transpose() * &prob.row_laplacian * x).trace();
    let col = (x * &prob.col_laplacian * x.transpose()).trace();
    Ok(0.5 * fit + 0.5 * prob.alpha * row + 0.5 * prob.beta * col)
}

/// Gradient `A_Ω∘(X−Y) + α L_r X + β X L_c` of the objective.
pub fn dglr_gradient(x: &DMatrix<f64>, prob: &CompletionProblem) -> Result<DMatrix<f64>> {
    prob.check_shape(x)?;
    Ok(prob.apply_matrix(x) - prob.indicator.component_mul(&prob.observed))
}

/// Matrix-free system operator applied to a column-major vector.
pub fn apply_system(prob: &CompletionProblem, v: &DVector<f64>) -> Result<DVector<f64>> {
    check_len("apply_system", prob.unknowns(), v.len())?;
    let (nr, nc) = prob.shape();
    let out = prob.apply_matrix(&DMatrix::from_column_slice(nr, nc, v.as_slice()));
    Ok(DVector::from_column_slice(out.as_slice()))
}

/// Default iteration cap: `10 · N_r · N_c`.
pub fn default_max_iter(prob: &CompletionProblem) -> usize {
    10 * prob.unknowns()
}

/// Solves the DGLR system by conjugate gradients.
pub fn dglr_solve(prob: &CompletionProblem, tol: f64, max_iter: usize) -> Result<DMatrix<f64>> {
    dglr_solve_observed(prob, tol, max_iter, None)
}

/// [`dglr_solve`] with a per-iteration observer receiving the iterate.
pub fn dglr_solve_observed(
    prob: &CompletionProblem,
    tol: f64,
    max_iter: usize,
    observer: Option<IterObserver<'_>>,
) -> Result<DMatrix<f64>> {
    let (nr, nc) = prob.shape();
    let op = FnOperator::new(prob.unknowns(), |v: &DVector<f64>| {
        apply_system(prob, v).expect("length fixed by operator")
    });
    let out = conjugate_gradient(&op, &prob.rhs(), None, tol, max_iter, observer)?;
    Ok(DMatrix::from_column_slice(nr, nc, out.solution.as_slice()))
}

/// Dense `α I⊗L_r + β L_c⊗I` (no sampling term).
fn dense_regularizer(lr: &DMatrix<f64>, lc: &DMatrix<f64>, alpha: f64, beta: f64) -> DMatrix<f64> {
    let (nr, nc) = (lr.nrows(), lc.nrows());
    DMatrix::<f64>::identity(nc, nc).kronecker(lr) * alpha + lc.kronecker(&DMatrix::<f64>::identity(nr, nr)) * beta
}

/// Greedy active sampling: adds, one at a time, the entry that maximizes
/// the smallest eigenvalue of the system matrix. Ties go to the first entry
/// in row-major order.
pub fn active_sample_greedy(
    row_graph: &Graph,
    col_graph: &Graph,
    alpha: f64,
    beta: f64,
    budget: usize,
) -> Result<EntryMask> {
    Ok(active_sample_greedy_scored(row_graph, col_graph, alpha, beta, budget)?.0)
}

/// [`active_sample_greedy`] also returning `λ_min` after each step.
pub fn active_sample_greedy_scored(
    row_graph: &Graph,
    col_graph: &Graph,
    alpha: f64,
    beta: f64,
    budget: usize,
) -> Result<(EntryMask, Vec<f64>)> {
    let (nr, nc) = (row_graph.node_count(), col_graph.node_count());
    let total = nr * nc;
    if budget > total {
        return Err(Error::BudgetTooLarge { budget, max: total });
    }
    let lr = build_laplacian(row_graph, VariationOperatorKind::Combinatorial);
    let lc = build_laplacian(col_graph, VariationOperatorKind::Combinatorial);
    let mut system = dense_regularizer(&lr, &lc, alpha, beta);
    // candidate c in row-major order -> column-major unknown index
    let unknown = |c: usize| (c % nc) * nr + c / nc;
    let mut taken = vec![false; total];
    let mut mask = Vec::with_capacity(budget);
    let mut scores = Vec::with_capacity(budget);
    for _ in 0..budget {
        let eig = SymmetricEigen::new(system.clone());
        let mut order: Vec<usize> = (0..total).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let lambdas: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let (best, score) = pick_best(total, &taken, |c| {
            let row = unknown(c);
            let z: Vec<f64> = order.iter().map(|&i| eig.eigenvectors[(row, i)]).collect();
            rank_one_update_lambda_min(&lambdas, &z)
        })
        .expect("budget checked");
        taken[best] = true;
        let idx = unknown(best);
        system[(idx, idx)] += 1.0;
        mask.push((best / nc, best % nc));
        scores.push(score);
    }
    Ok((mask, scores))
}

/// Row/column bandlimited sampling: E-optimal rows of the row graph and
/// columns of the column graph, then every entry at their intersections.
/// Returned in row-major order.
pub fn bl_cross_sample(row_graph: &Graph, col_graph: &Graph, k_r: usize, k_c: usize) -> Result<EntryMask> {
    let pick = |g: &Graph, k: usize| -> Result<Vec<usize>> {
        if k > g.node_count() {
            return Err(Error::InvalidConfig(format!(
                "bandwidth {k} exceeds graph size {}",
                g.node_count()
            )));
        }
        let dec = SpectralDecomposition::of_graph(g, VariationOperatorKind::Combinatorial);
        let mut nodes = greedy_select(&dec, k, k, Criterion::EOpt)?.ordered_nodes;
        nodes.sort_unstable();
        Ok(nodes)
    };
    let rows = pick(row_graph, k_r)?;
    let cols = pick(col_graph, k_c)?;
    Ok(rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
        .collect())
}
