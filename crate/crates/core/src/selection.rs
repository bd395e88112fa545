//! Sampling-set selection: greedy experiment-design criteria, a
//! localization-operator greedy rule, and coherence-based random sampling.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtering::SpectralKernel;
use crate::linalg::{singular_values, symmetric_lambda_min};
use crate::spectral::SpectralDecomposition;

/// Scores within this relative distance of the best count as ties; the
/// lowest node index wins.
pub const TIE_RTOL: f64 = 1e-10;
/// Singular values of the sampled basis below this count as zero.
pub const RANK_TOL: f64 = 1e-8;
/// Allowed deviation of a probability vector's sum from one.
pub const DISTRIBUTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// Minimize the trace of the inverse information matrix.
    AOpt,
    /// Maximize the smallest eigenvalue of the information matrix.
    EOpt,
}

impl Criterion {
    fn name(self) -> &'static str {
        match self {
            Self::AOpt => "aopt",
            Self::EOpt => "eopt",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub ordered_nodes: Vec<usize>,
    pub per_step_score: Vec<f64>,
    pub criterion: String,
}

/// Probability vector over nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingDistribution {
    p: Vec<f64>,
}

impl SamplingDistribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidConfig("probabilities must be finite and nonnegative".into()));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(Error::InvalidConfig(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { p })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            p: vec![1.0 / n as f64; n],
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }
}

/// Picks the best-scoring candidate; scores are computed in parallel and
/// reduced in index order so the result does not depend on thread count.
/// `better(new, best)` decides replacement; ties keep the lower index.
pub(crate) fn pick_best_by<S, F, B>(n: usize, taken: &[bool], score: F, better: B) -> Option<(usize, S)>
where
    S: Send,
    F: Fn(usize) -> S + Sync,
    B: Fn(&S, &S) -> bool,
{
    let scores: Vec<(usize, S)> = (0..n)
        .into_par_iter()
        .filter(|&i| !taken[i])
        .map(|i| (i, score(i)))
        .collect();
    let mut best: Option<(usize, S)> = None;
    for (i, s) in scores {
        let replace = match &best {
            None => true,
            Some((_, b)) => better(&s, b),
        };
        if replace {
            best = Some((i, s));
        }
    }
    best
}

fn clearly_greater(a: f64, b: f64) -> bool {
    a > b + TIE_RTOL * b.abs().max(1.0)
}

pub(crate) fn pick_best<F>(n: usize, taken: &[bool], score: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync,
{
    pick_best_by(n, taken, score, |s, b| clearly_greater(*s, *b))
}

fn rows_of(phi: &DMatrix<f64>, nodes: &[usize]) -> DMatrix<f64> {
    phi.select_rows(nodes.iter())
}

/// `λ_min(Φ_Tᵀ Φ_T)`; zero while `|T|` is below the number of columns.
pub fn eopt_objective(phi: &DMatrix<f64>, nodes: &[usize]) -> f64 {
    let b = rows_of(phi, nodes);
    symmetric_lambda_min(&b.tr_mul(&b)).max(0.0)
}

/// `tr((Φ_Tᵀ Φ_T)^{-1})`, infinite when the information matrix is singular.
pub fn aopt_objective(phi: &DMatrix<f64>, nodes: &[usize]) -> f64 {
    let sv = singular_values(&rows_of(phi, nodes));
    if sv.len() < phi.ncols() || sv.iter().any(|&s| s <= RANK_TOL) {
        return f64::INFINITY;
    }
    sv.iter().map(|s| 1.0 / (s * s)).sum()
}

/// Greedy E-score: the `min(|T|, K)`-th largest eigenvalue of the
/// information matrix, which equals `λ_min(Φ_Tᵀ Φ_T)` once `|T| >= K`.
fn eopt_step_score(phi: &DMatrix<f64>, nodes: &[usize]) -> f64 {
    let sv = singular_values(&rows_of(phi, nodes));
    let r = nodes.len().min(phi.ncols());
    sv.get(r - 1).map_or(0.0, |s| s * s)
}

/// Greedy A-score: numerical rank first, then the trace of the
/// pseudoinverse of the information matrix (smaller is better).
fn aopt_step_score(phi: &DMatrix<f64>, nodes: &[usize]) -> (usize, f64) {
    let sv = singular_values(&rows_of(phi, nodes));
    let kept: Vec<f64> = sv.into_iter().filter(|&s| s > RANK_TOL).collect();
    (kept.len(), kept.iter().map(|s| 1.0 / (s * s)).sum())
}

/// Greedy row selection on an arbitrary basis `Φ` (`N × K`). With
/// `Φ = U_VB` this is bandlimited sampling-set selection; with other bases
/// it is sensor placement on `Φ`.
pub fn greedy_select_rows(phi: &DMatrix<f64>, m: usize, criterion: Criterion) -> Result<SelectionResult> {
    let n = phi.nrows();
    if m == 0 || m > n {
        return Err(Error::InvalidConfig(format!("budget {m} must be in 1..={n}")));
    }
    let mut taken = vec![false; n];
    let mut nodes = Vec::with_capacity(m);
    let mut scores = Vec::with_capacity(m);
    for _ in 0..m {
        let (best, score) = match criterion {
            Criterion::EOpt => pick_best(n, &taken, |i| {
                let mut t = nodes.clone();
                t.push(i);
                eopt_step_score(phi, &t)
            })
            .expect("candidates remain"),
            Criterion::AOpt => {
                let (i, (_, trace)) = pick_best_by(
                    n,
                    &taken,
                    |i| {
                        let mut t = nodes.clone();
                        t.push(i);
                        aopt_step_score(phi, &t)
                    },
                    |(rank, trace), (best_rank, best_trace)| {
                        rank > best_rank || (rank == best_rank && clearly_greater(-*trace, -*best_trace))
                    },
                )
                .expect("candidates remain");
                (i, trace)
            }
        };
        taken[best] = true;
        nodes.push(best);
        scores.push(score);
    }
    Ok(SelectionResult {
        ordered_nodes: nodes,
        per_step_score: scores,
        criterion: criterion.name().to_string(),
    })
}

/// Greedy selection for `K`-bandlimited signals under A- or E-optimality.
pub fn greedy_select(dec: &SpectralDecomposition, k: usize, m: usize, criterion: Criterion) -> Result<SelectionResult> {
    if k == 0 || k > dec.size() {
        return Err(Error::ModelInvalid(format!("bandwidth {k} must be in 1..={}", dec.size())));
    }
    greedy_select_rows(&dec.low_band(k), m, criterion)
}

/// Error covariance of least-squares bandlimited recovery,
/// `U_VB (U_TBᵀ U_TB)^{-1} U_VBᵀ`.
pub fn error_covariance(dec: &SpectralDecomposition, k: usize, nodes: &[usize]) -> Result<DMatrix<f64>> {
    let n = dec.size();
    if let Some(&bad) = nodes.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let ub = dec.low_band(k);
    let utb = rows_of(&ub, nodes);
    let info = utb.tr_mul(&utb);
    if nodes.len() < k || symmetric_lambda_min(&info) <= RANK_TOL * RANK_TOL {
        return Err(Error::SingularInformationMatrix);
    }
    let inv = info.cholesky().ok_or(Error::SingularInformationMatrix)?.inverse();
    Ok(&ub * inv * ub.transpose())
}

/// Greedy maximization of `λ_min(S Sᵀ + γ L)`, with `S Sᵀ` the diagonal
/// indicator of the sampling set.
pub fn greedy_select_regularized(l: &DMatrix<f64>, gamma: f64, m: usize) -> Result<SelectionResult> {
    let n = l.nrows();
    if !(gamma > 0.0) {
        return Err(Error::InvalidConfig("gamma must be positive".into()));
    }
    if m == 0 || m > n {
        return Err(Error::InvalidConfig(format!("budget {m} must be in 1..={n}")));
    }
    let base = l * gamma;
    let mut taken = vec![false; n];
    let mut nodes = Vec::with_capacity(m);
    let mut scores = Vec::with_capacity(m);
    for _ in 0..m {
        let (best, score) = pick_best(n, &taken, |i| {
            let mut sys = base.clone();
            for &j in nodes.iter().chain(std::iter::once(&i)) {
                sys[(j, j)] += 1.0;
            }
            symmetric_lambda_min(&sys)
        })
        .expect("candidates remain");
        taken[best] = true;
        nodes.push(best);
        scores.push(score);
    }
    Ok(SelectionResult {
        ordered_nodes: nodes,
        per_step_score: scores,
        criterion: format!("eopt-reg:{gamma}"),
    })
}

/// `λ_min(diag(1_T) + γ L)`
pub fn regularized_objective(l: &DMatrix<f64>, gamma: f64, nodes: &[usize]) -> f64 {
    let mut sys = l * gamma;
    for &j in nodes {
        sys[(j, j)] += 1.0;
    }
    symmetric_lambda_min(&sys)
}

/// Greedy coverage of localization operators.
///
/// Keeps residual weights `r` (initially one). Each step takes the node
/// maximizing `Σ_n ψ_i[n]² r[n]` and then damps `r[n]` by
/// `1 - ψ_i[n]² / ||ψ_i||∞²`.
pub fn greedy_select_localized(dec: &SpectralDecomposition, kernel: &SpectralKernel, m: usize) -> Result<SelectionResult> {
    let n = dec.size();
    if m == 0 || m > n {
        return Err(Error::InvalidConfig(format!("budget {m} must be in 1..={n}")));
    }
    // Column i is ψ_{g,i}; the operator is symmetric.
    let psi = dec.filter_matrix(&kernel.response(dec)) * (n as f64).sqrt();
    let psi_sq = psi.map(|v| v * v);
    let mut residual = DVector::from_element(n, 1.0);
    let mut taken = vec![false; n];
    let mut nodes = Vec::with_capacity(m);
    let mut scores = Vec::with_capacity(m);
    for _ in 0..m {
        let (best, score) = pick_best(n, &taken, |i| psi_sq.column(i).dot(&residual)).expect("candidates remain");
        let peak = psi_sq.column(best).max();
        if peak > 0.0 {
            for j in 0..n {
                residual[j] *= 1.0 - psi_sq[(j, best)] / peak;
            }
        }
        taken[best] = true;
        nodes.push(best);
        scores.push(score);
    }
    Ok(SelectionResult {
        ordered_nodes: nodes,
        per_step_score: scores,
        criterion: format!("localized:{}", kernel.name()),
    })
}

/// Coherence-based distribution `p[i] = ||U_VBᵀ δ_i||² / K`.
pub fn coherence_distribution(dec: &SpectralDecomposition, k: usize) -> Result<SamplingDistribution> {
    if k == 0 || k > dec.size() {
        return Err(Error::ModelInvalid(format!("bandwidth {k} must be in 1..={}", dec.size())));
    }
    // rows of a full orthonormal basis have unit norm
    if k == dec.size() {
        return Ok(SamplingDistribution::uniform(k));
    }
    let ub = dec.low_band(k);
    let p = ub.row_iter().map(|row| row.norm_squared() / k as f64).collect();
    Ok(SamplingDistribution { p })
}

/// Draws `m` distinct nodes sequentially without replacement,
/// renormalizing over the remaining nodes at each draw.
pub fn random_select(p: &SamplingDistribution, m: usize, seed: u64) -> Result<SelectionResult> {
    let support = p.p.iter().filter(|&&v| v > 0.0).count();
    if m > support {
        return Err(Error::InsufficientSupport {
            needed: m,
            available: support,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = p.p.clone();
    let mut nodes = Vec::with_capacity(m);
    let mut scores = Vec::with_capacity(m);
    for _ in 0..m {
        let total: f64 = weights.iter().sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            acc += w;
            pick = Some(i);
            if acc > target {
                break;
            }
        }
        let i = pick.expect("support checked");
        scores.push(weights[i] / total);
        weights[i] = 0.0;
        nodes.push(i);
    }
    Ok(SelectionResult {
        ordered_nodes: nodes,
        per_step_score: scores,
        criterion: "random".into(),
    })
}
