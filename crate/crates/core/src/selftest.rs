//! Quick oracle checks bundled with the library, run by `graphsamp selftest`.
//!
//! Each check compares a fast path against a dense or exhaustive reference
//! built from a different route (LU solves, explicit Kronecker products,
//! subset enumeration, a direct DFT).

use std::collections::BTreeSet;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::completion::{apply_system, dglr_solve, CompletionProblem};
use crate::experiments::{run_experiment, ExperimentConfig, ExperimentId};
use crate::filtering::{
    apply_spectral_filter, apply_vertex_filter, chebyshev_apply, chebyshev_fit, estimate_lambda_max, PolynomialFilter,
    SpectralKernel,
};
use crate::generators::{gen_graph, GeneratorSpec};
use crate::graph::{build_laplacian, Graph, VariationOperatorKind};
use crate::recovery::recover;
use crate::sampling::{fold_spectrum, SamplingMatrixView};
use crate::selection::{coherence_distribution, eopt_objective, greedy_select, Criterion};
use crate::spectral::SpectralDecomposition;

const COMB: VariationOperatorKind = VariationOperatorKind::Combinatorial;

#[derive(Debug, Clone, Serialize)]
pub struct SelfCheck {
    pub name: &'static str,
    pub passed: bool,
    pub worst: f64,
    pub threshold: f64,
    pub seconds: f64,
}

fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges: Vec<(usize, usize, f64)> =
        (1..n).map(|v| (rng.random_range(0..v), v, 0.5 + rng.random::<f64>())).collect();
    let tree: BTreeSet<(usize, usize)> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
    for u in 0..n {
        for v in u + 1..n {
            if !tree.contains(&(u, v)) && rng.random::<f64>() < p {
                edges.push((u, v, 0.5 + rng.random::<f64>()));
            }
        }
    }
    Graph::new(n, edges).expect("valid random graph")
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random::<f64>() * 2.0 - 1.0)
}

fn polynomial_vs_spectral(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(5..=60usize);
        let g = random_graph(n, 3.0 / n as f64, rng);
        let l = build_laplacian(&g, COMB);
        let dec = SpectralDecomposition::of_graph(&g, COMB);
        let f = PolynomialFilter::new((0..4).map(|_| rng.random::<f64>() - 0.5).collect());
        let x = random_vector(n, rng);
        let v = apply_vertex_filter(&l, &f, &x).expect("sizes match");
        let s = apply_spectral_filter(&dec, &f.as_kernel(), &x).expect("sizes match");
        worst = worst.max((&v - s).norm() / v.norm());
    }
    worst
}

fn chebyshev_vs_exact(rng: &mut ChaCha8Rng) -> f64 {
    let g = gen_graph(&GeneratorSpec::RandomSensor { n: 64, k_neighbors: 6 }, 1).expect("sensor graph");
    let l = build_laplacian(&g, COMB);
    let dec = SpectralDecomposition::of_graph(&g, COMB);
    let kernel = SpectralKernel::exp_decay(2.0);
    let approx = chebyshev_fit(&kernel, estimate_lambda_max(&l), 30).expect("finite kernel");
    let x = random_vector(64, rng);
    let exact = apply_spectral_filter(&dec, &kernel, &x).expect("sizes match");
    (chebyshev_apply(&l, &approx, &x).expect("interval covers spectrum") - exact).norm() / x.norm()
}

fn pseudoinverse_vs_normal_equations(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let n = rng.random_range(12..=48usize);
        let g = random_graph(n, 0.2, rng);
        let dec = SpectralDecomposition::of_graph(&g, COMB);
        let k = n / 4;
        let a = dec.low_band(k);
        let nodes = greedy_select(&dec, k, k + 2, Criterion::EOpt).expect("valid budget").ordered_nodes;
        let s = SamplingMatrixView::identity_on(nodes, n).expect("valid nodes");
        let c = random_vector(k + 2, rng);
        let got = recover(&a, &s, &c).expect("sizes match").reconstruction;
        let b = s.to_dense() * &a;
        let coeffs = (b.transpose() * &b).lu().solve(&(b.transpose() * &c)).expect("full rank");
        let want = &a * coeffs;
        worst = worst.max((got - &want).norm() / want.norm());
    }
    worst
}

fn matrix_free_vs_kronecker(rng: &mut ChaCha8Rng) -> f64 {
    let (nr, nc) = (12, 15);
    let rg = random_graph(nr, 0.3, rng);
    let cg = random_graph(nc, 0.3, rng);
    let mask = (0..nr).flat_map(|i| (0..nc).map(move |j| (i, j))).filter(|&(i, j)| (i + 2 * j) % 3 == 0).collect();
    let y = DMatrix::from_fn(nr, nc, |_, _| rng.random::<f64>());
    let p = CompletionProblem::new(y, mask, &rg, &cg, 0.3, 0.7).expect("valid problem");
    let dense = DMatrix::from_diagonal(&DVector::from_column_slice(p.indicator().as_slice()))
        + DMatrix::<f64>::identity(nc, nc).kronecker(p.row_laplacian()) * p.alpha()
        + p.col_laplacian().kronecker(&DMatrix::<f64>::identity(nr, nr)) * p.beta();
    let v = random_vector(nr * nc, rng);
    let op = (apply_system(&p, &v).expect("sizes match") - &dense * &v).amax();
    let solved = dglr_solve(&p, 1e-12, 10 * nr * nc).expect("converges");
    let direct = dense.lu().solve(&p.rhs()).expect("positive definite");
    op.max((DVector::from_column_slice(solved.as_slice()) - direct).amax())
}

fn subsets_of_three(n: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..n).flat_map(move |a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| [a, b, c])))
}

/// Smallest greedy/optimum ratio; negative when greedy beats the optimum.
fn greedy_vs_exhaustive(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let n = rng.random_range(5..=10usize);
        let g = random_graph(n, 0.3, rng);
        let dec = SpectralDecomposition::of_graph(&g, COMB);
        let phi = dec.low_band(3);
        let greedy = eopt_objective(&phi, &greedy_select(&dec, 3, 3, Criterion::EOpt).expect("budget").ordered_nodes);
        let best = subsets_of_three(n).map(|s| eopt_objective(&phi, &s)).fold(f64::MIN, f64::max);
        if greedy > best + 1e-12 {
            return -1.0;
        }
        worst = worst.min(greedy / best);
    }
    worst
}

fn coherence_sums(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(3..=50usize);
        let dec = SpectralDecomposition::of_graph(&random_graph(n, 0.2, rng), COMB);
        for k in [1, n / 2 + 1, n] {
            let p = coherence_distribution(&dec, k).expect("valid bandwidth");
            worst = worst.max((p.probabilities().iter().sum::<f64>() - 1.0).abs());
            if k == n && p.probabilities().iter().any(|&v| v != 1.0 / n as f64) {
                return f64::INFINITY;
            }
        }
    }
    worst
}

fn dft_folding(rng: &mut ChaCha8Rng) -> f64 {
    let dft = |x: &[Complex64]| -> Vec<Complex64> {
        let n = x.len() as f64;
        (0..x.len())
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(t, v)| v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (k * t) as f64 / n))
                    .sum()
            })
            .collect()
    };
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x: Vec<Complex64> = (0..8).map(|_| Complex64::new(rng.random::<f64>(), rng.random::<f64>())).collect();
        let big = dft(&x);
        let small = dft(&x.iter().step_by(2).copied().collect::<Vec<_>>());
        let re = fold_spectrum(&DVector::from_iterator(8, big.iter().map(|c| c.re)), 4).expect("4 divides 8");
        let im = fold_spectrum(&DVector::from_iterator(8, big.iter().map(|c| c.im)), 4).expect("4 divides 8");
        for k in 0..4 {
            worst = worst.max((small[k] - Complex64::new(re[k], im[k]) * 0.5).norm());
        }
    }
    worst
}

fn experiment_error(id: ExperimentId, key: &str) -> f64 {
    run_experiment(&ExperimentConfig::new(id, 1)).map_or(f64::INFINITY, |r| r.get(key))
}

/// Runs every check with a fixed seed.
pub fn run_all() -> Vec<SelfCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    type Check = (&'static str, f64, bool, fn(&mut ChaCha8Rng) -> f64);
    // (name, threshold, larger_is_better, check)
    let checks: [Check; 10] = [
        ("polynomial filter: vertex vs spectral", 1e-9, false, polynomial_vs_spectral),
        ("chebyshev order 30 vs exact", 1e-8, false, chebyshev_vs_exact),
        ("pseudoinverse vs normal equations", 1e-8, false, pseudoinverse_vs_normal_equations),
        ("matrix-free system vs dense kronecker", 1e-8, false, matrix_free_vs_kronecker),
        ("greedy e-opt / exhaustive optimum", 0.5, true, greedy_vs_exhaustive),
        ("coherence distribution sums", 1e-12, false, coherence_sums),
        ("dft decimation folding", 1e-12, false, dft_folding),
        ("bandlimited recovery experiment", 1e-8, false, |_| experiment_error(ExperimentId::Fig4Top, "relative_error")),
        ("pgs recovery experiment", 1e-8, false, |_| {
            experiment_error(ExperimentId::Fig4Bottom, "relative_error_frequency")
                .max(experiment_error(ExperimentId::Fig4Bottom, "relative_error_vertex"))
        }),
        ("community coverage experiment", 5.0, true, |_| {
            experiment_error(ExperimentId::CommunitySelection, "localized_coverage")
                .min(experiment_error(ExperimentId::CommunitySelection, "eopt_coverage"))
        }),
    ];
    checks
        .into_iter()
        .map(|(name, threshold, larger_is_better, check)| {
            let start = Instant::now();
            let worst = check(&mut rng);
            let passed = if larger_is_better { worst >= threshold } else { worst < threshold };
            SelfCheck {
                name,
                passed,
                worst,
                threshold,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}
