mod common;

use common::*;
use graphsamp::filtering::*;
use graphsamp::generators::{gen_graph, GeneratorSpec};
use graphsamp::{build_laplacian, Graph, SpectralDecomposition, VariationOperatorKind};
use nalgebra::DVector;
use rand::Rng;

const COMB: VariationOperatorKind = VariationOperatorKind::Combinatorial;

fn p3() -> Graph {
    Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
}

fn sensor64(seed: u64) -> Graph {
    gen_graph(&GeneratorSpec::RandomSensor { n: 64, k_neighbors: 6 }, seed).unwrap()
}

#[test]
fn vertex_filter_trivial_cases() {
    let l = build_laplacian(&p3(), COMB);
    let x = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    assert_eq!(apply_vertex_filter(&l, &PolynomialFilter::new(vec![1.0]), &x).unwrap(), x);
    let y = apply_vertex_filter(&l, &PolynomialFilter::new(vec![0.0, 1.0]), &x).unwrap();
    assert_eq!(y, DVector::from_vec(vec![1.0, -1.0, 0.0]));
}

#[test]
fn polynomial_filter_spectral_equals_vertex() {
    let mut r = rng(21);
    for trial in 0..20 {
        let n = 5 + trial * 4;
        let g = random_connected_graph(n, 0.15, &mut r);
        let l = build_laplacian(&g, COMB);
        let dec = SpectralDecomposition::of_graph(&g, COMB);
        let coeffs: Vec<f64> = (0..4).map(|_| r.random_range(-1.0..1.0)).collect();
        let f = PolynomialFilter::new(coeffs);
        let x = random_vector(n, &mut r);
        let v = apply_vertex_filter(&l, &f, &x).unwrap();
        let s = apply_spectral_filter(&dec, &f.as_kernel(), &x).unwrap();
        assert!((&v - &s).norm() / v.norm().max(1.0) < 1e-9, "n={n}");
    }
}

#[test]
fn spectral_filter_identity_and_projector() {
    let g = sensor64(2);
    let dec = SpectralDecomposition::of_graph(&g, COMB);
    let x = random_vector(64, &mut rng(5));
    let y = apply_spectral_filter(&dec, &SpectralKernel::identity(), &x).unwrap();
    assert!((&y - &x).norm() < 1e-10);

    let lp = "ideal_lowpass:10".parse::<KernelSpec>().unwrap().resolve(dec.eigenvalues()).unwrap();
    let once = apply_spectral_filter(&dec, &lp, &x).unwrap();
    let twice = apply_spectral_filter(&dec, &lp, &once).unwrap();
    assert!((&once - &twice).norm() < 1e-10);
    let ub = dec.low_band(10);
    let proj = &ub * (ub.transpose() * &x);
    assert!((&once - proj).norm() < 1e-10);
}

#[test]
fn exp_decay_on_p3_matches_jacobi_oracle() {
    let g = p3();
    let dec = SpectralDecomposition::of_graph(&g, COMB);
    let x = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    let got = apply_spectral_filter(&dec, &SpectralKernel::exp_decay(2.0), &x).unwrap();
    let want = dense_spectral_filter(&build_laplacian(&g, COMB), |l| (-l / 2.0).exp()) * &x;
    assert!((got - want).norm() < 1e-12);
}

#[test]
fn chebyshev_fit_accuracy() {
    let lin = chebyshev_fit(&SpectralKernel::new("lin", |l| l), 8.0, 1).unwrap();
    let exp = chebyshev_fit(&SpectralKernel::exp_decay(2.0), 8.0, 30).unwrap();
    let step = chebyshev_fit(&SpectralKernel::ideal_lowpass(4.0), 8.0, 30).unwrap();
    let (mut e_lin, mut e_exp, mut e_step) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..1000 {
        let l = 8.0 * i as f64 / 999.0;
        e_lin = e_lin.max((lin.eval(l) - l).abs());
        e_exp = e_exp.max((exp.eval(l) - (-l / 2.0).exp()).abs());
        e_step = e_step.max((step.eval(l) - if l <= 4.0 { 1.0 } else { 0.0 }).abs());
    }
    assert!(e_lin < 1e-12, "{e_lin}");
    assert!(e_exp < 1e-10, "{e_exp}");
    // discontinuous target: error stays large near the jump
    assert!(e_step > 1e-3, "{e_step}");
}

#[test]
fn chebyshev_apply_matches_exact_on_sensor_graph() {
    let g = sensor64(4);
    let l = build_laplacian(&g, COMB);
    let dec = SpectralDecomposition::of_graph(&g, COMB);
    let kernel = SpectralKernel::exp_decay(2.0);
    let approx = chebyshev_fit(&kernel, estimate_lambda_max(&l), 30).unwrap();
    let x = random_vector(64, &mut rng(8));
    let cheb = chebyshev_apply(&l, &approx, &x).unwrap();
    let exact = dense_spectral_filter(&l, |v| (-v / 2.0).exp()) * &x;
    assert!((&cheb - &exact).norm() / x.norm() < 1e-8);
    let exact2 = apply_spectral_filter(&dec, &kernel, &x).unwrap();
    assert!((cheb - exact2).norm() / x.norm() < 1e-8);
}

#[test]
fn chebyshev_trivial_fits() {
    let g = sensor64(6);
    let l = build_laplacian(&g, COMB);
    let lmax = estimate_lambda_max(&l);
    let x = random_vector(64, &mut rng(1));
    for order in [0, 3, 12] {
        let one = chebyshev_fit(&SpectralKernel::identity(), lmax, order).unwrap();
        assert!((chebyshev_apply(&l, &one, &x).unwrap() - &x).norm() < 1e-10);
    }
    let c = chebyshev_fit(&SpectralKernel::constant(-1.75), lmax, 0).unwrap();
    assert!((chebyshev_apply(&l, &c, &x).unwrap() - &x * -1.75).norm() < 1e-12);
}

#[test]
fn chebyshev_is_linear_over_blocks() {
    let g = sensor64(7);
    let l = build_laplacian(&g, COMB);
    let a = chebyshev_fit(&SpectralKernel::exp_decay(1.0), estimate_lambda_max(&l), 20).unwrap();
    let mut r = rng(2);
    let x = random_vector(64, &mut r);
    let mut head = x.clone();
    head.rows_mut(32, 32).fill(0.0);
    let tail = &x - &head;
    let whole = chebyshev_apply(&l, &a, &x).unwrap();
    let split = chebyshev_apply(&l, &a, &head).unwrap() + chebyshev_apply(&l, &a, &tail).unwrap();
    assert!((whole - split).norm() < 1e-12);
}

#[test]
fn chebyshev_rejects_short_interval_and_bad_kernel() {
    let l = build_laplacian(&p3(), COMB);
    let a = chebyshev_fit(&SpectralKernel::identity(), 1.0, 4).unwrap();
    assert!(chebyshev_apply(&l, &a, &DVector::from_element(3, 1.0)).is_err());
    assert!(chebyshev_fit(&SpectralKernel::new("nan", |_| f64::NAN), 2.0, 5).is_err());
}

#[test]
fn localized_operator_properties() {
    let g = sensor64(11);
    let dec = SpectralDecomposition::of_graph(&g, COMB);
    let n = 64.0f64;
    let psi = localized_operator(&dec, &SpectralKernel::identity(), 5).unwrap();
    for (j, v) in psi.iter().enumerate() {
        let want = if j == 5 { n.sqrt() } else { 0.0 };
        assert!((v - want).abs() < 1e-10);
    }

    let mut r = rng(4);
    let coeffs: Vec<f64> = (0..64).map(|_| r.random_range(-1.0..1.0)).collect();
    let random_kernel = SpectralKernel::new("table", move |l: f64| coeffs[((l * 7.0) as usize) % 64]);
    let u = dec.eigenvectors();
    for i in [0usize, 17, 63] {
        let psi = localized_operator(&dec, &random_kernel, i).unwrap();
        let spec = DVector::from_fn(64, |k, _| random_kernel.eval(dec.eigenvalues()[k]) * u[(i, k)]);
        assert!((psi.norm_squared() / n - spec.norm_squared()).abs() < 1e-10);
    }

    let psis: Vec<DVector<f64>> =
        (0..64).map(|i| localized_operator(&dec, &SpectralKernel::exp_decay(2.0), i).unwrap()).collect();
    for i in 0..64 {
        for j in 0..64 {
            assert!((psis[i][j] - psis[j][i]).abs() < 1e-10);
        }
    }

    let lp = "ideal_lowpass:12".parse::<KernelSpec>().unwrap().resolve(dec.eigenvalues()).unwrap();
    let total: f64 = (0..64).map(|i| localized_operator(&dec, &lp, i).unwrap().norm_squared() / n).sum();
    assert!((total - 12.0).abs() < 1e-9);
    assert!(localized_operator(&dec, &lp, 64).is_err());
}

#[test]
fn repeated_eigenvalues_share_a_response() {
    // complete graph: eigenvalue N repeated N-1 times
    let n = 6;
    let g = gen_graph(&GeneratorSpec::Complete { n }, 0).unwrap();
    let dec = SpectralDecomposition::of_graph(&g, COMB);
    let resp = SpectralKernel::exp_decay(3.0).response(&dec);
    for k in 2..n {
        assert!((resp[k] - resp[1]).abs() < 1e-12);
    }
}

#[test]
fn kernel_registry_parses() {
    for s in ["identity", "ideal_lowpass:3", "exp_decay:2", "linear_decay", "polynomial:1,0.5,-2"] {
        assert!(s.parse::<KernelSpec>().is_ok(), "{s}");
    }
    for s in ["", "ideal_lowpass", "exp_decay:x", "foo:1"] {
        assert!(s.parse::<KernelSpec>().is_err(), "{s}");
    }
}

