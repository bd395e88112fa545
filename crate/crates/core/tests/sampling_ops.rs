mod common;

use common::*;
use graphsamp::filtering::{PolynomialFilter, SpectralKernel};
use graphsamp::generators::{gen_graph, GeneratorSpec};
use graphsamp::sampling::*;
use graphsamp::{build_laplacian, Graph, SpectralDecomposition, VariationOperatorKind};
use nalgebra::{DMatrix, DVector};

const COMB: VariationOperatorKind = VariationOperatorKind::Combinatorial;

fn p3() -> Graph {
    Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
}

fn sensor(n: usize, seed: u64) -> Graph {
    gen_graph(&GeneratorSpec::RandomSensor { n, k_neighbors: 6 }, seed).unwrap()
}

#[test]
fn vertex_sampling_examples() {
    let g = p3();
    let dec = SpectralDecomposition::of_graph(&g, COMB);
    let x = DVector::from_vec(vec![5.0, 6.0, 7.0]);
    let all = VertexSampler::ordered(vec![0, 1, 2], 3).unwrap();
    assert_eq!(vertex_sample(&g, &dec, &all, &x).unwrap(), x);
    let ordered = VertexSampler::ordered(vec![2, 0], 3).unwrap();
    assert_eq!(vertex_sample(&g, &dec, &ordered, &x).unwrap(), DVector::from_vec(vec![7.0, 5.0]));
    let sorted = VertexSampler::sorted(vec![2, 0], 3).unwrap();
    assert_eq!(sorted.nodes(), &[0, 2]);
    assert!(VertexSampler::ordered(vec![1, 1], 3).is_err());
    assert!(VertexSampler::ordered(vec![3], 3).is_err());
}

#[test]
fn prefiltered_vertex_sample_matches_dense_filter_row() {
    let g = p3();
    let dec = SpectralDecomposition::of_graph(&g, COMB);
    let x = DVector::from_vec(vec![0.3, -1.2, 2.0]);
    let vs = VertexSampler::ordered(vec![1], 3)
        .unwrap()
        .with_prefilter(Prefilter::Spectral(SpectralKernel::exp_decay(2.0)));
    let got = vertex_sample(&g, &dec, &vs, &x).unwrap();
    let dense = dense_spectral_filter(&build_laplacian(&g, COMB), |l| (-l / 2.0).exp());
    assert!((got[0] - dense.row(1).dot(&x.transpose())).abs() < 1e-12);

    // polynomial prefilter applied in the vertex domain
    let vs = VertexSampler::ordered(vec![0, 2], 3)
        .unwrap()
        .with_prefilter(Prefilter::Polynomial(PolynomialFilter::new(vec![1.0, -0.5])));
    let l = build_laplacian(&g, COMB);
    let want = (DMatrix::<f64>::identity(3, 3) - l * 0.5) * &x;
    let got = vertex_sample(&g, &dec, &vs, &x).unwrap();
    assert!((got[0] - want[0]).abs() < 1e-12 && (got[1] - want[2]).abs() < 1e-12);
}

#[test]
fn fold_spectrum_examples() {
    let x = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
    assert_eq!(fold_spectrum(&x, 4).unwrap(), x);
    assert_eq!(fold_spectrum(&x, 2).unwrap(), DVector::from_vec(vec![4.0, 6.0]));
    let sparse = DVector::from_vec(vec![1.5, -2.0, 0.0, 0.0, 0.0, 0.0]);
    assert_eq!(fold_spectrum(&sparse, 2).unwrap(), DVector::from_vec(vec![1.5, -2.0]));
    assert!(fold_spectrum(&x, 3).is_err());
    let d = folding_matrix(2, 4).unwrap();
    assert_eq!(&d * &x, DVector::from_vec(vec![4.0, 6.0]));
}

#[test]
fn frequency_sampling_of_bandlimited_signal_returns_coefficients() {
    let g = sensor(64, 3);
    let dec = SpectralDecomposition::of_graph(&g, COMB);
    let d = random_vector(16, &mut rng(1));
    let x = dec.low_band(16) * &d;
    let fs = FrequencySampler::new(SpectralKernel::identity(), 16, 64).unwrap();
    let c = frequency_sample(&dec, &fs, &x).unwrap();
    assert!((c - d).norm() < 1e-10);
    assert!(FrequencySampler::new(SpectralKernel::identity(), 15, 64).is_err());
}

#[test]
fn full_band_frequency_sampling_aliases() {
    let g = sensor(32, 5);
    let dec = SpectralDecomposition::of_graph(&g, COMB);
    let x = random_vector(32, &mut rng(2));
    let xhat = dec.eigenvectors().transpose() * &x;
    let fs = FrequencySampler::new(SpectralKernel::identity(), 16, 32).unwrap();
    let c = frequency_sample(&dec, &fs, &x).unwrap();
    for i in 0..16 {
        assert!((c[i] - (xhat[i] + xhat[i + 16])).abs() < 1e-12);
    }
}

#[test]
fn matrix_views_match_apply_and_are_linear() {
    let mut r = rng(9);
    for (n, seed) in [(12usize, 1u64), (36, 2), (64, 3)] {
        let g = sensor(n, seed);
        let dec = SpectralDecomposition::of_graph(&g, COMB);
        let vs = VertexSampler::ordered(vec![n - 1, 0, n / 2, 3], n)
            .unwrap()
            .with_prefilter(Prefilter::Spectral(SpectralKernel::exp_decay(1.5)));
        let fs = FrequencySampler::new(SpectralKernel::linear_decay(dec.lambda_max()), n / 4, n).unwrap();
        for view in [
            SamplingMatrixView::vertex(&g, &dec, &vs).unwrap(),
            SamplingMatrixView::frequency(&dec, &fs).unwrap(),
        ] {
            let st = view.to_dense();
            let x = random_vector(n, &mut r);
            let y = random_vector(n, &mut r);
            assert!((view.apply(&x).unwrap() - &st * &x).norm() < 1e-10);
            let c = random_vector(view.rows(), &mut r);
            assert!((view.apply_transpose(&c).unwrap() - st.transpose() * &c).norm() < 1e-10);
            let (a, b) = (1.7, -0.4);
            let lhs = view.apply(&(&x * a + &y * b)).unwrap();
            let rhs = view.apply(&x).unwrap() * a + view.apply(&y).unwrap() * b;
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }
}

#[test]
fn vertex_and_frequency_sampling_differ() {
    let g = sensor(64, 12);
    let dec = SpectralDecomposition::of_graph(&g, COMB);
    let kernel = SpectralKernel::exp_decay(2.0);
    let x = random_vector(64, &mut rng(12));
    let fs = FrequencySampler::new(kernel.clone(), 16, 64).unwrap();
    let vs = VertexSampler::sorted((0..16).map(|i| 4 * i).collect(), 64)
        .unwrap()
        .with_prefilter(Prefilter::Spectral(kernel));
    let cf = frequency_sample(&dec, &fs, &x).unwrap();
    let cv = vertex_sample(&g, &dec, &vs, &x).unwrap();
    assert!((cv - cf).norm() > 1e-6);
}
