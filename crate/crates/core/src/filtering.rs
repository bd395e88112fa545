//! Graph filters: polynomial (vertex domain), kernel (spectral domain),
//! Chebyshev surrogates for eigendecomposition-free filtering, and the
//! localization operator.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{check_len, Error, Result};
use crate::linalg::{power_iteration_lambda_max, LinearOperator};
use crate::spectral::SpectralDecomposition;

/// Relative tolerance for the power-iteration estimate of the largest eigenvalue.
pub const LAMBDA_MAX_TOL: f64 = 1e-6;
/// Inflation applied to the power-iteration estimate when fitting intervals.
pub const LAMBDA_MAX_INFLATION: f64 = 1.01;

/// A graph frequency response `ĝ(λ)`.
#[derive(Clone)]
pub struct SpectralKernel {
    name: String,
    evaluator: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for SpectralKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralKernel").field("name", &self.name).finish()
    }
}

impl SpectralKernel {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            evaluator: Arc::new(f),
        }
    }

    pub fn identity() -> Self {
        Self::new("identity", |_| 1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("constant:{c}"), move |_| c)
    }

    /// `1` for `λ <= cutoff`, else `0`.
    pub fn ideal_lowpass(cutoff: f64) -> Self {
        Self::new(format!("ideal_lowpass@{cutoff}"), move |l| if l <= cutoff { 1.0 } else { 0.0 })
    }

    /// `exp(-λ / tau)`
    pub fn exp_decay(tau: f64) -> Self {
        Self::new(format!("exp_decay:{tau}"), move |l| (-l / tau).exp())
    }

    /// `1 - 2λ / λ_max`
    pub fn linear_decay(lambda_max: f64) -> Self {
        Self::new("linear_decay", move |l| 1.0 - 2.0 * l / lambda_max)
    }

    /// `Σ c_p λ^p`
    pub fn polynomial(coefficients: Vec<f64>) -> Self {
        let name = format!(
            "polynomial:{}",
            coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        );
        Self::new(name, move |l| coefficients.iter().rev().fold(0.0, |acc, c| acc * l + c))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        (self.evaluator)(lambda)
    }

    /// Positive multiple of this kernel.
    pub fn scaled(&self, factor: f64) -> Self {
        let inner = self.evaluator.clone();
        Self::new(format!("{}*{factor}", self.name), move |l| factor * inner(l))
    }

    /// `ĝ(λ_k)` for every eigenvalue of `dec`.
    pub fn response(&self, dec: &SpectralDecomposition) -> DVector<f64> {
        dec.eigenvalues().map(|l| self.eval(l))
    }
}

/// Named kernel from the CLI registry. Some kernels need the spectrum to be
/// resolved (`ideal_lowpass:K` uses the `K`-th eigenvalue as cutoff,
/// `linear_decay` uses `λ_max`).
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    Identity,
    IdealLowpass(usize),
    ExpDecay(f64),
    LinearDecay,
    Polynomial(Vec<f64>),
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let bad = |msg: &str| Error::Parse(format!("kernel `{s}`: {msg}"));
        match (head, arg) {
            ("identity", None) => Ok(Self::Identity),
            ("linear_decay", None) => Ok(Self::LinearDecay),
            ("ideal_lowpass", Some(k)) => {
                let k: usize = k.parse().map_err(|_| bad("K must be a positive integer"))?;
                if k == 0 {
                    return Err(bad("K must be positive"));
                }
                Ok(Self::IdealLowpass(k))
            }
            ("exp_decay", Some(t)) => {
                let t: f64 = t.parse().map_err(|_| bad("tau must be a number"))?;
                if !(t > 0.0) {
                    return Err(bad("tau must be positive"));
                }
                Ok(Self::ExpDecay(t))
            }
            ("polynomial", Some(cs)) => cs
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|_| bad("coefficients must be numbers")))
                .collect::<Result<Vec<_>>>()
                .map(Self::Polynomial),
            _ => Err(bad("unknown kernel")),
        }
    }
}

impl KernelSpec {
    /// Resolves against ascending eigenvalues.
    pub fn resolve(&self, eigenvalues: &DVector<f64>) -> Result<SpectralKernel> {
        let n = eigenvalues.len();
        let lambda_max = eigenvalues[n - 1];
        Ok(match self {
            Self::Identity => SpectralKernel::identity(),
            Self::IdealLowpass(k) => {
                if *k > n {
                    return Err(Error::ModelInvalid(format!("ideal_lowpass K = {k} exceeds N = {n}")));
                }
                let cutoff = if *k == n {
                    lambda_max
                } else {
                    0.5 * (eigenvalues[k - 1] + eigenvalues[*k])
                };
                let mut kernel = SpectralKernel::ideal_lowpass(cutoff);
                kernel.name = format!("ideal_lowpass:{k}");
                kernel
            }
            Self::ExpDecay(tau) => SpectralKernel::exp_decay(*tau),
            Self::LinearDecay => SpectralKernel::linear_decay(lambda_max),
            Self::Polynomial(c) => SpectralKernel::polynomial(c.clone()),
        })
    }
}

/// `Σ_p c_p L^p` given by its coefficients `c_0..c_P`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialFilter {
    pub coefficients: Vec<f64>,
}

impl PolynomialFilter {
    pub fn new(coefficients: Vec<f64>) -> Self {
        assert!(!coefficients.is_empty(), "a polynomial filter needs at least c_0");
        Self { coefficients }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// The same polynomial viewed as a frequency response.
    pub fn as_kernel(&self) -> SpectralKernel {
        SpectralKernel::polynomial(self.coefficients.clone())
    }
}

/// Applies a polynomial of `l` to `x` by repeated matrix-vector products.
pub fn apply_vertex_filter(
    l: &impl LinearOperator,
    f: &PolynomialFilter,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    check_len("apply_vertex_filter", l.dim(), x.len())?;
    let mut power = x.clone();
    let mut out = x * f.coefficients[0];
    for &c in &f.coefficients[1..] {
        power = l.apply(&power);
        out.axpy(c, &power, 1.0);
    }
    Ok(out)
}

/// `U ĝ(Λ) Uᵀ x`
pub fn apply_spectral_filter(
    dec: &SpectralDecomposition,
    k: &SpectralKernel,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    let xhat = dec.gft_vec(x)?.component_mul(&k.response(dec));
    dec.igft_vec(&xhat)
}

/// Chebyshev series of a kernel on `[0, lambda_max]`.
///
/// Stored with the zeroth coefficient already halved, so the surrogate is
/// `Σ_k c_k T_k(2λ/λ_max - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevApprox {
    pub coefficients: Vec<f64>,
    pub lambda_max: f64,
}

impl ChebyshevApprox {
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Scalar evaluation by Clenshaw's recurrence.
    pub fn eval(&self, lambda: f64) -> f64 {
        let t = 2.0 * lambda / self.lambda_max - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coefficients.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coefficients[0]
    }
}

/// Interpolates `k` at the `order + 1` Chebyshev-Gauss nodes mapped to
/// `[0, lambda_max]`.
pub fn chebyshev_fit(k: &SpectralKernel, lambda_max: f64, order: usize) -> Result<ChebyshevApprox> {
    assert!(lambda_max > 0.0, "lambda_max must be positive");
    let m = order + 1;
    let mut samples = Vec::with_capacity(m);
    let mut thetas = Vec::with_capacity(m);
    for j in 0..m {
        let theta = std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
        let lambda = 0.5 * lambda_max * (theta.cos() + 1.0);
        let v = k.eval(lambda);
        if !v.is_finite() {
            return Err(Error::NonFiniteKernel {
                name: k.name().to_string(),
                lambda,
            });
        }
        samples.push(v);
        thetas.push(theta);
    }
    let mut coefficients: Vec<f64> = (0..m)
        .map(|i| {
            2.0 / m as f64
                * samples
                    .iter()
                    .zip(&thetas)
                    .map(|(f, th)| f * (i as f64 * th).cos())
                    .sum::<f64>()
        })
        .collect();
    coefficients[0] *= 0.5;
    Ok(ChebyshevApprox {
        coefficients,
        lambda_max,
    })
}

/// Power-iteration estimate of the largest eigenvalue, inflated by 1%.
pub fn estimate_lambda_max(l: &impl LinearOperator) -> f64 {
    power_iteration_lambda_max(l, LAMBDA_MAX_TOL, 100_000) * LAMBDA_MAX_INFLATION
}

/// Applies the Chebyshev surrogate by the three-term recurrence; only
/// matrix-vector products with `l` are used.
pub fn chebyshev_apply(
    l: &impl LinearOperator,
    a: &ChebyshevApprox,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    check_len("chebyshev_apply", l.dim(), x.len())?;
    let lambda_max = power_iteration_lambda_max(l, LAMBDA_MAX_TOL, 100_000);
    if lambda_max > a.lambda_max * (1.0 + LAMBDA_MAX_TOL) {
        return Err(Error::IntervalTooSmall {
            upper: a.lambda_max,
            lambda_max,
        });
    }
    let scale = 2.0 / a.lambda_max;
    // shifted operator: (2/λ_max) L - I
    let shifted = |v: &DVector<f64>| l.apply(v) * scale - v;

    let mut out = x * a.coefficients[0];
    if a.coefficients.len() == 1 {
        return Ok(out);
    }
    let mut prev = x.clone();
    let mut cur = shifted(x);
    out.axpy(a.coefficients[1], &cur, 1.0);
    for &c in &a.coefficients[2..] {
        let next = shifted(&cur) * 2.0 - &prev;
        out.axpy(c, &next, 1.0);
        prev = cur;
        cur = next;
    }
    Ok(out)
}

/// Localization operator `ψ_{g,i} = √N U ĝ(Λ) Uᵀ δ_i`.
pub fn localized_operator(dec: &SpectralDecomposition, k: &SpectralKernel, i: usize) -> Result<DVector<f64>> {
    let n = dec.size();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let u = dec.eigenvectors();
    let weights = DVector::from_fn(n, |kk, _| k.eval(dec.eigenvalues()[kk]) * u[(i, kk)]);
    Ok(u * weights * (n as f64).sqrt())
}
