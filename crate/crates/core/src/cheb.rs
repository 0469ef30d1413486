//! Chebyshev series on (-1, 1): Gauss grids, analysis and synthesis, Gauss–Chebyshev
//! quadrature and the two weighted norms used everywhere else in the crate.
//!
//! Grid convention: the canonical `n`-point grid holds the Chebyshev–Gauss nodes
//! `x_j = cos((2j+1)π/(2n))`, `j = 0..n`, so `x` is strictly decreasing in `j` and the
//! angle `θ_j = (2j+1)π/(2n)` is increasing. All nodes are strictly interior.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Default number of grid points / coefficients.
pub const DEFAULT_N: usize = 256;

/// Share of trailing coefficients inspected by [`tail_diagnostic`].
pub const TAIL_FRACTION: f64 = 0.1;

/// Tail-to-total ratio above which a series counts as under-resolved.
pub const TAIL_WARN_RATIO: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Basis {
    /// `T_k`, Chebyshev polynomials of the first kind.
    FirstKind,
    /// `U_k`, Chebyshev polynomials of the second kind.
    SecondKind,
}

/// Coefficients of a truncated Chebyshev expansion in either basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    basis: Basis,
    coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn new(basis: Basis, coeffs: Vec<f64>) -> Result<Self> {
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "coefficient {k} is not finite ({})",
                coeffs[k]
            )));
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zeros(basis: Basis, len: usize) -> Self {
        Self {
            basis,
            coeffs: vec![0.0; len],
        }
    }

    /// The `k`-th basis polynomial, padded with zeros to `len` coefficients.
    pub fn unit(basis: Basis, k: usize, len: usize) -> Self {
        let mut coeffs = vec![0.0; len.max(k + 1)];
        coeffs[k] = 1.0;
        Self { basis, coeffs }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Truncation degree (`len - 1`); trailing zeros are counted.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficient `k`, zero beyond the stored length.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Evaluate at `x ∈ [-1, 1]`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        synth(self, x)
    }
}

/// Samples of a function at the canonical Chebyshev–Gauss grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("grid function needs n >= 1".into()));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sample {j} is not finite ({})",
                values[j]
            )));
        }
        Ok(Self { values })
    }

    /// Sample `f` at the `n` canonical nodes.
    pub fn sample(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let nodes = cheb_nodes(n)?;
        Self::from_values(nodes.into_iter().map(f).collect())
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn nodes(&self) -> Vec<f64> {
        node_positions(self.n())
    }

    /// Pointwise product with a function of the node position.
    pub fn map_with_nodes(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self
            .nodes()
            .into_iter()
            .zip(&self.values)
            .map(|(x, &v)| f(x, v))
            .collect();
        Self::from_values(values)
    }
}

/// Chebyshev–Gauss nodes `cos((2j+1)π/(2n))`, strictly decreasing.
pub fn cheb_nodes(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("cheb_nodes needs n >= 1".into()));
    }
    Ok(node_positions(n))
}

// sin((n-1-2j)π/(2n)) equals cos((2j+1)π/(2n)) and is exactly antisymmetric under j -> n-1-j.
fn node_positions(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..n)
        .map(|j| {
            let m = n as i64 - 1 - 2 * j as i64;
            (m as f64 * PI / (2.0 * nf)).sin()
        })
        .collect()
}

/// Node angles `θ_j = (2j+1)π/(2n)`.
pub fn node_angles(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..n)
        .map(|j| (2 * j + 1) as f64 * PI / (2.0 * nf))
        .collect()
}

/// `sin θ_j = sqrt(1 - x_j^2)` at the canonical nodes.
pub fn node_sines(n: usize) -> Vec<f64> {
    node_angles(n).into_iter().map(f64::sin).collect()
}

fn half_shift(k: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, k as f64 * PI / (2.0 * n as f64))
}

/// `S_k = Σ_j v_j e^{i k θ_j}` for `k = 0..n`, via one inverse FFT of length `2n`.
fn analysis_sums(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .chain(std::iter::repeat_n(Complex64::new(0.0, 0.0), n))
        .collect();
    FftPlanner::new().plan_fft_inverse(2 * n).process(&mut buf);
    buf.truncate(n);
    for (k, s) in buf.iter_mut().enumerate() {
        *s *= half_shift(k, n);
    }
    buf
}

/// `R_j = Σ_k c_k e^{i k θ_j}` at the `n` nodes; requires `c.len() <= 2n`.
fn synthesis_sums(coeffs: &[f64], n: usize) -> Vec<Complex64> {
    assert!(coeffs.len() <= 2 * n, "too many coefficients for the grid");
    let mut buf: Vec<Complex64> = (0..2 * n)
        .map(|k| match coeffs.get(k) {
            Some(&c) => half_shift(k, n) * c,
            None => Complex64::new(0.0, 0.0),
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(2 * n).process(&mut buf);
    buf.truncate(n);
    buf
}

/// First-kind analysis: `a_k = (2 - δ_{k0})/n · Σ_j f_j T_k(x_j)` for `k < n`.
pub fn analyze_t(samples: &GridFunction) -> ChebSeries {
    let n = samples.n();
    let scale = 2.0 / n as f64;
    let mut coeffs: Vec<f64> = analysis_sums(samples.values())
        .into_iter()
        .map(|s| s.re * scale)
        .collect();
    coeffs[0] *= 0.5;
    ChebSeries {
        basis: Basis::FirstKind,
        coeffs,
    }
}

/// Same result as [`analyze_t`] by direct `O(n^2)` summation.
pub fn analyze_t_direct(samples: &GridFunction) -> ChebSeries {
    let n = samples.n();
    let theta = node_angles(n);
    let coeffs = (0..n)
        .map(|k| {
            let s: f64 = samples
                .values()
                .iter()
                .zip(&theta)
                .map(|(v, t)| v * (k as f64 * t).cos())
                .sum();
            if k == 0 {
                s / n as f64
            } else {
                2.0 * s / n as f64
            }
        })
        .collect();
    ChebSeries {
        basis: Basis::FirstKind,
        coeffs,
    }
}

/// Second-kind analysis: `b_j = (2/π) ∫ g U_j sqrt(1-x^2) dx` by Gauss–Chebyshev quadrature.
///
/// Exact for polynomial `g` of degree `< n`. The top coefficient `b_{n-1}` uses half the
/// weight because `sin(nθ_j) = ±1` on the grid.
pub fn analyze_u(samples: &GridFunction) -> ChebSeries {
    let n = samples.n();
    let weighted: Vec<f64> = samples
        .values()
        .iter()
        .zip(node_sines(n))
        .map(|(g, s)| g * s)
        .collect();
    let sums = analysis_sums(&weighted);
    let scale = 2.0 / n as f64;
    let mut coeffs: Vec<f64> = (0..n)
        .map(|j| {
            let s = if j + 1 < n {
                sums[j + 1].im
            } else {
                // k = n lies outside the returned range; sin(nθ_i) = (-1)^i.
                weighted
                    .iter()
                    .enumerate()
                    .map(|(i, w)| if i % 2 == 0 { *w } else { -*w })
                    .sum()
            };
            s * scale
        })
        .collect();
    coeffs[n - 1] *= 0.5;
    ChebSeries {
        basis: Basis::SecondKind,
        coeffs,
    }
}

/// Clenshaw summation in either basis; no domain check.
pub(crate) fn clenshaw(basis: Basis, coeffs: &[f64], x: f64) -> f64 {
    let two_x = 2.0 * x;
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + two_x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    let c0 = coeffs.first().copied().unwrap_or(0.0);
    match basis {
        // b_0 - x b_1 with b_0 = c_0 + 2x b_1 - b_2
        Basis::FirstKind => c0 + x * b1 - b2,
        Basis::SecondKind => c0 + two_x * b1 - b2,
    }
}

/// Evaluate a series at `x ∈ [-1, 1]` by Clenshaw's recurrence.
pub fn synth(series: &ChebSeries, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain {
            x,
            domain: "[-1, 1]",
        });
    }
    Ok(clenshaw(series.basis, &series.coeffs, x))
}

/// Evaluate a series at every node of the `n`-point grid in `O(n log n)`.
///
/// Needs `series.len() <= 2n` (first kind) or `series.len() < 2n` (second kind).
pub fn synth_on_grid(series: &ChebSeries, n: usize) -> Result<GridFunction> {
    if n == 0 {
        return Err(Error::InvalidArgument("grid needs n >= 1".into()));
    }
    let values = match series.basis {
        Basis::FirstKind => {
            if series.len() > 2 * n {
                return Err(Error::InvalidArgument(format!(
                    "{} coefficients do not fit a {n}-point grid",
                    series.len()
                )));
            }
            synthesis_sums(&series.coeffs, n)
                .into_iter()
                .map(|s| s.re)
                .collect()
        }
        Basis::SecondKind => {
            if series.len() >= 2 * n {
                return Err(Error::InvalidArgument(format!(
                    "{} coefficients do not fit a {n}-point grid",
                    series.len()
                )));
            }
            // U_k(cos θ) = sin((k+1)θ) / sin θ
            let mut shifted = Vec::with_capacity(series.len() + 1);
            shifted.push(0.0);
            shifted.extend_from_slice(&series.coeffs);
            synthesis_sums(&shifted, n)
                .into_iter()
                .zip(node_sines(n))
                .map(|(s, sin)| s.im / sin)
                .collect()
        }
    };
    GridFunction::from_values(values)
}

/// `∫ f(x) (1-x^2)^{-1/2} dx ≈ (π/n) Σ f(x_j)`, exact for polynomials of degree `< 2n`.
pub fn gauss_cheb_quad(samples: &GridFunction) -> f64 {
    PI / samples.n() as f64 * samples.values().iter().sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// `(1-x^2)^{-1/2}`
    InvSqrt,
    /// `(1-x^2)^{1/2}`
    Sqrt,
}

/// `∫ f^2 (1-x^2)^{∓1/2} dx` by Gauss–Chebyshev quadrature with the weight folded in.
pub fn weighted_norm_sq(f: &GridFunction, weight: Weight) -> f64 {
    let n = f.n();
    let scale = PI / n as f64;
    match weight {
        Weight::InvSqrt => scale * f.values().iter().map(|v| v * v).sum::<f64>(),
        Weight::Sqrt => {
            scale
                * f.values()
                    .iter()
                    .zip(node_sines(n))
                    .map(|(v, s)| (v * s) * (v * s))
                    .sum::<f64>()
        }
    }
}

/// Size of the trailing coefficients relative to the whole series.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TailReport {
    /// Number of trailing coefficients inspected.
    pub tail_len: usize,
    /// Largest `|a_k|` in the tail.
    pub tail_max: f64,
    /// `||tail||_2 / ||a||_2`; zero for the zero series.
    pub tail_ratio: f64,
}

impl TailReport {
    pub fn is_resolved(&self, threshold: f64) -> bool {
        self.tail_ratio <= threshold
    }

    pub fn check(&self, threshold: f64) -> Result<()> {
        if self.is_resolved(threshold) {
            Ok(())
        } else {
            Err(Error::Resolution {
                tail_ratio: self.tail_ratio,
                threshold,
            })
        }
    }
}

/// Inspect the last 10% of the coefficients.
pub fn tail_diagnostic(series: &ChebSeries) -> TailReport {
    let len = series.len();
    let tail_len = ((len as f64 * TAIL_FRACTION).ceil() as usize).min(len);
    let tail = &series.coeffs[len - tail_len..];
    let total: f64 = series.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    let tail_norm: f64 = tail.iter().map(|c| c * c).sum::<f64>().sqrt();
    let tail_max = tail.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    TailReport {
        tail_len,
        tail_max,
        tail_ratio: if total > 0.0 { tail_norm / total } else { 0.0 },
    }
}
