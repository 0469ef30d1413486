//! The finite Hilbert transform `(Hf)(x) = (1/π) p.v.∫_{-1}^{1} f(y)/(x-y) dy`.
//!
//! The operator acts on the first-kind coefficients of `g = f sqrt(1-x^2)`:
//! with this kernel orientation `H[T_k (1-y^2)^{-1/2}] = -U_{k-1}` for `k >= 1` and
//! `H[(1-y^2)^{-1/2}] = 0`, so `a_k ↦ -a_k` lands on `U_{k-1}` and `a_0` is annihilated.
//! Direct principal-value quadrature lives in [`fht_quadrature_oracle`] and is only
//! meant as an independent check.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::cheb::{
    analyze_t, node_sines, synth, synth_on_grid, tail_diagnostic, weighted_norm_sq, Basis,
    ChebSeries, GridFunction, TailReport, Weight, DEFAULT_N, TAIL_WARN_RATIO,
};
use crate::error::{Error, Result};
use crate::func::{Bump, RealFn};
use crate::quadrature::GaussLegendre;

/// Tolerance on `a_0` for the weighted Parseval identity, relative to `max(1, ||a||_2)`.
pub const MEAN_ZERO_TOL: f64 = 1e-10;

/// Input to the transform: samples of `f` and the first-kind series of `f sqrt(1-x^2)`.
#[derive(Debug, Clone)]
pub struct FhtInput {
    f: GridFunction,
    series: ChebSeries,
    tail: TailReport,
    tail_tolerance: f64,
}

impl FhtInput {
    /// From samples of `f` on the canonical grid.
    pub fn new(f: GridFunction) -> Self {
        let g: Vec<f64> = f
            .values()
            .iter()
            .zip(node_sines(f.n()))
            .map(|(v, s)| v * s)
            .collect();
        // products of finite values stay finite
        let g = GridFunction::from_values(g).expect("finite samples");
        Self::assemble(f, &g)
    }

    /// Sample a function on the `n`-point grid, using its weighted form for `g`.
    pub fn from_fn(n: usize, f: &impl RealFn) -> Result<Self> {
        let fs = GridFunction::sample(n, |x| f.eval(x))?;
        let gs = GridFunction::sample(n, |x| f.weighted(x))?;
        Ok(Self::assemble(fs, &gs))
    }

    /// `f = (Σ a_k T_k) / sqrt(1-x^2)` for a given first-kind series, sampled on `n` nodes.
    pub fn from_weighted_series(series: &ChebSeries, n: usize) -> Result<Self> {
        if series.basis() != Basis::FirstKind {
            return Err(Error::BasisMismatch {
                expected: "first kind",
            });
        }
        if series.len() > n {
            return Err(Error::InvalidArgument(format!(
                "degree {} needs at least {} grid points",
                series.degree(),
                series.len()
            )));
        }
        let g = synth_on_grid(series, n)?;
        let f = GridFunction::from_values(
            g.values()
                .iter()
                .zip(node_sines(n))
                .map(|(v, s)| v / s)
                .collect(),
        )?;
        Ok(Self::assemble(f, &g))
    }

    fn assemble(f: GridFunction, g: &GridFunction) -> Self {
        let series = analyze_t(g);
        let tail = tail_diagnostic(&series);
        Self {
            f,
            series,
            tail,
            tail_tolerance: TAIL_WARN_RATIO,
        }
    }

    /// Accept series whose tail ratio is at most `tol` (default `1e-8`).
    pub fn with_tail_tolerance(mut self, tol: f64) -> Self {
        self.tail_tolerance = tol;
        self
    }

    pub fn f(&self) -> &GridFunction {
        &self.f
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    /// First-kind coefficients of `f sqrt(1-x^2)`.
    pub fn series(&self) -> &ChebSeries {
        &self.series
    }

    /// The arcsine pairing `a_0`.
    pub fn a0(&self) -> f64 {
        self.series.coeff(0)
    }

    pub fn tail(&self) -> &TailReport {
        &self.tail
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }
}

/// Map first-kind coefficients of `f sqrt(1-x^2)` to second-kind coefficients of `Hf`.
pub fn fht_coeff_map(a: &ChebSeries) -> Result<ChebSeries> {
    if a.basis() != Basis::FirstKind {
        return Err(Error::BasisMismatch {
            expected: "first kind",
        });
    }
    let out: Vec<f64> = a.coeffs().iter().skip(1).map(|c| -c).collect();
    let out = if out.is_empty() { vec![0.0] } else { out };
    ChebSeries::new(Basis::SecondKind, out)
}

/// Second-kind series of `Hf`, after the tail check.
pub fn fht_series(input: &FhtInput) -> Result<ChebSeries> {
    input.tail.check(input.tail_tolerance)?;
    fht_coeff_map(&input.series)
}

/// `Hf` at the grid nodes of the input.
pub fn fht_apply(input: &FhtInput) -> Result<GridFunction> {
    synth_on_grid(&fht_series(input)?, input.n())
}

/// `Hf(x)` at any `x ∈ [-1, 1]`.
pub fn fht_eval(input: &FhtInput, x: f64) -> Result<f64> {
    synth(&fht_series(input)?, x)
}

/// Principal-value quadrature for `Hf(x)`, independent of the coefficient route.
///
/// Singularity subtraction after `y = cos θ`:
/// `p.v.∫ f(y)/(x-y) dy = ∫_0^π (h(cos θ) - f(x) sin θ)/(x - cos θ) dθ + f(x) ln((1+x)/(1-x))`,
/// where `h = f sqrt(1-y^2)`; the first integrand is smooth and gets an `n`-point
/// Gauss–Legendre rule.
#[derive(Debug, Clone)]
pub struct PvOracle {
    rule: GaussLegendre,
}

impl PvOracle {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self {
            rule: GaussLegendre::new(n)?,
        })
    }

    pub fn eval(&self, f: &impl RealFn, x: f64) -> Result<f64> {
        if !(x > -1.0 && x < 1.0) {
            return Err(Error::OracleFailure {
                x,
                reason: "x must be strictly inside (-1, 1)".into(),
            });
        }
        let fx = f.eval(x);
        if !fx.is_finite() {
            return Err(Error::OracleFailure {
                x,
                reason: format!("f(x) = {fx} is not finite"),
            });
        }
        let mut regular = 0.0;
        for (theta, w) in self.rule.mapped(0.0, PI) {
            let c = theta.cos();
            let denom = x - c;
            if denom.abs() < 1e-13 {
                return Err(Error::OracleFailure {
                    x,
                    reason: "quadrature node coincides with the singularity".into(),
                });
            }
            let h = f.weighted(c);
            if !h.is_finite() {
                return Err(Error::OracleFailure {
                    x,
                    reason: format!("f(y) sqrt(1-y^2) not finite at y = {c}"),
                });
            }
            regular += w * (h - fx * theta.sin()) / denom;
        }
        let log_term = fx * ((1.0 + x) / (1.0 - x)).ln();
        Ok((regular + log_term) / PI)
    }
}

/// One-shot form of [`PvOracle::eval`].
pub fn fht_quadrature_oracle(f: &impl RealFn, x: f64, n: usize) -> Result<f64> {
    PvOracle::new(n)?.eval(f, x)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ParsevalReport {
    /// `∫ (Hf)^2 sqrt(1-x^2) dx`
    pub lhs: f64,
    /// `∫ f^2 sqrt(1-x^2) dx`
    pub rhs: f64,
    pub rel_gap: f64,
}

/// Both sides of the weighted Parseval identity for mean-zero inputs.
///
/// Inputs with `a_0 != 0` are rejected with [`Error::MeanValueNonzero`], which carries the
/// exact relation `lhs = rhs - π a_0^2`.
pub fn parseval_check(input: &FhtInput) -> Result<ParsevalReport> {
    let hf = fht_apply(input)?;
    let lhs = weighted_norm_sq(&hf, Weight::Sqrt);
    let rhs = weighted_norm_sq(input.f(), Weight::Sqrt);
    let a0 = input.a0();
    let scale = input
        .series()
        .coeffs()
        .iter()
        .map(|c| c * c)
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    if a0.abs() > MEAN_ZERO_TOL * scale {
        return Err(Error::MeanValueNonzero {
            a0,
            lhs,
            rhs,
            corrected_rhs: rhs - PI * a0 * a0,
        });
    }
    let rel_gap = if rhs > 0.0 {
        (lhs - rhs).abs() / rhs
    } else {
        lhs.abs()
    };
    Ok(ParsevalReport { lhs, rhs, rel_gap })
}

/// Sqrt-weighted norm of `H[c / sqrt(1-x^2)]` on the default grid.
pub fn nullspace_residual(c: f64) -> Result<f64> {
    nullspace_residual_on(c, DEFAULT_N)
}

pub fn nullspace_residual_on(c: f64, n: usize) -> Result<f64> {
    let f = GridFunction::sample(n, |x| c / (1.0 - x * x).sqrt())?;
    let hf = fht_apply(&FhtInput::new(f))?;
    Ok(weighted_norm_sq(&hf, Weight::Sqrt).sqrt())
}

/// `(1/π) ∫ f(y)/(x-y) dy` for `|x| > 1`, by Gauss–Chebyshev quadrature of `f sqrt(1-y^2)/(x-y)`.
pub fn outer_transform(f: &GridFunction, x: f64) -> Result<f64> {
    if !(x.abs() > 1.0) {
        return Err(Error::OutOfDomain {
            x,
            domain: "|x| > 1",
        });
    }
    let n = f.n();
    let s: f64 = f
        .values()
        .iter()
        .zip(f.nodes())
        .zip(node_sines(n))
        .map(|((v, y), sin)| v * sin / (x - y))
        .sum();
    Ok(s / n as f64)
}

/// Quantities behind the lower bound for `||Hf||_{L^2(2,3)}`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ProbeReport {
    /// `||Hf||_{L^2(2,3)}`
    pub outer_norm: f64,
    /// `||f||_{L^2(-1,1)}`
    pub inner_norm: f64,
    /// `||f'||_{L^2(-1,1)}`
    pub deriv_norm: f64,
    /// `ln(inner_norm / outer_norm)`
    pub log_ratio: f64,
}

impl ProbeReport {
    /// `||f'|| / ||f||`, the abscissa of the lower-bound inequality.
    pub fn gradient_ratio(&self) -> f64 {
        self.deriv_norm / self.inner_norm
    }
}

const OUTER_RULE_POINTS: usize = 64;

fn plain_norm(f: &GridFunction) -> f64 {
    // ∫ f^2 dx = ∫ f^2 sqrt(1-x^2) dx / sqrt(1-x^2)
    let n = f.n();
    (PI / n as f64
        * f.values()
            .iter()
            .zip(node_sines(n))
            .map(|(v, s)| v * v * s)
            .sum::<f64>())
    .sqrt()
}

/// Measure `||Hf||_{L^2(2,3)}`, `||f||` and `||f'||` from samples of `f` and `f'`.
pub fn lower_bound_probe(f: &GridFunction, df: &GridFunction) -> Result<ProbeReport> {
    if f.n() != df.n() {
        return Err(Error::InvalidArgument("f and f' must share a grid".into()));
    }
    let inner_norm = plain_norm(f);
    if inner_norm == 0.0 {
        return Err(Error::InvalidArgument("f vanishes on the grid".into()));
    }
    let deriv_norm = plain_norm(df);
    let rule = GaussLegendre::new(OUTER_RULE_POINTS)?;
    let mut outer_sq = 0.0;
    for (x, w) in rule.mapped(2.0, 3.0) {
        let v = outer_transform(f, x)?;
        outer_sq += w * v * v;
    }
    let outer_norm = outer_sq.sqrt();
    let log_ratio = (inner_norm / outer_norm).ln();
    if !log_ratio.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "outer norm {outer_norm:e} gives a non-finite log ratio"
        )));
    }
    Ok(ProbeReport {
        outer_norm,
        inner_norm,
        deriv_norm,
        log_ratio,
    })
}

/// Probe a bump whose support must lie inside (-1, 1).
pub fn bump_probe(bump: Bump, n: usize) -> Result<ProbeReport> {
    if !bump.is_interior() {
        return Err(Error::InvalidArgument(format!(
            "bump {bump:?} is not supported inside (-1, 1)"
        )));
    }
    let f = GridFunction::sample(n, |x| bump.value(x))?;
    let df = GridFunction::sample(n, |x| bump.derivative(x))?;
    lower_bound_probe(&f, &df)
}

/// Centered bumps of the given widths, evaluated in parallel, in input order.
pub fn probe_sweep(widths: &[f64], n: usize) -> Result<Vec<ProbeReport>> {
    widths
        .par_iter()
        .map(|&w| bump_probe(Bump::new(0.0, w), n))
        .collect()
}

/// Least-squares fit of `log_ratio ≈ a + b r^p` with `r = ||f'||/||f||`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GrowthFit {
    pub intercept: f64,
    pub scale: f64,
    pub exponent: f64,
    /// `max(0, exponent - 1)`: growth beyond affine.
    pub superlinear_excess: f64,
    pub residual: f64,
}

const EXPONENT_RANGE: (f64, f64) = (0.01, 4.0);

fn fit_for_exponent(r: &[f64], y: &[f64], p: f64) -> (f64, f64, f64) {
    let z: Vec<f64> = r.iter().map(|v| v.powf(p)).collect();
    let m = z.len() as f64;
    let zm = z.iter().sum::<f64>() / m;
    let ym = y.iter().sum::<f64>() / m;
    let szz: f64 = z.iter().map(|v| (v - zm) * (v - zm)).sum();
    let szy: f64 = z.iter().zip(y).map(|(a, b)| (a - zm) * (b - ym)).sum();
    let b = if szz > 0.0 { szy / szz } else { 0.0 };
    let a = ym - b * zm;
    let sse = z
        .iter()
        .zip(y)
        .map(|(zi, yi)| (yi - a - b * zi).powi(2))
        .sum();
    (a, b, sse)
}

/// Fit the growth exponent of `log_ratio` in the gradient ratio; needs at least 3 reports.
pub fn fit_growth(reports: &[ProbeReport]) -> Result<GrowthFit> {
    if reports.len() < 3 {
        return Err(Error::InvalidArgument(
            "growth fit needs at least three probes".into(),
        ));
    }
    let r: Vec<f64> = reports.iter().map(ProbeReport::gradient_ratio).collect();
    let y: Vec<f64> = reports.iter().map(|p| p.log_ratio).collect();
    let sse_at = |p: f64| fit_for_exponent(&r, &y, p).2;

    // coarse scan, then golden-section refinement around the best cell
    let (lo, hi) = EXPONENT_RANGE;
    let steps = 400;
    let h = (hi - lo) / steps as f64;
    let best = (0..=steps)
        .map(|i| lo + i as f64 * h)
        .min_by(|a, b| sse_at(*a).total_cmp(&sse_at(*b)))
        .unwrap_or(lo);
    let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if sse_at(c) <= sse_at(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let exponent = 0.5 * (a + b);
    let (intercept, scale, residual) = fit_for_exponent(&r, &y, exponent);
    Ok(GrowthFit {
        intercept,
        scale,
        exponent,
        superlinear_excess: (exponent - 1.0).max(0.0),
        residual,
    })
}
