//! Lifting functions on (-1, 1) to the circle via `x = cos θ` and taking the conjugate
//! function there.
//!
//! For `g(θ) = f(cos θ) |sin θ|` and `x = cos ψ`,
//! `(Hf)(x) = -(1/(2 sin ψ)) · (1/π) p.v.∫ g(θ) cot((ψ-θ)/2) dθ = -g̃(ψ)/sin ψ`,
//! where `g̃` is the conjugate function (Fourier multiplier `-i sgn(k)`).

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::func::RealFn;

/// Default circle grid size.
pub const DEFAULT_M: usize = 1024;

/// Distance from `ψ = 0, π` below which [`fht_via_circle`] refuses to divide by `sin ψ`.
pub const ENDPOINT_GUARD: f64 = 0.05;

/// Samples at `θ_j = -π + 2πj/m`, `m` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFunction {
    values: Vec<f64>,
}

impl CircleFunction {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let m = values.len();
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "circle grid size {m} is not a power of two >= 2"
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "circle sample {j} is not finite ({})",
                values[j]
            )));
        }
        Ok(Self { values })
    }

    pub fn sample(m: usize, g: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_values(angles(m).into_iter().map(g).collect())
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn angles(&self) -> Vec<f64> {
        angles(self.m())
    }

    /// `(1/2π) ∫ g dθ` by the trapezoidal rule.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.m() as f64
    }

    /// `∫_{-π}^{π} g^2 dθ` by the trapezoidal rule.
    pub fn norm_sq(&self) -> f64 {
        2.0 * PI / self.m() as f64 * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    fn spectrum(&self) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = self
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        FftPlanner::new()
            .plan_fft_forward(self.m())
            .process(&mut buf);
        buf
    }

    /// Trigonometric interpolant of the conjugate function at any angle.
    pub fn conjugate_at(&self, psi: f64) -> f64 {
        let m = self.m();
        let spec = self.spectrum();
        // grid offset: θ_j + π = 2πj/m
        let s: f64 = (1..m / 2)
            .map(|k| {
                let phase = Complex64::from_polar(1.0, k as f64 * (psi + PI));
                (Complex64::new(0.0, -1.0) * spec[k] * phase).re
            })
            .sum();
        2.0 * s / m as f64
    }
}

fn angles(m: usize) -> Vec<f64> {
    (0..m)
        .map(|j| -PI + 2.0 * PI * j as f64 / m as f64)
        .collect()
}

/// `g(θ) = f(cos θ) |sin θ|` on the `m`-point circle grid; exactly even in `θ`.
pub fn lift(f: &impl RealFn, m: usize) -> Result<CircleFunction> {
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "circle grid size {m} is not a power of two >= 2"
        )));
    }
    let theta = angles(m);
    let mut values = vec![0.0; m];
    // θ_0 = -π; θ_{m/2} = 0; θ_{m-j} = -θ_j
    for j in 0..=m / 2 {
        let v = f.weighted(theta[j].cos());
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!(
                "lifted sample at θ = {} is not finite",
                theta[j]
            )));
        }
        values[j] = v;
        if j > 0 && j < m / 2 {
            values[m - j] = v;
        }
    }
    CircleFunction::from_values(values)
}

/// Conjugate function by the Fourier multiplier `-i sgn(k)`; the mean and the Nyquist
/// mode are dropped.
pub fn conjugate(g: &CircleFunction) -> CircleFunction {
    let m = g.m();
    let mut spec = g.spectrum();
    spec[0] = Complex64::new(0.0, 0.0);
    spec[m / 2] = Complex64::new(0.0, 0.0);
    for k in 1..m / 2 {
        spec[k] *= Complex64::new(0.0, -1.0);
        spec[m - k] *= Complex64::new(0.0, 1.0);
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut spec);
    let scale = 1.0 / m as f64;
    CircleFunction {
        values: spec.into_iter().map(|c| c.re * scale).collect(),
    }
}

/// `Hf(cos ψ)` through the circle, on the default grid.
pub fn fht_via_circle(f: &impl RealFn, psi: f64) -> Result<f64> {
    fht_via_circle_on(f, psi, DEFAULT_M)
}

pub fn fht_via_circle_on(f: &impl RealFn, psi: f64, m: usize) -> Result<f64> {
    if !(psi > ENDPOINT_GUARD && psi < PI - ENDPOINT_GUARD) {
        return Err(Error::NearEndpoint {
            psi,
            amplification: 1.0 / psi.sin().abs(),
        });
    }
    let g = lift(f, m)?;
    Ok(-g.conjugate_at(psi) / psi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheb::{weighted_norm_sq, GridFunction, Weight};
    use crate::func::{OverSqrtWeight, TestFunction};

    fn assert_close(a: &CircleFunction, b: &CircleFunction, tol: f64) {
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < tol, "{x} vs {y}");
        }
    }

    #[test]
    fn lift_examples() {
        let g = lift(&TestFunction::NullFamily { c: 1.0 }, 64).unwrap();
        assert!(g.values().iter().all(|v| *v == 1.0));
        let g = lift(&|_: f64| 1.0, 64).unwrap();
        for (t, v) in g.angles().iter().zip(g.values()) {
            assert!((v - t.sin().abs()).abs() < 1e-7);
        }
        let bad = |x: f64| 1.0 / (1.0 - x * x).sqrt();
        assert!(matches!(lift(&bad, 64), Err(Error::InvalidInput(_))));
        assert!(lift(&TestFunction::Indicator, 100).is_err());
    }

    #[test]
    fn lifted_norm_matches_weighted_norm() {
        let f = OverSqrtWeight(|x: f64| x);
        let g = lift(&f, 1024).unwrap();
        let grid = GridFunction::sample(256, |x| x / (1.0 - x * x).sqrt()).unwrap();
        let mean_sq = g.norm_sq() / (2.0 * PI);
        assert!((mean_sq - weighted_norm_sq(&grid, Weight::Sqrt) / PI).abs() < 1e-12);
    }

    #[test]
    fn conjugate_examples() {
        let m = 64;
        let cos = CircleFunction::sample(m, f64::cos).unwrap();
        assert_close(
            &conjugate(&cos),
            &CircleFunction::sample(m, f64::sin).unwrap(),
            1e-14,
        );
        let one = CircleFunction::sample(m, |_| 1.0).unwrap();
        assert!(conjugate(&one).values().iter().all(|v| v.abs() < 1e-15));
        let s3 = CircleFunction::sample(m, |t| (3.0 * t).sin()).unwrap();
        assert_close(
            &conjugate(&s3),
            &CircleFunction::sample(m, |t| -(3.0 * t).cos()).unwrap(),
            1e-14,
        );
    }

    #[test]
    fn conjugate_at_matches_grid_conjugate() {
        let g = CircleFunction::sample(32, |t| (2.0 * t).cos() + 0.3 * (5.0 * t).sin()).unwrap();
        let c = conjugate(&g);
        for (t, v) in c.angles().iter().zip(c.values()) {
            assert!((g.conjugate_at(*t) - v).abs() < 1e-13);
        }
    }

    // Slow oracle: (1/2π) p.v.∫ g(θ) cot((ψ-θ)/2) dθ by subtracting g(ψ) and using the
    // periodic trapezoidal rule on a grid staggered around ψ.
    fn cotangent_oracle(g: impl Fn(f64) -> f64, psi: f64, m: usize) -> f64 {
        let h = 2.0 * PI / m as f64;
        let gpsi = g(psi);
        (0..m)
            .map(|j| {
                let theta = psi + (j as f64 + 0.5) * h;
                (g(theta) - gpsi) / ((psi - theta) / 2.0).tan()
            })
            .sum::<f64>()
            * h
            / (2.0 * PI)
    }

    #[test]
    fn multiplier_agrees_with_cotangent_kernel() {
        let g = |t: f64| (t.cos() * 0.7).exp();
        let lifted = CircleFunction::sample(256, g).unwrap();
        for psi in [0.3, 1.1, 2.5] {
            let oracle = cotangent_oracle(g, psi, 4096);
            assert!(
                (lifted.conjugate_at(psi) - oracle).abs() < 1e-12,
                "psi = {psi}"
            );
        }
    }

    #[test]
    fn via_circle_examples() {
        let arcsine = TestFunction::NullFamily { c: 1.0 };
        assert!(fht_via_circle(&arcsine, PI / 3.0).unwrap().abs() < 1e-14);
        let t1 = OverSqrtWeight(|y: f64| y);
        assert!((fht_via_circle(&t1, PI / 2.0).unwrap() + 1.0).abs() < 1e-13);
        assert!(
            fht_via_circle(&TestFunction::Indicator, PI / 2.0)
                .unwrap()
                .abs()
                < 1e-13
        );
        assert!(matches!(
            fht_via_circle(&t1, 0.01),
            Err(Error::NearEndpoint { .. })
        ));
    }

    #[test]
    fn double_conjugation_and_isometry() {
        let g = CircleFunction::sample(128, |t| 2.0 + t.cos() - 0.5 * (7.0 * t).sin()).unwrap();
        let cc = conjugate(&conjugate(&g));
        let mean = g.mean();
        for (a, b) in cc.values().iter().zip(g.values()) {
            assert!((a + (b - mean)).abs() < 1e-12);
        }
        let zero_mean =
            CircleFunction::from_values(g.values().iter().map(|v| v - mean).collect()).unwrap();
        let c = conjugate(&zero_mean);
        assert!((c.norm_sq() - zero_mean.norm_sq()).abs() < 1e-12);
        assert!(c.mean().abs() < 1e-15);
    }

    #[test]
    fn lift_is_even_and_conjugate_is_odd() {
        let g = lift(&TestFunction::Indicator, 64).unwrap();
        let c = conjugate(&g);
        let m = g.m();
        for j in 1..m {
            assert_eq!(g.values()[j], g.values()[m - j]);
            assert!((c.values()[j] + c.values()[m - j]).abs() < 1e-15);
        }
    }
}
