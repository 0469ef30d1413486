//! Functions on (-1, 1) and the built-in catalog of test functions.

use rand::Rng;

use crate::cheb::{Basis, ChebSeries};

/// A real function on (-1, 1) that may carry an integrable `(1-x^2)^{-1/2}` endpoint
/// singularity.
pub trait RealFn {
    fn eval(&self, x: f64) -> f64;

    /// `f(x) sqrt(1-x^2)`, which stays finite at `±1` for every function in the
    /// `f (1-x^2)^{1/4} ∈ L^2` class used here. Override when the product is known
    /// in closed form.
    fn weighted(&self, x: f64) -> f64 {
        self.eval(x) * (1.0 - x * x).max(0.0).sqrt()
    }
}

impl<F: Fn(f64) -> f64> RealFn for F {
    fn eval(&self, x: f64) -> f64 {
        self(x)
    }
}

/// `f(x) = h(x) / sqrt(1-x^2)` given `h`.
#[derive(Debug, Clone, Copy)]
pub struct OverSqrtWeight<H>(pub H);

impl<H: Fn(f64) -> f64> RealFn for OverSqrtWeight<H> {
    fn eval(&self, x: f64) -> f64 {
        (self.0)(x) / (1.0 - x * x).sqrt()
    }

    fn weighted(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// Smooth compactly supported bump `exp(-1/(1-s^2))`, `s = 2(x-center)/width`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Bump {
    pub center: f64,
    /// Full length of the support.
    pub width: f64,
}

impl Bump {
    pub fn new(center: f64, width: f64) -> Self {
        Self { center, width }
    }

    fn scaled(&self, x: f64) -> f64 {
        2.0 * (x - self.center) / self.width
    }

    pub fn value(&self, x: f64) -> f64 {
        let s = self.scaled(x);
        if s.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - s * s)).exp()
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let s = self.scaled(x);
        if s.abs() >= 1.0 {
            0.0
        } else {
            let q = 1.0 - s * s;
            (-1.0 / q).exp() * (-2.0 * s / (q * q)) * (2.0 / self.width)
        }
    }

    /// Whether the support lies inside (-1, 1).
    pub fn is_interior(&self) -> bool {
        self.width > 0.0
            && self.center - 0.5 * self.width >= -1.0
            && self.center + 0.5 * self.width <= 1.0
    }
}

impl RealFn for Bump {
    fn eval(&self, x: f64) -> f64 {
        self.value(x)
    }
}

/// Built-in test functions.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// `c / sqrt(1-x^2)`, the null direction of the transform.
    NullFamily {
        c: f64,
    },
    /// `T_k(x) / sqrt(1-x^2)`.
    TkOverWeight {
        k: usize,
    },
    /// The indicator of (-1, 1), i.e. `f ≡ 1`.
    Indicator,
    Bump(Bump),
}

impl RealFn for TestFunction {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Bump(b) => b.value(x),
            Self::Indicator => 1.0,
            _ => self.weighted(x) / (1.0 - x * x).sqrt(),
        }
    }

    fn weighted(&self, x: f64) -> f64 {
        match self {
            Self::NullFamily { c } => *c,
            Self::TkOverWeight { k } => ((*k as f64) * x.clamp(-1.0, 1.0).acos()).cos(),
            Self::Indicator => (1.0 - x * x).max(0.0).sqrt(),
            Self::Bump(b) => b.value(x) * (1.0 - x * x).max(0.0).sqrt(),
        }
    }
}

impl TestFunction {
    /// Exact first-kind coefficients of `f sqrt(1-x^2)` when they are finite in number.
    pub fn weighted_series(&self) -> Option<ChebSeries> {
        match self {
            Self::NullFamily { c } => ChebSeries::new(Basis::FirstKind, vec![*c]).ok(),
            Self::TkOverWeight { k } => Some(ChebSeries::unit(Basis::FirstKind, *k, k + 1)),
            _ => None,
        }
    }
}

/// `f = h / sqrt(1-x^2)` with `h(x) = Σ a_k T_k(x) + A e^{λx} sin(μx + φ)`.
///
/// `h` is entire, so both the Chebyshev route and the circle lift resolve `f` to machine
/// precision on modest grids.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SmoothTrial {
    pub poly: Vec<f64>,
    pub amplitude: f64,
    pub rate: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl SmoothTrial {
    /// Random member with polynomial part of degree `< poly_len`, coefficients decaying like `0.8^k`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, poly_len: usize) -> Self {
        let poly = (0..poly_len)
            .map(|k| rng.gen_range(-1.0..1.0) * 0.8f64.powi(k as i32))
            .collect();
        Self {
            poly,
            amplitude: rng.gen_range(-1.0..1.0),
            rate: rng.gen_range(-2.0..2.0),
            frequency: rng.gen_range(0.0..6.0),
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        }
    }

    fn h(&self, x: f64) -> f64 {
        let x = x.clamp(-1.0, 1.0);
        let t = x.acos();
        let p: f64 = self
            .poly
            .iter()
            .enumerate()
            .map(|(k, a)| a * (k as f64 * t).cos())
            .sum();
        p + self.amplitude * (self.rate * x).exp() * (self.frequency * x + self.phase).sin()
    }
}

impl RealFn for SmoothTrial {
    fn eval(&self, x: f64) -> f64 {
        self.h(x) / (1.0 - x * x).sqrt()
    }

    fn weighted(&self, x: f64) -> f64 {
        self.h(x)
    }
}
