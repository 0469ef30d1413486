use rayon::prelude::*;

use crate::error::{Error, Result};

use super::recurrence::{Family, RecurrenceCoeffs};

/// Real roots in nondecreasing order.
///
/// Roots are strictly increasing for every set produced from a Jacobi matrix; repeated
/// values only appear when a caller supplies them or when merged near-coincident roots
/// are differentiated.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    roots: Vec<f64>,
}

impl RootSet {
    pub fn new(mut roots: Vec<f64>) -> Result<Self> {
        if let Some(r) = roots.iter().find(|r| !r.is_finite()) {
            return Err(Error::InvalidInput(format!("root {r} is not finite")));
        }
        roots.sort_by(f64::total_cmp);
        Ok(Self { roots })
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn into_roots(self) -> Vec<f64> {
        self.roots
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.roots.iter().map(|r| r * factor).collect())
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.roots.windows(2).all(|w| w[0] < w[1])
    }

    /// `old[k] < new[k] < old[k+1]` for every `k`.
    pub fn strictly_interlaces(&self, derived: &RootSet) -> bool {
        derived.degree() + 1 == self.degree()
            && derived
                .roots
                .iter()
                .enumerate()
                .all(|(k, r)| self.roots[k] < *r && *r < self.roots[k + 1])
    }

    /// Largest `|r_k + r_{n-1-k}|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.degree();
        (0..n)
            .map(|k| (self.roots[k] + self.roots[n - 1 - k]).abs())
            .fold(0.0, f64::max)
    }
}

/// Number of eigenvalues of the Jacobi matrix strictly below `x` (Sturm count via LDLᵀ pivots).
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    const PIVMIN: f64 = 1e-300;
    let mut count = 0;
    let mut d = alpha[0] - x;
    for k in 0..alpha.len() {
        if k > 0 {
            d = alpha[k] - x - beta[k] / d;
        }
        if d.abs() < PIVMIN {
            d = -PIVMIN;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

const MAX_BISECTION_STEPS: usize = 200;

/// Roots of `p_n` as eigenvalues of the `n × n` Jacobi matrix, by Sturm-sequence bisection.
///
/// Each root is bracketed to about `2 ε max(|x|, s)` where `s` bounds the spectrum.
pub fn roots_via_jacobi(rec: &RecurrenceCoeffs, n: usize) -> Result<RootSet> {
    if n == 0 || n > rec.len() {
        return Err(Error::InvalidArgument(format!(
            "degree {n} outside 1..={}",
            rec.len()
        )));
    }
    let alpha = &rec.alpha[..n];
    let beta = &rec.beta[..n];
    let off: Vec<f64> = (0..=n)
        .map(|k| {
            if k == 0 || k == n {
                0.0
            } else {
                beta[k].sqrt()
            }
        })
        .collect();
    // Gershgorin interval
    let (lo, hi) = (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), k| {
        let r = off[k] + off[k + 1];
        (lo.min(alpha[k] - r), hi.max(alpha[k] + r))
    });
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pad = 1e-14 * scale;
    let (lo, hi) = (lo - pad, hi + pad);

    let find = |k: usize| -> Result<f64> {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (a + b);
            if b - a <= 2.0 * f64::EPSILON * mid.abs().max(scale) || mid == a || mid == b {
                return Ok(mid);
            }
            if sturm_count(alpha, beta, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        Err(Error::NumericalFailure(format!(
            "bisection for eigenvalue {k} stalled in [{a:e}, {b:e}]"
        )))
    };
    let roots: Result<Vec<f64>> = if n >= 64 {
        (0..n).into_par_iter().map(find).collect()
    } else {
        (0..n).map(find).collect()
    };
    RootSet::new(roots?)
}

/// Roots of the physicists' Hermite polynomial `H_n`, scaled by `1/sqrt(2n)` into `[-1, 1]`.
pub fn hermite_roots(n: usize) -> Result<RootSet> {
    let rec = Family::Hermite.recurrence(n)?;
    roots_via_jacobi(&rec, n)?.scaled(1.0 / (2.0 * n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn chebyshev_roots_closed_form() {
        let rec = Family::Chebyshev.recurrence(4).unwrap();
        let rs = roots_via_jacobi(&rec, 4).unwrap();
        let mut want: Vec<f64> = (1..=4)
            .map(|j| ((2 * j - 1) as f64 * PI / 8.0).cos())
            .collect();
        want.sort_by(f64::total_cmp);
        for (r, w) in rs.roots().iter().zip(&want) {
            assert!((r - w).abs() < 1e-15);
            // T_4 vanishes there (Clenshaw-free check through the angle)
            assert!((4.0 * r.acos()).cos().abs() < 1e-14);
        }
    }

    #[test]
    fn legendre_small_degrees() {
        let rec = Family::Legendre.recurrence(4).unwrap();
        assert!(roots_via_jacobi(&rec, 1).unwrap().roots()[0].abs() < 1e-15);
        let r2 = roots_via_jacobi(&rec, 2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r2.roots()[0] + s).abs() < 1e-15 && (r2.roots()[1] - s).abs() < 1e-15);
        assert!(roots_via_jacobi(&rec, 5).is_err());
        assert!(roots_via_jacobi(&rec, 0).is_err());
    }

    #[test]
    fn roots_have_small_newton_corrections() {
        for fam in [Family::Legendre, Family::Jacobi { a: 1.5, b: -0.3 }] {
            let n = 120;
            let rec = fam.recurrence(n).unwrap();
            let rs = roots_via_jacobi(&rec, n).unwrap();
            assert!(rs.is_strictly_increasing());
            for &r in rs.roots() {
                assert!(r > -1.0 && r < 1.0);
                let (p, dp) = rec.monic_value(n, r);
                assert!((p / dp).abs() < 1e-13, "{fam:?} at {r}");
            }
        }
    }

    #[test]
    fn hermite_examples() {
        assert!(hermite_roots(1).unwrap().roots()[0].abs() < 1e-15);
        let rec = Family::Hermite.recurrence(2).unwrap();
        let r = roots_via_jacobi(&rec, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.roots()[0] + s).abs() < 1e-15 && (r.roots()[1] - s).abs() < 1e-15);
        let big = hermite_roots(200).unwrap();
        assert!(big.roots().iter().all(|r| r.abs() < 1.0));
        let median = 0.5 * (big.roots()[99] + big.roots()[100]);
        assert!(median.abs() < 1e-14);
    }
}
