use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::cheb::{cheb_nodes, node_sines};
use crate::error::{Error, Result};

/// Monic three-term recurrence `p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}`.
///
/// `beta[0]` holds the total mass of the weight; `beta[k]` for `k >= 1` are the squared
/// off-diagonal entries of the Jacobi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceCoeffs {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub mass: f64,
}

impl RecurrenceCoeffs {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if alpha.len() != beta.len() || alpha.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "recurrence needs matching non-empty alpha/beta, got {} and {}",
                alpha.len(),
                beta.len()
            )));
        }
        if let Some(k) = beta.iter().position(|b| !(*b > 0.0) || !b.is_finite()) {
            return Err(Error::DegenerateWeight { k, beta: beta[k] });
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("non-finite alpha".into()));
        }
        let mass = beta[0];
        Ok(Self { alpha, beta, mass })
    }

    /// Number of recurrence pairs; polynomials up to this degree are determined.
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Monic `p_n(x)` and `p_n'(x)` for `n <= len`.
    pub fn monic_value(&self, n: usize, x: f64) -> (f64, f64) {
        let (mut p_prev, mut p) = (0.0, 1.0);
        let (mut d_prev, mut d) = (0.0, 0.0);
        for k in 0..n {
            let b = if k > 0 { self.beta[k] } else { 0.0 };
            let next = (x - self.alpha[k]) * p - b * p_prev;
            let next_d = p + (x - self.alpha[k]) * d - b * d_prev;
            p_prev = p;
            p = next;
            d_prev = d;
            d = next_d;
        }
        (p, d)
    }
}

/// Discretized Stieltjes procedure on a `q`-point Gauss–Chebyshev grid with `w` folded in.
///
/// The discrete measure has nodes `x_i` and weights `(π/q) w(x_i) sqrt(1-x_i^2)`.
pub fn recurrence_from_weight(
    w: impl Fn(f64) -> f64,
    n: usize,
    q: usize,
) -> Result<RecurrenceCoeffs> {
    if n == 0 {
        return Err(Error::InvalidArgument("family size must be >= 1".into()));
    }
    if q < 4 * n {
        return Err(Error::InvalidArgument(format!(
            "quadrature size {q} below 4n = {}",
            4 * n
        )));
    }
    let x = cheb_nodes(q)?;
    let lambda: Vec<f64> = x
        .iter()
        .zip(node_sines(q))
        .map(|(&xi, s)| PI / q as f64 * w(xi) * s)
        .collect();
    if let Some(i) = lambda.iter().position(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::InvalidInput(format!(
            "weight is negative or not finite at x = {}",
            x[i]
        )));
    }
    let mass: f64 = lambda.iter().sum();
    if !(mass > 0.0) {
        return Err(Error::DegenerateWeight { k: 0, beta: mass });
    }
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        lambda
            .iter()
            .zip(a.iter().zip(b))
            .map(|(l, (u, v))| l * u * v)
            .sum()
    };

    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    beta.push(mass);
    let q0 = vec![1.0 / mass.sqrt(); q];
    let mut q_prev = vec![0.0; q];
    let mut q_cur = q0.clone();
    let mut q_prev2: Vec<f64>;
    for k in 0..n {
        let a = lambda
            .iter()
            .zip(&x)
            .zip(&q_cur)
            .map(|((l, xi), v)| l * xi * v * v)
            .sum::<f64>();
        alpha.push(a);
        if k + 1 == n {
            break;
        }
        let sb = beta[k].sqrt();
        let mut r: Vec<f64> = x
            .iter()
            .zip(q_cur.iter().zip(&q_prev))
            .map(|(xi, (c, p))| (xi - a) * c - if k > 0 { sb * p } else { 0.0 })
            .collect();
        let b = dot(&r, &r);
        if !(b > 1e-24) {
            return Err(Error::DegenerateWeight { k: k + 1, beta: b });
        }
        let sb_next = b.sqrt();
        r.iter_mut().for_each(|v| *v /= sb_next);
        beta.push(b);
        q_prev2 = std::mem::replace(&mut q_prev, std::mem::replace(&mut q_cur, r));
        // orthogonality against the three most recent vectors and the constant
        let checks = [
            (dot(&q_cur, &q_cur) - 1.0).abs(),
            dot(&q_cur, &q_prev).abs(),
            if k > 0 {
                dot(&q_cur, &q_prev2).abs()
            } else {
                0.0
            },
            dot(&q_cur, &q0).abs(),
        ];
        let worst = checks.iter().cloned().fold(0.0, f64::max);
        if worst > 1e-8 {
            return Err(Error::NumericalFailure(format!(
                "Stieltjes orthogonality lost at degree {}: {worst:.2e}",
                k + 1
            )));
        }
    }
    RecurrenceCoeffs::new(alpha, beta)
}

/// Classical families with closed-form recurrences.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum Family {
    /// Weight `(1-x^2)^{-1/2}` on (-1, 1).
    Chebyshev,
    /// Weight `1` on (-1, 1).
    Legendre,
    /// Weight `(1-x)^a (1+x)^b` on (-1, 1), `a, b > -1`.
    Jacobi { a: f64, b: f64 },
    /// Weight `exp(-x^2)` on the real line (physicists' normalization).
    Hermite,
}

impl Family {
    /// First `n` recurrence pairs.
    pub fn recurrence(&self, n: usize) -> Result<RecurrenceCoeffs> {
        if n == 0 {
            return Err(Error::InvalidArgument("family size must be >= 1".into()));
        }
        match *self {
            Family::Chebyshev => {
                let beta = (0..n)
                    .map(|k| match k {
                        0 => PI,
                        1 => 0.5,
                        _ => 0.25,
                    })
                    .collect();
                RecurrenceCoeffs::new(vec![0.0; n], beta)
            }
            Family::Legendre => {
                let beta = (0..n)
                    .map(|k| {
                        if k == 0 {
                            2.0
                        } else {
                            let k2 = (k * k) as f64;
                            k2 / (4.0 * k2 - 1.0)
                        }
                    })
                    .collect();
                RecurrenceCoeffs::new(vec![0.0; n], beta)
            }
            Family::Jacobi { a, b } => jacobi_recurrence(a, b, n),
            Family::Hermite => {
                let beta = (0..n)
                    .map(|k| if k == 0 { PI.sqrt() } else { k as f64 / 2.0 })
                    .collect();
                RecurrenceCoeffs::new(vec![0.0; n], beta)
            }
        }
    }

    /// The weight function on (-1, 1), for the discretized procedure.
    pub fn weight(&self) -> Option<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
        match *self {
            Family::Chebyshev => Some(Box::new(|x: f64| 1.0 / (1.0 - x * x).sqrt())),
            Family::Legendre => Some(Box::new(|_| 1.0)),
            Family::Jacobi { a, b } => Some(Box::new(move |x: f64| {
                (1.0 - x).powf(a) * (1.0 + x).powf(b)
            })),
            Family::Hermite => None,
        }
    }
}

fn jacobi_recurrence(a: f64, b: f64, n: usize) -> Result<RecurrenceCoeffs> {
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::DegenerateWeight {
            k: 0,
            beta: f64::INFINITY,
        });
    }
    let ab = a + b;
    let mass =
        ((ab + 1.0) * 2f64.ln() + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(ab + 2.0)).exp();
    let alpha = (0..n)
        .map(|k| {
            if k == 0 {
                (b - a) / (ab + 2.0)
            } else {
                let s = 2.0 * k as f64 + ab;
                (b * b - a * a) / (s * (s + 2.0))
            }
        })
        .collect();
    let beta = (0..n)
        .map(|k| match k {
            0 => mass,
            1 => 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab)),
            _ => {
                let kf = k as f64;
                let s = 2.0 * kf + ab;
                4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
            }
        })
        .collect();
    RecurrenceCoeffs::new(alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Oracle: Cholesky factor R of the Hankel moment matrix; then
    // alpha_k = r_{k,k+1}/r_{k,k} - r_{k-1,k}/r_{k-1,k-1}, beta_k = (r_{k,k}/r_{k-1,k-1})^2.
    fn moment_oracle(moments: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
        let m = n + 1;
        let h = |i: usize, j: usize| moments[i + j];
        let mut r = vec![vec![0.0; m]; m];
        for i in 0..m {
            let s: f64 = (0..i).map(|k| r[k][i] * r[k][i]).sum();
            r[i][i] = (h(i, i) - s).sqrt();
            for j in i + 1..m {
                let s: f64 = (0..i).map(|k| r[k][i] * r[k][j]).sum();
                r[i][j] = (h(i, j) - s) / r[i][i];
            }
        }
        let mut alpha = vec![r[0][1] / r[0][0]];
        let mut beta = vec![moments[0]];
        for k in 1..n {
            alpha.push(r[k][k + 1] / r[k][k] - r[k - 1][k] / r[k - 1][k - 1]);
            beta.push((r[k][k] / r[k - 1][k - 1]).powi(2));
        }
        (alpha, beta)
    }

    fn chebyshev_moments(count: usize) -> Vec<f64> {
        (0..count)
            .map(|j| {
                if j % 2 == 1 {
                    0.0
                } else {
                    (1..=j / 2).fold(PI, |acc, i| acc * (2 * i - 1) as f64 / (2 * i) as f64)
                }
            })
            .collect()
    }

    fn legendre_moments(count: usize) -> Vec<f64> {
        (0..count)
            .map(|j| {
                if j % 2 == 1 {
                    0.0
                } else {
                    2.0 / (j + 1) as f64
                }
            })
            .collect()
    }

    #[test]
    fn stieltjes_chebyshev_matches_moment_oracle() {
        let n = 8;
        let (oa, ob) = moment_oracle(&chebyshev_moments(2 * n + 2), n);
        let rec = recurrence_from_weight(|x| 1.0 / (1.0 - x * x).sqrt(), n, 8 * n).unwrap();
        for k in 0..n {
            assert!(rec.alpha[k].abs() < 1e-14);
            assert!(oa[k].abs() < 1e-10);
            assert!((rec.beta[k] - ob[k]).abs() < 1e-9, "k = {k}");
        }
        assert!((rec.beta[1] - 0.5).abs() < 1e-14);
        assert!(rec.beta[2..].iter().all(|b| (b - 0.25).abs() < 1e-13));
    }

    #[test]
    fn stieltjes_legendre_matches_moment_oracle() {
        let n = 10;
        let (_, ob) = moment_oracle(&legendre_moments(2 * n + 2), n);
        // Legendre is not smooth under the Chebyshev substitution: O(q^-2) convergence
        let rec = recurrence_from_weight(|_| 1.0, n, 20_000).unwrap();
        for k in 1..n {
            let closed = (k * k) as f64 / (4.0 * (k * k) as f64 - 1.0);
            assert!((ob[k] - closed).abs() < 1e-9, "oracle k = {k}");
            assert!(
                (rec.beta[k] - closed).abs() < 1e-8,
                "k = {k}: {}",
                rec.beta[k]
            );
        }
        assert!(rec.alpha.iter().all(|a| a.abs() < 1e-14));
    }

    #[test]
    fn even_weight_has_zero_alpha() {
        let rec = recurrence_from_weight(|x| (1.0 - x * x).powf(1.3) + x.powi(4), 12, 96).unwrap();
        assert!(rec.alpha.iter().all(|a| a.abs() < 1e-15), "{:?}", rec.alpha);
    }

    #[test]
    fn closed_forms_match_stieltjes() {
        let fam = Family::Jacobi { a: 0.5, b: 1.5 };
        let closed = fam.recurrence(6).unwrap();
        let w = fam.weight().unwrap();
        let disc = recurrence_from_weight(w, 6, 40_000).unwrap();
        for k in 0..6 {
            assert!((closed.alpha[k] - disc.alpha[k]).abs() < 1e-7, "alpha {k}");
            assert!((closed.beta[k] - disc.beta[k]).abs() < 1e-7, "beta {k}");
        }
        let cheb = Family::Jacobi { a: -0.5, b: -0.5 }.recurrence(5).unwrap();
        let exact = Family::Chebyshev.recurrence(5).unwrap();
        for k in 0..5 {
            assert!((cheb.beta[k] - exact.beta[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_weights_are_rejected() {
        // mass on a handful of nodes only
        let w = |x: f64| if (x - 0.3).abs() < 0.01 { 1.0 } else { 0.0 };
        assert!(matches!(
            recurrence_from_weight(w, 10, 400),
            Err(Error::DegenerateWeight { .. })
        ));
        assert!(recurrence_from_weight(|_| 1.0, 10, 20).is_err());
        assert!(Family::Jacobi { a: -1.0, b: 0.0 }.recurrence(4).is_err());
    }
}
