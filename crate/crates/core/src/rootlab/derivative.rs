use rayon::prelude::*;

use crate::error::{Error, Result};

use super::roots::RootSet;

/// Roots closer than this are merged into one root with multiplicity.
pub const MERGE_GAP: f64 = 1e-12;

/// Absolute bracket width at which the interval search stops.
pub const BISECTION_TOL: f64 = 1e-13;

const MAX_ITERATIONS: usize = 200;

const PARALLEL_DEGREE: usize = 256;

/// `(location, multiplicity)` after merging near-coincident roots.
fn merge_clusters(roots: &[f64]) -> Vec<(f64, usize)> {
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=roots.len() {
        if i == roots.len() || roots[i] - roots[i - 1] >= MERGE_GAP {
            let group = &roots[start..i];
            let mean = group.iter().sum::<f64>() / group.len() as f64;
            clusters.push((mean, group.len()));
            start = i;
        }
    }
    clusters
}

/// `Σ m_j/(x - r_j)` and its derivative.
fn log_derivative(clusters: &[(f64, usize)], x: f64) -> (f64, f64) {
    clusters.iter().fold((0.0, 0.0), |(s, ds), &(r, m)| {
        let inv = 1.0 / (x - r);
        let mf = m as f64;
        (s + mf * inv, ds - mf * inv * inv)
    })
}

/// Zero of the logarithmic derivative between two consecutive distinct roots.
///
/// The sum decreases from `+∞` to `-∞` across the gap, so the sign of each evaluation
/// shrinks the bracket; Newton steps are taken when they stay inside it.
fn critical_point(clusters: &[(f64, usize)], lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut x = 0.5 * (a + b);
    for _ in 0..MAX_ITERATIONS {
        let (s, ds) = log_derivative(clusters, x);
        if s == 0.0 {
            return Ok(x);
        }
        if s > 0.0 {
            a = x;
        } else {
            b = x;
        }
        let newton = x - s / ds;
        let step_ok = newton > a && newton < b;
        if step_ok && (newton - x).abs() <= 0.25 * BISECTION_TOL {
            return Ok(newton);
        }
        if b - a <= BISECTION_TOL {
            return Ok(0.5 * (a + b));
        }
        x = if step_ok { newton } else { 0.5 * (a + b) };
    }
    Err(Error::NumericalFailure(format!(
        "no critical point found in ({lo:e}, {hi:e})"
    )))
}

/// Roots of `p'` from the roots of a real-rooted `p`.
pub fn differentiate_rooted(rs: &RootSet) -> Result<RootSet> {
    if rs.degree() < 2 {
        return Err(Error::InvalidArgument(format!(
            "differentiation needs degree >= 2, got {}",
            rs.degree()
        )));
    }
    let clusters = merge_clusters(rs.roots());
    let mut out: Vec<f64> = clusters
        .iter()
        .flat_map(|&(r, m)| std::iter::repeat_n(r, m - 1))
        .collect();
    let gaps: Vec<(f64, f64)> = clusters.windows(2).map(|w| (w[0].0, w[1].0)).collect();
    let found: Result<Vec<f64>> = if rs.degree() >= PARALLEL_DEGREE {
        gaps.par_iter()
            .map(|&(lo, hi)| critical_point(&clusters, lo, hi))
            .collect()
    } else {
        gaps.iter()
            .map(|&(lo, hi)| critical_point(&clusters, lo, hi))
            .collect()
    };
    out.extend(found?);
    RootSet::new(out)
}

/// Apply [`differentiate_rooted`] `m` times.
pub fn iterate_derivatives(rs: &RootSet, m: usize) -> Result<RootSet> {
    if m >= rs.degree() {
        return Err(Error::InvalidArgument(format!(
            "{m} derivatives of a degree-{} polynomial leave no roots",
            rs.degree()
        )));
    }
    let mut cur = rs.clone();
    for _ in 0..m {
        cur = differentiate_rooted(&cur)?;
    }
    Ok(cur)
}
