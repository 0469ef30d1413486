use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::roots::RootSet;

/// CDF of the arcsine law `π^{-1} (1-x^2)^{-1/2} dx` on [-1, 1].
pub fn arcsine_cdf(x: f64) -> f64 {
    0.5 + x.clamp(-1.0, 1.0).asin() / PI
}

/// Empirical distribution of a finite sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDist {
    sorted: Vec<f64>,
}

impl EmpiricalDist {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("empty sample".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|s| *s <= x) as f64 / self.sorted.len() as f64
    }

    /// `sup_x |F_emp(x) - F(x)|` for a continuous `F`, evaluated at the jumps.
    pub fn ks_against(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Kolmogorov–Smirnov distance between the roots and the arcsine law.
pub fn ks_to_arcsine(rs: &RootSet) -> Result<f64> {
    if let Some(&r) = rs.roots().iter().find(|r| r.abs() > 1.0) {
        return Err(Error::OutOfSupport {
            value: r,
            lo: -1.0,
            hi: 1.0,
        });
    }
    Ok(EmpiricalDist::new(rs.roots().to_vec())?.ks_against(arcsine_cdf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_root_at_center() {
        let rs = RootSet::new(vec![0.0]).unwrap();
        assert!((ks_to_arcsine(&rs).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_nodes_hit_midpoints() {
        for n in [3, 10, 57] {
            let roots: Vec<f64> = (0..n)
                .map(|j| ((2 * j + 1) as f64 * PI / (2 * n) as f64).cos())
                .collect();
            let ks = ks_to_arcsine(&RootSet::new(roots).unwrap()).unwrap();
            assert!((ks - 0.5 / n as f64).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn rejects_out_of_support() {
        let rs = RootSet::new(vec![0.0, 1.5]).unwrap();
        assert!(matches!(
            ks_to_arcsine(&rs),
            Err(Error::OutOfSupport { .. })
        ));
    }

    #[test]
    fn empirical_cdf_steps() {
        let e = EmpiricalDist::new(vec![0.5, -0.5, 0.0, 0.0]).unwrap();
        assert_eq!(e.cdf(-1.0), 0.0);
        assert_eq!(e.cdf(0.0), 0.75);
        assert_eq!(e.cdf(2.0), 1.0);
        // uniform on [-1, 1] against itself at the quartiles
        let ks = e.ks_against(|x| 0.5 * (x + 1.0));
        assert!((ks - 0.25).abs() < 1e-15);
    }
}
