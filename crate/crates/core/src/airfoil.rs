//! The airfoil equation `Hf = g` on (-1, 1), solved in coefficient space.
//!
//! Expanding `g = Σ b_j U_j`, the coefficient map gives `f sqrt(1-x^2) = c - Σ_{k>=1} b_{k-1} T_k`
//! for any real `c`: the solution set is a line through the particular solution along the
//! null direction `(1-x^2)^{-1/2}`.

use crate::cheb::{
    analyze_u, node_sines, synth, synth_on_grid, tail_diagnostic, weighted_norm_sq, Basis,
    ChebSeries, GridFunction, Weight, TAIL_WARN_RATIO,
};
use crate::error::{Error, Result};
use crate::fht::{fht_apply, FhtInput};

#[derive(Debug, Clone, PartialEq)]
pub struct AirfoilSolution {
    /// First-kind coefficients of `f sqrt(1-x^2)` with `a_0 = 0`.
    pub particular: ChebSeries,
    /// Weight of `(1-x^2)^{-1/2}` in the solution.
    pub null_coefficient: f64,
}

impl AirfoilSolution {
    /// Full coefficient vector of `f sqrt(1-x^2)`, with `a_0 = null_coefficient`.
    pub fn coefficients(&self) -> ChebSeries {
        let mut coeffs = self.particular.coeffs().to_vec();
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        coeffs[0] = self.null_coefficient;
        ChebSeries::new(Basis::FirstKind, coeffs).expect("finite coefficients")
    }

    /// `f(x)` for `x ∈ (-1, 1)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > -1.0 && x < 1.0) {
            return Err(Error::OutOfDomain {
                x,
                domain: "(-1, 1)",
            });
        }
        Ok(synth(&self.coefficients(), x)? / (1.0 - x * x).sqrt())
    }

    /// `f` on the `n`-point grid.
    pub fn sample(&self, n: usize) -> Result<GridFunction> {
        let weighted = synth_on_grid(&self.coefficients(), n)?;
        GridFunction::from_values(
            weighted
                .values()
                .iter()
                .zip(node_sines(n))
                .map(|(v, s)| v / s)
                .collect(),
        )
    }
}

/// Solve `Hf = g` with null coefficient `c`; `c = 0` gives the minimal-norm solution.
pub fn airfoil_solve(g: &GridFunction, c: f64) -> Result<AirfoilSolution> {
    if !c.is_finite() {
        return Err(Error::InvalidArgument(format!("null coefficient {c}")));
    }
    let b = analyze_u(g);
    tail_diagnostic(&b).check(TAIL_WARN_RATIO)?;
    // the top U coefficient is an alias on the n-point grid; drop it
    let usable = &b.coeffs()[..b.len().saturating_sub(1).max(1)];
    let mut a = Vec::with_capacity(usable.len() + 1);
    a.push(0.0);
    a.extend(usable.iter().map(|v| -v));
    Ok(AirfoilSolution {
        particular: ChebSeries::new(Basis::FirstKind, a)?,
        null_coefficient: c,
    })
}

/// Sqrt-weighted `L^2` norm of `H f - g` on the grid of `g`.
pub fn airfoil_residual(sol: &AirfoilSolution, g: &GridFunction) -> Result<f64> {
    let n = g.n();
    let coeffs = sol.coefficients();
    if coeffs.len() > n {
        return Err(Error::InvalidArgument(format!(
            "solution of degree {} does not fit a {n}-point grid",
            coeffs.degree()
        )));
    }
    let input = FhtInput::from_weighted_series(&coeffs, n)?.with_tail_tolerance(f64::INFINITY);
    let hf = fht_apply(&input)?;
    let diff = GridFunction::from_values(
        hf.values()
            .iter()
            .zip(g.values())
            .map(|(a, b)| a - b)
            .collect(),
    )?;
    Ok(weighted_norm_sq(&diff, Weight::Sqrt).sqrt())
}
