//! Orthogonal polynomials, their roots, and the root sets of repeated derivatives.
//!
//! Roots of `p_n` come from the Jacobi matrix of the recurrence (Sturm bisection); roots of
//! `p'` are found gap by gap as zeros of `p'/p = Σ 1/(x - x_k)`, so no polynomial
//! coefficients are ever formed.

mod derivative;
mod ks;
mod recurrence;
mod roots;

pub use derivative::{differentiate_rooted, iterate_derivatives, BISECTION_TOL, MERGE_GAP};
pub use ks::{arcsine_cdf, ks_to_arcsine, EmpiricalDist};
pub use recurrence::{recurrence_from_weight, Family, RecurrenceCoeffs};
pub use roots::{hermite_roots, roots_via_jacobi, RootSet};

/// Default Stieltjes quadrature size relative to the family size.
pub const STIELTJES_OVERSAMPLING: usize = 8;
