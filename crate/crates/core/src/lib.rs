//! Spectral finite Hilbert transform on (-1, 1).
//!
//! The transform acts on first-kind Chebyshev coefficients of `f sqrt(1-x^2)` ([`fht`]),
//! with a circle-lift cross-check ([`circle`]), airfoil-equation inversion ([`airfoil`]),
//! orthogonal-polynomial root experiments ([`rootlab`]) and a transport equation for root
//! densities under repeated differentiation ([`rootflow`]).

pub mod airfoil;
pub mod cheb;
pub mod circle;
pub mod cli;
pub mod error;
pub mod fht;
pub mod func;
pub mod quadrature;
pub mod rootflow;
pub mod rootlab;

pub use error::{Error, Result};
