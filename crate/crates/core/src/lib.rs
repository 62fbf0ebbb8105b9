//! Numerical laboratory for trigonometric partial sums on expanding
//! intervals `[-l, l]`.
//!
//! The crate provides, bottom-up:
//!
//! - a small expression DSL for the functions under study ([`expr`],
//!   [`parse`], [`function`]);
//! - oscillation-aware adaptive quadrature ([`quadrature`]);
//! - the expanding-interval Fourier machinery: coefficients, partial sums
//!   by two independent routes, the Dirichlet kernel, and the error
//!   representation ([`dirichlet`]);
//! - diagnostics for a Lebesgue-style pointwise convergence test: the
//!   integrated symmetric difference, its slope profile, the translation
//!   modulus, and the resulting bound ([`lebesgue`]);
//! - expanding-interval tail-average diagnostics ([`class_e`]);
//! - sweep plans and convergence traces ([`sweep`]), plus a fixed function
//!   corpus for randomized checks ([`corpus`]).

// Validation deliberately writes `!(x > 0.0)` instead of `x <= 0.0`: the
// negated form is false for NaN, so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod class_e;
pub mod corpus;
pub mod dirichlet;
pub mod error;
pub mod expr;
pub mod function;
pub mod lebesgue;
pub mod parse;
pub mod quadrature;
pub mod sweep;

pub use error::{Error, Result};
pub use expr::Expr;
pub use function::{phi, FunctionSpec, SymmetricDifference};
pub use parse::ParseError;
pub use quadrature::{IntegralResult, QuadratureConfig};
