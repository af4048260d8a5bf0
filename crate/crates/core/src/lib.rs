//! Symmetry verification toolkit for the Black-Scholes-Merton equation with
//! stochastic volatility.
//!
//! The crate is layered bottom-up:
//!
//! * [`expr`]: symbolic expressions with exact rational constants, exact
//!   differentiation, evaluation in any [`Scalar`] and randomised zero tests;
//! * [`specfun`]: Kummer, Whittaker and Bessel functions for complex arguments;
//! * [`model`]: the pricing equation for constant and hyperbolic volatility;
//! * [`jet`]: second prolongation of point vector fields and the symmetry check;
//! * [`lie`]: generator catalogues, commutators and bracket-table verification;
//! * [`solutions`]: the invariant-solution catalogue with three-tier checks;
//! * [`fd`]: an ADI finite-difference solver used for manufactured-solution
//!   convergence studies.

// NaN must fail range and tolerance checks, so those are written as `!(a < b)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod expr;
pub mod fd;
pub mod jet;
pub mod lie;
pub mod model;
pub mod quad;
pub mod report;
pub mod scalar;
pub mod solutions;
pub mod specfun;

pub use expr::{
    is_probably_zero, Bindings, EvalError, Expr, ExprError, JetIndex, Param, SampleBox, Special, Symbol, Var, ZeroTest, ZeroTestOptions,
};
pub use model::{build_equation, CaseTag, Equation, ModelParams, VolCase};
pub use scalar::Scalar;

/// Complex double, the default evaluation type.
pub type C64 = num_complex::Complex64;
/// Arbitrary-precision rational, used for exact constants and exact evaluation.
pub type Rational = num_rational::BigRational;
