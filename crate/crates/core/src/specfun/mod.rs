//! Confluent hypergeometric and Bessel functions in complex double precision.
//!
//! Every evaluation returns a [`SpecFunResult`] with an error estimate and
//! the method used. Integer-degenerate parameters are rejected rather than
//! limit-evaluated.

mod bessel;
pub mod gamma;
mod kummer;
mod whittaker;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::Special;
use crate::C64;

pub use bessel::{bessel_j, bessel_y};
pub use kummer::{kummer_m, kummer_u};
pub use whittaker::{whittaker_m, whittaker_w};

/// Arguments with `|z|` above this use large-argument expansions when they converge.
pub const ASYMPTOTIC_THRESHOLD: f64 = 30.0;
pub const MAX_TERMS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Series,
    Asymptotic,
    ConnectionFormula,
    Quadrature,
    Recurrence,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecFunResult {
    pub value: C64,
    pub err_estimate: f64,
    pub terms: usize,
    pub method: Method,
}

impl SpecFunResult {
    pub(crate) fn exact(value: C64) -> Self {
        SpecFunResult {
            value,
            err_estimate: 0.0,
            terms: 0,
            method: Method::Exact,
        }
    }

    /// Multiplies by a prefactor computed to working precision.
    pub(crate) fn scaled(self, factor: C64) -> Self {
        let value = self.value * factor;
        SpecFunResult {
            value,
            err_estimate: self.err_estimate * factor.norm() + f64::EPSILON * value.norm(),
            ..self
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("{function}: parameter {name} = {value} is at or too near a degenerate value ({detail})")]
    DegenerateParameter {
        function: &'static str,
        name: &'static str,
        value: C64,
        detail: &'static str,
    },
    #[error("{function}: no convergence after {terms} terms")]
    NonConvergence { function: &'static str, terms: usize },
    #[error("{function}: pole at z = {z}")]
    Pole { function: &'static str, z: C64 },
    #[error("{function}: argument {z} outside the supported region ({detail})")]
    Domain {
        function: &'static str,
        z: C64,
        detail: &'static str,
    },
    #[error("{function}: expected {expected} parameters, got {got}")]
    Arity {
        function: &'static str,
        expected: usize,
        got: usize,
    },
}

/// Dispatches a special-function node to its evaluator.
pub fn evaluate(kind: Special, params: &[C64], z: C64) -> Result<SpecFunResult, SpecFunError> {
    if params.len() != kind.arity() {
        return Err(SpecFunError::Arity {
            function: kind.name(),
            expected: kind.arity(),
            got: params.len(),
        });
    }
    match kind {
        Special::KummerM => kummer_m(params[0], params[1], z),
        Special::KummerU => kummer_u(params[0], params[1], z),
        Special::WhittakerM => whittaker_m(params[0], params[1], z),
        Special::WhittakerW => whittaker_w(params[0], params[1], z),
        Special::BesselJ => bessel_j(params[0], z),
        Special::BesselY => bessel_y(params[0], z),
    }
}
