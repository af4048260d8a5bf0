use std::collections::HashMap;
use std::sync::Mutex;

use thiserror::Error;

use crate::expr::{Bindings, EvalError, Expr, Symbol};
use crate::quad::{gauss_kronrod, QuadError};
use crate::C64;

/// Quadrature tolerance for `∫q`.
pub const QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinearOdeError {
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `w' = q(s) w`, `w(s0) = C`, solved as `C exp(∫_{s0}^{s} q)`.
///
/// Values are cached per abscissa, so repeated evaluation on a fixed grid
/// costs one quadrature per grid point.
pub struct LinearFirstOrder {
    q: Expr,
    var: Symbol,
    s0: f64,
    c: C64,
    bindings: Bindings<C64>,
    cache: Mutex<HashMap<u64, C64>>,
}

impl LinearFirstOrder {
    pub fn new(q: Expr, var: impl Into<Symbol>, s0: f64, c: C64, bindings: Bindings<C64>) -> Self {
        LinearFirstOrder {
            q,
            var: var.into(),
            s0,
            c,
            bindings,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn q_at(&self, s: f64) -> Result<C64, EvalError> {
        let mut b = self.bindings.clone();
        b.set(self.var, C64::new(s, 0.0));
        self.q.eval(&b)
    }

    pub fn eval(&self, s: f64) -> Result<C64, LinearOdeError> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(&s.to_bits()) {
            return Ok(*v);
        }
        // Evaluation errors inside the integrand surface as NaN and then as
        // a non-finite quadrature result.
        let f = |u: f64| self.q_at(u).unwrap_or(C64::new(f64::NAN, f64::NAN));
        let integral = if s == self.s0 {
            C64::new(0.0, 0.0)
        } else {
            gauss_kronrod(f, self.s0, s, QUAD_TOL)?.value
        };
        let v = self.c * integral.exp();
        self.cache.lock().expect("cache lock").insert(s.to_bits(), v);
        Ok(v)
    }

    /// `(w, w', w'')` at `s`, with `w' = q w` and `w'' = (q' + q²) w`.
    pub fn jet(&self, s: f64, dq: &Expr) -> Result<[C64; 3], LinearOdeError> {
        let w = self.eval(s)?;
        let q = self.q_at(s)?;
        let mut b = self.bindings.clone();
        b.set(self.var, C64::new(s, 0.0));
        let dqv = dq.eval(&b)?;
        Ok([w, q * w, (dqv + q * q) * w])
    }
}

/// Convenience constructor mirroring the catalog's use.
pub fn solve_linear_first_order(q: Expr, var: impl Into<Symbol>, s0: f64, c: C64, bindings: Bindings<C64>) -> LinearFirstOrder {
    LinearFirstOrder::new(q, var, s0, c, bindings)
}
