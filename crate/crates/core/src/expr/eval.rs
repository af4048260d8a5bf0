use std::collections::HashMap;

use num_traits::{ToPrimitive, Zero};

use super::{EvalError, Expr, Node, Symbol};
use crate::scalar::Scalar;

/// Numeric values for the free symbols of an expression.
#[derive(Debug, Clone, Default)]
pub struct Bindings<S> {
    map: HashMap<Symbol, S>,
}

impl<S: Scalar> Bindings<S> {
    pub fn new() -> Self {
        Bindings { map: HashMap::new() }
    }

    pub fn set(&mut self, s: impl Into<Symbol>, v: S) -> &mut Self {
        self.map.insert(s.into(), v);
        self
    }

    pub fn with(mut self, s: impl Into<Symbol>, v: S) -> Self {
        self.set(s, v);
        self
    }

    pub fn get(&self, s: Symbol) -> Option<&S> {
        self.map.get(&s)
    }

    pub fn extend_from(&mut self, other: &Bindings<S>) {
        for (k, v) in &other.map {
            self.map.insert(*k, v.clone());
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &S)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl<S: Scalar> FromIterator<(Symbol, S)> for Bindings<S> {
    fn from_iter<I: IntoIterator<Item = (Symbol, S)>>(iter: I) -> Self {
        Bindings {
            map: iter.into_iter().collect(),
        }
    }
}

/// Value of an expression together with the magnitude of its largest
/// additive constituent, the scale against which cancellation is judged.
#[derive(Debug, Clone)]
pub struct EvalOutcome<S> {
    pub value: S,
    pub scale: f64,
}

impl Expr {
    pub fn eval<S: Scalar>(&self, b: &Bindings<S>) -> Result<S, EvalError> {
        self.eval_scaled(b).map(|o| o.value)
    }

    /// Evaluates and tracks the term scale: sums take the largest child
    /// scale, products multiply scales, everything else uses its own value.
    pub fn eval_scaled<S: Scalar>(&self, b: &Bindings<S>) -> Result<EvalOutcome<S>, EvalError> {
        let mut memo = HashMap::new();
        let (value, scale) = eval_node(self, b, &mut memo)?;
        Ok(EvalOutcome { value, scale })
    }
}

fn eval_node<S: Scalar>(e: &Expr, b: &Bindings<S>, memo: &mut HashMap<usize, (S, f64)>) -> Result<(S, f64), EvalError> {
    if let Some(hit) = memo.get(&e.ptr_id()) {
        return Ok(hit.clone());
    }
    let out = match e.node() {
        Node::Const(q) => {
            let v = S::from_rational(q);
            let m = v.magnitude();
            (v, m)
        }
        Node::Sym(s) => {
            let v = b.get(*s).cloned().ok_or(EvalError::Unbound(*s))?;
            let m = v.magnitude();
            (v, m)
        }
        Node::Sum(terms) => {
            let mut acc = S::zero();
            let mut scale = 0.0f64;
            for t in terms {
                let (v, m) = eval_node(t, b, memo)?;
                acc = acc + v;
                scale = scale.max(m);
            }
            (acc, scale)
        }
        Node::Product(factors) => {
            let mut acc = S::one();
            let mut scale = 1.0f64;
            for f in factors {
                let (v, m) = eval_node(f, b, memo)?;
                acc = acc * v;
                scale *= m;
            }
            (acc, scale)
        }
        Node::Quotient(n, d) => {
            let (nv, nm) = eval_node(n, b, memo)?;
            let (dv, _) = eval_node(d, b, memo)?;
            if dv.is_singular() {
                return Err(EvalError::Singular(format!("{e}")));
            }
            let m = nm / dv.magnitude();
            (nv / dv, m)
        }
        Node::Pow(base, ex) => {
            let (bv, bm) = eval_node(base, b, memo)?;
            let v = match ex.as_const() {
                Some(q) if q.is_integer() => match q.to_integer().to_i64() {
                    Some(n) => bv.powi(n)?,
                    None => bv.pow(&S::from_rational(q))?,
                },
                _ => {
                    let (ev, _) = eval_node(ex, b, memo)?;
                    bv.pow(&ev)?
                }
            };
            // Integer powers keep the base's term scale; anything else is opaque.
            let m = match ex.as_const() {
                Some(q) if q.is_integer() && !q.is_zero() => bm.powf(q.to_integer().to_f64().unwrap_or(1.0)),
                _ => v.magnitude(),
            };
            let m = if m.is_finite() { m } else { v.magnitude() };
            (v, m)
        }
        Node::Exp(a) => {
            let v = eval_node(a, b, memo)?.0.exp()?;
            let m = v.magnitude();
            (v, m)
        }
        Node::Ln(a) => {
            let v = eval_node(a, b, memo)?.0.ln()?;
            let m = v.magnitude();
            (v, m)
        }
        Node::Sqrt(a) => {
            let v = eval_node(a, b, memo)?.0.sqrt()?;
            let m = v.magnitude();
            (v, m)
        }
        Node::Special(kind, params, z) => {
            let mut ps = Vec::with_capacity(params.len());
            for p in params {
                ps.push(eval_node(p, b, memo)?.0);
            }
            let zv = eval_node(z, b, memo)?.0;
            let v = S::special(*kind, &ps, &zv)?;
            let m = v.magnitude();
            (v, m)
        }
    };
    memo.insert(e.ptr_id(), out.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Param, Var};
    use crate::{Rational, C64};

    fn x() -> Expr {
        Expr::var(Var::X)
    }

    #[test]
    fn evaluates_polynomial() {
        let e = x().powi(2);
        let b = Bindings::new().with(Var::X, 3.0f64);
        assert_eq!(e.eval(&b).unwrap(), 9.0);
    }

    #[test]
    fn ln_of_one_is_zero() {
        let b = Bindings::new().with(Var::X, C64::new(1.0, 0.0));
        assert_eq!(x().ln().eval(&b).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn unbound_symbol_reported() {
        let b: Bindings<f64> = Bindings::new();
        assert_eq!(x().eval(&b), Err(EvalError::Unbound(Symbol::X)));
    }

    #[test]
    fn pole_reported() {
        let e = Expr::one() / x();
        let b = Bindings::new().with(Var::X, 0.0f64);
        assert!(matches!(e.eval(&b), Err(EvalError::Singular(_))));
    }

    #[test]
    fn exact_rational_evaluation() {
        let e = (x() + Expr::frac(1, 3)) * Expr::param(Param::R);
        let b = Bindings::new()
            .with(Var::X, Rational::from_integer(2.into()))
            .with(Param::R, Rational::new(3.into(), 7.into()));
        assert_eq!(e.eval(&b).unwrap(), Rational::new(1.into(), 1.into()));
        assert!(matches!(x().exp().eval(&b), Err(EvalError::NotExact("exp"))));
    }

    #[test]
    fn scale_sees_cancelled_terms() {
        let e = x().powi(2) - x().powi(2) + 1;
        let b = Bindings::new().with(Var::X, 1e4f64);
        let o = e.eval_scaled(&b).unwrap();
        assert_eq!(o.value, 1.0);
        assert_eq!(o.scale, 1e8);
    }
}
