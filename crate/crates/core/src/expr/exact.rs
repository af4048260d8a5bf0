//! Exact identity testing over the rationals.
//!
//! Symbols are replaced by random rationals and the expression is evaluated
//! in exact arithmetic. Transcendental nodes (`exp`, `ln`, `sqrt`, fractional
//! powers, special functions) become independent random atoms, except that
//! `exp(n·a)` for integer `n` is evaluated as `A^n` with `A` the atom for
//! `exp(a)`. An identity that holds in the differential field generated by
//! those atoms therefore evaluates to exactly zero.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Expr, Node, Symbol};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactTest {
    pub is_zero: bool,
    pub draws: usize,
    /// Draws abandoned because a denominator vanished exactly.
    pub skipped: usize,
    /// Value at the first nonzero draw, as a decimal approximation.
    pub witness_value: Option<f64>,
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num: i64 = rng.gen_range(-97..=97);
    let den: i64 = rng.gen_range(1..=89);
    let num = if num == 0 { 1 } else { num };
    Rational::new(BigInt::from(num), BigInt::from(den))
}

struct Ctx<'a> {
    rng: &'a mut ChaCha8Rng,
    symbols: HashMap<Symbol, Rational>,
    atoms: HashMap<Expr, Rational>,
    memo: HashMap<usize, Option<Rational>>,
}

impl Ctx<'_> {
    fn atom(&mut self, key: Expr) -> Rational {
        if let Some(v) = self.atoms.get(&key) {
            return v.clone();
        }
        let v = random_rational(self.rng);
        self.atoms.insert(key, v.clone());
        v
    }

    /// `None` means an exact division by zero at this draw.
    fn eval(&mut self, e: &Expr) -> Option<Rational> {
        if let Some(v) = self.memo.get(&e.ptr_id()) {
            return v.clone();
        }
        let out = self.eval_node(e);
        self.memo.insert(e.ptr_id(), out.clone());
        out
    }

    fn eval_node(&mut self, e: &Expr) -> Option<Rational> {
        Some(match e.node() {
            Node::Const(q) => q.clone(),
            Node::Sym(s) => {
                if let Some(v) = self.symbols.get(s) {
                    v.clone()
                } else {
                    let v = random_rational(self.rng);
                    self.symbols.insert(*s, v.clone());
                    v
                }
            }
            Node::Sum(ts) => {
                let mut acc = Rational::zero();
                for t in ts {
                    acc += self.eval(t)?;
                }
                acc
            }
            Node::Product(fs) => {
                let mut acc = Rational::one();
                for f in fs {
                    acc *= self.eval(f)?;
                }
                acc
            }
            Node::Quotient(a, b) => {
                let d = self.eval(b)?;
                if d.is_zero() {
                    return None;
                }
                self.eval(a)? / d
            }
            Node::Pow(b, x) => match x.as_const().filter(|q| q.is_integer()) {
                Some(q) => int_pow(self.eval(b)?, q.to_integer().to_i64()?)?,
                None => {
                    let key = e.normalize();
                    self.atom(key)
                }
            },
            Node::Exp(a) => {
                let a = a.normalize();
                let (n, rest) = integer_multiple(&a);
                if rest.is_zero() {
                    return Some(Rational::one());
                }
                let base = self.atom(rest.exp());
                int_pow(base, n)?
            }
            Node::Ln(_) | Node::Sqrt(_) | Node::Special(..) => {
                let key = e.normalize();
                self.atom(key)
            }
        })
    }
}

fn int_pow(b: Rational, n: i64) -> Option<Rational> {
    if n < 0 && b.is_zero() {
        return None;
    }
    let mut acc = Rational::one();
    for _ in 0..n.unsigned_abs() {
        acc *= &b;
    }
    Some(if n < 0 { acc.recip() } else { acc })
}

/// Splits a normalized exponent into `n · rest` with `n` an integer.
fn integer_multiple(a: &Expr) -> (i64, Expr) {
    if let Node::Product(fs) = a.node() {
        if let Some(q) = fs[0].as_const() {
            if q.is_integer() {
                if let Some(n) = q.to_integer().to_i64() {
                    return (n, Expr::product(fs[1..].iter().cloned()));
                }
            }
        }
    }
    (1, a.clone())
}

/// Exact randomised zero test; `draws` independent rational assignments.
pub fn is_exactly_zero(e: &Expr, draws: usize, seed: u64) -> ExactTest {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ExactTest {
        is_zero: true,
        draws: 0,
        skipped: 0,
        witness_value: None,
    };
    let mut attempts = 0;
    while out.draws < draws && attempts < 4 * draws + 4 {
        attempts += 1;
        let mut ctx = Ctx {
            rng: &mut rng,
            symbols: HashMap::new(),
            atoms: HashMap::new(),
            memo: HashMap::new(),
        };
        match ctx.eval(e) {
            None => out.skipped += 1,
            Some(v) => {
                out.draws += 1;
                if !v.is_zero() && out.is_zero {
                    out.is_zero = false;
                    out.witness_value = Some(crate::scalar::rational_to_f64(&v));
                }
            }
        }
    }
    if out.draws == 0 {
        out.is_zero = false;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Param, Var};

    #[test]
    fn exponential_cancellation_is_exact() {
        let t = Expr::var(Var::T);
        let a = Expr::param(Param::Alpha);
        let e = (&a * &t).exp() * (-(&a * &t)).exp() - 1;
        assert!(is_exactly_zero(&e, 3, 1).is_zero);
        let sq = (2 * &a * &t).exp() - (&a * &t).exp().powi(2);
        assert!(is_exactly_zero(&sq, 3, 1).is_zero);
    }

    #[test]
    fn polynomial_identity_and_failure() {
        let x = Expr::var(Var::X);
        let y = Expr::var(Var::Y);
        let ok = (&x + &y).powi(2) - x.powi(2) - 2 * &x * &y - y.powi(2);
        assert!(is_exactly_zero(&ok, 3, 2).is_zero);
        let bad = (&x + &y).powi(2) - x.powi(2) - y.powi(2);
        let r = is_exactly_zero(&bad, 3, 2);
        assert!(!r.is_zero);
        assert!(r.witness_value.is_some());
    }

    #[test]
    fn logarithm_is_an_atom() {
        let x = Expr::var(Var::X);
        let e = x.ln().diff(Var::X).unwrap() * &x - 1;
        assert!(is_exactly_zero(&e, 3, 3).is_zero);
        assert!(!is_exactly_zero(&(x.ln() - &x), 3, 3).is_zero);
    }
}
