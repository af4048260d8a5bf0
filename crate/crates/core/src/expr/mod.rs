//! Immutable symbolic expressions.
//!
//! An [`Expr`] is a reference-counted tree over variables, jet coordinates,
//! named parameters, exact rational constants, elementary functions and the
//! confluent-hypergeometric / Bessel special functions. Trees are cheap to
//! clone and safe to share across threads.
//!
//! Construction applies only local identities (constant folding, flattening,
//! `0`/`1` elimination). [`Expr::normalize`] goes a little further and
//! collects like terms; identity checking beyond that is done numerically by
//! [`is_probably_zero`].

mod diff;
mod display;
mod eval;
mod exact;
mod normalize;
mod symbol;
mod zero;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::specfun::SpecFunError;
use crate::Rational;

pub use eval::{Bindings, EvalOutcome};
pub use exact::{is_exactly_zero, ExactTest};
pub use symbol::{JetIndex, Param, Symbol, Var};
pub use zero::{is_probably_zero, BoxSampler, PointSampler, SampleBox, Witness, ZeroTest, ZeroTestError, ZeroTestOptions};

/// The special functions an expression may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Special {
    /// Kummer `M(a, b, z)`; parameters `[a, b]`.
    KummerM,
    /// Tricomi `U(a, b, z)`; parameters `[a, b]`.
    KummerU,
    /// Whittaker `M_{κ,μ}(z)`; parameters `[κ, μ]`.
    WhittakerM,
    /// Whittaker `W_{κ,μ}(z)`; parameters `[κ, μ]`.
    WhittakerW,
    /// Bessel `J_n(z)`; parameters `[n]`.
    BesselJ,
    /// Bessel `Y_n(z)`; parameters `[n]`.
    BesselY,
}

impl Special {
    pub fn arity(self) -> usize {
        match self {
            Special::BesselJ | Special::BesselY => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Special::KummerM => "KummerM",
            Special::KummerU => "KummerU",
            Special::WhittakerM => "WhittakerM",
            Special::WhittakerW => "WhittakerW",
            Special::BesselJ => "BesselJ",
            Special::BesselY => "BesselY",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Const(Rational),
    Sym(Symbol),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Quotient(Expr, Expr),
    Pow(Expr, Expr),
    Exp(Expr),
    Ln(Expr),
    Sqrt(Expr),
    Special(Special, Vec<Expr>, Expr),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr(Arc<Node>);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("division by the literal constant zero")]
    DivisionByZero,
    #[error("cannot differentiate {node} with respect to {symbol}: special-function parameters must not depend on it")]
    UnsupportedDerivative { node: String, symbol: Symbol },
    #[error("special function {name} expects {expected} parameters, got {got}")]
    SpecialArity { name: &'static str, expected: usize, got: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("unbound symbol {0}")]
    Unbound(Symbol),
    #[error("singular value in {0}")]
    Singular(String),
    #[error("{0} has no exact value in this scalar type")]
    NotExact(&'static str),
    #[error("{0} leaves the real line")]
    NotReal(&'static str),
    #[error(transparent)]
    SpecialFunction(#[from] SpecFunError),
}

impl Expr {
    fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Stable identity of the shared node, used for memoised evaluation.
    pub(crate) fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn constant(q: Rational) -> Expr {
        Expr::from_node(Node::Const(q))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        assert!(d != 0, "zero denominator in rational literal");
        Expr::constant(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn half() -> Expr {
        Expr::frac(1, 2)
    }

    pub fn sym(s: impl Into<Symbol>) -> Expr {
        Expr::from_node(Node::Sym(s.into()))
    }

    pub fn var(v: Var) -> Expr {
        Expr::sym(v)
    }

    pub fn param(p: Param) -> Expr {
        Expr::sym(p)
    }

    pub fn jet(j: JetIndex) -> Expr {
        Expr::sym(j)
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self.node() {
            Node::Const(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|q| q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|q| q.is_one())
    }

    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut flat = Vec::new();
        let mut constant = Rational::zero();
        for t in terms {
            match t.node() {
                Node::Const(q) => constant += q,
                Node::Sum(inner) => {
                    for s in inner {
                        match s.node() {
                            Node::Const(q) => constant += q,
                            _ => flat.push(s.clone()),
                        }
                    }
                }
                _ => flat.push(t),
            }
        }
        if !constant.is_zero() {
            flat.insert(0, Expr::constant(constant));
        }
        match flat.len() {
            0 => Expr::zero(),
            1 => flat.pop().unwrap(),
            _ => Expr::from_node(Node::Sum(flat)),
        }
    }

    pub fn product(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut flat = Vec::new();
        let mut constant = Rational::one();
        for f in factors {
            match f.node() {
                Node::Const(q) => constant *= q,
                Node::Product(inner) => {
                    for s in inner {
                        match s.node() {
                            Node::Const(q) => constant *= q,
                            _ => flat.push(s.clone()),
                        }
                    }
                }
                _ => flat.push(f),
            }
            if constant.is_zero() {
                return Expr::zero();
            }
        }
        if !constant.is_one() {
            flat.insert(0, Expr::constant(constant));
        }
        match flat.len() {
            0 => Expr::one(),
            1 => flat.pop().unwrap(),
            _ => Expr::from_node(Node::Product(flat)),
        }
    }

    /// Quotient `self / den`; fails only when `den` is the literal zero.
    pub fn try_div(&self, den: &Expr) -> Result<Expr, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Expr::zero());
        }
        if den.is_one() {
            return Ok(self.clone());
        }
        if let Some(d) = den.as_const() {
            return Ok(Expr::product([Expr::constant(d.recip()), self.clone()]));
        }
        Ok(Expr::from_node(Node::Quotient(self.clone(), den.clone())))
    }

    pub fn recip(&self) -> Expr {
        Expr::one() / self
    }

    pub fn pow(&self, exponent: &Expr) -> Expr {
        if exponent.is_zero() {
            return Expr::one();
        }
        if exponent.is_one() {
            return self.clone();
        }
        if let (Some(b), Some(e)) = (self.as_const(), exponent.as_const()) {
            if let Some(v) = rational_int_pow(b, e) {
                return Expr::constant(v);
            }
        }
        if self.is_one() {
            return Expr::one();
        }
        Expr::from_node(Node::Pow(self.clone(), exponent.clone()))
    }

    pub fn powi(&self, n: i64) -> Expr {
        self.pow(&Expr::int(n))
    }

    pub fn exp(&self) -> Expr {
        if self.is_zero() {
            return Expr::one();
        }
        Expr::from_node(Node::Exp(self.clone()))
    }

    pub fn ln(&self) -> Expr {
        if self.is_one() {
            return Expr::zero();
        }
        Expr::from_node(Node::Ln(self.clone()))
    }

    pub fn sqrt(&self) -> Expr {
        if self.is_zero() || self.is_one() {
            return self.clone();
        }
        Expr::from_node(Node::Sqrt(self.clone()))
    }

    pub fn special(kind: Special, params: Vec<Expr>, arg: Expr) -> Result<Expr, ExprError> {
        if params.len() != kind.arity() {
            return Err(ExprError::SpecialArity {
                name: kind.name(),
                expected: kind.arity(),
                got: params.len(),
            });
        }
        Ok(Expr::from_node(Node::Special(kind, params, arg)))
    }

    pub fn kummer_m(a: Expr, b: Expr, z: Expr) -> Expr {
        Expr::from_node(Node::Special(Special::KummerM, vec![a, b], z))
    }

    pub fn kummer_u(a: Expr, b: Expr, z: Expr) -> Expr {
        Expr::from_node(Node::Special(Special::KummerU, vec![a, b], z))
    }

    pub fn whittaker_m(kappa: Expr, mu: Expr, z: Expr) -> Expr {
        Expr::from_node(Node::Special(Special::WhittakerM, vec![kappa, mu], z))
    }

    pub fn whittaker_w(kappa: Expr, mu: Expr, z: Expr) -> Expr {
        Expr::from_node(Node::Special(Special::WhittakerW, vec![kappa, mu], z))
    }

    pub fn bessel_j(n: Expr, z: Expr) -> Expr {
        Expr::from_node(Node::Special(Special::BesselJ, vec![n], z))
    }

    pub fn bessel_y(n: Expr, z: Expr) -> Expr {
        Expr::from_node(Node::Special(Special::BesselY, vec![n], z))
    }

    /// Direct children, in a fixed order.
    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Const(_) | Node::Sym(_) => Vec::new(),
            Node::Sum(v) | Node::Product(v) => v.iter().collect(),
            Node::Quotient(a, b) | Node::Pow(a, b) => vec![a, b],
            Node::Exp(a) | Node::Ln(a) | Node::Sqrt(a) => vec![a],
            Node::Special(_, ps, z) => ps.iter().chain(std::iter::once(z)).collect(),
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr_id()) {
                continue;
            }
            if let Node::Sym(s) = e.node() {
                out.insert(*s);
            }
            stack.extend(e.children());
        }
        out
    }

    pub fn depends_on(&self, s: Symbol) -> bool {
        self.free_symbols().contains(&s)
    }

    /// Replaces symbols by expressions, simultaneously.
    pub fn substitute(&self, map: &HashMap<Symbol, Expr>) -> Expr {
        let mut memo = HashMap::new();
        self.subst_memo(map, &mut memo)
    }

    pub fn substitute_one(&self, s: Symbol, by: &Expr) -> Expr {
        let mut map = HashMap::new();
        map.insert(s, by.clone());
        self.substitute(&map)
    }

    fn subst_memo(&self, map: &HashMap<Symbol, Expr>, memo: &mut HashMap<usize, Expr>) -> Expr {
        if let Some(e) = memo.get(&self.ptr_id()) {
            return e.clone();
        }
        let out = match self.node() {
            Node::Const(_) => self.clone(),
            Node::Sym(s) => map.get(s).cloned().unwrap_or_else(|| self.clone()),
            Node::Sum(v) => Expr::sum(v.iter().map(|e| e.subst_memo(map, memo))),
            Node::Product(v) => Expr::product(v.iter().map(|e| e.subst_memo(map, memo))),
            Node::Quotient(a, b) => {
                let (a, b) = (a.subst_memo(map, memo), b.subst_memo(map, memo));
                // A substituted denominator can only become literal zero if the
                // caller mapped a symbol to 0 inside it; keep the node in that case.
                a.try_div(&b).unwrap_or_else(|_| Expr::from_node(Node::Quotient(a, b)))
            }
            Node::Pow(a, b) => a.subst_memo(map, memo).pow(&b.subst_memo(map, memo)),
            Node::Exp(a) => a.subst_memo(map, memo).exp(),
            Node::Ln(a) => a.subst_memo(map, memo).ln(),
            Node::Sqrt(a) => a.subst_memo(map, memo).sqrt(),
            Node::Special(k, ps, z) => Expr::from_node(Node::Special(
                *k,
                ps.iter().map(|p| p.subst_memo(map, memo)).collect(),
                z.subst_memo(map, memo),
            )),
        };
        memo.insert(self.ptr_id(), out.clone());
        out
    }

    /// Number of distinct nodes in the shared graph.
    pub fn node_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if seen.insert(e.ptr_id()) {
                stack.extend(e.children());
            }
        }
        seen.len()
    }
}

fn rational_int_pow(base: &Rational, exp: &Rational) -> Option<Rational> {
    if !exp.is_integer() {
        return None;
    }
    let n = exp.to_integer().to_i32()?;
    if n.abs() > 64 {
        return None;
    }
    if n < 0 && base.is_zero() {
        return None;
    }
    let mut acc = Rational::one();
    for _ in 0..n.abs() {
        acc *= base;
    }
    Some(if n < 0 { acc.recip() } else { acc })
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::sym(s)
    }
}

impl From<Param> for Expr {
    fn from(p: Param) -> Self {
        Expr::param(p)
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Self {
        Expr::var(v)
    }
}

impl From<JetIndex> for Expr {
    fn from(j: JetIndex) -> Self {
        Expr::jet(j)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let ($a, $b) = (&self, &rhs);
                $body
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let ($a, $b) = (&self, rhs);
                $body
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let ($a, $b) = (self, &rhs);
                $body
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
        impl $tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                let rhs = Expr::int(rhs);
                let ($a, $b) = (&self, &rhs);
                $body
            }
        }
        impl $tr<i64> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                let rhs = Expr::int(rhs);
                let ($a, $b) = (self, &rhs);
                $body
            }
        }
        impl $tr<Expr> for i64 {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let lhs = Expr::int(self);
                let ($a, $b) = (&lhs, &rhs);
                $body
            }
        }
        impl $tr<&Expr> for i64 {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let lhs = Expr::int(self);
                let ($a, $b) = (&lhs, rhs);
                $body
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Expr::sum([a.clone(), -b]));
binop!(Mul, mul, |a, b| Expr::product([a.clone(), b.clone()]));
binop!(Div, div, |a, b| a.try_div(b).expect("division by the literal constant zero"));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self.node() {
            Node::Const(q) => Expr::constant(-q),
            _ => Expr::product([Expr::int(-1), self.clone()]),
        }
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::sum(iter)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::product(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::erasing_op)]
    fn construction_folds_constants() {
        let e = Expr::int(2) + Expr::int(3) * Expr::int(4);
        assert_eq!(e, Expr::int(14));
        let x = Expr::var(Var::X);
        assert_eq!(&x * 0, Expr::zero());
        assert_eq!(&x * 1, x);
        assert_eq!(&x + 0, x);
    }

    #[test]
    fn division_by_literal_zero_is_rejected() {
        let x = Expr::var(Var::X);
        assert_eq!(x.try_div(&Expr::zero()), Err(ExprError::DivisionByZero));
        assert_eq!(x.try_div(&Expr::int(2)).unwrap(), Expr::frac(1, 2) * &x);
    }

    #[test]
    fn substitution_replaces_all_occurrences() {
        let x = Expr::var(Var::X);
        let y = Expr::var(Var::Y);
        let e = &x * &x + &x;
        let s = e.substitute_one(Symbol::X, &y);
        assert_eq!(s.free_symbols().into_iter().collect::<Vec<_>>(), vec![Symbol::Y]);
    }

    #[test]
    fn special_arity_checked() {
        let z = Expr::var(Var::X);
        let err = Expr::special(Special::BesselJ, vec![Expr::one(), Expr::one()], z).unwrap_err();
        assert!(matches!(err, ExprError::SpecialArity { expected: 1, got: 2, .. }));
    }
}
