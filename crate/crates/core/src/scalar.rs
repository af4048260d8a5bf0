//! Scalar types an [`Expr`](crate::Expr) can be evaluated in.
//!
//! Complex doubles are the workhorse (principal branches everywhere). `f64`
//! is a real specialisation that refuses to leave the real line, and
//! [`Rational`] evaluates exactly and refuses anything transcendental.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::expr::{EvalError, Special};
use crate::specfun;
use crate::Rational;

/// Values below this magnitude are treated as exact zeros when dividing.
pub const POLE_THRESHOLD: f64 = 1e-300;

pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(q: &Rational) -> Self;

    fn from_f64(v: f64) -> Option<Self>;

    /// Absolute value as a double, used for tolerance scaling.
    fn magnitude(&self) -> f64;

    /// True when dividing by `self` would be a pole.
    fn is_singular(&self) -> bool;

    fn exp(&self) -> Result<Self, EvalError>;
    fn ln(&self) -> Result<Self, EvalError>;
    fn sqrt(&self) -> Result<Self, EvalError>;
    fn pow(&self, exponent: &Self) -> Result<Self, EvalError>;

    fn powi(&self, n: i64) -> Result<Self, EvalError> {
        if n < 0 && self.is_singular() {
            return Err(EvalError::Singular("negative power of zero".into()));
        }
        let mut base = if n < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * base;
            }
        }
        Ok(acc)
    }

    fn special(kind: Special, params: &[Self], z: &Self) -> Result<Self, EvalError>;
}

impl Scalar for Complex64 {
    fn from_rational(q: &Rational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }

    fn from_f64(v: f64) -> Option<Self> {
        Some(Complex64::new(v, 0.0))
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn is_singular(&self) -> bool {
        self.norm() < POLE_THRESHOLD
    }

    fn exp(&self) -> Result<Self, EvalError> {
        Ok(Complex64::exp(*self))
    }

    fn ln(&self) -> Result<Self, EvalError> {
        if self.is_singular() {
            return Err(EvalError::Singular("ln(0)".into()));
        }
        Ok(Complex64::ln(*self))
    }

    fn sqrt(&self) -> Result<Self, EvalError> {
        Ok(Complex64::sqrt(*self))
    }

    fn pow(&self, exponent: &Self) -> Result<Self, EvalError> {
        if self.is_singular() {
            return if exponent.re > 0.0 {
                Ok(Complex64::zero())
            } else if exponent.is_zero() {
                Ok(Complex64::one())
            } else {
                Err(EvalError::Singular("non-positive power of zero".into()))
            };
        }
        Ok((exponent * Complex64::ln(*self)).exp())
    }

    fn special(kind: Special, params: &[Self], z: &Self) -> Result<Self, EvalError> {
        Ok(specfun::evaluate(kind, params, *z)?.value)
    }
}

impl Scalar for f64 {
    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }

    fn from_f64(v: f64) -> Option<Self> {
        Some(v)
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn is_singular(&self) -> bool {
        self.abs() < POLE_THRESHOLD
    }

    fn exp(&self) -> Result<Self, EvalError> {
        Ok(f64::exp(*self))
    }

    fn ln(&self) -> Result<Self, EvalError> {
        if self.is_singular() {
            return Err(EvalError::Singular("ln(0)".into()));
        }
        if *self < 0.0 {
            return Err(EvalError::NotReal("ln of a negative number"));
        }
        Ok(f64::ln(*self))
    }

    fn sqrt(&self) -> Result<Self, EvalError> {
        if *self < 0.0 {
            return Err(EvalError::NotReal("sqrt of a negative number"));
        }
        Ok(f64::sqrt(*self))
    }

    fn pow(&self, exponent: &Self) -> Result<Self, EvalError> {
        if exponent.fract() == 0.0 && exponent.abs() < 1e15 {
            return Scalar::powi(self, *exponent as i64);
        }
        if self.is_singular() {
            return if *exponent > 0.0 {
                Ok(0.0)
            } else {
                Err(EvalError::Singular("non-positive power of zero".into()))
            };
        }
        if *self < 0.0 {
            return Err(EvalError::NotReal("non-integer power of a negative number"));
        }
        Ok(f64::powf(*self, *exponent))
    }

    fn special(kind: Special, params: &[Self], z: &Self) -> Result<Self, EvalError> {
        let ps: Vec<Complex64> = params.iter().map(|p| Complex64::new(*p, 0.0)).collect();
        let v = specfun::evaluate(kind, &ps, Complex64::new(*z, 0.0))?.value;
        if v.im.abs() > 1e-12 * v.norm().max(1e-300) {
            return Err(EvalError::NotReal(kind.name()));
        }
        Ok(v.re)
    }
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }

    fn magnitude(&self) -> f64 {
        rational_to_f64(&self.abs())
    }

    fn is_singular(&self) -> bool {
        self.is_zero()
    }

    fn exp(&self) -> Result<Self, EvalError> {
        if self.is_zero() {
            return Ok(Rational::one());
        }
        Err(EvalError::NotExact("exp"))
    }

    fn ln(&self) -> Result<Self, EvalError> {
        if self.is_one() {
            return Ok(Rational::zero());
        }
        if self.is_zero() {
            return Err(EvalError::Singular("ln(0)".into()));
        }
        Err(EvalError::NotExact("ln"))
    }

    fn sqrt(&self) -> Result<Self, EvalError> {
        if self.is_negative() {
            return Err(EvalError::NotExact("sqrt"));
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Ok(Rational::new(n, d))
        } else {
            Err(EvalError::NotExact("sqrt"))
        }
    }

    fn pow(&self, exponent: &Self) -> Result<Self, EvalError> {
        if exponent.is_integer() {
            if let Some(n) = exponent.to_integer().to_i64() {
                return Scalar::powi(self, n);
            }
        }
        Err(EvalError::NotExact("non-integer power"))
    }

    fn special(kind: Special, _params: &[Self], _z: &Self) -> Result<Self, EvalError> {
        Err(EvalError::NotExact(kind.name()))
    }
}

/// Correctly rounded conversion that survives huge numerators and denominators.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = q.denom().bits() as i64 - q.numer().bits() as i64 + 64;
    let scaled = if shift >= 0 {
        (q.numer() << shift as usize) / q.denom()
    } else {
        q.numer() / (q.denom() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-shift as i32)
}

pub fn rational_from_i64(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
