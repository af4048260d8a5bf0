use std::f64::consts::PI;

use super::gamma::{cos_pi, gamma, nonpositive_integer, rgamma};
use super::{Method, SpecFunError, SpecFunResult, ASYMPTOTIC_THRESHOLD, MAX_TERMS};
use crate::quad::exp_sinh;
use crate::C64;

const EPS: f64 = f64::EPSILON;
/// Parameters this close to an integer count as integer.
pub(super) const PARAM_EPS: f64 = 1e-10;
/// Below this modulus `U` uses the two-`M` connection formula.
const CONNECTION_RADIUS: f64 = 2.0;
/// Asymptotic results are only accepted at this relative accuracy.
const ASYMPTOTIC_ACCEPT: f64 = 1e-14;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn is_integer(z: C64, eps: f64) -> bool {
    (z.re - z.re.round()).abs() < eps && z.im.abs() < eps
}

/// Kummer's function `M(a, b, z) = 1F1(a; b; z)`.
pub fn kummer_m(a: C64, b: C64, z: C64) -> Result<SpecFunResult, SpecFunError> {
    if nonpositive_integer(b, PARAM_EPS).is_some() {
        return Err(SpecFunError::DegenerateParameter {
            function: "KummerM",
            name: "b",
            value: b,
            detail: "b must not be a non-positive integer",
        });
    }
    if z == C64::new(0.0, 0.0) || a == C64::new(0.0, 0.0) {
        return Ok(SpecFunResult::exact(one()));
    }
    let polynomial = nonpositive_integer(a, 0.0).is_some();
    if z.re < 0.0 && !polynomial {
        // Kummer's transformation keeps the series free of cancellation.
        let r = m_positive(b - a, b, -z)?;
        return Ok(r.scaled(z.exp()));
    }
    m_positive(a, b, z)
}

fn m_positive(a: C64, b: C64, z: C64) -> Result<SpecFunResult, SpecFunError> {
    if z.norm() > ASYMPTOTIC_THRESHOLD {
        if let Some(r) = m_asymptotic(a, b, z) {
            return Ok(r);
        }
    }
    m_series(a, b, z)
}

pub(super) fn m_series(a: C64, b: C64, z: C64) -> Result<SpecFunResult, SpecFunError> {
    let mut term = one();
    let mut sum = one();
    let mut abs_sum = 1.0;
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term = term * (a + nf) / (b + nf) * z / (nf + 1.0);
        sum += term;
        abs_sum += term.norm();
        let done = if term.norm() == 0.0 {
            true
        } else if term.norm() < 1e-16 * sum.norm() {
            small += 1;
            small >= 3
        } else {
            small = 0;
            false
        };
        if done {
            return Ok(SpecFunResult {
                value: sum,
                err_estimate: 2.0 * EPS * abs_sum + term.norm(),
                terms: n + 1,
                method: Method::Series,
            });
        }
    }
    Err(SpecFunError::NonConvergence {
        function: "KummerM",
        terms: MAX_TERMS,
    })
}

/// Sums `Σ (p)_s (q)_s / s! · w^s` while the terms decrease. Returns the
/// partial sum, the last included term's modulus and the term count.
fn asymptotic_sum(p: C64, q: C64, w: C64) -> (C64, f64, usize) {
    let mut term = one();
    let mut sum = one();
    let mut last = f64::INFINITY;
    for s in 0..200 {
        let sf = s as f64;
        let next = term * (p + sf) * (q + sf) / (sf + 1.0) * w;
        let nn = next.norm();
        if nn >= last || nn == 0.0 {
            return (sum, if nn == 0.0 { 0.0 } else { term.norm() }, s + 1);
        }
        sum += next;
        term = next;
        last = nn;
        if nn < 1e-17 * sum.norm() {
            return (sum, nn, s + 1);
        }
    }
    (sum, last, 200)
}

fn m_asymptotic(a: C64, b: C64, z: C64) -> Option<SpecFunResult> {
    let lnz = z.ln();
    let (s1, e1, n1) = asymptotic_sum(b - a, one() - a, one() / z);
    let (s2, e2, n2) = asymptotic_sum(a, a - b + 1.0, -one() / z);
    let phase = if z.im > 0.0 {
        (C64::new(0.0, PI) * a).exp()
    } else if z.im < 0.0 {
        (C64::new(0.0, -PI) * a).exp()
    } else {
        cos_pi(a)
    };
    let gb = gamma(b);
    let big = gb * rgamma(a) * (z + (a - b) * lnz).exp();
    let small = gb * rgamma(b - a) * phase * (-a * lnz).exp();
    let value = big * s1 + small * s2;
    let err = big.norm() * e1 + small.norm() * e2 + 4.0 * EPS * (big * s1).norm();
    if !value.norm().is_finite() || err > ASYMPTOTIC_ACCEPT * value.norm() {
        return None;
    }
    Some(SpecFunResult {
        value,
        err_estimate: err,
        terms: n1 + n2,
        method: Method::Asymptotic,
    })
}

/// Tricomi's confluent hypergeometric function `U(a, b, z)`.
pub fn kummer_u(a: C64, b: C64, z: C64) -> Result<SpecFunResult, SpecFunError> {
    if z.norm() == 0.0 {
        return Err(SpecFunError::Pole { function: "KummerU", z });
    }
    if a.norm() < 1e-15 {
        return Ok(SpecFunResult::exact(one()));
    }
    if (a - b + 1.0).norm() < 1e-15 {
        return Ok(SpecFunResult::exact((-a * z.ln()).exp()));
    }
    if z.norm() > ASYMPTOTIC_THRESHOLD && z.arg().abs() < 0.95 * PI {
        if let Some(r) = u_asymptotic(a, b, z) {
            return Ok(r);
        }
    }
    if z.norm() <= CONNECTION_RADIUS || z.arg().abs() >= 0.9 * PI {
        return u_connection(a, b, z);
    }
    u_quadrature(a, b, z)
}

fn u_asymptotic(a: C64, b: C64, z: C64) -> Option<SpecFunResult> {
    let (s, e, n) = asymptotic_sum(a, a - b + 1.0, -one() / z);
    let pre = (-a * z.ln()).exp();
    let value = pre * s;
    let err = pre.norm() * e + 2.0 * EPS * value.norm();
    if !value.norm().is_finite() || err > ASYMPTOTIC_ACCEPT * value.norm() {
        return None;
    }
    Some(SpecFunResult {
        value,
        err_estimate: err,
        terms: n,
        method: Method::Asymptotic,
    })
}

pub(super) fn u_connection(a: C64, b: C64, z: C64) -> Result<SpecFunResult, SpecFunError> {
    if is_integer(b, PARAM_EPS) {
        return Err(SpecFunError::DegenerateParameter {
            function: "KummerU",
            name: "b",
            value: b,
            detail: "integer b is not supported by the connection formula",
        });
    }
    let m1 = kummer_m(a, b, z)?;
    let m2 = kummer_m(a - b + 1.0, 2.0 - b, z)?;
    let c1 = gamma(one() - b) * rgamma(a - b + 1.0);
    let c2 = gamma(b - 1.0) * rgamma(a) * ((one() - b) * z.ln()).exp();
    let t1 = c1 * m1.value;
    let t2 = c2 * m2.value;
    let value = t1 + t2;
    let err = c1.norm() * m1.err_estimate + c2.norm() * m2.err_estimate + 8.0 * EPS * (t1.norm() + t2.norm());
    Ok(SpecFunResult {
        value,
        err_estimate: err,
        terms: m1.terms + m2.terms,
        method: Method::ConnectionFormula,
    })
}

/// `U` from the Laplace integral, rotated onto the positive real axis:
/// `U = z^-a / Γ(a) ∫₀^∞ e^-σ σ^(a-1) (1 + σ/z)^(b-a-1) dσ`, for `Re a > 0`.
fn u_integral(a: C64, b: C64, z: C64) -> Result<SpecFunResult, SpecFunError> {
    let c = b - a - 1.0;
    let integrand = |s: f64, ls: f64| (-s + a * ls + c * (one() + s / z).ln()).exp();
    let r = exp_sinh(integrand, 1e-15).map_err(|_| SpecFunError::NonConvergence {
        function: "KummerU",
        terms: 0,
    })?;
    let pre = (-a * z.ln()).exp() * rgamma(a);
    let value = pre * r.value;
    Ok(SpecFunResult {
        value,
        err_estimate: pre.norm() * r.err_estimate + 4.0 * EPS * value.norm(),
        terms: r.evaluations,
        method: Method::Quadrature,
    })
}

fn u_quadrature(a: C64, b: C64, z: C64) -> Result<SpecFunResult, SpecFunError> {
    if a.re >= 1.0 {
        return u_integral(a, b, z);
    }
    // Shift a up to Re a >= 1 and come back down with the three-term
    // recurrence, which is stable in this direction for U.
    let n = (1.0 - a.re).ceil() as usize;
    let top = a + n as f64;
    let mut hi = u_integral(top + 1.0, b, z)?;
    let mut lo = u_integral(top, b, z)?;
    let mut terms = hi.terms + lo.terms;
    for k in 0..n {
        let c = top - k as f64;
        // U(c-1) = -(b - 2c - z) U(c) - c (c - b + 1) U(c+1)
        let f1 = -(b - 2.0 * c - z);
        let f2 = -(c * (c - b + 1.0));
        let value = f1 * lo.value + f2 * hi.value;
        let err =
            f1.norm() * lo.err_estimate + f2.norm() * hi.err_estimate + 4.0 * EPS * (f1 * lo.value).norm().max((f2 * hi.value).norm());
        hi = lo;
        lo = SpecFunResult {
            value,
            err_estimate: err,
            terms: 0,
            method: Method::Recurrence,
        };
        terms += 1;
    }
    lo.terms = terms;
    Ok(lo)
}
