use std::f64::consts::PI;

use super::gamma::{cos_pi, nonpositive_integer, rgamma, sin_pi};
use super::{Method, SpecFunError, SpecFunResult, MAX_TERMS};
use crate::C64;

const EPS: f64 = f64::EPSILON;
/// Ascending series up to this modulus, Hankel expansion beyond.
pub const SERIES_RADIUS: f64 = 25.0;
/// Orders this close to an integer are rejected for `Y`.
pub const Y_INTEGER_EPS: f64 = 1e-8;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Bessel function of the first kind `J_ν(z)`, principal branch.
pub fn bessel_j(nu: C64, z: C64) -> Result<SpecFunResult, SpecFunError> {
    if let Some(n) = nonpositive_integer(nu, 1e-14) {
        if n < 0 {
            // J_{-n} = (-1)^n J_n
            let r = bessel_j(-nu, z)?;
            return Ok(if n % 2 == 0 { r } else { r.scaled(C64::new(-1.0, 0.0)) });
        }
    }
    if z.norm() == 0.0 {
        return if nu.norm() == 0.0 {
            Ok(SpecFunResult::exact(C64::new(1.0, 0.0)))
        } else if nu.re > 0.0 {
            Ok(SpecFunResult::exact(zero()))
        } else {
            Err(SpecFunError::Pole { function: "BesselJ", z })
        };
    }
    if z.norm() > SERIES_RADIUS {
        if let Some((j, _)) = hankel(nu, z) {
            return Ok(j);
        }
    }
    j_series(nu, z)
}

fn j_series(nu: C64, z: C64) -> Result<SpecFunResult, SpecFunError> {
    let w = -z * z / 4.0;
    let mut term = rgamma(nu + 1.0);
    let mut sum = term;
    let mut abs_sum = term.norm();
    let mut small = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64 + 1.0;
        term = term * w / (kf * (nu + kf));
        sum += term;
        abs_sum += term.norm();
        if term.norm() < 1e-16 * sum.norm() || term.norm() == 0.0 {
            small += 1;
            if small >= 3 {
                let pre = (nu * (z / 2.0).ln()).exp();
                let value = pre * sum;
                return Ok(SpecFunResult {
                    value,
                    err_estimate: pre.norm() * (2.0 * EPS * abs_sum + term.norm()) + EPS * value.norm(),
                    terms: k + 1,
                    method: Method::Series,
                });
            }
        } else {
            small = 0;
        }
    }
    Err(SpecFunError::NonConvergence {
        function: "BesselJ",
        terms: MAX_TERMS,
    })
}

/// Hankel's large-argument expansion; returns `(J, Y)` when the series
/// reaches full precision before its terms start to grow.
fn hankel(nu: C64, z: C64) -> Option<(SpecFunResult, SpecFunResult)> {
    if z.arg().abs() >= PI - 1e-3 {
        return None;
    }
    let mu4 = 4.0 * nu * nu;
    let mut p = C64::new(1.0, 0.0);
    let mut q = zero();
    let mut a = C64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    let mut err = f64::INFINITY;
    let mut terms = 0;
    for k in 1..200usize {
        let kf = k as f64;
        a = a * (mu4 - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * z);
        let an = a.norm();
        terms = k;
        if an >= last {
            err = last;
            break;
        }
        // sign pattern: P gets (-1)^{k/2} for even k, Q gets (-1)^{(k-1)/2} for odd k
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += a * sign;
        } else {
            q += a * sign;
        }
        last = an;
        if an == 0.0 || an < 1e-17 * p.norm().max(q.norm()) {
            err = an;
            break;
        }
    }
    let scale = p.norm().max(q.norm());
    if err > 1e-15 * scale {
        return None;
    }
    let omega = z - (nu / 2.0 + 0.25) * PI;
    let pre = (2.0 / (PI * z)).sqrt();
    let (c, s) = (omega.cos(), omega.sin());
    let j = pre * (p * c - q * s);
    let y = pre * (p * s + q * c);
    let e = |v: C64| pre.norm() * err * (c.norm() + s.norm()) + 4.0 * EPS * v.norm().max(pre.norm() * scale * c.norm().max(s.norm()));
    let mk = |v: C64| SpecFunResult {
        value: v,
        err_estimate: e(v),
        terms,
        method: Method::Asymptotic,
    };
    Some((mk(j), mk(y)))
}

/// Bessel function of the second kind `Y_ν(z)` for non-integer order.
pub fn bessel_y(nu: C64, z: C64) -> Result<SpecFunResult, SpecFunError> {
    if (nu.re - nu.re.round()).abs() < Y_INTEGER_EPS && nu.im.abs() < Y_INTEGER_EPS {
        return Err(SpecFunError::DegenerateParameter {
            function: "BesselY",
            name: "n",
            value: nu,
            detail: "integer order is unsupported; perturb the parameters so n is not an integer",
        });
    }
    if z.norm() == 0.0 {
        return Err(SpecFunError::Pole { function: "BesselY", z });
    }
    if z.norm() > SERIES_RADIUS {
        if let Some((_, y)) = hankel(nu, z) {
            return Ok(y);
        }
    }
    let jp = bessel_j(nu, z)?;
    let jm = bessel_j(-nu, z)?;
    let (c, s) = (cos_pi(nu), sin_pi(nu));
    let t1 = jp.value * c;
    let value = (t1 - jm.value) / s;
    let err = (jp.err_estimate * c.norm() + jm.err_estimate + 2.0 * EPS * (t1.norm() + jm.value.norm())) / s.norm();
    Ok(SpecFunResult {
        value,
        err_estimate: err,
        terms: jp.terms + jm.terms,
        method: Method::ConnectionFormula,
    })
}
