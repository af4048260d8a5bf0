//! Numerical quadrature: adaptive Gauss–Kronrod on finite intervals and
//! exp-sinh (double exponential) on `[0, ∞)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: C64,
    pub err_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not reach tolerance {tol:e} (estimate {err:e} after {evaluations} evaluations)")]
    NonConvergence { tol: f64, err: f64, evaluations: usize },
    #[error("integrand is not finite at {0}")]
    NonFinite(f64),
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> Result<(C64, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.norm().is_finite() {
        return Err(QuadError::NonFinite(c));
    }
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x), f(c + x));
        if !(f1 + f2).norm().is_finite() {
            return Err(QuadError::NonFinite(c - x));
        }
        k += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            g += (f1 + f2) * WG[j / 2];
        }
    }
    Ok((k * h, ((k - g) * h).norm()))
}

struct Segment {
    a: f64,
    b: f64,
    value: C64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive G7/K15 quadrature of a complex integrand on `[a, b]`.
/// Converges when the summed error estimate is below `tol · max(1, |I|)`.
pub fn gauss_kronrod<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult, QuadError> {
    const MAX_SEGMENTS: usize = 4000;
    if a == b {
        return Ok(QuadResult {
            value: C64::new(0.0, 0.0),
            err_estimate: 0.0,
            evaluations: 0,
        });
    }
    let (value, err) = kronrod15(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, err });
    let mut total = value;
    let mut total_err = err;
    let mut evaluations = 15;
    while total_err > tol * total.norm().max(1.0) {
        if heap.len() >= MAX_SEGMENTS {
            return Err(QuadError::NonConvergence {
                tol,
                err: total_err,
                evaluations,
            });
        }
        let s = heap.pop().expect("heap is never empty here");
        let m = 0.5 * (s.a + s.b);
        let (v1, e1) = kronrod15(&f, s.a, m)?;
        let (v2, e2) = kronrod15(&f, m, s.b)?;
        evaluations += 30;
        total += v1 + v2 - s.value;
        total_err += e1 + e2 - s.err;
        heap.push(Segment {
            a: s.a,
            b: m,
            value: v1,
            err: e1,
        });
        heap.push(Segment {
            a: m,
            b: s.b,
            value: v2,
            err: e2,
        });
    }
    // Re-sum to shed accumulated update rounding.
    let value = heap.iter().fold(C64::new(0.0, 0.0), |acc, s| acc + s.value);
    let err = heap.iter().map(|s| s.err).sum();
    Ok(QuadResult {
        value,
        err_estimate: err,
        evaluations,
    })
}

/// Exp-sinh rule for `∫₀^∞ f(σ) dσ`.
///
/// The callback receives `(σ, ln σ)` and must return `f(σ)·σ`, so that
/// integrands with algebraic endpoint behaviour can be formed in log space
/// without underflow. Step halving stops when two levels agree to `tol`.
pub fn exp_sinh<F: Fn(f64, f64) -> C64>(g: F, tol: f64) -> Result<QuadResult, QuadError> {
    const MAX_LEVEL: u32 = 12;
    const TAU_MAX: f64 = 12.0;
    let mut evaluations = 0usize;
    let term = |tau: f64, evals: &mut usize| -> C64 {
        *evals += 1;
        let ln_sigma = FRAC_PI_2 * tau.sinh();
        let sigma = ln_sigma.exp();
        let v = g(sigma, ln_sigma) * (FRAC_PI_2 * tau.cosh());
        if v.norm().is_finite() {
            v
        } else {
            C64::new(0.0, 0.0)
        }
    };
    // Walks k = start, start+stride, ... in one direction until the terms die out.
    let sweep = |h: f64, start: i64, stride: i64, evals: &mut usize| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let mut small = 0;
        let mut k = start;
        loop {
            let tau = k as f64 * h;
            if tau.abs() > TAU_MAX {
                break;
            }
            let t = term(tau, evals);
            acc += t;
            if t.norm() <= 1e-20 * acc.norm() {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
            k += stride;
        }
        acc
    };

    let mut h = 0.5;
    let mut sum = term(0.0, &mut evaluations) + sweep(h, 1, 1, &mut evaluations) + sweep(h, -1, -1, &mut evaluations);
    let mut estimate = sum * h;
    for _ in 0..MAX_LEVEL {
        h *= 0.5;
        let odd = sweep(h, 1, 2, &mut evaluations) + sweep(h, -1, -2, &mut evaluations);
        sum += odd;
        let next = sum * h;
        let diff = (next - estimate).norm();
        estimate = next;
        if diff <= tol * next.norm() {
            return Ok(QuadResult {
                value: next,
                err_estimate: diff.max(f64::EPSILON * next.norm()),
                evaluations,
            });
        }
    }
    Err(QuadError::NonConvergence {
        tol,
        err: f64::NAN,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_polynomial_and_oscillatory() {
        let r = gauss_kronrod(|x| C64::new(x * x, 0.0), 0.0, 3.0, 1e-12).unwrap();
        assert!((r.value.re - 9.0).abs() < 1e-12);
        let r = gauss_kronrod(|x| C64::new((10.0 * x).cos(), 0.0), 0.0, 2.0, 1e-12).unwrap();
        assert!((r.value.re - (20.0f64).sin() / 10.0).abs() < 1e-11);
    }

    #[test]
    fn exp_sinh_gamma_integral() {
        // ∫ e^{-σ} σ^{a-1} dσ = Γ(a), here a = 0.25.
        let a = 0.25;
        let r = exp_sinh(|s, ls| C64::new((-s + a * ls).exp(), 0.0), 1e-14).unwrap();
        let expected = 3.625_609_908_221_908;
        assert!((r.value.re - expected).abs() < 1e-12, "{}", r.value);
    }
}
