//! Complex gamma function (Lanczos, g = 7) with reflection.

use std::f64::consts::PI;

use crate::C64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Distance below which an argument counts as a non-positive integer.
pub const POLE_EPS: f64 = 1e-14;

/// `sin(πz)`, reduced by the nearest integer so that zeros stay exact.
pub fn sin_pi(z: C64) -> C64 {
    let n = z.re.round();
    let s = (C64::new(z.re - n, z.im) * PI).sin();
    if n.rem_euclid(2.0) == 1.0 {
        -s
    } else {
        s
    }
}

/// `cos(πz)`, reduced like [`sin_pi`].
pub fn cos_pi(z: C64) -> C64 {
    let n = z.re.round();
    let c = (C64::new(z.re - n, z.im) * PI).cos();
    if n.rem_euclid(2.0) == 1.0 {
        -c
    } else {
        c
    }
}

/// If `z` is within [`POLE_EPS`] of a non-positive integer, that integer.
pub fn nonpositive_integer(z: C64, eps: f64) -> Option<i64> {
    let n = z.re.round();
    if n <= 0.0 && (z.re - n).abs() < eps && z.im.abs() < eps {
        Some(n as i64)
    } else {
        None
    }
}

fn lanczos_ln(z: C64) -> C64 {
    // ln Γ(z) for Re z >= 1/2.
    let zm = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        x += p / (zm + i as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (zm + 0.5) * t.ln() - t + x.ln()
}

/// Γ(z). Returns infinity at the poles.
pub fn gamma(z: C64) -> C64 {
    if nonpositive_integer(z, POLE_EPS).is_some() {
        return C64::new(f64::INFINITY, 0.0);
    }
    if z.re < 0.5 {
        PI / (sin_pi(z) * gamma(1.0 - z))
    } else {
        lanczos_ln(z).exp()
    }
}

/// 1/Γ(z), entire; exactly zero at the poles of Γ.
pub fn rgamma(z: C64) -> C64 {
    if nonpositive_integer(z, POLE_EPS).is_some() {
        return C64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        sin_pi(z) * gamma(1.0 - z) / PI
    } else {
        (-lanczos_ln(z)).exp()
    }
}

/// Pochhammer symbol `(a)_n`.
pub fn pochhammer(a: C64, n: usize) -> C64 {
    (0..n).fold(C64::new(1.0, 0.0), |acc, k| acc * (a + k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn integer_and_half_integer_values() {
        assert!((gamma(c(5.0)).re - 24.0).abs() < 1e-12);
        assert!((gamma(c(0.5)).re - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(c(-0.5)).re + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn reciprocal_vanishes_at_poles() {
        assert_eq!(rgamma(c(-3.0)), c(0.0));
        assert!((rgamma(c(4.0)).re - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn complex_recurrence() {
        let z = C64::new(0.3, 1.7);
        let lhs = gamma(z + 1.0);
        let rhs = z * gamma(z);
        assert!((lhs - rhs).norm() < 1e-14 * lhs.norm());
    }

    #[test]
    fn reduced_trig_is_exact_at_integers() {
        assert_eq!(sin_pi(c(3.0)).re, 0.0);
        assert_eq!(cos_pi(c(3.0)).re, -1.0);
    }
}
