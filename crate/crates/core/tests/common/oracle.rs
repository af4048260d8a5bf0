//! Arbitrary-precision reference values for the special functions.
//!
//! Binary fixed point on `BigInt` with `BITS` fractional bits. Only real
//! arguments are supported: the fixtures sample `z > 0` and non-degenerate
//! real parameters. Everything here is deliberately naive (plain power
//! series and connection formulas) so that it shares no code path with the
//! library under test. Parameters and arguments are taken as the exact
//! binary values of the doubles that name them.

#![allow(dead_code)]

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const BITS: u32 = 480;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fx(pub BigInt);

fn unit() -> BigInt {
    BigInt::one() << BITS
}

impl Fx {
    pub fn zero() -> Fx {
        Fx(BigInt::zero())
    }

    pub fn one() -> Fx {
        Fx(unit())
    }

    pub fn int(n: i64) -> Fx {
        Fx(BigInt::from(n) << BITS)
    }

    /// Exact conversion of a double.
    pub fn from_f64(v: f64) -> Fx {
        assert!(v.is_finite());
        if v == 0.0 {
            return Fx::zero();
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let m = BigInt::from(mant) * sign;
        let shift = e + BITS as i64;
        Fx(if shift >= 0 { m << shift as u32 } else { m >> (-shift) as u32 })
    }

    pub fn from_ratio(q: &BigRational) -> Fx {
        Fx((q.numer() << BITS).div_floor(q.denom()))
    }

    pub fn to_f64(&self) -> f64 {
        let shift = BITS as i64 - 64;
        let top = &self.0 >> shift as u32;
        top.to_f64().unwrap() * 2f64.powi(-64)
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_sci(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return "0".into();
        }
        let neg = self.0.is_negative();
        let a = self.0.abs();
        // floor(log10 |v|) from the double approximation, corrected below
        let approx = Fx(a.clone()).to_f64().log10().floor() as i64;
        let mut e = approx;
        let scaled = |e: i64| -> BigInt {
            // |v| * 10^(digits-1-e), rounded
            let p = digits as i64 - 1 - e;
            let num: BigInt = if p >= 0 { &a * BigInt::from(10).pow(p as u32) } else { a.clone() };
            let den: BigInt = if p >= 0 {
                unit()
            } else {
                unit() * BigInt::from(10).pow((-p) as u32)
            };
            let two = BigInt::from(2);
            Integer::div_floor(&(&num * &two + &den), &(&den * &two))
        };
        let mut m = scaled(e);
        let lim = BigInt::from(10).pow(digits as u32);
        if m >= lim {
            e += 1;
            m = scaled(e);
        } else if m < BigInt::from(10).pow(digits as u32 - 1) {
            e -= 1;
            m = scaled(e);
        }
        let s = m.to_string();
        format!("{}{}.{}e{}", if neg { "-" } else { "" }, &s[..1], &s[1..], e)
    }

    pub fn add(&self, o: &Fx) -> Fx {
        Fx(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &Fx) -> Fx {
        Fx(&self.0 - &o.0)
    }

    pub fn neg(&self) -> Fx {
        Fx(-&self.0)
    }

    pub fn mul(&self, o: &Fx) -> Fx {
        Fx((&self.0 * &o.0) >> BITS)
    }

    pub fn div(&self, o: &Fx) -> Fx {
        Fx((&self.0 << BITS) / &o.0)
    }

    pub fn mul_i(&self, n: i64) -> Fx {
        Fx(&self.0 * n)
    }

    pub fn div_i(&self, n: i64) -> Fx {
        Fx(&self.0 / n)
    }

    pub fn is_negligible(&self) -> bool {
        self.0.abs().bits() < 8
    }

    pub fn abs(&self) -> Fx {
        Fx(self.0.abs())
    }
}

/// `exp` by halving the argument, a Taylor series and repeated squaring.
pub fn exp(x: &Fx) -> Fx {
    const K: u32 = 24;
    let r = Fx(&x.0 >> K);
    let mut sum = Fx::one();
    let mut term = Fx::one();
    for k in 1.. {
        term = term.mul(&r).div_i(k);
        if term.is_negligible() {
            break;
        }
        sum = sum.add(&term);
    }
    for _ in 0..K {
        sum = sum.mul(&sum);
    }
    sum
}

/// `ln x` for `x > 0` by Halley iteration on `exp`.
pub fn ln(x: &Fx) -> Fx {
    assert!(x.0.is_positive(), "ln of a non-positive value");
    let mut y = Fx::from_f64(x.to_f64().ln());
    for _ in 0..6 {
        let e = exp(&y);
        let step = x.sub(&e).mul_i(2).div(&x.add(&e));
        y = y.add(&step);
        if step.is_negligible() {
            break;
        }
    }
    y
}

fn atan_inv(n: i64) -> Fx {
    // atan(1/n) = Σ (-1)^k / ((2k+1) n^(2k+1))
    let mut pow = Fx::one().div_i(n);
    let mut sum = Fx::zero();
    let n2 = n * n;
    for k in 0.. {
        let term = pow.div_i(2 * k + 1);
        if term.is_negligible() {
            break;
        }
        sum = if k % 2 == 0 { sum.add(&term) } else { sum.sub(&term) };
        pow = pow.div_i(n2);
    }
    sum
}

pub fn pi() -> Fx {
    static PI: OnceLock<Fx> = OnceLock::new();
    PI.get_or_init(|| atan_inv(5).mul_i(16).sub(&atan_inv(239).mul_i(4))).clone()
}

/// `(sin x, cos x)` after reduction modulo 2π.
pub fn sin_cos(x: &Fx) -> (Fx, Fx) {
    let two_pi = pi().mul_i(2);
    let n = x.div(&two_pi).0.div_floor(&unit());
    let r = x.sub(&Fx(&two_pi.0 * n));
    let (mut s, mut c) = (Fx::zero(), Fx::zero());
    let mut term = Fx::one();
    for k in 0i64.. {
        if k > 0 {
            term = term.mul(&r).div_i(k);
        }
        if k > 8 && term.is_negligible() {
            break;
        }
        match k % 4 {
            0 => c = c.add(&term),
            1 => s = s.add(&term),
            2 => c = c.sub(&term),
            _ => s = s.sub(&term),
        }
    }
    (s, c)
}

pub fn pow(x: &Fx, y: &Fx) -> Fx {
    exp(&y.mul(&ln(x)))
}

/// `B_0 … B_{2n}` via the Akiyama–Tanigawa algorithm.
fn bernoulli(n: usize) -> Vec<BigRational> {
    let m = 2 * n;
    let mut a: Vec<BigRational> = Vec::with_capacity(m + 1);
    let mut out = Vec::with_capacity(m + 1);
    for k in 0..=m {
        a.push(BigRational::new(BigInt::one(), BigInt::from(k + 1)));
        for j in (1..=k).rev() {
            a[j - 1] = BigRational::from_integer(BigInt::from(j)) * (&a[j - 1] - &a[j]);
        }
        out.push(a[0].clone());
    }
    out
}

fn stirling_terms() -> &'static [Fx] {
    static T: OnceLock<Vec<Fx>> = OnceLock::new();
    T.get_or_init(|| {
        let b = bernoulli(48);
        (1..=48)
            .map(|k| {
                let den = BigRational::from_integer(BigInt::from((2 * k) * (2 * k - 1)));
                Fx::from_ratio(&(&b[2 * k] / den))
            })
            .collect()
    })
}

fn is_nonpositive_integer(x: &Fx) -> bool {
    let v = x.to_f64();
    v < 0.5 && x.sub(&Fx::int(v.round() as i64)).is_negligible()
}

/// `ln Γ(w)` for `w ≥ 60` by the Stirling series.
fn ln_gamma_large(w: &Fx) -> Fx {
    let half = Fx::one().div_i(2);
    let mut s = w.sub(&half).mul(&ln(w)).sub(w).add(&ln(&pi().mul_i(2)).div_i(2));
    let w2 = w.mul(w);
    let mut wp = w.clone();
    for c in stirling_terms() {
        let term = c.div(&wp);
        s = s.add(&term);
        wp = wp.mul(&w2);
    }
    s
}

/// `1/Γ(x)`; zero at the poles.
pub fn rgamma(x: &Fx) -> Fx {
    if is_nonpositive_integer(x) {
        return Fx::zero();
    }
    let xv = x.to_f64();
    if xv < 0.5 {
        // 1/Γ(x) = sin(πx) Γ(1−x) / π
        let (s, _) = sin_cos(&pi().mul(x));
        let g = Fx::one().div(&rgamma(&Fx::one().sub(x)));
        return s.mul(&g).div(&pi());
    }
    let n = (60.0 - xv).max(0.0).ceil() as i64;
    let mut prod = Fx::one();
    for j in 0..n {
        prod = prod.mul(&x.add(&Fx::int(j)));
    }
    prod.div(&exp(&ln_gamma_large(&x.add(&Fx::int(n)))))
}

/// `Σ (a)_k / (b)_k z^k / k!`.
pub fn kummer_m(a: &Fx, b: &Fx, z: &Fx) -> Fx {
    let mut term = Fx::one();
    let mut sum = Fx::one();
    for k in 0i64.. {
        let kf = Fx::int(k);
        term = term.mul(&a.add(&kf)).mul(z).div(&b.add(&kf)).div_i(k + 1);
        sum = sum.add(&term);
        if k > 4 && term.is_negligible() {
            break;
        }
    }
    sum
}

/// Connection formula through two `M` series; `b` must not be an integer.
/// The cancellation between the two terms is large for big `z`, so every
/// derived parameter is formed in fixed point rather than in doubles.
pub fn kummer_u(a: &Fx, b: &Fx, z: &Fx) -> Fx {
    assert!(b.to_f64().fract() != 0.0);
    let one = Fx::one();
    let a1 = a.sub(b).add(&one);
    let g1 = one.div(&rgamma(&one.sub(b))).mul(&rgamma(&a1));
    let g2 = one.div(&rgamma(&b.sub(&one))).mul(&rgamma(a));
    let zp = pow(z, &one.sub(b));
    g1.mul(&kummer_m(a, b, z))
        .add(&g2.mul(&zp).mul(&kummer_m(&a1, &Fx::int(2).sub(b), z)))
}

/// `(κ, μ) ↦ (μ − κ + ½, 1 + 2μ)` and the prefactor `e^{−z/2} z^{μ+½}`.
fn whittaker_parts(kappa: &Fx, mu: &Fx, z: &Fx) -> (Fx, Fx, Fx) {
    let half = Fx::one().div_i(2);
    let pre = exp(&z.neg().div_i(2)).mul(&pow(z, &mu.add(&half)));
    (mu.sub(kappa).add(&half), Fx::one().add(&mu.mul_i(2)), pre)
}

pub fn whittaker_m(kappa: &Fx, mu: &Fx, z: &Fx) -> Fx {
    let (a, b, pre) = whittaker_parts(kappa, mu, z);
    pre.mul(&kummer_m(&a, &b, z))
}

pub fn whittaker_w(kappa: &Fx, mu: &Fx, z: &Fx) -> Fx {
    let (a, b, pre) = whittaker_parts(kappa, mu, z);
    pre.mul(&kummer_u(&a, &b, z))
}

/// `(z/2)^ν Σ (−z²/4)^k / (k! Γ(k+ν+1))`; `ν` must not be a negative integer.
pub fn bessel_j(nu: &Fx, z: &Fx) -> Fx {
    assert!(!is_nonpositive_integer(nu) || nu.is_negligible());
    let half = z.div_i(2);
    let q = half.mul(&half).neg();
    let mut term = rgamma(&nu.add(&Fx::one()));
    let mut sum = term.clone();
    for k in 1i64.. {
        term = term.mul(&q).div_i(k).div(&nu.add(&Fx::int(k)));
        sum = sum.add(&term);
        if k > 4 && term.is_negligible() {
            break;
        }
    }
    let scale = if nu.is_negligible() { Fx::one() } else { pow(&half, nu) };
    scale.mul(&sum)
}

/// `(J_ν cos νπ − J_{−ν}) / sin νπ`; `ν` must not be an integer.
pub fn bessel_y(nu: &Fx, z: &Fx) -> Fx {
    assert!(nu.to_f64().fract() != 0.0);
    let (s, c) = sin_cos(&pi().mul(nu));
    bessel_j(nu, z).mul(&c).sub(&bessel_j(&nu.neg(), z)).div(&s)
}

pub const FUNCTIONS: [&str; 6] = ["kummer_m", "kummer_u", "whittaker_m", "whittaker_w", "bessel_j", "bessel_y"];

/// Parameter sets per function; each is crossed with [`Z_GRID`].
pub fn parameter_sets(function: &str) -> Vec<Vec<f64>> {
    let pairs = |v: &[(f64, f64)]| v.iter().map(|&(a, b)| vec![a, b]).collect();
    match function {
        "kummer_m" => pairs(&[(0.3, 1.7), (-1.4, 0.6), (2.5, 3.2), (-2.7, -1.5), (1.1, 0.25)]),
        "kummer_u" => pairs(&[(0.3, 1.7), (-1.4, 0.6), (2.5, 3.2), (0.75, -0.5), (1.2, 0.35)]),
        "whittaker_m" => pairs(&[(0.2, 0.3), (-0.6, 0.45), (1.3, 0.8), (0.5, 1.15), (-1.1, 0.05)]),
        "whittaker_w" => pairs(&[(0.2, 0.3), (-0.6, 0.45), (1.3, 0.8), (0.5, 1.15), (-1.1, 0.6)]),
        "bessel_j" => [0.0, 1.0, 0.3, 2.6, -1.7].iter().map(|&n| vec![n]).collect(),
        "bessel_y" => [0.5, 0.3, 1.25, 2.6, -1.7].iter().map(|&n| vec![n]).collect(),
        other => panic!("unknown function {other}"),
    }
}

pub const Z_GRID: [f64; 10] = [0.1, 0.5, 1.0, 2.0, 3.5, 5.0, 7.0, 9.0, 10.5, 12.0];

pub fn evaluate(function: &str, p: &[f64], z: f64) -> Fx {
    let p: Vec<Fx> = p.iter().map(|&v| Fx::from_f64(v)).collect();
    let z = Fx::from_f64(z);
    match function {
        "kummer_m" => kummer_m(&p[0], &p[1], &z),
        "kummer_u" => kummer_u(&p[0], &p[1], &z),
        "whittaker_m" => whittaker_m(&p[0], &p[1], &z),
        "whittaker_w" => whittaker_w(&p[0], &p[1], &z),
        "bessel_j" => bessel_j(&p[0], &z),
        "bessel_y" => bessel_y(&p[0], &z),
        other => panic!("unknown function {other}"),
    }
}

/// One fixture row: function, up to two parameters, `z` and the value.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub function: String,
    pub params: Vec<f64>,
    pub z: f64,
    pub value: String,
}

pub fn rows() -> Vec<Row> {
    let mut out = Vec::new();
    for f in FUNCTIONS {
        for p in parameter_sets(f) {
            for z in Z_GRID {
                out.push(Row {
                    function: f.to_string(),
                    params: p.clone(),
                    z,
                    value: evaluate(f, &p, z).to_sci(30),
                });
            }
        }
    }
    out
}

/// Complex columns are kept for the argument and the value; every row
/// written here is real, so both imaginary parts are zero.
pub fn render(rows: &[Row]) -> String {
    let mut s = String::from("function,p1,p2,z_re,z_im,value_re,value_im\n");
    for r in rows {
        let p2 = r.params.get(1).map_or(String::new(), |v| v.to_string());
        s.push_str(&format!("{},{},{},{},0,{},0\n", r.function, r.params[0], p2, r.z, r.value));
    }
    s
}

pub fn parse(text: &str) -> Vec<Row> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let mut params = vec![f[1].parse().unwrap()];
            if !f[2].is_empty() {
                params.push(f[2].parse().unwrap());
            }
            assert!(f[4] == "0" && f[6] == "0", "complex fixture rows are not supported: {l}");
            Row {
                function: f[0].to_string(),
                params,
                z: f[3].parse().unwrap(),
                value: f[5].to_string(),
            }
        })
        .collect()
}
