//! Library-side checks shared by the oracle tests and the acceptance run.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symbsm::expr::{Bindings, Expr, Param, Var};
use symbsm::specfun;
use symbsm::C64;

use super::oracle;

pub const FIXTURE: &str = include_str!("../fixtures/specfun_oracle.csv");

pub fn library(function: &str, p: &[f64], z: f64) -> C64 {
    let c = |v: f64| C64::new(v, 0.0);
    let r = match function {
        "kummer_m" => specfun::kummer_m(c(p[0]), c(p[1]), c(z)),
        "kummer_u" => specfun::kummer_u(c(p[0]), c(p[1]), c(z)),
        "whittaker_m" => specfun::whittaker_m(c(p[0]), c(p[1]), c(z)),
        "whittaker_w" => specfun::whittaker_w(c(p[0]), c(p[1]), c(z)),
        "bessel_j" => specfun::bessel_j(c(p[0]), c(z)),
        "bessel_y" => specfun::bessel_y(c(p[0]), c(z)),
        other => panic!("unknown function {other}"),
    };
    r.unwrap_or_else(|e| panic!("{function}{p:?} at {z}: {e}")).value
}

/// Worst relative deviation from the fixture for one function, with the row.
pub fn fixture_worst(function: &str) -> (f64, String) {
    let mut worst = (0.0, String::new());
    for r in oracle::parse(FIXTURE).into_iter().filter(|r| r.function == function) {
        let want: f64 = r.value.parse().unwrap();
        let got = library(&r.function, &r.params, r.z);
        let rel = (got - want).norm() / want.abs();
        if rel > worst.0 {
            worst = (rel, format!("{:?} z={}", r.params, r.z));
        }
    }
    worst
}

/// `Σ|term|`-relative residual of a linear second-order ODE `p2 w'' + p1 w' + p0 w`.
fn ode_residual(w: &Expr, coeffs: [&Expr; 3], b: &Bindings<C64>) -> f64 {
    let z = Var::H;
    let d1 = w.diff(z).unwrap();
    let d2 = d1.diff(z).unwrap();
    let terms = [
        coeffs[0].eval(b).unwrap() * w.eval(b).unwrap(),
        coeffs[1].eval(b).unwrap() * d1.eval(b).unwrap(),
        coeffs[2].eval(b).unwrap() * d2.eval(b).unwrap(),
    ];
    let sum: C64 = terms.iter().sum();
    sum.norm() / terms.iter().map(|t| t.norm()).sum::<f64>()
}

/// Worst defining-equation residual of `function` over `points` random
/// complex arguments and parameters. Derivatives come from the expression
/// engine, i.e. from the contiguous-relation identities.
pub fn ode_worst(function: &str, points: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = Expr::var(Var::H);
    let (pa, pb) = (Expr::param(Param::A), Expr::param(Param::B));
    let quarter = Expr::frac(1, 4);
    let one = Expr::one();
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let mut b = Bindings::new();
        let zv = C64::new(rng.gen_range(0.2..10.0), rng.gen_range(-3.0..3.0));
        let a = rng.gen_range(-2.0..2.0);
        let bb: f64 = rng.gen_range(0.1..2.4);
        // keep b, 2μ and ν away from integers, where U, W and Y switch formulas
        let bb = if (bb - bb.round()).abs() < 0.05 { bb + 0.1 } else { bb };
        let a = if (a + bb - (a + bb).round()).abs() < 0.05 { a + 0.1 } else { a };
        b.set(Var::H, zv).set(Param::A, C64::new(a, 0.0)).set(Param::B, C64::new(bb, 0.0));
        let res = match function {
            "kummer_m" | "kummer_u" => {
                let w = if function == "kummer_m" {
                    Expr::kummer_m(pa.clone(), pb.clone(), z.clone())
                } else {
                    Expr::kummer_u(pa.clone(), pb.clone(), z.clone())
                };
                ode_residual(&w, [&(-&pa), &(&pb - &z), &z], &b)
            }
            "whittaker_m" | "whittaker_w" => {
                let mu = &pb / 2;
                let w = if function == "whittaker_m" {
                    Expr::whittaker_m(pa.clone(), mu.clone(), z.clone())
                } else {
                    Expr::whittaker_w(pa.clone(), mu.clone(), z.clone())
                };
                let p0 = -&quarter + &pa / &z + (&quarter - mu.powi(2)) / z.powi(2);
                ode_residual(&w, [&p0, &Expr::zero(), &one], &b)
            }
            "bessel_j" | "bessel_y" => {
                let nu = &pb + &pa;
                let w = if function == "bessel_j" {
                    Expr::bessel_j(nu.clone(), z.clone())
                } else {
                    Expr::bessel_y(nu.clone(), z.clone())
                };
                ode_residual(&w, [&(z.powi(2) - nu.powi(2)), &z, &z.powi(2)], &b)
            }
            other => panic!("unknown function {other}"),
        };
        worst = worst.max(res);
    }
    worst
}
