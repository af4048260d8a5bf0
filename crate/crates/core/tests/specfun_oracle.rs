//! Special functions against arbitrary-precision reference values, and
//! against their defining differential equations.

mod common;

use common::oracle::{self, Fx};
use common::specfun_checks::{fixture_worst, ode_worst, FIXTURE};

#[test]
fn oracle_reproduces_closed_forms() {
    let x = Fx::from_f64;
    let close = |a: &Fx, b: f64| (a.to_f64() - b).abs() <= 1e-15 * b.abs().max(1.0);
    assert!(close(&oracle::pi(), std::f64::consts::PI));
    assert!(close(&oracle::exp(&x(2.5)), 2.5f64.exp()));
    assert!(close(&oracle::ln(&x(7.25)), 7.25f64.ln()));
    assert!(close(&oracle::rgamma(&x(0.5)), 1.0 / std::f64::consts::PI.sqrt()));
    assert!(close(&oracle::rgamma(&x(5.0)), 1.0 / 24.0));
    assert!(close(&oracle::rgamma(&x(-1.5)), 3.0 / (4.0 * std::f64::consts::PI.sqrt())));
    // M(a, a, z) = e^z
    assert!(close(&oracle::kummer_m(&x(1.3), &x(1.3), &x(4.0)), 4f64.exp()));
    // U(a, a+1, z) = z^{-a}
    assert!(close(&oracle::kummer_u(&x(0.7), &x(1.7), &x(3.0)), 3f64.powf(-0.7)));
    // J_{1/2}(z) = sqrt(2/(πz)) sin z, Y_{1/2}(z) = −sqrt(2/(πz)) cos z
    let z: f64 = 5.5;
    let s = (2.0 / (std::f64::consts::PI * z)).sqrt();
    assert!(close(&oracle::bessel_j(&x(0.5), &x(z)), s * z.sin()));
    assert!(close(&oracle::bessel_y(&x(0.5), &x(z)), -s * z.cos()));
    // far past double precision: Γ(1/2)² = π to 100 digits
    let g = Fx::one().div(&oracle::rgamma(&x(0.5)));
    assert!(g.mul(&g).sub(&oracle::pi()).abs().0.bits() < (oracle::BITS - 330) as u64);
}

#[test]
fn fixture_covers_fifty_points_per_function() {
    let rows = oracle::parse(FIXTURE);
    for f in oracle::FUNCTIONS {
        assert_eq!(rows.iter().filter(|r| r.function == f).count(), 50, "{f}");
    }
}

#[test]
fn fixture_matches_the_oracle() {
    // guards against hand edits: a sample of rows recomputed from scratch
    let rows = oracle::parse(FIXTURE);
    for r in rows.iter().step_by(7) {
        assert_eq!(oracle::evaluate(&r.function, &r.params, r.z).to_sci(30), r.value, "{r:?}");
    }
}

#[test]
fn library_matches_fixture() {
    for f in oracle::FUNCTIONS {
        let (rel, at) = fixture_worst(f);
        assert!(rel < 1e-9, "{f}: relative error {rel:e} at {at}");
    }
}

#[test]
#[ignore = "rewrites the fixture; run with --ignored after changing the oracle"]
fn regenerate_fixture() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/specfun_oracle.csv");
    std::fs::write(path, oracle::render(&oracle::rows())).unwrap();
}

#[test]
fn defining_equations_hold_at_random_points() {
    for f in oracle::FUNCTIONS {
        let worst = ode_worst(f, 20, 42);
        assert!(worst < 1e-8, "{f}: worst ODE residual {worst:e}");
    }
}
