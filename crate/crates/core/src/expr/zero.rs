//! Randomised identity testing: an expression is declared zero when it
//! vanishes, relative to its own term scale, at every sampled point.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Bindings, EvalError, Expr, Symbol};
use crate::C64;

/// Produces sample points for the free symbols under test.
pub trait PointSampler: Sync {
    fn sample(&self, rng: &mut dyn RngCore) -> Bindings<C64>;
}

/// Independent uniform ranges per symbol.
#[derive(Debug, Clone, Default)]
pub struct SampleBox {
    ranges: Vec<(Symbol, f64, f64)>,
}

impl SampleBox {
    pub fn new() -> Self {
        SampleBox::default()
    }

    pub fn range(mut self, s: impl Into<Symbol>, lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty sampling range");
        let s = s.into();
        self.ranges.retain(|(t, _, _)| *t != s);
        self.ranges.push((s, lo, hi));
        self
    }

    pub fn ranges(&self) -> &[(Symbol, f64, f64)] {
        &self.ranges
    }
}

impl PointSampler for SampleBox {
    fn sample(&self, rng: &mut dyn RngCore) -> Bindings<C64> {
        self.ranges
            .iter()
            .map(|&(s, lo, hi)| (s, C64::new(lo + (hi - lo) * rng.gen::<f64>(), 0.0)))
            .collect()
    }
}

/// Adapter that lets any closure act as a sampler.
pub struct BoxSampler<F>(pub F);

impl<F> PointSampler for BoxSampler<F>
where
    F: Fn(&mut dyn RngCore) -> Bindings<C64> + Sync,
{
    fn sample(&self, rng: &mut dyn RngCore) -> Bindings<C64> {
        (self.0)(rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroTestOptions {
    pub trials: usize,
    pub seed: u64,
    pub rel_tol: f64,
}

impl Default for ZeroTestOptions {
    fn default() -> Self {
        ZeroTestOptions {
            trials: 200,
            seed: 42,
            rel_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: BTreeMap<String, f64>,
    pub residual_re: f64,
    pub residual_im: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroTest {
    pub is_zero: bool,
    pub evaluated: usize,
    pub skipped: usize,
    /// Largest `|e| / (1 + scale)` seen.
    pub max_residual: f64,
    pub witness: Option<Witness>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZeroTestError {
    #[error("inconclusive: all {0} sampled points were singular")]
    Inconclusive(usize),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Probabilistic zero test.
///
/// Every point drawn from `sampler` is merged over `fixed` (usually the model
/// parameters) and the expression is evaluated in complex doubles. Points
/// where evaluation hits a pole or a special-function failure are skipped;
/// if all are skipped the result is inconclusive rather than a pass.
pub fn is_probably_zero(
    e: &Expr,
    sampler: &dyn PointSampler,
    fixed: &Bindings<C64>,
    opts: &ZeroTestOptions,
) -> Result<ZeroTest, ZeroTestError> {
    if opts.trials == 0 {
        return Err(ZeroTestError::NoTrials);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let points: Vec<Bindings<C64>> = (0..opts.trials)
        .map(|_| {
            let mut b = fixed.clone();
            b.extend_from(&sampler.sample(&mut rng));
            b
        })
        .collect();

    let results: Vec<Result<Option<(C64, f64)>, EvalError>> = points
        .par_iter()
        .map(|b| match e.eval_scaled(b) {
            Ok(o) => Ok(Some((o.value, o.scale))),
            Err(EvalError::Singular(_)) | Err(EvalError::SpecialFunction(_)) => Ok(None),
            Err(err) => Err(err),
        })
        .collect();

    let mut out = ZeroTest {
        is_zero: true,
        evaluated: 0,
        skipped: 0,
        max_residual: 0.0,
        witness: None,
    };
    for (b, r) in points.iter().zip(results) {
        let Some((v, scale)) = r? else {
            out.skipped += 1;
            continue;
        };
        out.evaluated += 1;
        let rel = if v.norm().is_finite() && scale.is_finite() {
            v.norm() / (1.0 + scale)
        } else {
            f64::INFINITY
        };
        out.max_residual = out.max_residual.max(rel);
        if !(rel < opts.rel_tol) && out.witness.is_none() {
            out.is_zero = false;
            out.witness = Some(Witness {
                point: b
                    .iter()
                    .filter(|(s, _)| !matches!(s, Symbol::Param(_)))
                    .map(|(s, v)| (s.to_string(), v.re))
                    .collect(),
                residual_re: v.re,
                residual_im: v.im,
                scale,
            });
        }
    }
    if out.evaluated == 0 {
        return Err(ZeroTestError::Inconclusive(out.skipped));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Var;

    fn unit_box() -> SampleBox {
        SampleBox::new().range(Var::X, 1.0, 2.0).range(Var::Y, 1.0, 2.0)
    }

    #[test]
    fn binomial_identity_is_zero() {
        let x = Expr::var(Var::X);
        let e = (&x + 1).powi(2) - x.powi(2) - 2 * &x - 1;
        let r = is_probably_zero(&e, &unit_box(), &Bindings::new(), &Default::default()).unwrap();
        assert!(r.is_zero);
        assert_eq!(r.evaluated, 200);
    }

    #[test]
    fn difference_of_variables_has_witness() {
        let e = Expr::var(Var::X) - Expr::var(Var::Y);
        let r = is_probably_zero(&e, &unit_box(), &Bindings::new(), &Default::default()).unwrap();
        assert!(!r.is_zero);
        let w = r.witness.unwrap();
        assert!((w.point["x"] - w.point["y"]).abs() > 0.0);
        assert!((w.residual_re - (w.point["x"] - w.point["y"])).abs() < 1e-15);
    }

    #[test]
    fn all_singular_is_inconclusive() {
        let x = Expr::var(Var::X);
        let e = Expr::one() / (&x - &x);
        let r = is_probably_zero(&e, &unit_box(), &Bindings::new(), &Default::default());
        assert_eq!(r, Err(ZeroTestError::Inconclusive(200)));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let e = Expr::var(Var::X).exp() - Expr::var(Var::Y);
        let run = || is_probably_zero(&e, &unit_box(), &Bindings::new(), &Default::default()).unwrap();
        assert_eq!(run(), run());
    }
}
