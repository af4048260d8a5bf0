//! The pricing equation
//!
//! `Δ = u_t + ½f²x²u_xx + ρβxf u_xy + ½β²u_yy + rx u_x + (α(m−y) − βρ(μ−r)/f) u_y − ru`
//!
//! for constant volatility `f = f0` and hyperbolic volatility `f = k/(y−m)`.
//! Coefficients are kept symbolic in the parameter symbols; a
//! [`ModelParams`] supplies the numbers through [`ModelParams::bindings`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{is_probably_zero, Bindings, Expr, ExprError, JetIndex, Param, SampleBox, Var, ZeroTestOptions};
use crate::scalar::{rational_to_f64, Scalar};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VolCase {
    ConstVol { f0: Rational },
    HyperbolicVol { k: Rational },
}

/// The three symmetry classes of the equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "const")]
    ConstVol,
    #[serde(rename = "hyp")]
    HypGNonzero,
    #[serde(rename = "hyp-g0")]
    HypGZero,
}

impl CaseTag {
    pub const ALL: [CaseTag; 3] = [CaseTag::ConstVol, CaseTag::HypGNonzero, CaseTag::HypGZero];

    pub fn cli_name(self) -> &'static str {
        match self {
            CaseTag::ConstVol => "const",
            CaseTag::HypGNonzero => "hyp",
            CaseTag::HypGZero => "hyp-g0",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for CaseTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "const" => Ok(CaseTag::ConstVol),
            "hyp" => Ok(CaseTag::HypGNonzero),
            "hyp-g0" => Ok(CaseTag::HypGZero),
            _ => Err(format!("unknown case {s:?}; expected const, hyp or hyp-g0")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("|rho| must be below 1, got {0}")]
    Correlation(f64),
    #[error("{0} must be nonzero")]
    Zero(&'static str),
    #[error("stored g = {stored} does not match 2(alpha + rho beta (mu - r)/k) = {computed}")]
    GMismatch { stored: f64, computed: f64 },
    #[error("case {case} requires {requirement}")]
    WrongCase { case: CaseTag, requirement: &'static str },
    #[error("{0} is not a finite number")]
    NotFinite(&'static str),
}

/// Parameter tuple of the equation. Values are exact rationals so that
/// bracket tables can be checked without rounding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelParams {
    pub r: Rational,
    pub rho: Rational,
    pub m: Rational,
    pub mu: Rational,
    pub alpha: Rational,
    pub beta: Rational,
    pub vol: VolCase,
    g: Option<Rational>,
}

/// Shortest decimal that round-trips the double, as an exact rational.
pub fn decimal(v: f64) -> Option<Rational> {
    if !v.is_finite() {
        return None;
    }
    let s = format!("{v:e}");
    let (mant, exp) = s.split_once('e')?;
    let exp: i32 = exp.parse().ok()?;
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        Rational::from_integer(digits * ten.pow(scale as u32))
    } else {
        Rational::new(digits, ten.pow((-scale) as u32))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

fn dec(v: f64) -> Rational {
    decimal(v).expect("finite literal")
}

impl ModelParams {
    /// Validates and derives `g` for the hyperbolic case.
    pub fn new(
        r: Rational,
        rho: Rational,
        m: Rational,
        mu: Rational,
        alpha: Rational,
        beta: Rational,
        vol: VolCase,
    ) -> Result<Self, ParamError> {
        let mut p = ModelParams {
            r,
            rho,
            m,
            mu,
            alpha,
            beta,
            vol,
            g: None,
        };
        p.g = p.computed_g();
        p.validate()?;
        Ok(p)
    }

    /// The default set `r=0.05, ρ=0.3, m=0, μ=0.1, α=1.2, β=0.4` with
    /// `f0=0.5` or `k=0.8`; for [`CaseTag::HypGZero`] α is tuned so `g = 0`.
    pub fn defaults(case: CaseTag) -> Self {
        let vol = match case {
            CaseTag::ConstVol => VolCase::ConstVol { f0: dec(0.5) },
            _ => VolCase::HyperbolicVol { k: dec(0.8) },
        };
        let p = ModelParams::new(dec(0.05), dec(0.3), Rational::zero(), dec(0.1), dec(1.2), dec(0.4), vol).expect("defaults are valid");
        if case == CaseTag::HypGZero {
            p.tuned_g_zero().expect("defaults are valid")
        } else {
            p
        }
    }

    /// Random parameters for `case`, on a 1/1000 grid, away from degeneracies.
    pub fn random<R: Rng + ?Sized>(case: CaseTag, rng: &mut R) -> Self {
        let mut draw = |lo: i64, hi: i64| Rational::new(BigInt::from(rng.gen_range(lo..=hi)), BigInt::from(1000));
        loop {
            let r = draw(10, 100);
            let rho = draw(-800, 800);
            let m = draw(-500, 500);
            let mu = draw(20, 200);
            let alpha = draw(500, 2000);
            let beta = draw(200, 800);
            let vol = match case {
                CaseTag::ConstVol => VolCase::ConstVol { f0: draw(200, 800) },
                _ => VolCase::HyperbolicVol { k: draw(300, 1500) },
            };
            let Ok(p) = ModelParams::new(r, rho, m, mu, alpha, beta, vol) else {
                continue;
            };
            match case {
                CaseTag::HypGZero => {
                    if let Ok(p) = p.tuned_g_zero() {
                        return p;
                    }
                }
                CaseTag::HypGNonzero => {
                    if p.g.as_ref().is_some_and(|g| g.abs() > dec(0.1)) {
                        return p;
                    }
                }
                CaseTag::ConstVol => return p,
            }
        }
    }

    /// Same parameters with α replaced by `−ρβ(μ−r)/k`, making `g = 0`.
    pub fn tuned_g_zero(&self) -> Result<Self, ParamError> {
        let VolCase::HyperbolicVol { k } = &self.vol else {
            return Err(ParamError::WrongCase {
                case: CaseTag::HypGZero,
                requirement: "hyperbolic volatility",
            });
        };
        let alpha = -(&self.rho * &self.beta * (&self.mu - &self.r)) / k;
        ModelParams::new(
            self.r.clone(),
            self.rho.clone(),
            self.m.clone(),
            self.mu.clone(),
            alpha,
            self.beta.clone(),
            self.vol.clone(),
        )
    }

    fn computed_g(&self) -> Option<Rational> {
        match &self.vol {
            VolCase::ConstVol { .. } => None,
            VolCase::HyperbolicVol { k } if !k.is_zero() => {
                Some(Rational::from_integer(2.into()) * (&self.alpha + &self.rho * &self.beta * (&self.mu - &self.r) / k))
            }
            VolCase::HyperbolicVol { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.rho.abs() >= Rational::one() {
            return Err(ParamError::Correlation(rational_to_f64(&self.rho)));
        }
        if self.beta.is_zero() {
            return Err(ParamError::Zero("beta"));
        }
        match &self.vol {
            VolCase::ConstVol { f0 } if f0.is_zero() => return Err(ParamError::Zero("f0")),
            VolCase::HyperbolicVol { k } if k.is_zero() => return Err(ParamError::Zero("k")),
            _ => {}
        }
        if self.g != self.computed_g() {
            return Err(ParamError::GMismatch {
                stored: self.g.as_ref().map_or(f64::NAN, rational_to_f64),
                computed: self.computed_g().as_ref().map_or(f64::NAN, rational_to_f64),
            });
        }
        Ok(())
    }

    pub fn g(&self) -> Option<&Rational> {
        self.g.as_ref()
    }

    /// The symmetry class these parameters fall into.
    pub fn case(&self) -> CaseTag {
        match (&self.vol, &self.g) {
            (VolCase::ConstVol { .. }, _) => CaseTag::ConstVol,
            (_, Some(g)) if g.is_zero() => CaseTag::HypGZero,
            _ => CaseTag::HypGNonzero,
        }
    }

    pub fn value(&self, p: Param) -> Option<Rational> {
        Some(match p {
            Param::R => self.r.clone(),
            Param::Rho => self.rho.clone(),
            Param::M => self.m.clone(),
            Param::Mu => self.mu.clone(),
            Param::Alpha => self.alpha.clone(),
            Param::Beta => self.beta.clone(),
            Param::F0 => match &self.vol {
                VolCase::ConstVol { f0 } => f0.clone(),
                _ => return None,
            },
            Param::K => match &self.vol {
                VolCase::HyperbolicVol { k } => k.clone(),
                _ => return None,
            },
            Param::G => self.g.clone()?,
            _ => return None,
        })
    }

    /// Numeric values for every model symbol these parameters define.
    pub fn bindings<S: Scalar>(&self) -> Bindings<S> {
        let mut b = Bindings::new();
        for p in [
            Param::R,
            Param::Rho,
            Param::M,
            Param::Mu,
            Param::Alpha,
            Param::Beta,
            Param::F0,
            Param::K,
            Param::G,
        ] {
            if let Some(v) = self.value(p) {
                b.set(p, S::from_rational(&v));
            }
        }
        b
    }

    /// Default sampling box `t ∈ [0.1, 1], x ∈ [0.5, 2], y ∈ [m+0.2, m+1.5]`.
    pub fn sample_box(&self) -> SampleBox {
        let m = rational_to_f64(&self.m);
        SampleBox::new()
            .range(Var::T, 0.1, 1.0)
            .range(Var::X, 0.5, 2.0)
            .range(Var::Y, m + 0.2, m + 1.5)
    }

    pub fn to_f64_map(&self) -> std::collections::BTreeMap<String, f64> {
        Param::ALL
            .iter()
            .filter_map(|p| self.value(*p).map(|v| (p.name().to_string(), rational_to_f64(&v))))
            .collect()
    }
}

fn p(x: Param) -> Expr {
    Expr::param(x)
}

/// The volatility function `f(y)` as an expression.
pub fn volatility(vol: &VolCase) -> Expr {
    match vol {
        VolCase::ConstVol { .. } => p(Param::F0),
        VolCase::HyperbolicVol { .. } => p(Param::K) / (Expr::var(Var::Y) - p(Param::M)),
    }
}

/// Linear equation as a list of `(jet, coefficient)` pairs.
#[derive(Debug, Clone)]
pub struct Equation {
    pub terms: Vec<(JetIndex, Expr)>,
}

/// Drift coefficient of `u_y` as printed in the general equation.
pub fn drift(vol: &VolCase) -> Expr {
    let y = Expr::var(Var::Y);
    let f = volatility(vol);
    p(Param::Alpha) * (p(Param::M) - &y) - p(Param::Beta) * p(Param::Rho) * (p(Param::Mu) - p(Param::R)) / f
}

/// Drift `½g(m−y)` of the hyperbolic case, written with the symbol `g`.
pub fn g_drift() -> Expr {
    Expr::half() * p(Param::G) * (p(Param::M) - Expr::var(Var::Y))
}

fn assemble(f: Expr, drift: Expr) -> Equation {
    let x = Expr::var(Var::X);
    let (beta, rho, r) = (p(Param::Beta), p(Param::Rho), p(Param::R));
    Equation {
        terms: vec![
            (JetIndex::UT, Expr::one()),
            (JetIndex::UXX, Expr::half() * f.powi(2) * x.powi(2)),
            (JetIndex::UXY, &rho * &beta * &x * &f),
            (JetIndex::UYY, Expr::half() * beta.powi(2)),
            (JetIndex::UX, &r * &x),
            (JetIndex::UY, drift),
            (JetIndex::U, -r),
        ],
    }
}

/// The equation with `f` instantiated for `params`' volatility case.
pub fn build_equation(params: &ModelParams) -> Equation {
    assemble(volatility(&params.vol), drift(&params.vol))
}

/// The hyperbolic-case equation with drift `½g(m−y)`; `g` stays a symbol.
pub fn build_g_form(params: &ModelParams) -> Result<Equation, ParamError> {
    match params.vol {
        VolCase::HyperbolicVol { .. } => Ok(assemble(volatility(&params.vol), g_drift())),
        _ => Err(ParamError::WrongCase {
            case: params.case(),
            requirement: "hyperbolic volatility",
        }),
    }
}

impl Equation {
    pub fn expr(&self) -> Expr {
        Expr::sum(self.terms.iter().map(|(j, c)| c * Expr::jet(*j)))
    }

    pub fn coefficient(&self, j: JetIndex) -> Expr {
        self.terms
            .iter()
            .find(|(k, _)| *k == j)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Expr::zero)
    }

    /// `u_t` on the solution manifold: `−(Δ − u_t)`.
    pub fn ut_on_shell(&self) -> Expr {
        debug_assert!(self.coefficient(JetIndex::UT).is_one());
        -Expr::sum(
            self.terms
                .iter()
                .filter(|(j, _)| *j != JetIndex::UT)
                .map(|(j, c)| c * Expr::jet(*j)),
        )
    }

    /// The individual terms `c_J ∂^J u` for a concrete `u(t, x, y)`.
    pub fn apply_terms(&self, u: &Expr) -> Result<Vec<Expr>, ExprError> {
        self.terms
            .iter()
            .map(|(j, c)| {
                let mut d = u.clone();
                for (v, n) in [(Var::T, j.t), (Var::X, j.x), (Var::Y, j.y)] {
                    d = d.diff_n(v, n as usize)?;
                }
                Ok(c * d)
            })
            .collect()
    }

    /// `Δ[u]` for a concrete `u(t, x, y)`.
    pub fn apply(&self, u: &Expr) -> Result<Expr, ExprError> {
        Ok(Expr::sum(self.apply_terms(u)?))
    }
}

/// Checks `α(m−y) − βρ(μ−r)(y−m)/k ≡ ½g(m−y)` by random evaluation in `y`.
pub fn drift_identity_check(params: &ModelParams, opts: &ZeroTestOptions) -> Result<bool, ParamError> {
    if !matches!(params.vol, VolCase::HyperbolicVol { .. }) {
        return Err(ParamError::WrongCase {
            case: params.case(),
            requirement: "hyperbolic volatility",
        });
    }
    let diff = drift(&params.vol) - g_drift();
    let b = params.bindings();
    let r = is_probably_zero(&diff, &params.sample_box(), &b, opts).expect("drift difference is regular on the sampling box");
    Ok(r.is_zero)
}
