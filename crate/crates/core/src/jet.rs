//! Point vector fields on `(t, x, y, u)`, their second prolongation and
//! the infinitesimal invariance test.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{
    is_probably_zero, Bindings, Expr, ExprError, JetIndex, PointSampler, SampleBox, Symbol, Var, Witness, ZeroTestError, ZeroTestOptions,
};
use crate::model::{Equation, ModelParams};
use crate::C64;

const BASE: [Var; 3] = [Var::T, Var::X, Var::Y];

/// `X = ξ^t ∂t + ξ^x ∂x + ξ^y ∂y + η ∂u`. The symbol `u` is [`JetIndex::U`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    pub name: String,
    pub xi: [Expr; 3],
    pub eta: Expr,
}

#[cfg(test)]
fn u() -> Expr {
    Expr::jet(JetIndex::U)
}

impl VectorField {
    pub fn new(name: impl Into<String>, xi_t: Expr, xi_x: Expr, xi_y: Expr, eta: Expr) -> Self {
        VectorField {
            name: name.into(),
            xi: [xi_t, xi_x, xi_y],
            eta,
        }
    }

    pub fn zero(name: impl Into<String>) -> Self {
        VectorField::new(name, Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero())
    }

    pub fn components(&self) -> [&Expr; 4] {
        [&self.xi[0], &self.xi[1], &self.xi[2], &self.eta]
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField::new(
            format!("{}+{}", self.name, other.name),
            &self.xi[0] + &other.xi[0],
            &self.xi[1] + &other.xi[1],
            &self.xi[2] + &other.xi[2],
            &self.eta + &other.eta,
        )
    }

    pub fn scale(&self, c: &Expr) -> VectorField {
        VectorField::new(
            format!("({c})*{}", self.name),
            c * &self.xi[0],
            c * &self.xi[1],
            c * &self.xi[2],
            c * &self.eta,
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The field acting on a function of `(t, x, y, u)`.
    pub fn apply(&self, f: &Expr) -> Result<Expr, ExprError> {
        let mut terms = Vec::with_capacity(4);
        for (c, v) in self.xi.iter().zip(BASE) {
            if !c.is_zero() {
                terms.push(c * f.diff(v)?);
            }
        }
        if !self.eta.is_zero() {
            terms.push(&self.eta * f.diff(JetIndex::U)?);
        }
        Ok(Expr::sum(terms))
    }

    /// Characteristic `Q = η − ξ^i u_i`.
    pub fn characteristic(&self) -> Expr {
        let mut q = self.eta.clone();
        for (c, v) in self.xi.iter().zip(BASE) {
            q = q - c * Expr::jet(JetIndex::U.bump(v));
        }
        q
    }

    pub fn normalize(&self) -> VectorField {
        VectorField::new(
            self.name.clone(),
            self.xi[0].normalize(),
            self.xi[1].normalize(),
            self.xi[2].normalize(),
            self.eta.normalize(),
        )
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: [t: {}, x: {}, y: {}, u: {}]",
            self.name, self.xi[0], self.xi[1], self.xi[2], self.eta
        )
    }
}

/// `[A, B]^i = A(B^i) − B(A^i)` for each of the four components.
pub fn commutator(a: &VectorField, b: &VectorField) -> Result<VectorField, ExprError> {
    let ca = a.components();
    let cb = b.components();
    let mut out = Vec::with_capacity(4);
    for i in 0..4 {
        out.push(a.apply(cb[i])? - b.apply(ca[i])?);
    }
    let mut it = out.into_iter();
    let mut next = || it.next().expect("four components");
    Ok(VectorField::new(format!("[{},{}]", a.name, b.name), next(), next(), next(), next()))
}

/// Total derivative `D_v F = ∂_v F + Σ_J u_{J+v} ∂F/∂u_J`.
pub fn total_derivative(f: &Expr, v: Var) -> Result<Expr, ExprError> {
    let mut terms = vec![f.diff(v)?];
    for s in f.free_symbols() {
        if let Symbol::Jet(j) = s {
            let d = f.diff(s)?;
            if !d.is_zero() {
                terms.push(d * Expr::jet(j.bump(v)));
            }
        }
    }
    Ok(Expr::sum(terms))
}

/// The jets of order one and two.
pub fn second_order_jets() -> Vec<JetIndex> {
    let mut out = Vec::new();
    for n in 1..=2u8 {
        for t in (0..=n).rev() {
            for x in (0..=n - t).rev() {
                out.push(JetIndex::new(t, x, n - t - x));
            }
        }
    }
    out
}

/// All jets up to `order`, including `u` itself.
pub fn jets_up_to(order: u8) -> Vec<JetIndex> {
    let mut out = Vec::new();
    for n in 0..=order {
        for t in (0..=n).rev() {
            for x in (0..=n - t).rev() {
                out.push(JetIndex::new(t, x, n - t - x));
            }
        }
    }
    out
}

/// Prolongation coefficients `η^J`, third-order jets removed.
#[derive(Debug, Clone)]
pub struct Prolongation {
    pub eta: BTreeMap<JetIndex, Expr>,
    /// Coefficients of third-order jets before removal; all must vanish.
    pub cancelled: Vec<(JetIndex, JetIndex, Expr)>,
}

/// `η^J = D_J Q + Σ ξ^i u_{J,i}` for every jet of order one and two.
pub fn prolong2(field: &VectorField) -> Result<Prolongation, ExprError> {
    let q = field.characteristic();
    let mut dq: HashMap<JetIndex, Expr> = HashMap::new();
    dq.insert(JetIndex::U, q);
    let mut eta = BTreeMap::new();
    let mut cancelled = Vec::new();
    for j in second_order_jets() {
        // Build D_J Q from a lower index that differs by one derivative.
        let (parent, v) = BASE
            .iter()
            .filter(|v| j.get(**v) > 0)
            .map(|v| {
                let mut p = j;
                match v {
                    Var::T => p.t -= 1,
                    Var::X => p.x -= 1,
                    _ => p.y -= 1,
                }
                (p, *v)
            })
            .next()
            .expect("order at least one");
        let d = total_derivative(&dq[&parent], v)?;
        dq.insert(j, d.clone());
        let mut e = d;
        for (c, w) in field.xi.iter().zip(BASE) {
            e = e + c * Expr::jet(j.bump(w));
        }
        let high: BTreeSet<JetIndex> = e
            .free_symbols()
            .into_iter()
            .filter_map(|s| s.jet())
            .filter(|k| k.order() > j.order())
            .collect();
        let mut subs = HashMap::new();
        for k in high {
            cancelled.push((j, k, e.diff(k)?));
            subs.insert(Symbol::Jet(k), Expr::zero());
        }
        eta.insert(j, e.substitute(&subs));
    }
    Ok(Prolongation { eta, cancelled })
}

/// Samples `t, x, y` from a box and every jet coordinate up to third order
/// uniformly in `[−2, 2]`.
#[derive(Debug, Clone)]
pub struct JetSampler {
    pub base: SampleBox,
    pub jet_range: (f64, f64),
}

impl JetSampler {
    pub fn new(base: SampleBox) -> Self {
        JetSampler {
            base,
            jet_range: (-2.0, 2.0),
        }
    }
}

impl PointSampler for JetSampler {
    fn sample(&self, rng: &mut dyn RngCore) -> Bindings<C64> {
        let mut b = self.base.sample(rng);
        let (lo, hi) = self.jet_range;
        for j in jets_up_to(3) {
            b.set(j, C64::new(rng.gen_range(lo..hi), 0.0));
        }
        b
    }
}

#[derive(Debug, Error)]
pub enum SymmetryError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("zero test for {name}: {source}")]
    ZeroTest {
        name: String,
        #[source]
        source: ZeroTestError,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub name: String,
    pub pass: bool,
    pub max_residual: f64,
    pub evaluated: usize,
    pub skipped: usize,
    pub seed: u64,
    pub witness: Option<Witness>,
    /// Whether every third-order term of the prolongation cancelled.
    pub prolongation_consistent: bool,
}

/// Builds the determining expression `pr⁽²⁾X(Δ)` restricted to `Δ = 0`.
pub fn determining_expression(field: &VectorField, eq: &Equation) -> Result<(Expr, Prolongation), ExprError> {
    let delta = eq.expr();
    let pr = prolong2(field)?;
    let mut terms = Vec::new();
    for (c, v) in field.xi.iter().zip(BASE) {
        if !c.is_zero() {
            terms.push(c * delta.diff(v)?);
        }
    }
    terms.push(&field.eta * delta.diff(JetIndex::U)?);
    for (j, e) in &pr.eta {
        let d = delta.diff(*j)?;
        if !d.is_zero() {
            terms.push(e * d);
        }
    }
    let raw = Expr::sum(terms);
    let shell = eq.ut_on_shell();
    let mut subs = HashMap::new();
    subs.insert(Symbol::Jet(JetIndex::new(1, 1, 0)), total_derivative(&shell, Var::X)?);
    subs.insert(Symbol::Jet(JetIndex::new(1, 0, 1)), total_derivative(&shell, Var::Y)?);
    subs.insert(Symbol::Jet(JetIndex::UT), shell);
    Ok((raw.substitute(&subs), pr))
}

/// Randomised check that `field` is a point symmetry of `eq` for `params`.
pub fn check_symmetry(
    field: &VectorField,
    eq: &Equation,
    params: &ModelParams,
    opts: &ZeroTestOptions,
) -> Result<SymmetryReport, SymmetryError> {
    check_symmetry_on(field, eq, &params.bindings(), &JetSampler::new(params.sample_box()), opts)
}

/// As [`check_symmetry`] with explicit parameter bindings and sampler.
pub fn check_symmetry_on(
    field: &VectorField,
    eq: &Equation,
    fixed: &Bindings<C64>,
    sampler: &JetSampler,
    opts: &ZeroTestOptions,
) -> Result<SymmetryReport, SymmetryError> {
    let (e, pr) = determining_expression(field, eq)?;
    let wrap = |source| SymmetryError::ZeroTest {
        name: field.name.clone(),
        source,
    };
    let mut consistent = true;
    for (_, _, c) in &pr.cancelled {
        if c.is_zero() {
            continue;
        }
        let z = is_probably_zero(c, sampler, fixed, opts).map_err(wrap)?;
        consistent &= z.is_zero;
    }
    let z = is_probably_zero(&e, sampler, fixed, opts).map_err(wrap)?;
    Ok(SymmetryReport {
        name: field.name.clone(),
        pass: z.is_zero && consistent,
        max_residual: z.max_residual,
        evaluated: z.evaluated,
        skipped: z.skipped,
        seed: opts.seed,
        witness: z.witness,
        prolongation_consistent: consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_equation, CaseTag};
    use crate::Param;

    fn v(v: Var) -> Expr {
        Expr::var(v)
    }

    #[test]
    fn total_derivative_of_product() {
        // D_x (x u_y) = u_y + x u_xy
        let f = v(Var::X) * Expr::jet(JetIndex::UY);
        let d = total_derivative(&f, Var::X).unwrap();
        let expected = Expr::jet(JetIndex::UY) + v(Var::X) * Expr::jet(JetIndex::UXY);
        assert_eq!(d.normalize(), expected.normalize());
    }

    #[test]
    fn translation_has_trivial_prolongation() {
        let f = VectorField::new("dt", Expr::one(), Expr::zero(), Expr::zero(), Expr::zero());
        let pr = prolong2(&f).unwrap();
        for e in pr.eta.values() {
            assert!(e.normalize().is_zero(), "{e}");
        }
    }

    #[test]
    fn scaling_prolongation() {
        // X = x∂x: η^x = −u_x, η^{xx} = −2u_xx, η^{xy} = −u_xy
        let f = VectorField::new("x", Expr::zero(), v(Var::X), Expr::zero(), Expr::zero());
        let pr = prolong2(&f).unwrap();
        let check = |j: JetIndex, k: i64| {
            assert_eq!(pr.eta[&j].normalize(), (k * Expr::jet(j)).normalize(), "{j}");
        };
        check(JetIndex::UX, -1);
        check(JetIndex::UXX, -2);
        check(JetIndex::UXY, -1);
        assert!(pr.eta[&JetIndex::UYY].normalize().is_zero());
    }

    #[test]
    fn dilation_of_u_prolongs_to_itself() {
        // u∂u: η^J = u_J for every jet
        let f = VectorField::new("u", Expr::zero(), Expr::zero(), Expr::zero(), u());
        let pr = prolong2(&f).unwrap();
        for (j, e) in &pr.eta {
            assert_eq!(e.normalize(), Expr::jet(*j).normalize(), "{j}");
        }
    }

    #[test]
    fn galilean_boost_is_not_a_symmetry() {
        let p = ModelParams::defaults(CaseTag::ConstVol);
        let eq = build_equation(&p);
        let f = VectorField::new("t dx", Expr::zero(), v(Var::T), Expr::zero(), Expr::zero());
        let r = check_symmetry(&f, &eq, &p, &ZeroTestOptions::default()).unwrap();
        assert!(!r.pass);
        assert!(r.witness.is_some());
    }

    #[test]
    fn jets_enumerated() {
        assert_eq!(second_order_jets().len(), 9);
        assert_eq!(jets_up_to(3).len(), 20);
    }

    #[test]
    fn commutator_of_dt_and_t_dt() {
        let a = VectorField::new("a", Expr::one(), Expr::zero(), Expr::zero(), Expr::zero());
        let b = VectorField::new("b", v(Var::T), Expr::zero(), Expr::zero(), Expr::zero());
        let c = commutator(&a, &b).unwrap();
        assert!(c.xi[0].normalize().is_one());
        assert!(c.eta.normalize().is_zero());
    }

    #[test]
    fn obvious_symmetries_pass_and_bogus_fails() {
        let p = ModelParams::defaults(CaseTag::ConstVol);
        let eq = build_equation(&p);
        let opts = ZeroTestOptions::default();
        for f in [
            VectorField::new("dt", Expr::one(), Expr::zero(), Expr::zero(), Expr::zero()),
            VectorField::new("x", Expr::zero(), v(Var::X), Expr::zero(), Expr::zero()),
            VectorField::new("u", Expr::zero(), Expr::zero(), Expr::zero(), u()),
            VectorField::new(
                "y",
                Expr::zero(),
                Expr::zero(),
                (-Expr::param(Param::Alpha) * v(Var::T)).exp(),
                Expr::zero(),
            ),
        ] {
            let r = check_symmetry(&f, &eq, &p, &opts).unwrap();
            assert!(r.pass, "{}: {}", f.name, r.max_residual);
            assert!(r.prolongation_consistent);
        }
        let bogus = VectorField::new("dy", Expr::zero(), Expr::zero(), Expr::one(), Expr::zero());
        let r = check_symmetry(&bogus, &eq, &p, &opts).unwrap();
        assert!(!r.pass);
        assert!(r.witness.is_some());
    }
}
