use crate::expr::{Expr, JetIndex, Param, Var};
use crate::jet::VectorField;
use crate::model::CaseTag;

fn p(x: Param) -> Expr {
    Expr::param(x)
}

fn v(x: Var) -> Expr {
    Expr::var(x)
}

fn u() -> Expr {
    Expr::jet(JetIndex::U)
}

fn z() -> Expr {
    Expr::zero()
}

/// A named linear combination of catalog generators.
#[derive(Debug, Clone)]
pub struct Combination {
    pub name: &'static str,
    pub coeffs: Vec<Expr>,
}

/// The generators of one symmetry class, with parameter symbols left free.
/// In the hyperbolic case `g` is the symbol [`Param::G`].
#[derive(Debug, Clone)]
pub struct GeneratorCatalog {
    pub case: CaseTag,
    pub generators: Vec<VectorField>,
    pub combination: Option<Combination>,
}

fn common() -> Vec<VectorField> {
    vec![
        VectorField::new("X1", Expr::one(), z(), z(), z()),
        VectorField::new("X2", z(), v(Var::X), z(), z()),
        VectorField::new("X3", z(), z(), z(), u()),
    ]
}

/// `X_b = b ∂u`; a symmetry whenever `b(t, x, y)` solves the equation.
pub fn solution_field(name: &str, b: Expr) -> VectorField {
    VectorField::new(name, z(), z(), z(), b)
}

impl GeneratorCatalog {
    pub fn new(case: CaseTag) -> Self {
        let (t, x, y) = (v(Var::T), v(Var::X), v(Var::Y));
        let (r, rho, m, mu, alpha, beta) = (
            p(Param::R),
            p(Param::Rho),
            p(Param::M),
            p(Param::Mu),
            p(Param::Alpha),
            p(Param::Beta),
        );
        let mut gens = common();
        let mut combination = None;
        match case {
            CaseTag::ConstVol => {
                let f0 = p(Param::F0);
                let eat = (&alpha * &t).exp();
                gens.push(VectorField::new("X4", z(), z(), (-(&alpha * &t)).exp(), z()));
                gens.push(VectorField::new(
                    "X5",
                    z(),
                    f0.powi(2) * (rho.powi(2) + &alpha * &t) * &x,
                    &f0 * &rho * &beta,
                    Expr::half() * &alpha * (&t * (f0.powi(2) - 2 * &r) + 2 * x.ln()) * u(),
                ));
                gens.push(VectorField::new(
                    "X6",
                    z(),
                    2 * &beta * f0.powi(2) * &rho * &eat * &x,
                    beta.powi(2) * &f0 * &eat,
                    -2 * &eat * (&alpha * &f0 * (&m - &y) + &beta * &rho * (&r - &mu)) * u(),
                ));
            }
            CaseTag::HypGNonzero => {
                let (g, k) = (p(Param::G), p(Param::K));
                let ym = &y - &m;
                let em = (-(&g * &t)).exp();
                let ep = (&g * &t).exp();
                gens.push(VectorField::new(
                    "X4",
                    em.clone(),
                    &em * &r * &x,
                    -(&em * Expr::half() * &g * &ym),
                    &em * u() * &r,
                ));
                gens.push(VectorField::new(
                    "X5",
                    ep.clone(),
                    &ep * (&x / &beta) * (&rho * &g * &k + &beta * &r),
                    &ep * Expr::half() * &g * &ym,
                    &ep * u() / (2 * beta.powi(2)) * (g.powi(2) * ym.powi(2) + beta.powi(2) * (2 * &r - &g)),
                ));
                combination = Some(Combination {
                    name: "X",
                    coeffs: vec![
                        2 * &g,
                        g.powi(2) * &rho * &k / &beta + 2 * &r,
                        -(Expr::half() * &g * (&g - 4 * &r)),
                        z(),
                        z(),
                    ],
                });
            }
            CaseTag::HypGZero => {
                let k = p(Param::K);
                let ym = &y - &m;
                gens.push(VectorField::new(
                    "X4",
                    t.clone(),
                    (&rho * &k + 2 * &beta * &r * &t) * &x / (2 * &beta),
                    &ym / 2,
                    &r * &t * u(),
                ));
                gens.push(VectorField::new(
                    "X5",
                    t.powi(2),
                    &x * &t / &beta * (&rho * &k + &beta * &r * &t),
                    &t * &ym,
                    u() / (2 * beta.powi(2)) * (ym.powi(2) + beta.powi(2) * (2 * &r * t.powi(2) - &t)),
                ));
            }
        }
        GeneratorCatalog {
            case,
            generators: gens,
            combination,
        }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `Σ c_i X_i` as a single field.
    pub fn linear_combination(&self, coeffs: &[Expr], name: &str) -> VectorField {
        assert_eq!(coeffs.len(), self.len(), "one coefficient per generator");
        let mut comps: [Vec<Expr>; 4] = Default::default();
        for (c, g) in coeffs.iter().zip(&self.generators) {
            if c.is_zero() {
                continue;
            }
            for (slot, comp) in comps.iter_mut().zip(g.components()) {
                if !comp.is_zero() {
                    slot.push(c * comp);
                }
            }
        }
        let [a, b, cc, d] = comps.map(Expr::sum);
        VectorField::new(name, a, b, cc, d)
    }
}
