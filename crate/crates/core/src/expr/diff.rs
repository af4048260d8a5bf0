use std::collections::HashMap;

use super::{Expr, ExprError, Node, Special, Symbol};

impl Expr {
    /// Exact partial derivative with respect to a variable, jet coordinate or
    /// parameter. Jet coordinates are independent symbols here; total
    /// derivatives live in the jet module.
    pub fn diff(&self, s: impl Into<Symbol>) -> Result<Expr, ExprError> {
        let s = s.into();
        let mut memo = HashMap::new();
        diff_memo(self, s, &mut memo)
    }

    pub fn diff_n(&self, s: impl Into<Symbol>, n: usize) -> Result<Expr, ExprError> {
        let s = s.into();
        let mut e = self.clone();
        for _ in 0..n {
            e = e.diff(s)?;
        }
        Ok(e)
    }
}

fn diff_memo(e: &Expr, s: Symbol, memo: &mut HashMap<usize, Expr>) -> Result<Expr, ExprError> {
    if let Some(d) = memo.get(&e.ptr_id()) {
        return Ok(d.clone());
    }
    let d = match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Sym(t) => {
            if *t == s {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Sum(terms) => {
            let mut out = Vec::with_capacity(terms.len());
            for t in terms {
                out.push(diff_memo(t, s, memo)?);
            }
            Expr::sum(out)
        }
        Node::Product(factors) => {
            let mut out = Vec::new();
            for (i, f) in factors.iter().enumerate() {
                let df = diff_memo(f, s, memo)?;
                if df.is_zero() {
                    continue;
                }
                let mut term: Vec<Expr> = factors
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, g)| g.clone())
                    .collect();
                term.push(df);
                out.push(Expr::product(term));
            }
            Expr::sum(out)
        }
        Node::Quotient(n, den) => {
            let dn = diff_memo(n, s, memo)?;
            let dd = diff_memo(den, s, memo)?;
            let first = &dn / den;
            if dd.is_zero() {
                first
            } else {
                first - n * &dd / den.powi(2)
            }
        }
        Node::Pow(base, ex) => {
            let db = diff_memo(base, s, memo)?;
            let de = diff_memo(ex, s, memo)?;
            let mut out = Vec::new();
            if !db.is_zero() {
                out.push(ex * base.pow(&(ex - 1)) * &db);
            }
            if !de.is_zero() {
                out.push(e * base.ln() * &de);
            }
            Expr::sum(out)
        }
        Node::Exp(a) => e * diff_memo(a, s, memo)?,
        Node::Ln(a) => diff_memo(a, s, memo)? / a,
        Node::Sqrt(a) => diff_memo(a, s, memo)? / (2 * e),
        Node::Special(kind, params, z) => {
            for p in params {
                if p.depends_on(s) {
                    return Err(ExprError::UnsupportedDerivative {
                        node: e.to_string(),
                        symbol: s,
                    });
                }
            }
            let dz = diff_memo(z, s, memo)?;
            if dz.is_zero() {
                Expr::zero()
            } else {
                special_derivative(*kind, params, z) * dz
            }
        }
    };
    memo.insert(e.ptr_id(), d.clone());
    Ok(d)
}

/// d/dz of a special-function node, expressed through the same family.
fn special_derivative(kind: Special, p: &[Expr], z: &Expr) -> Expr {
    match kind {
        Special::KummerM => {
            let (a, b) = (&p[0], &p[1]);
            a / b * Expr::kummer_m(a + 1, b + 1, z.clone())
        }
        Special::KummerU => {
            let a = &p[0];
            -(a * Expr::kummer_u(a + 1, &p[1] + 1, z.clone()))
        }
        Special::BesselJ | Special::BesselY => {
            let n = &p[0];
            let f = |order: Expr| match kind {
                Special::BesselJ => Expr::bessel_j(order, z.clone()),
                _ => Expr::bessel_y(order, z.clone()),
            };
            Expr::half() * (f(n - 1) - f(n + 1))
        }
        Special::WhittakerM | Special::WhittakerW => {
            let (kappa, mu) = (&p[0], &p[1]);
            let a = Expr::half() + mu - kappa;
            let self_term = (Expr::frac(-1, 2) + (mu + Expr::half()) / z) * Expr::from_node(Node::Special(kind, p.to_vec(), z.clone()));
            let shifted = |k: Expr, m: Expr| Expr::from_node(Node::Special(kind, vec![k, m], z.clone()));
            let lowered = shifted(kappa - Expr::half(), mu + Expr::half()) / z.sqrt();
            let coeff = if kind == Special::WhittakerM { a / (2 * mu + 1) } else { -a };
            self_term + coeff * lowered
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Bindings, JetIndex, Param, Var};
    use crate::C64;

    fn x() -> Expr {
        Expr::var(Var::X)
    }

    #[test]
    fn product_rule_with_jets() {
        let ux = Expr::jet(JetIndex::UX);
        let d = (x() * &ux).diff(Var::X).unwrap();
        assert_eq!(d, ux);
    }

    #[test]
    fn exponential_chain_rule() {
        let a = Expr::param(Param::Alpha);
        let t = Expr::var(Var::T);
        let d = (&a * &t).exp().diff(Var::T).unwrap();
        let b = Bindings::new().with(Param::Alpha, 1.2f64).with(Var::T, 0.5f64);
        let expected = 1.2 * (0.6f64).exp();
        assert!((d.eval(&b).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn kummer_parameter_dependence_is_rejected() {
        let e = Expr::kummer_m(x(), Expr::one(), x());
        assert!(matches!(e.diff(Var::X), Err(ExprError::UnsupportedDerivative { .. })));
    }

    #[test]
    fn special_derivatives_match_finite_differences() {
        let y = Expr::var(Var::Y);
        let z = Expr::frac(3, 2) * &y + Expr::frac(1, 5);
        let cases = [
            Expr::kummer_m(Expr::frac(3, 10), Expr::frac(7, 5), z.clone()),
            Expr::kummer_u(Expr::frac(3, 10), Expr::frac(7, 5), z.clone()),
            Expr::whittaker_m(Expr::frac(1, 5), Expr::frac(1, 3), z.clone()),
            Expr::whittaker_w(Expr::frac(1, 5), Expr::frac(1, 3), z.clone()),
            Expr::bessel_j(Expr::frac(3, 10), z.clone()),
            Expr::bessel_y(Expr::frac(3, 10), z.clone()),
        ];
        for e in cases {
            let d = e.diff(Var::Y).unwrap();
            let at = |v: f64| e.eval(&Bindings::new().with(Var::Y, C64::new(v, 0.0))).unwrap();
            let h = 1e-5;
            let fd = (at(0.9 + h) - at(0.9 - h)) / (2.0 * h);
            let an = d.eval(&Bindings::new().with(Var::Y, C64::new(0.9, 0.0))).unwrap();
            assert!((fd - an).norm() < 1e-7 * an.norm().max(1.0), "{e}: {fd} vs {an}");
        }
    }
}
