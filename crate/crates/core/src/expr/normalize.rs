//! Lightweight structural normal form.
//!
//! Flattens sums and products, folds constants, merges like terms
//! (`2x + 3x -> 5x`) and like bases (`x^a x^b -> x^(a+b)`), rewrites `a/b`
//! as `a * b^-1`, and sorts operands. Nothing is expanded, so two equal
//! expressions need not normalize identically; that is the zero test's job.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{Expr, Node};
use crate::Rational;

const MAX_PASSES: usize = 16;

impl Expr {
    pub fn normalize(&self) -> Expr {
        let mut cur = self.clone();
        for _ in 0..MAX_PASSES {
            let next = pass(&cur);
            if next == cur {
                return next;
            }
            cur = next;
        }
        cur
    }
}

fn pass(e: &Expr) -> Expr {
    match e.node() {
        Node::Const(_) | Node::Sym(_) => e.clone(),
        Node::Sum(terms) => collect_sum(terms.iter().map(pass)),
        Node::Product(factors) => collect_product(factors.iter().map(pass)),
        Node::Quotient(a, b) => collect_product([pass(a), power(pass(b), Expr::int(-1))]),
        Node::Pow(b, x) => power(pass(b), pass(x)),
        Node::Exp(a) => pass(a).exp(),
        Node::Ln(a) => pass(a).ln(),
        Node::Sqrt(a) => pass(a).sqrt(),
        Node::Special(k, ps, z) => Expr::from_node(Node::Special(*k, ps.iter().map(pass).collect(), pass(z))),
    }
}

fn is_integer_const(e: &Expr) -> bool {
    e.as_const().is_some_and(|q| q.is_integer())
}

fn power(base: Expr, exponent: Expr) -> Expr {
    if is_integer_const(&exponent) {
        match base.node() {
            Node::Pow(b, inner) => {
                return power(b.clone(), collect_product([inner.clone(), exponent]));
            }
            Node::Product(fs) => {
                return collect_product(fs.iter().map(|f| power(f.clone(), exponent.clone())));
            }
            _ => {}
        }
    }
    base.pow(&exponent)
}

fn split_coeff(t: &Expr) -> (Rational, Expr) {
    match t.node() {
        Node::Const(q) => (q.clone(), Expr::one()),
        Node::Product(fs) => match fs[0].node() {
            Node::Const(q) => (q.clone(), Expr::product(fs[1..].iter().cloned())),
            _ => (Rational::one(), t.clone()),
        },
        _ => (Rational::one(), t.clone()),
    }
}

fn collect_sum(terms: impl Iterator<Item = Expr>) -> Expr {
    let mut groups: BTreeMap<Expr, Rational> = BTreeMap::new();
    let mut push = |t: &Expr| {
        let (c, rest) = split_coeff(t);
        *groups.entry(rest).or_insert_with(Rational::zero) += c;
    };
    for t in terms {
        match t.node() {
            Node::Sum(inner) => inner.iter().for_each(&mut push),
            _ => push(&t),
        }
    }
    let one = Expr::one();
    let mut out = Vec::with_capacity(groups.len());
    if let Some(c) = groups.remove(&one) {
        if !c.is_zero() {
            out.push(Expr::constant(c));
        }
    }
    for (rest, c) in groups {
        if !c.is_zero() {
            out.push(Expr::product([Expr::constant(c), rest]));
        }
    }
    Expr::sum(out)
}

fn split_pow(f: &Expr) -> (Expr, Expr) {
    match f.node() {
        Node::Pow(b, x) => (b.clone(), x.clone()),
        _ => (f.clone(), Expr::one()),
    }
}

fn collect_product(factors: impl IntoIterator<Item = Expr>) -> Expr {
    let mut constant = Rational::one();
    let mut groups: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    let mut push = |f: &Expr, constant: &mut Rational| match f.node() {
        Node::Const(q) => *constant *= q,
        _ => {
            let (b, x) = split_pow(f);
            groups.entry(b).or_default().push(x);
        }
    };
    for f in factors {
        match f.node() {
            Node::Product(inner) => inner.iter().for_each(|g| push(g, &mut constant)),
            _ => push(&f, &mut constant),
        }
    }
    if constant.is_zero() {
        return Expr::zero();
    }
    let mut out = Vec::with_capacity(groups.len());
    for (base, exps) in groups {
        let x = if exps.len() == 1 {
            exps.into_iter().next().unwrap()
        } else {
            collect_sum(exps.into_iter())
        };
        let f = base.pow(&x);
        match f.node() {
            Node::Const(q) => constant *= q,
            _ => out.push(f),
        }
    }
    if constant.is_zero() {
        return Expr::zero();
    }
    out.insert(0, Expr::constant(constant));
    Expr::product(out)
}
