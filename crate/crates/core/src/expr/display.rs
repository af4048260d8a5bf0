//! Prefix-notation dump, for debugging only.
//!
//! `(+ a b ...)`, `(* a b ...)`, `(/ n d)`, `(^ b e)`, `(exp a)`, `(ln a)`,
//! `(sqrt a)`, `(KummerM a b z)` and so on; rationals print as `p` or `p/q`.

use std::fmt;

use super::{Expr, Node};

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(q) => write!(f, "{q}"),
            Node::Sym(s) => write!(f, "{s}"),
            Node::Sum(v) => list(f, "+", v),
            Node::Product(v) => list(f, "*", v),
            Node::Quotient(a, b) => write!(f, "(/ {a} {b})"),
            Node::Pow(a, b) => write!(f, "(^ {a} {b})"),
            Node::Exp(a) => write!(f, "(exp {a})"),
            Node::Ln(a) => write!(f, "(ln {a})"),
            Node::Sqrt(a) => write!(f, "(sqrt {a})"),
            Node::Special(k, ps, z) => {
                write!(f, "({}", k.name())?;
                for p in ps {
                    write!(f, " {p}")?;
                }
                write!(f, " {z})")
            }
        }
    }
}

fn list(f: &mut fmt::Formatter<'_>, op: &str, v: &[Expr]) -> fmt::Result {
    write!(f, "({op}")?;
    for e in v {
        write!(f, " {e}")?;
    }
    f.write_str(")")
}
