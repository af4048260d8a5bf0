use std::fmt;

use serde::{Deserialize, Serialize};

/// Independent variables of the equation plus the reduction variable `h`
/// used by the reduced ODEs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    T,
    X,
    Y,
    H,
}

/// Derivative multi-index of the dependent variable `u`.
///
/// `(0,0,0)` is `u` itself, `(1,0,0)` is `u_t`, `(0,2,0)` is `u_xx`, and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JetIndex {
    pub t: u8,
    pub x: u8,
    pub y: u8,
}

impl JetIndex {
    pub const U: JetIndex = JetIndex::new(0, 0, 0);
    pub const UT: JetIndex = JetIndex::new(1, 0, 0);
    pub const UX: JetIndex = JetIndex::new(0, 1, 0);
    pub const UY: JetIndex = JetIndex::new(0, 0, 1);
    pub const UXX: JetIndex = JetIndex::new(0, 2, 0);
    pub const UXY: JetIndex = JetIndex::new(0, 1, 1);
    pub const UYY: JetIndex = JetIndex::new(0, 0, 2);

    pub const fn new(t: u8, x: u8, y: u8) -> Self {
        JetIndex { t, x, y }
    }

    pub fn order(self) -> u8 {
        self.t + self.x + self.y
    }

    /// The index obtained by one more derivative in `v` (which must be t, x or y).
    pub fn bump(self, v: Var) -> JetIndex {
        let mut j = self;
        match v {
            Var::T => j.t += 1,
            Var::X => j.x += 1,
            Var::Y => j.y += 1,
            Var::H => panic!("jet coordinates are indexed by t, x, y only"),
        }
        j
    }

    pub fn get(self, v: Var) -> u8 {
        match v {
            Var::T => self.t,
            Var::X => self.x,
            Var::Y => self.y,
            Var::H => 0,
        }
    }
}

impl fmt::Display for JetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order() == 0 {
            return f.write_str("u");
        }
        f.write_str("u_")?;
        for _ in 0..self.t {
            f.write_str("t")?;
        }
        for _ in 0..self.x {
            f.write_str("x")?;
        }
        for _ in 0..self.y {
            f.write_str("y")?;
        }
        Ok(())
    }
}

/// Named parameters: the model constants, the derived constant `g`, the
/// reduction parameters of the invariant solutions and integration constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Param {
    R,
    Rho,
    M,
    Mu,
    Alpha,
    Beta,
    F0,
    K,
    G,
    K1,
    K2,
    /// Coefficient of `u∂u` added to `X4`/`X6` in the constant-volatility reductions.
    Ks,
    A,
    B,
    P,
    C,
    C1,
    C2,
}

impl Param {
    pub const ALL: [Param; 18] = [
        Param::R,
        Param::Rho,
        Param::M,
        Param::Mu,
        Param::Alpha,
        Param::Beta,
        Param::F0,
        Param::K,
        Param::G,
        Param::K1,
        Param::K2,
        Param::Ks,
        Param::A,
        Param::B,
        Param::P,
        Param::C,
        Param::C1,
        Param::C2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::R => "r",
            Param::Rho => "rho",
            Param::M => "m",
            Param::Mu => "mu",
            Param::Alpha => "alpha",
            Param::Beta => "beta",
            Param::F0 => "f0",
            Param::K => "k",
            Param::G => "g",
            Param::K1 => "k1",
            Param::K2 => "k2",
            Param::Ks => "ks",
            Param::A => "a",
            Param::B => "b",
            Param::P => "p",
            Param::C => "C",
            Param::C1 => "C1",
            Param::C2 => "C2",
        }
    }

    pub fn from_name(name: &str) -> Option<Param> {
        Param::ALL.into_iter().find(|p| p.name() == name)
    }
}

/// Any leaf symbol an expression can depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    Var(Var),
    Jet(JetIndex),
    Param(Param),
}

impl Symbol {
    pub const T: Symbol = Symbol::Var(Var::T);
    pub const X: Symbol = Symbol::Var(Var::X);
    pub const Y: Symbol = Symbol::Var(Var::Y);
    pub const H: Symbol = Symbol::Var(Var::H);

    pub fn jet(self) -> Option<JetIndex> {
        match self {
            Symbol::Jet(j) => Some(j),
            _ => None,
        }
    }
}

impl From<Var> for Symbol {
    fn from(v: Var) -> Self {
        Symbol::Var(v)
    }
}

impl From<JetIndex> for Symbol {
    fn from(j: JetIndex) -> Self {
        Symbol::Jet(j)
    }
}

impl From<Param> for Symbol {
    fn from(p: Param) -> Self {
        Symbol::Param(p)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::T => "t",
            Var::X => "x",
            Var::Y => "y",
            Var::H => "h",
        })
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Var(v) => v.fmt(f),
            Symbol::Jet(j) => j.fmt(f),
            Symbol::Param(p) => f.write_str(p.name()),
        }
    }
}
