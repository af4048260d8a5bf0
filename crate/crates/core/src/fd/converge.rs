use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{solve, Coefficients, FdError, GridSpec, Scheme, UxStencil};
use crate::model::ModelParams;
use crate::scalar::rational_to_f64;
use crate::solutions::{build_solution, SolutionError};

/// Exact solution that supplies terminal and boundary data and the error
/// reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Reference {
    /// `u = x`.
    Affine,
    /// `u = e^{rt}`.
    Discount,
    /// A catalog entry, by id.
    Catalog(String),
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reference::Affine => f.write_str("u=x"),
            Reference::Discount => f.write_str("u=exp(rt)"),
            Reference::Catalog(id) => f.write_str(id),
        }
    }
}

impl FromStr for Reference {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "u=x" | "x" => Ok(Reference::Affine),
            "u=exp(rt)" | "exp-rt" => Ok(Reference::Discount),
            id if crate::solutions::CASE_IDS.contains(&id) => Ok(Reference::Catalog(id.to_string())),
            other => Err(format!("unknown reference solution {other:?}")),
        }
    }
}

impl From<Reference> for String {
    fn from(r: Reference) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Reference {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

type Field = Box<dyn Fn(f64, f64, f64) -> f64 + Sync>;

impl Reference {
    pub fn field(&self, params: &ModelParams) -> Result<Field, ConvergeError> {
        Ok(match self {
            Reference::Affine => Box::new(|_, x, _| x),
            Reference::Discount => {
                let r = rational_to_f64(&params.r);
                Box::new(move |t, _, _| (r * t).exp())
            }
            Reference::Catalog(id) => {
                let ev = build_solution(id, params)?.evaluator()?;
                Box::new(move |t, x, y| ev.eval_real(t, x, y).unwrap_or(f64::NAN))
            }
        })
    }
}

#[derive(Debug, Error)]
pub enum ConvergeError {
    #[error(transparent)]
    Fd(#[from] FdError),
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error("a ladder needs at least 3 levels, got {0}")]
    ShortLadder(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
    pub h: f64,
    pub dt: f64,
    /// `max |u_h − u| / max |u|` over the grid at the initial time.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum OrderClaim {
    /// Errors at rounding level on every level; no order is meaningful.
    Exact,
    Observed {
        orders: Vec<f64>,
    },
    /// Errors did not decrease monotonically; only raw errors are reported.
    NonMonotone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub reference: Reference,
    pub scheme: Scheme,
    pub ux_stencil: UxStencil,
    pub params: std::collections::BTreeMap<String, f64>,
    pub levels: Vec<LevelReport>,
    pub claim: OrderClaim,
}

impl ConvergenceReport {
    pub fn orders(&self) -> &[f64] {
        match &self.claim {
            OrderClaim::Observed { orders } => orders,
            _ => &[],
        }
    }
}

/// Rounding-level threshold for [`OrderClaim::Exact`].
pub const EXACT_LEVEL: f64 = 1e-10;

/// Ladder of `levels` grids on the sampling box, halving `h` each time and
/// ending at `finest` intervals per direction. ADI steps scale with `h`,
/// explicit steps with `h²` (sized from the stability bound).
pub fn default_ladder(params: &ModelParams, scheme: Scheme, levels: usize, finest: usize) -> Vec<GridSpec> {
    let coef = Coefficients::new(params);
    (0..levels)
        .map(|l| {
            let n = (finest >> (levels - 1 - l)).max(2);
            let mut g = GridSpec::on_box(params, n, n + 1, scheme);
            if !scheme.is_adi() {
                g.nt = 3;
                let bound = g.explicit_bound(&coef);
                g.nt = ((g.t.1 - g.t.0) / (0.9 * bound)).ceil() as usize + 1;
            }
            g
        })
        .collect()
}

/// Runs every grid of the ladder against the reference and reports the
/// observed order `log(e_coarse/e_fine) / log(h_coarse/h_fine)` per step.
pub fn convergence_order(reference: &Reference, params: &ModelParams, ladder: &[GridSpec]) -> Result<ConvergenceReport, ConvergeError> {
    if ladder.len() < 3 {
        return Err(ConvergeError::ShortLadder(ladder.len()));
    }
    let u = reference.field(params)?;
    let mut levels = Vec::with_capacity(ladder.len());
    for grid in ladder {
        let t1 = grid.t.1;
        let sol = solve::<f64>(params, grid, &|x, y| u(t1, x, y), &|t, x, y| u(t, x, y))?;
        let init = sol.initial();
        let (xs, ys) = (grid.xs(), grid.ys());
        let (mut err, mut scale) = (0.0f64, 0.0f64);
        for (j, &y) in ys.iter().enumerate() {
            for (i, &x) in xs.iter().enumerate() {
                let exact = u(init.t, x, y);
                err = err.max((init.values[j * grid.nx + i] - exact).abs());
                scale = scale.max(exact.abs());
            }
        }
        levels.push(LevelReport {
            nx: grid.nx,
            ny: grid.ny,
            nt: grid.nt,
            h: grid.hx().max(grid.hy()),
            dt: grid.dt(),
            error: err / scale.max(f64::MIN_POSITIVE),
        });
    }
    let claim = if levels.iter().all(|l| l.error < EXACT_LEVEL) {
        OrderClaim::Exact
    } else if levels.windows(2).all(|w| w[1].error < w[0].error) {
        OrderClaim::Observed {
            orders: levels
                .windows(2)
                .map(|w| (w[0].error / w[1].error).ln() / (w[0].h / w[1].h).ln())
                .collect(),
        }
    } else {
        OrderClaim::NonMonotone
    };
    Ok(ConvergenceReport {
        reference: reference.clone(),
        scheme: ladder[0].scheme,
        ux_stencil: ladder[0].ux_stencil,
        params: params.to_f64_map(),
        levels,
        claim,
    })
}
