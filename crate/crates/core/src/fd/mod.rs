//! Finite differences for the pricing equation as a terminal-value problem.
//!
//! With `τ = T − t` the equation becomes `u_τ = A0 u + A1 u + A2 u`, where
//! `A0` is the mixed term, `A1` collects the x-derivatives and half the
//! discount, `A2` the y-derivatives and the other half. All spatial
//! derivatives use second-order central differences. ADI schemes treat `A0`
//! explicitly and `A1`, `A2` implicitly, one direction at a time.

mod converge;

use num_traits::Float;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelParams, VolCase};
use crate::scalar::rational_to_f64;

pub use converge::{convergence_order, default_ladder, ConvergeError, ConvergenceReport, LevelReport, OrderClaim, Reference, EXACT_LEVEL};

/// Magnitude above which a solve is declared unstable.
pub const BLOWUP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Scheme {
    /// Forward Euler in τ; `Δτ` must satisfy [`GridSpec::explicit_bound`].
    Explicit,
    /// Douglas ADI, first order in time once the mixed term is present.
    Douglas { theta: f64 },
    /// Modified Craig–Sneyd ADI, second order in time for `θ ≥ 1/3`.
    Mcs { theta: f64 },
}

impl Default for Scheme {
    fn default() -> Self {
        Scheme::Mcs { theta: 1.0 / 3.0 }
    }
}

impl Scheme {
    pub fn is_adi(&self) -> bool {
        !matches!(self, Scheme::Explicit)
    }
}

/// Stencil for `u_x`. The one-sided variant exists to check that the
/// convergence harness notices a first-order defect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UxStencil {
    #[default]
    Central,
    OneSided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub t: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
    pub scheme: Scheme,
    #[serde(default)]
    pub ux_stencil: UxStencil,
    /// Keep every n-th time level in the result besides both ends; 0 keeps the ends only.
    #[serde(default)]
    pub retain_every: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FdError {
    #[error("grid needs at least 3 nodes per direction, got nx={nx} ny={ny} nt={nt}")]
    TooFewNodes { nx: usize, ny: usize, nt: usize },
    #[error("empty or inverted {axis}-range ({lo}, {hi})")]
    BadRange { axis: char, lo: f64, hi: f64 },
    #[error("{axis}-range ({lo}, {hi}) leaves the domain box ({box_lo}, {box_hi})")]
    OutsideBox {
        axis: char,
        lo: f64,
        hi: f64,
        box_lo: f64,
        box_hi: f64,
    },
    #[error("explicit step {dt:.3e} exceeds the stability bound {bound:.3e}")]
    ExplicitStep { dt: f64, bound: f64 },
    #[error("ADI needs theta in (0, 1], got {0}")]
    Theta(f64),
    #[error("volatility singular on the grid: y-range must stay above m")]
    SingularVolatility,
    #[error("instability at t = {t}: |u| reached {magnitude:.3e} after {step} steps")]
    Unstable { step: usize, t: f64, magnitude: f64 },
    #[error("non-finite data at (t, x, y) = ({t}, {x}, {y})")]
    BadData { t: f64, x: f64, y: f64 },
}

impl GridSpec {
    /// Grid over the parameters' sampling box.
    pub fn on_box(params: &ModelParams, n: usize, nt: usize, scheme: Scheme) -> Self {
        let m = rational_to_f64(&params.m);
        GridSpec {
            x: (0.5, 2.0),
            y: (m + 0.2, m + 1.5),
            t: (0.1, 1.0),
            nx: n + 1,
            ny: n + 1,
            nt,
            scheme,
            ux_stencil: UxStencil::Central,
            retain_every: 0,
        }
    }

    pub fn hx(&self) -> f64 {
        (self.x.1 - self.x.0) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y.1 - self.y.0) / (self.ny - 1) as f64
    }

    /// Time step; `nt` counts time levels, so there are `nt − 1` steps.
    pub fn dt(&self) -> f64 {
        (self.t.1 - self.t.0) / (self.nt - 1) as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x.0 + i as f64 * self.hx()).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y.0 + j as f64 * self.hy()).collect()
    }

    /// Largest stable forward-Euler step: the centre weight of the explicit
    /// update must stay non-negative, `Δτ (2a/hx² + 2c/hy² + |b|/(hx hy) + r) ≤ 1`.
    pub fn explicit_bound(&self, coef: &Coefficients) -> f64 {
        let (hx, hy) = (self.hx(), self.hy());
        let mut worst: f64 = 0.0;
        for &y in &self.ys() {
            for &x in &self.xs() {
                let (a, b, c) = coef.diffusion(x, y);
                worst = worst.max(2.0 * a / (hx * hx) + 2.0 * c / (hy * hy) + b.abs() / (hx * hy) + coef.r);
            }
        }
        1.0 / worst
    }

    pub fn validate(&self, params: &ModelParams) -> Result<(), FdError> {
        if self.nx < 3 || self.ny < 3 || self.nt < 3 {
            return Err(FdError::TooFewNodes {
                nx: self.nx,
                ny: self.ny,
                nt: self.nt,
            });
        }
        let m = rational_to_f64(&params.m);
        let bx = [
            ('x', self.x, (0.5, 2.0)),
            ('y', self.y, (m + 0.2, m + 1.5)),
            ('t', self.t, (0.1, 1.0)),
        ];
        for (axis, (lo, hi), (box_lo, box_hi)) in bx {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(FdError::BadRange { axis, lo, hi });
            }
            let slack = 1e-12 * (box_hi - box_lo);
            if lo < box_lo - slack || hi > box_hi + slack {
                return Err(FdError::OutsideBox {
                    axis,
                    lo,
                    hi,
                    box_lo,
                    box_hi,
                });
            }
        }
        match self.scheme {
            Scheme::Explicit => {
                let bound = self.explicit_bound(&Coefficients::new(params));
                if self.dt() > bound {
                    return Err(FdError::ExplicitStep { dt: self.dt(), bound });
                }
            }
            Scheme::Douglas { theta } | Scheme::Mcs { theta } => {
                if !(theta > 0.0 && theta <= 1.0) {
                    return Err(FdError::Theta(theta));
                }
            }
        }
        Ok(())
    }
}

/// Equation coefficients in double precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub r: f64,
    pub rho: f64,
    pub m: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    vol: Vol,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Vol {
    Const(f64),
    Hyperbolic(f64),
}

impl Coefficients {
    pub fn new(p: &ModelParams) -> Self {
        let f = rational_to_f64;
        Coefficients {
            r: f(&p.r),
            rho: f(&p.rho),
            m: f(&p.m),
            mu: f(&p.mu),
            alpha: f(&p.alpha),
            beta: f(&p.beta),
            vol: match &p.vol {
                VolCase::ConstVol { f0 } => Vol::Const(f(f0)),
                VolCase::HyperbolicVol { k } => Vol::Hyperbolic(f(k)),
            },
        }
    }

    pub fn volatility(&self, y: f64) -> f64 {
        match self.vol {
            Vol::Const(f0) => f0,
            Vol::Hyperbolic(k) => k / (y - self.m),
        }
    }

    pub fn drift(&self, y: f64) -> f64 {
        self.alpha * (self.m - y) - self.beta * self.rho * (self.mu - self.r) / self.volatility(y)
    }

    /// `(a, b, c)` of `a u_xx + b u_xy + c u_yy`.
    pub fn diffusion(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let f = self.volatility(y);
        (0.5 * f * f * x * x, self.rho * self.beta * x * f, 0.5 * self.beta * self.beta)
    }
}

/// Three-point weights per node for one direction.
#[derive(Debug, Clone)]
struct Stencil1<F> {
    lo: Vec<F>,
    mid: Vec<F>,
    hi: Vec<F>,
}

/// Discrete operator on an `nx × ny` node grid, stored row-major in x.
struct Operator<F> {
    nx: usize,
    ny: usize,
    a1: Stencil1<F>,
    a2: Stencil1<F>,
    a0: Vec<F>,
}

fn c<F: Float>(v: f64) -> F {
    F::from(v).expect("f64 converts to the solver float")
}

impl<F: Float + Send + Sync> Operator<F> {
    fn new(coef: &Coefficients, grid: &GridSpec) -> Self {
        let (nx, ny) = (grid.nx, grid.ny);
        let (hx, hy) = (grid.hx(), grid.hy());
        let (xs, ys) = (grid.xs(), grid.ys());
        let n = nx * ny;
        let zero = || vec![F::zero(); n];
        let mut a1 = Stencil1 {
            lo: zero(),
            mid: zero(),
            hi: zero(),
        };
        let mut a2 = Stencil1 {
            lo: zero(),
            mid: zero(),
            hi: zero(),
        };
        let mut a0 = zero();
        let half_r = 0.5 * coef.r;
        for (j, &y) in ys.iter().enumerate() {
            for (i, &x) in xs.iter().enumerate() {
                let k = j * nx + i;
                let (a, b, cc) = coef.diffusion(x, y);
                let (dx, dy) = (coef.r * x, coef.drift(y));
                let (dl, dm, dh) = match grid.ux_stencil {
                    UxStencil::Central => (-dx / (2.0 * hx), 0.0, dx / (2.0 * hx)),
                    UxStencil::OneSided => (-dx / hx, dx / hx, 0.0),
                };
                a1.lo[k] = c(a / (hx * hx) + dl);
                a1.mid[k] = c(-2.0 * a / (hx * hx) + dm - half_r);
                a1.hi[k] = c(a / (hx * hx) + dh);
                a2.lo[k] = c(cc / (hy * hy) - dy / (2.0 * hy));
                a2.mid[k] = c(-2.0 * cc / (hy * hy) - half_r);
                a2.hi[k] = c(cc / (hy * hy) + dy / (2.0 * hy));
                a0[k] = c(b / (4.0 * hx * hy));
            }
        }
        Operator { nx, ny, a1, a2, a0 }
    }

    fn interior(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (1..self.ny - 1).flat_map(move |j| (1..self.nx - 1).map(move |i| (i, j, j * self.nx + i)))
    }

    /// Nodes on the `x = const` sides, corners excluded.
    fn x_sides(&self) -> impl Iterator<Item = usize> + '_ {
        (1..self.ny - 1).flat_map(move |j| [j * self.nx, j * self.nx + self.nx - 1])
    }

    fn apply_a1(&self, u: &[F], k: usize) -> F {
        self.a1.lo[k] * u[k - 1] + self.a1.mid[k] * u[k] + self.a1.hi[k] * u[k + 1]
    }

    fn apply_a2(&self, u: &[F], k: usize) -> F {
        let nx = self.nx;
        self.a2.lo[k] * u[k - nx] + self.a2.mid[k] * u[k] + self.a2.hi[k] * u[k + nx]
    }

    fn apply_a0(&self, u: &[F], k: usize) -> F {
        let nx = self.nx;
        self.a0[k] * (u[k + nx + 1] - u[k - nx + 1] - u[k + nx - 1] + u[k - nx - 1])
    }

    /// `(A0 u, A1 u, A2 u)` at interior nodes; boundary entries are zero.
    fn split(&self, u: &[F]) -> [Vec<F>; 3] {
        let n = self.nx * self.ny;
        let mut out = [vec![F::zero(); n], vec![F::zero(); n], vec![F::zero(); n]];
        for (_, _, k) in self.interior() {
            out[0][k] = self.apply_a0(u, k);
            out[1][k] = self.apply_a1(u, k);
            out[2][k] = self.apply_a2(u, k);
        }
        out
    }

    /// Solves `(I − s A1) y = rhs` along every interior x-line. Boundary
    /// entries of `y` must already hold the boundary data.
    fn solve_x(&self, s: F, rhs: &[F], y: &mut [F]) {
        let nx = self.nx;
        y.par_chunks_mut(nx).enumerate().skip(1).take(self.ny - 2).for_each(|(j, row)| {
            let base = j * nx;
            let m = nx - 2;
            let mut sub = Vec::with_capacity(m);
            let mut diag = Vec::with_capacity(m);
            let mut sup = Vec::with_capacity(m);
            let mut b = Vec::with_capacity(m);
            for i in 1..nx - 1 {
                let k = base + i;
                sub.push(-s * self.a1.lo[k]);
                diag.push(F::one() - s * self.a1.mid[k]);
                sup.push(-s * self.a1.hi[k]);
                b.push(rhs[k]);
            }
            b[0] = b[0] + s * self.a1.lo[base + 1] * row[0];
            b[m - 1] = b[m - 1] + s * self.a1.hi[base + nx - 2] * row[nx - 1];
            thomas(&sub, &diag, &sup, &mut b);
            row[1..nx - 1].copy_from_slice(&b);
        });
    }

    /// Solves `(I − s A2) y = rhs` along every interior y-line.
    fn solve_y(&self, s: F, rhs: &[F], y: &mut [F]) {
        let (nx, ny) = (self.nx, self.ny);
        let cols: Vec<Vec<F>> = (1..nx - 1)
            .into_par_iter()
            .map(|i| {
                let m = ny - 2;
                let mut sub = Vec::with_capacity(m);
                let mut diag = Vec::with_capacity(m);
                let mut sup = Vec::with_capacity(m);
                let mut b = Vec::with_capacity(m);
                for j in 1..ny - 1 {
                    let k = j * nx + i;
                    sub.push(-s * self.a2.lo[k]);
                    diag.push(F::one() - s * self.a2.mid[k]);
                    sup.push(-s * self.a2.hi[k]);
                    b.push(rhs[k]);
                }
                b[0] = b[0] + s * self.a2.lo[nx + i] * y[i];
                b[m - 1] = b[m - 1] + s * self.a2.hi[(ny - 2) * nx + i] * y[(ny - 1) * nx + i];
                thomas(&sub, &diag, &sup, &mut b);
                b
            })
            .collect();
        for (ci, col) in cols.into_iter().enumerate() {
            for (jj, v) in col.into_iter().enumerate() {
                y[(jj + 1) * nx + ci + 1] = v;
            }
        }
    }
}

/// Thomas algorithm; `sub[0]` and `sup[n-1]` are ignored. Solves in place.
fn thomas<F: Float>(sub: &[F], diag: &[F], sup: &[F], rhs: &mut [F]) {
    let n = diag.len();
    let mut cp = vec![F::zero(); n];
    let mut denom = diag[0];
    cp[0] = sup[0] / denom;
    rhs[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - sub[i] * cp[i - 1];
        cp[i] = sup[i] / denom;
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] = rhs[i] - cp[i] * rhs[i + 1];
    }
}

/// One retained time level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level<F> {
    pub t: f64,
    pub values: Vec<F>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdSolution<F> {
    pub grid: GridSpec,
    pub params: std::collections::BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_id: Option<String>,
    /// From the terminal time backwards; the last entry is at `t.0`.
    pub levels: Vec<Level<F>>,
}

impl<F: Float> FdSolution<F> {
    pub fn at(&self, level: usize, i: usize, j: usize) -> F {
        self.levels[level].values[j * self.grid.nx + i]
    }

    pub fn initial(&self) -> &Level<F> {
        self.levels.last().expect("at least two levels")
    }

    /// Writes `t,x,y,u` rows for every retained level.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x,y,u")?;
        let (xs, ys) = (self.grid.xs(), self.grid.ys());
        for lvl in &self.levels {
            for (j, y) in ys.iter().enumerate() {
                for (i, x) in xs.iter().enumerate() {
                    let u = lvl.values[j * self.grid.nx + i].to_f64().unwrap_or(f64::NAN);
                    writeln!(w, "{},{},{},{}", lvl.t, x, y, u)?;
                }
            }
        }
        Ok(())
    }
}

fn fill<F: Float>(
    grid: &GridSpec,
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    t: f64,
    only_boundary: bool,
    out: &mut [F],
) -> Result<(), FdError> {
    let (xs, ys) = (grid.xs(), grid.ys());
    for (j, &y) in ys.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            let edge = i == 0 || j == 0 || i == grid.nx - 1 || j == grid.ny - 1;
            if only_boundary && !edge {
                continue;
            }
            let v = f(x, y);
            if !v.is_finite() {
                return Err(FdError::BadData { t, x, y });
            }
            out[j * grid.nx + i] = c(v);
        }
    }
    Ok(())
}

/// Marches from the terminal time `grid.t.1` back to `grid.t.0`.
///
/// `terminal(x, y)` gives the data at the terminal time and
/// `boundary(t, x, y)` the Dirichlet data on the four sides.
pub fn solve<F: Float + Send + Sync>(
    params: &ModelParams,
    grid: &GridSpec,
    terminal: &(dyn Fn(f64, f64) -> f64 + Sync),
    boundary: &(dyn Fn(f64, f64, f64) -> f64 + Sync),
) -> Result<FdSolution<F>, FdError> {
    grid.validate(params)?;
    let coef = Coefficients::new(params);
    for y in grid.ys() {
        if !coef.volatility(y).is_finite() || coef.volatility(y) <= 0.0 && matches!(coef.vol, Vol::Hyperbolic(_)) {
            return Err(FdError::SingularVolatility);
        }
    }
    let op = Operator::<F>::new(&coef, grid);
    let n = grid.nx * grid.ny;
    let dt = grid.dt();
    let dtf: F = c(dt);
    let mut u = vec![F::zero(); n];
    fill(grid, terminal, grid.t.1, false, &mut u)?;
    let mut levels = vec![Level {
        t: grid.t.1,
        values: u.clone(),
    }];
    let steps = grid.nt - 1;
    let interior: Vec<usize> = op.interior().map(|(_, _, k)| k).collect();

    for step in 1..=steps {
        let t_new = if step == steps { grid.t.0 } else { grid.t.1 - step as f64 * dt };
        let bnd = |x: f64, y: f64| boundary(t_new, x, y);
        let [f0, f1, f2] = op.split(&u);
        let mut y0 = u.clone();
        for &k in &interior {
            y0[k] = u[k] + dtf * (f0[k] + f1[k] + f2[k]);
        }
        fill(grid, &bnd, t_new, true, &mut y0)?;
        let next = match grid.scheme {
            Scheme::Explicit => y0,
            Scheme::Douglas { theta } | Scheme::Mcs { theta } => {
                let s: F = c(theta * dt);
                let implicit = |start: &[F]| -> Vec<F> {
                    let mut rhs = start.to_vec();
                    for &k in &interior {
                        rhs[k] = rhs[k] - s * f1[k];
                    }
                    // The x-sweep sees the intermediate stage on the x = const
                    // sides, not the final boundary data; feeding it the latter
                    // costs a first-order error at the boundary.
                    let mut y1 = start.to_vec();
                    for k in op.x_sides() {
                        y1[k] = start[k] - s * (op.apply_a2(start, k) - op.apply_a2(&u, k));
                    }
                    op.solve_x(s, &rhs, &mut y1);
                    let mut rhs2 = y1.clone();
                    for &k in &interior {
                        rhs2[k] = rhs2[k] - s * f2[k];
                    }
                    let mut y2 = y1;
                    for k in op.x_sides() {
                        y2[k] = start[k];
                    }
                    op.solve_y(s, &rhs2, &mut y2);
                    y2
                };
                let y2 = implicit(&y0);
                if let Scheme::Mcs { theta } = grid.scheme {
                    let [g0, g1, g2] = op.split(&y2);
                    let rest: F = c((0.5 - theta) * dt);
                    let mut z0 = y0.clone();
                    for &k in &interior {
                        let d0 = g0[k] - f0[k];
                        let dall = d0 + (g1[k] - f1[k]) + (g2[k] - f2[k]);
                        z0[k] = y0[k] + s * d0 + rest * dall;
                    }
                    implicit(&z0)
                } else {
                    y2
                }
            }
        };
        u = next;
        let mut worst = F::zero();
        for v in &u {
            let a = v.abs();
            if !(a <= worst) {
                worst = a;
            }
        }
        let mag = worst.to_f64().unwrap_or(f64::INFINITY);
        if !mag.is_finite() || mag > BLOWUP {
            return Err(FdError::Unstable {
                step,
                t: t_new,
                magnitude: mag,
            });
        }
        if step == steps || (grid.retain_every > 0 && step % grid.retain_every == 0) {
            levels.push(Level {
                t: t_new,
                values: u.clone(),
            });
        }
    }
    Ok(FdSolution {
        grid: grid.clone(),
        params: params.to_f64_map(),
        case_id: None,
        levels,
    })
}
