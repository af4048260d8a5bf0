//! Printed commutator tables and their verification.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::catalog::GeneratorCatalog;
use crate::expr::{is_exactly_zero, is_probably_zero, Bindings, Expr, Param, PointSampler, ZeroTestOptions};
use crate::jet::{check_symmetry, commutator, JetSampler, VectorField};
use crate::model::{build_equation, CaseTag, ModelParams};
use crate::C64;

/// One cell as printed: its text and the coefficient of each generator.
#[derive(Debug, Clone)]
pub struct PrintedCell {
    pub text: String,
    pub coeffs: Vec<Expr>,
}

#[derive(Debug, Clone)]
pub struct PrintedTable {
    pub case: CaseTag,
    pub cells: Vec<Vec<PrintedCell>>,
}

fn p(x: Param) -> Expr {
    Expr::param(x)
}

struct Builder {
    n: usize,
    cells: Vec<Vec<PrintedCell>>,
}

impl Builder {
    fn new(n: usize) -> Self {
        let zero = PrintedCell {
            text: "0".into(),
            coeffs: vec![Expr::zero(); n],
        };
        Builder {
            n,
            cells: vec![vec![zero; n]; n],
        }
    }

    /// Sets cell `(i, j)`, 1-based, to `Σ c X_k`.
    fn set(&mut self, i: usize, j: usize, text: &str, terms: &[(usize, Expr)]) {
        let mut coeffs = vec![Expr::zero(); self.n];
        for (k, c) in terms {
            coeffs[k - 1] = c.clone();
        }
        self.cells[i - 1][j - 1] = PrintedCell { text: text.into(), coeffs };
    }

    fn set_raw(&mut self, i: usize, j: usize, text: &str, coeffs: Vec<Expr>) {
        self.cells[i - 1][j - 1] = PrintedCell { text: text.into(), coeffs };
    }
}

impl PrintedTable {
    /// The table exactly as published, including any misprint.
    pub fn printed(case: CaseTag) -> Self {
        let (alpha, r, f0, g) = (p(Param::Alpha), p(Param::R), p(Param::F0), p(Param::G));
        let half = Expr::half();
        let cells = match case {
            CaseTag::ConstVol => {
                let mut b = Builder::new(6);
                let c15 = [(2, f0.powi(2) * &alpha), (3, &alpha * (&half * f0.powi(2) - &r))];
                let neg = |v: &[(usize, Expr)]| v.iter().map(|(k, c)| (*k, -c)).collect::<Vec<_>>();
                b.set(1, 4, "-αX4", &[(4, -&alpha)]);
                b.set(1, 5, "f0²αX2+α(½f0²-r)X3", &c15);
                b.set(1, 6, "αX6", &[(6, alpha.clone())]);
                b.set(2, 5, "αX3", &[(3, alpha.clone())]);
                b.set(4, 1, "αX4", &[(4, alpha.clone())]);
                b.set(4, 6, "2αf0X3", &[(3, 2 * &alpha * &f0)]);
                b.set(5, 1, "-f0²αX2-α(½f0²-r)X3", &neg(&c15));
                b.set(5, 2, "-αX3", &[(3, -&alpha)]);
                b.set(6, 1, "-αX6", &[(6, -&alpha)]);
                b.set(6, 4, "-2αf0X3", &[(3, -2 * &alpha * &f0)]);
                b.cells
            }
            CaseTag::HypGNonzero => {
                let mut b = Builder::new(5);
                let x = GeneratorCatalog::new(case)
                    .combination
                    .expect("hyperbolic catalog defines X")
                    .coeffs;
                b.set(1, 4, "-gX4", &[(4, -&g)]);
                b.set(1, 5, "gX5", &[(5, g.clone())]);
                b.set(4, 1, "gX4", &[(4, g.clone())]);
                b.set_raw(4, 5, "X", x.clone());
                b.set(5, 1, "-gX5", &[(5, -&g)]);
                b.set_raw(5, 4, "-X", x.iter().map(|c| -c).collect());
                b.cells
            }
            CaseTag::HypGZero => {
                let mut b = Builder::new(5);
                b.set(1, 4, "X1+rX2+rX3", &[(1, Expr::one()), (2, r.clone()), (3, r.clone())]);
                b.set(1, 5, "-½X3+2X4", &[(3, -&half), (4, Expr::int(2))]);
                b.set(4, 1, "-X1-rX2-rX3", &[(1, -Expr::one()), (2, -&r), (3, -&r)]);
                b.set(4, 5, "X5", &[(5, Expr::one())]);
                b.set(5, 1, "½X3-2X4", &[(3, half.clone()), (4, Expr::int(-2))]);
                b.set(5, 4, "-X5", &[(5, -Expr::one())]);
                b.cells
            }
        };
        PrintedTable { case, cells }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketOptions {
    pub zero: ZeroTestOptions,
    /// Random parameter draws in addition to the defaults.
    pub param_draws: usize,
    /// Rational draws for the exact check.
    pub exact_draws: usize,
    pub jacobi_triples: usize,
}

impl Default for BracketOptions {
    fn default() -> Self {
        BracketOptions {
            zero: ZeroTestOptions::default(),
            param_draws: 5,
            exact_draws: 3,
            jacobi_triples: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub i: usize,
    pub j: usize,
    pub printed: String,
    pub pass: bool,
    pub exact: bool,
    /// Float zero test at the defaults followed by each random draw.
    pub numeric: Vec<bool>,
    pub max_residual: f64,
    /// Present for failing cells: the computed bracket, component-wise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub computed: Option<[String; 4]>,
    /// Present for failing cells: least-squares coefficients of the computed
    /// bracket in the catalog basis at the default parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_numeric: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiReport {
    pub triples: Vec<[usize; 3]>,
    pub pass: bool,
    pub failures: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureEntry {
    pub i: usize,
    pub j: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub case: CaseTag,
    pub params: BTreeMap<String, f64>,
    pub seed: u64,
    pub options: BracketOptions,
    pub cells: Vec<CellReport>,
    pub jacobi: JacobiReport,
    pub closure: Vec<ClosureEntry>,
    pub antisymmetric: bool,
    pub pass: bool,
}

impl TableReport {
    pub fn failing_cells(&self) -> impl Iterator<Item = &CellReport> {
        self.cells.iter().filter(|c| !c.pass)
    }
}

fn difference(a: &VectorField, b: &VectorField) -> [Expr; 4] {
    let ca = a.components();
    let cb = b.components();
    std::array::from_fn(|i| ca[i] - cb[i])
}

fn field_is_zero(comps: &[Expr; 4], sampler: &JetSampler, fixed: &Bindings<C64>, opts: &ZeroTestOptions) -> (bool, f64) {
    let mut ok = true;
    let mut worst = 0.0f64;
    for c in comps {
        if c.is_zero() {
            continue;
        }
        match is_probably_zero(c, sampler, fixed, opts) {
            Ok(z) => {
                ok &= z.is_zero;
                worst = worst.max(z.max_residual);
            }
            Err(_) => {
                ok = false;
                worst = f64::INFINITY;
            }
        }
    }
    (ok, worst)
}

fn exact_zero(comps: &[Expr; 4], draws: usize, seed: u64) -> bool {
    comps.iter().all(|c| c.is_zero() || is_exactly_zero(c, draws, seed).is_zero)
}

/// Least-squares coefficients `c` with `Σ c_k X_k ≈ field`, sampled at
/// points of the default box.
pub fn fit_in_basis(field: &VectorField, catalog: &GeneratorCatalog, params: &ModelParams, seed: u64) -> Option<Vec<f64>> {
    let n = catalog.len();
    let points = 3 * n;
    let fixed: Bindings<C64> = params.bindings();
    let sampler = JetSampler::new(params.sample_box());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DMatrix::<f64>::zeros(4 * points, n);
    let mut rhs = DVector::<f64>::zeros(4 * points);
    for pt in 0..points {
        let mut b = fixed.clone();
        b.extend_from(&sampler.sample(&mut rng));
        for (c, comp) in field.components().iter().enumerate() {
            let row = 4 * pt + c;
            rhs[row] = comp.eval(&b).ok()?.re;
            for (k, g) in catalog.generators.iter().enumerate() {
                a[(row, k)] = g.components()[c].eval(&b).ok()?.re;
            }
        }
    }
    let svd = a.svd(true, true);
    let sol = svd.solve(&rhs, 1e-12).ok()?;
    Some(sol.iter().copied().collect())
}

fn numeric_coeffs(coeffs: &[Expr], params: &ModelParams) -> Option<Vec<f64>> {
    let b: Bindings<C64> = params.bindings();
    coeffs.iter().map(|c| c.eval(&b).ok().map(|v| v.re)).collect()
}

/// Checks every cell of the printed table against computed commutators.
pub fn verify_bracket_table(catalog: &GeneratorCatalog, table: &PrintedTable, params: &ModelParams, opts: &BracketOptions) -> TableReport {
    let n = catalog.len();
    let seed = opts.zero.seed;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = vec![params.clone()];
    for _ in 0..opts.param_draws {
        draws.push(ModelParams::random(catalog.case, &mut rng));
    }
    let contexts: Vec<(Bindings<C64>, JetSampler)> = draws.iter().map(|p| (p.bindings(), JetSampler::new(p.sample_box()))).collect();

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let computed: Vec<VectorField> = pairs
        .par_iter()
        .map(|&(i, j)| commutator(&catalog.generators[i], &catalog.generators[j]).expect("catalog fields are differentiable"))
        .collect();

    let cells: Vec<CellReport> = pairs
        .par_iter()
        .zip(computed.par_iter())
        .map(|(&(i, j), bracket)| {
            let printed = &table.cells[i][j];
            let expected = catalog.linear_combination(&printed.coeffs, &printed.text);
            let diff = difference(bracket, &expected);
            let exact = exact_zero(&diff, opts.exact_draws, seed);
            let mut numeric = Vec::with_capacity(contexts.len());
            let mut worst = 0.0f64;
            for (fixed, sampler) in &contexts {
                let (ok, w) = field_is_zero(&diff, sampler, fixed, &opts.zero);
                numeric.push(ok);
                worst = worst.max(w);
            }
            let pass = exact && numeric.iter().all(|b| *b);
            let (computed, fitted, expected_numeric) = if pass {
                (None, None, None)
            } else {
                let norm = bracket.normalize();
                (
                    Some(norm.components().map(|c| c.to_string())),
                    fit_in_basis(bracket, catalog, params, seed),
                    numeric_coeffs(&printed.coeffs, params),
                )
            };
            CellReport {
                i: i + 1,
                j: j + 1,
                printed: printed.text.clone(),
                pass,
                exact,
                numeric,
                max_residual: worst,
                computed,
                fitted,
                expected_numeric,
            }
        })
        .collect();

    let (fixed0, sampler0) = &contexts[0];
    let antisymmetric = pairs.iter().all(|&(i, j)| {
        if i > j {
            return true;
        }
        let a = &computed[i * n + j];
        let b = &computed[j * n + i];
        let sum: [Expr; 4] = std::array::from_fn(|c| a.components()[c] + b.components()[c]);
        field_is_zero(&sum, sampler0, fixed0, &opts.zero).0
    });

    let jacobi = jacobi_check(catalog, &computed, opts, fixed0, sampler0, &mut rng);

    let eq = build_equation(params);
    let closure: Vec<ClosureEntry> = pairs
        .par_iter()
        .filter(|(i, j)| i < j)
        .filter_map(|&(i, j)| {
            let b = &computed[i * n + j];
            let zero = exact_zero(&b.components().map(|c| c.clone()), opts.exact_draws, seed);
            if zero {
                return None;
            }
            let pass = check_symmetry(b, &eq, params, &opts.zero).is_ok_and(|r| r.pass);
            Some(ClosureEntry { i: i + 1, j: j + 1, pass })
        })
        .collect();

    let pass = cells.iter().all(|c| c.pass) && jacobi.pass && antisymmetric && closure.iter().all(|c| c.pass);
    TableReport {
        case: catalog.case,
        params: params.to_f64_map(),
        seed,
        options: *opts,
        cells,
        jacobi,
        closure,
        antisymmetric,
        pass,
    }
}

fn jacobi_check(
    catalog: &GeneratorCatalog,
    computed: &[VectorField],
    opts: &BracketOptions,
    fixed: &Bindings<C64>,
    sampler: &JetSampler,
    rng: &mut ChaCha8Rng,
) -> JacobiReport {
    let n = catalog.len();
    let mut triples = Vec::with_capacity(opts.jacobi_triples);
    while triples.len() < opts.jacobi_triples {
        let t = [rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)];
        if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] {
            triples.push(t);
        }
    }
    let br = |i: usize, j: usize| &computed[i * n + j];
    let failures: Vec<[usize; 3]> = triples
        .par_iter()
        .filter(|&&[a, b, c]| {
            let g = &catalog.generators;
            let j1 = commutator(br(a, b), &g[c]).expect("differentiable");
            let j2 = commutator(br(b, c), &g[a]).expect("differentiable");
            let j3 = commutator(br(c, a), &g[b]).expect("differentiable");
            let sum: [Expr; 4] = std::array::from_fn(|k| j1.components()[k] + j2.components()[k] + j3.components()[k]);
            let exact = exact_zero(&sum, opts.exact_draws, opts.zero.seed);
            !(exact && field_is_zero(&sum, sampler, fixed, &opts.zero).0)
        })
        .map(|t| t.map(|k| k + 1))
        .collect();
    JacobiReport {
        triples: triples.iter().map(|t| t.map(|k| k + 1)).collect(),
        pass: failures.is_empty(),
        failures,
    }
}

/// The table in the published layout; failing cells are marked with `!`.
pub fn render_text(table: &PrintedTable, report: &TableReport) -> String {
    let n = table.cells.len();
    let mut grid = vec![vec![String::new(); n + 1]; n + 1];
    grid[0][0] = "[Xi,Xj]".into();
    for k in 0..n {
        grid[0][k + 1] = format!("X{}", k + 1);
        grid[k + 1][0] = format!("X{}", k + 1);
    }
    for c in &report.cells {
        let mark = if c.pass { "" } else { " !" };
        grid[c.i][c.j] = format!("{}{}", c.printed, mark);
    }
    let widths: Vec<usize> = (0..=n)
        .map(|col| grid.iter().map(|row| row[col].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let _ = writeln!(out, "case {}", report.case);
    for (r, row) in grid.iter().enumerate() {
        let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}", w = *w)).collect();
        let _ = writeln!(out, "{}", line.join(" | ").trim_end());
        if r == 0 {
            let total = widths.iter().sum::<usize>() + 3 * n;
            let _ = writeln!(out, "{}", "-".repeat(total));
        }
    }
    for c in report.failing_cells() {
        let _ = writeln!(
            out,
            "cell ({},{}) printed {} does not match the computed bracket",
            c.i, c.j, c.printed
        );
        if let (Some(fit), Some(exp)) = (&c.fitted, &c.expected_numeric) {
            let f: Vec<String> = fit.iter().map(|v| format!("{v:.6}")).collect();
            let e: Vec<String> = exp.iter().map(|v| format!("{v:.6}")).collect();
            let _ = writeln!(out, "  computed coefficients: [{}]", f.join(", "));
            let _ = writeln!(out, "  printed coefficients:  [{}]", e.join(", "));
        }
    }
    let _ = writeln!(
        out,
        "jacobi {} ({} triples), antisymmetry {}, closure {}",
        if report.jacobi.pass { "ok" } else { "FAILED" },
        report.jacobi.triples.len(),
        if report.antisymmetric { "ok" } else { "FAILED" },
        if report.closure.iter().all(|c| c.pass) { "ok" } else { "FAILED" },
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(case: CaseTag) -> TableReport {
        let cat = GeneratorCatalog::new(case);
        verify_bracket_table(
            &cat,
            &PrintedTable::printed(case),
            &ModelParams::defaults(case),
            &BracketOptions::default(),
        )
    }

    #[test]
    fn const_table_verifies() {
        let r = run(CaseTag::ConstVol);
        assert!(r.pass, "{:?}", r.failing_cells().collect::<Vec<_>>());
        assert_eq!(r.cells.len(), 36);
    }

    #[test]
    fn g_zero_table_verifies() {
        let r = run(CaseTag::HypGZero);
        assert!(r.pass, "{:?}", r.failing_cells().collect::<Vec<_>>());
    }

    #[test]
    fn hyperbolic_table_flags_only_the_combination_cells() {
        let r = run(CaseTag::HypGNonzero);
        let bad: Vec<(usize, usize)> = r.failing_cells().map(|c| (c.i, c.j)).collect();
        assert_eq!(bad, vec![(4, 5), (5, 4)]);
        assert!(r.jacobi.pass && r.antisymmetric);
        // The X2 coefficient of the computed bracket is g²ρk/β + 2gr.
        let p = ModelParams::defaults(CaseTag::HypGNonzero);
        let f = |q: Param| crate::scalar::rational_to_f64(&p.value(q).unwrap());
        let (g, rho, k, beta, rr) = (f(Param::G), f(Param::Rho), f(Param::K), f(Param::Beta), f(Param::R));
        let fit = r.cells.iter().find(|c| (c.i, c.j) == (4, 5)).unwrap().fitted.clone().unwrap();
        assert!((fit[0] - 2.0 * g).abs() < 1e-8);
        assert!((fit[1] - (g * g * rho * k / beta + 2.0 * g * rr)).abs() < 1e-8);
        assert!((fit[2] + 0.5 * g * (g - 4.0 * rr)).abs() < 1e-8);
    }

    #[test]
    fn commutator_examples() {
        let cat = GeneratorCatalog::new(CaseTag::ConstVol);
        let g = &cat.generators;
        let c23 = commutator(&g[1], &g[2]).unwrap();
        assert!(c23.components().iter().all(|c| c.normalize().is_zero()));
        let c44 = commutator(&g[3], &g[3]).unwrap();
        assert!(c44.components().iter().all(|c| is_exactly_zero(c, 2, 0).is_zero));
    }

    #[test]
    fn rendering_marks_failures() {
        let case = CaseTag::HypGNonzero;
        let r = run(case);
        let text = render_text(&PrintedTable::printed(case), &r);
        assert!(text.contains("X !"));
        assert!(text.contains("-gX5"));
    }
}
