//! Acceptance run: one PASS/FAIL line per criterion, each at its stated
//! tolerance and time budget.
//!
//! Criteria 2 and 3 fail on the catalog as printed (one bracket entry of the
//! hyperbolic g ≠ 0 table and nine solution entries do not check out). They
//! are reported as FAIL and tolerated by the exit status; any other failure,
//! or a change in which cells fail, makes the run fail.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use symbsm::expr::{Bindings, Expr, Param, Var};
use symbsm::fd::{self, convergence_order, default_ladder, GridSpec, OrderClaim, Reference, Scheme};
use symbsm::jet::check_symmetry;
use symbsm::lie::{verify_bracket_table, BracketOptions, GeneratorCatalog, PrintedTable};
use symbsm::solutions::{build_solution_with, case_of, default_case_params, verify_solution, Status, VerifyOptions, CASE_IDS};
use symbsm::{build_equation, CaseTag, ModelParams, ZeroTestOptions, C64};

/// Hyperbolic g ≠ 0 cells whose printed entry disagrees with the computed bracket.
const EXPECTED_BRACKET_FAILURES: [(CaseTag, usize, usize); 2] = [(CaseTag::HypGNonzero, 4, 5), (CaseTag::HypGNonzero, 5, 4)];
/// Entries whose printed reduced equation is not the reduction of the PDE.
const EXPECTED_ANSATZ_FAILURES: [&str; 9] = ["2.1-1", "2.1-4", "2.1-5", "2.2-2", "2.2-3", "2.2-5", "2.2-6", "2.3-3", "2.3-4"];
const KNOWN_RED: [u8; 2] = [2, 3];

struct Outcome {
    pass: bool,
    detail: String,
    /// For known-red criteria: whether the failure is exactly the recorded one.
    as_recorded: bool,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome {
            pass,
            detail,
            as_recorded: true,
        }
    }
}

fn timed(budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration, bool) {
    let start = Instant::now();
    let o = f();
    let el = start.elapsed();
    let in_time = budget.is_none_or(|b| el < b);
    (o, el, in_time)
}

fn symmetries() -> Outcome {
    let opts = ZeroTestOptions::default();
    assert_eq!((opts.trials, opts.seed, opts.rel_tol), (200, 42, 1e-9));
    let mut total = 0;
    let mut failed = Vec::new();
    let mut worst: f64 = 0.0;
    for case in CaseTag::ALL {
        let p = ModelParams::defaults(case);
        let eq = build_equation(&p);
        let gens = GeneratorCatalog::new(case).generators;
        let reps: Vec<_> = gens
            .par_iter()
            .map(|g| (g.name.clone(), check_symmetry(g, &eq, &p, &opts)))
            .collect();
        for (name, r) in reps {
            total += 1;
            match r {
                Ok(r) if r.pass => worst = worst.max(r.max_residual),
                _ => failed.push(format!("{case} {name}")),
            }
        }
    }
    let detail = format!(
        "{}/{} generators (6 const, 5 hyp, 5 hyp-g0), max residual {worst:.1e}",
        total - failed.len(),
        total
    );
    Outcome::new(
        total == 16 && failed.is_empty(),
        if failed.is_empty() {
            detail
        } else {
            format!("{detail}; failing: {}", failed.join(", "))
        },
    )
}

fn brackets() -> Outcome {
    let opts = BracketOptions::default();
    assert_eq!((opts.param_draws, opts.jacobi_triples), (5, 20));
    let reports: Vec<_> = CaseTag::ALL
        .par_iter()
        .map(|&case| {
            verify_bracket_table(
                &GeneratorCatalog::new(case),
                &PrintedTable::printed(case),
                &ModelParams::defaults(case),
                &opts,
            )
        })
        .collect();
    let mut failing = Vec::new();
    let mut cells = 0;
    let mut jacobi_ok = true;
    for r in &reports {
        cells += r.cells.len();
        for c in r.failing_cells() {
            failing.push((r.case, c.i, c.j));
        }
        jacobi_ok &= r.jacobi.pass && r.jacobi.triples.len() == 20;
        // a passing cell must pass both the exact check and every numeric draw
        assert!(r
            .cells
            .iter()
            .filter(|c| c.pass)
            .all(|c| c.exact && c.numeric.len() == 6 && c.numeric.iter().all(|n| *n)));
    }
    let pass = failing.is_empty() && jacobi_ok && reports.iter().all(|r| r.antisymmetric);
    let names: Vec<String> = failing.iter().map(|(c, i, j)| format!("{c} [X{i},X{j}]")).collect();
    let mut o = Outcome::new(
        pass,
        format!(
            "{}/{cells} cells, Jacobi {} on 20 triples per case{}",
            cells - failing.len(),
            if jacobi_ok { "holds" } else { "FAILS" },
            if names.is_empty() {
                String::new()
            } else {
                format!("; mismatched: {}", names.join(", "))
            }
        ),
    );
    o.as_recorded = jacobi_ok && failing == EXPECTED_BRACKET_FAILURES;
    o
}

fn solution_catalog() -> Outcome {
    let opts = VerifyOptions::default();
    let reports: Vec<_> = CASE_IDS
        .par_iter()
        .map(|id| {
            let p = ModelParams::defaults(case_of(id).unwrap());
            verify_solution(&build_solution_with(id, &p, &default_case_params(id)).unwrap(), &opts)
        })
        .collect();
    let ansatz_fail: Vec<&str> = reports.iter().filter(|r| !r.ansatz.tier.pass).map(|r| r.id.as_str()).collect();
    let flagged = |r: &symbsm::solutions::SolutionReport| r.status == Status::SuspectedMisprint;
    let ode_unflagged: Vec<&str> = reports
        .iter()
        .filter(|r| !r.ode.as_ref().is_some_and(|t| t.pass) && !flagged(r))
        .map(|r| r.id.as_str())
        .collect();
    let pde_unflagged: Vec<&str> = reports
        .iter()
        .filter(|r| !flagged(r) && !r.pde.as_ref().is_some_and(|t| t.pass))
        .map(|r| r.id.as_str())
        .collect();
    let verified: Vec<&str> = reports
        .iter()
        .filter(|r| r.status == Status::Verified)
        .map(|r| r.id.as_str())
        .collect();
    let pass = ansatz_fail.is_empty() && ode_unflagged.is_empty() && pde_unflagged.is_empty();
    let mut o = Outcome::new(
        pass,
        format!(
            "ansatz {}/15; flagged {}; unflagged ODE failures {}; unflagged PDE failures {}; verified end to end: {}",
            15 - ansatz_fail.len(),
            reports.iter().filter(|r| flagged(r)).count(),
            ode_unflagged.len(),
            pde_unflagged.len(),
            verified.join(" "),
        ) + &if ansatz_fail.is_empty() {
            String::new()
        } else {
            format!("; ansatz fails for {}", ansatz_fail.join(" "))
        },
    );
    o.as_recorded = ansatz_fail == EXPECTED_ANSATZ_FAILURES && ode_unflagged.is_empty() && pde_unflagged.is_empty();
    o
}

fn special_functions() -> Outcome {
    let mut worst_fix: (f64, String) = (0.0, String::new());
    let mut worst_ode: (f64, &str) = (0.0, "");
    let mut bad = Vec::new();
    for f in common::oracle::FUNCTIONS {
        let (rel, at) = common::specfun_checks::fixture_worst(f);
        let ode = common::specfun_checks::ode_worst(f, 20, 42);
        if rel >= 1e-9 || ode >= 1e-8 {
            bad.push(format!("{f} (fixture {rel:.1e} at {at}, ODE {ode:.1e})"));
        }
        if rel > worst_fix.0 {
            worst_fix = (rel, f.to_string());
        }
        if ode > worst_ode.0 {
            worst_ode = (ode, f);
        }
    }
    let detail = format!(
        "6 functions x 50 fixture points, worst {:.1e} ({}); ODE at 20 points, worst {:.1e} ({})",
        worst_fix.0, worst_fix.1, worst_ode.0, worst_ode.1
    );
    Outcome::new(
        bad.is_empty(),
        if bad.is_empty() {
            detail
        } else {
            format!("{detail}; failing: {}", bad.join(", "))
        },
    )
}

fn exact_solutions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst_pde: f64 = 0.0;
    for case in CaseTag::ALL {
        let p = ModelParams::defaults(case);
        let eq = build_equation(&p);
        let ranges = p.sample_box().ranges().to_vec();
        let rt = (Expr::param(Param::R) * Expr::var(Var::T)).exp();
        for u in [Expr::var(Var::X), rt] {
            let terms = eq.apply_terms(&u).unwrap();
            for _ in 0..50 {
                let mut b: Bindings<C64> = p.bindings();
                for (s, lo, hi) in &ranges {
                    b.set(*s, C64::new(rng.gen_range(*lo..*hi), 0.0));
                }
                let vals: Vec<C64> = terms.iter().map(|t| t.eval(&b).unwrap()).collect();
                let scale: f64 = vals.iter().map(|v| v.norm()).sum();
                worst_pde = worst_pde.max(vals.iter().sum::<C64>().norm() / scale);
            }
        }
    }
    let mut worst_fd: f64 = 0.0;
    let mut grids = 0;
    for case in CaseTag::ALL {
        let p = ModelParams::defaults(case);
        for scheme in [Scheme::default(), Scheme::Douglas { theta: 0.5 }, Scheme::Explicit] {
            for _ in 0..3 {
                let mut g = GridSpec::on_box(&p, rng.gen_range(3..40), rng.gen_range(3..60), scheme);
                g.ny = rng.gen_range(4..40);
                g.retain_every = 1;
                if scheme == Scheme::Explicit {
                    g.nt = ((g.t.1 - g.t.0) / g.explicit_bound(&fd::Coefficients::new(&p))).ceil() as usize + 2;
                }
                let sol = fd::solve::<f64>(&p, &g, &|x, _| x, &|_, x, _| x).unwrap();
                let xs = g.xs();
                for lvl in &sol.levels {
                    for (k, v) in lvl.values.iter().enumerate() {
                        worst_fd = worst_fd.max((v - xs[k % g.nx]).abs());
                    }
                }
                grids += 1;
            }
        }
    }
    Outcome::new(
        worst_pde < 1e-12 && worst_fd < 1e-10,
        format!("u=x, u=exp(rt): relative PDE residual {worst_pde:.1e} (3 cases x 50 points); FD u=x max error {worst_fd:.1e} on {grids} random grids"),
    )
}

fn adi_ladder() -> Outcome {
    let p = ModelParams::defaults(CaseTag::ConstVol);
    let ladder = default_ladder(&p, Scheme::default(), 3, 80);
    let rep = convergence_order(&Reference::Catalog("2.1-2".into()), &p, &ladder).unwrap();
    let sizes: Vec<String> = rep.levels.iter().map(|l| format!("{}x{}", l.nx, l.ny)).collect();
    let errors: Vec<String> = rep.levels.iter().map(|l| format!("{:.2e}", l.error)).collect();
    let pass = matches!(&rep.claim, OrderClaim::Observed { orders } if orders.iter().all(|o| (1.8..=2.2).contains(o)));
    let orders: Vec<String> = rep.orders().iter().map(|o| format!("{o:.3}")).collect();
    Outcome::new(
        pass,
        format!(
            "MCS on 2.1-2, grids {}, errors {}, observed orders {}",
            sizes.join(" "),
            errors.join(" "),
            orders.join(" ")
        ),
    )
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 4] = [
        &["verify-symmetries", "--all"],
        &["brackets", "--all"],
        &["solutions", "--all"],
        &["converge", "--all"],
    ];
    let mut diffs = Vec::new();
    let mut files = 0;
    for args in runs {
        let outs: Vec<_> = (0..2)
            .map(|_| {
                let dir = tempfile::tempdir().unwrap();
                let status = Command::new(env!("CARGO_BIN_EXE_symbsm"))
                    .args(args)
                    .args(["--seed", "42", "--format", "json", "--out"])
                    .arg(dir.path())
                    .output()
                    .unwrap();
                (status.stdout, read_dir(dir.path()))
            })
            .collect();
        files += outs[0].1.len();
        if outs[0] != outs[1] || outs[0].1.is_empty() {
            diffs.push(args[0]);
        }
    }
    Outcome::new(
        diffs.is_empty(),
        if diffs.is_empty() {
            format!("4 commands run twice, stdout and {files} report files byte-identical")
        } else {
            format!("differing output from: {}", diffs.join(", "))
        },
    )
}

/// Number, name, time budget in seconds, check.
type Criterion = (u8, &'static str, Option<u64>, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        (1, "symmetry generators", Some(10), symmetries),
        (2, "bracket tables", Some(10), brackets),
        (3, "invariant solutions", Some(30), solution_catalog),
        (4, "special functions", None, special_functions),
        (5, "exact solutions and FD on u=x", None, exact_solutions),
        (6, "ADI convergence order", Some(60), adi_ladder),
        (7, "report determinism", None, determinism),
    ];
    let mut unexpected = Vec::new();
    for (n, name, budget, run) in criteria {
        let (o, el, in_time) = timed(budget.map(Duration::from_secs), run);
        let pass = o.pass && in_time;
        let budget_note = budget.map_or(String::new(), |b| format!(" of {b} s"));
        println!(
            "{} criterion {n} ({name}): {}; {:.2} s{budget_note}{}",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            el.as_secs_f64(),
            if in_time { "" } else { ", over budget" },
        );
        let tolerated = KNOWN_RED.contains(&n) && o.as_recorded && in_time;
        if !pass && !tolerated {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected acceptance failures: {unexpected:?}");
        std::process::exit(1);
    }
}
