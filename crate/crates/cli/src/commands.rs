use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use rayon::prelude::*;
use serde::Serialize;

use symbsm::config::ParamFile;
use symbsm::expr::Expr;
use symbsm::fd::{self, convergence_order, default_ladder, ConvergenceReport, OrderClaim, Reference, Scheme, UxStencil};
use symbsm::jet::{check_symmetry, SymmetryReport, VectorField};
use symbsm::lie::{render_text, verify_bracket_table, BracketOptions, GeneratorCatalog, PrintedTable, TableReport};
use symbsm::report::Report;
use symbsm::solutions::{self, build_solution_with, case_of, default_case_params, SolutionReport, Status, VerifyOptions, CASE_IDS};
use symbsm::{build_equation, CaseTag, ModelParams, Var, ZeroTestOptions};

use crate::{Command, Common, Format, Outcome, SchemeArg};

pub enum CliError {
    Usage(anyhow::Error),
    Run(anyhow::Error),
}

fn usage(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Usage(e.into())
}

fn run_err(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Run(e.into())
}

pub fn run(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::VerifySymmetries { common, inject } => verify_symmetries(&common, inject.as_deref()),
        Command::Brackets { common } => brackets(&common),
        Command::Solutions { common, samples } => solutions_cmd(&common, samples),
        Command::Converge {
            common,
            scheme,
            levels,
            finest,
            one_sided_ux,
        } => converge(&common, scheme, levels, finest, one_sided_ux),
    }
}

fn param_file(common: &Common) -> Result<ParamFile, CliError> {
    match &common.params {
        Some(p) => ParamFile::load(p).map_err(usage),
        None => Ok(ParamFile::default()),
    }
}

fn model_cases(common: &Common) -> Result<Vec<CaseTag>, CliError> {
    if common.all {
        return Ok(CaseTag::ALL.to_vec());
    }
    if common.case.is_empty() {
        return Err(usage(anyhow!("select a case with --case const|hyp|hyp-g0 or use --all")));
    }
    let mut out = Vec::new();
    for c in &common.case {
        let tag: CaseTag = c.parse().map_err(|e: String| usage(anyhow!(e)))?;
        if !out.contains(&tag) {
            out.push(tag);
        }
    }
    Ok(out)
}

/// Prints to stdout and, with `--out`, writes `<name>.json` plus extra files.
fn emit<T: Serialize>(
    common: &Common,
    name: &str,
    report: &Report<T>,
    text: String,
    csv: String,
    extra: Vec<(String, String)>,
) -> Result<(), CliError> {
    let json = report.to_json();
    match common.format {
        Format::Json => print!("{json}"),
        Format::Csv => print!("{csv}"),
        Format::Text => print!("{text}"),
    }
    if let Some(dir) = &common.out {
        write_file(dir, &format!("{name}.json"), &json)?;
        for (file, body) in extra {
            write_file(dir, &file, &body)?;
        }
    }
    Ok(())
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(usage)?;
    let path = dir.join(name);
    fs::write(&path, body)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(usage)
}

#[derive(Serialize)]
struct CaseSymmetries {
    case: CaseTag,
    pass: bool,
    generators: Vec<SymmetryReport>,
}

fn verify_symmetries(common: &Common, inject: Option<&str>) -> Result<Outcome, CliError> {
    let cases = model_cases(common)?;
    let file = param_file(common)?;
    let params: Vec<(CaseTag, ModelParams)> = cases
        .iter()
        .map(|&c| file.resolve(c).map(|p| (c, p)).map_err(usage))
        .collect::<Result<_, _>>()?;
    let opts = ZeroTestOptions {
        seed: common.seed,
        ..ZeroTestOptions::default()
    };
    let results: Vec<CaseSymmetries> = params
        .par_iter()
        .map(|(case, p)| {
            let eq = build_equation(p);
            let mut fields = GeneratorCatalog::new(*case).generators;
            if inject == Some("y-dy") {
                let y = Expr::var(Var::Y);
                fields.push(VectorField::new("y∂y", Expr::zero(), Expr::zero(), y, Expr::zero()));
            }
            let generators = fields
                .iter()
                .map(|f| check_symmetry(f, &eq, p, &opts).map_err(|e| anyhow!("{}: {e}", f.name)))
                .collect::<anyhow::Result<Vec<_>>>()?;
            Ok(CaseSymmetries {
                case: *case,
                pass: generators.iter().all(|g| g.pass),
                generators,
            })
        })
        .collect::<anyhow::Result<_>>()
        .map_err(run_err)?;

    let pass = results.iter().all(|r| r.pass);
    let mut text = String::new();
    let mut csv = String::from("case,generator,pass,max_residual,evaluated,skipped\n");
    for r in &results {
        for g in &r.generators {
            let _ = writeln!(
                text,
                "{:<7} {:<6} {} max residual {:.3e} ({} points, {} skipped)",
                r.case,
                g.name,
                if g.pass { "PASS" } else { "FAIL" },
                g.max_residual,
                g.evaluated,
                g.skipped
            );
            let _ = writeln!(
                csv,
                "{},{},{},{:e},{},{}",
                r.case, g.name, g.pass, g.max_residual, g.evaluated, g.skipped
            );
        }
    }
    for r in results.iter().filter(|r| !r.pass) {
        for g in r.generators.iter().filter(|g| !g.pass) {
            eprintln!("{}: generator {} is not a symmetry", r.case, g.name);
        }
    }
    let mut report = Report::new("verify-symmetries", common.seed, results)
        .with_tolerance("relative_residual", opts.rel_tol)
        .with_tolerance("points", opts.trials as f64)
        .with_pass(pass);
    for (c, p) in &params {
        report = report.with_params(c.to_string(), p.to_f64_map());
    }
    emit(common, "verify-symmetries", &report, text, csv, vec![])?;
    Ok(if pass { Outcome::Pass } else { Outcome::Failure })
}

fn brackets(common: &Common) -> Result<Outcome, CliError> {
    let cases = model_cases(common)?;
    let file = param_file(common)?;
    let params: Vec<(CaseTag, ModelParams)> = cases
        .iter()
        .map(|&c| file.resolve(c).map(|p| (c, p)).map_err(usage))
        .collect::<Result<_, _>>()?;
    let mut opts = BracketOptions::default();
    opts.zero.seed = common.seed;
    let results: Vec<(TableReport, String)> = params
        .par_iter()
        .map(|(case, p)| {
            let table = PrintedTable::printed(*case);
            let rep = verify_bracket_table(&GeneratorCatalog::new(*case), &table, p, &opts);
            let text = render_text(&table, &rep);
            (rep, text)
        })
        .collect();
    let pass = results.iter().all(|(r, _)| r.pass);
    let mut text = String::new();
    let mut csv = String::from("case,i,j,printed,pass,exact,max_residual\n");
    for (r, t) in &results {
        let _ = writeln!(
            text,
            "{}: {} (antisymmetric {}, Jacobi {}/{} triples)",
            r.case,
            if r.pass { "PASS" } else { "FAIL" },
            r.antisymmetric,
            r.jacobi.triples.len() - r.jacobi.failures.len(),
            r.jacobi.triples.len()
        );
        text.push_str(t);
        text.push('\n');
        for c in &r.cells {
            let _ = writeln!(
                csv,
                "{},{},{},\"{}\",{},{},{:e}",
                r.case, c.i, c.j, c.printed, c.pass, c.exact, c.max_residual
            );
        }
        for c in r.failing_cells() {
            eprintln!(
                "{}: cell [X{}, X{}] does not match the printed entry {}",
                r.case, c.i, c.j, c.printed
            );
        }
    }
    let mut report = Report::new("brackets", common.seed, results.iter().map(|(r, _)| r).collect::<Vec<_>>())
        .with_tolerance("relative_residual", opts.zero.rel_tol)
        .with_tolerance("param_draws", opts.param_draws as f64)
        .with_tolerance("jacobi_triples", opts.jacobi_triples as f64)
        .with_pass(pass);
    for (c, p) in &params {
        report = report.with_params(c.to_string(), p.to_f64_map());
    }
    emit(common, "brackets", &report, text, csv, vec![])?;
    Ok(if pass { Outcome::Pass } else { Outcome::Failure })
}

fn solutions_cmd(common: &Common, samples: usize) -> Result<Outcome, CliError> {
    let ids: Vec<String> = if common.all {
        CASE_IDS.iter().map(|s| s.to_string()).collect()
    } else if common.case.is_empty() {
        return Err(usage(anyhow!("select a catalog entry with --case (e.g. 2.1-1) or use --all")));
    } else {
        common.case.clone()
    };
    let file = param_file(common)?;
    let mut specs = Vec::new();
    for id in &ids {
        let case = case_of(id).map_err(usage)?;
        let p = file.resolve(case).map_err(usage)?;
        specs.push(build_solution_with(id, &p, &default_case_params(id)).map_err(usage)?);
    }
    let opts = VerifyOptions {
        seed: common.seed,
        ..VerifyOptions::default()
    };
    let reports: Vec<SolutionReport> = specs.par_iter().map(|s| solutions::verify_solution(s, &opts)).collect();

    let mut text = String::new();
    let mut csv = String::from("id,status,ansatz_spread,ode_residual,pde_residual\n");
    let fmt_opt = |t: Option<f64>| t.map_or("-".to_string(), |v| format!("{v:.3e}"));
    for r in &reports {
        let _ = writeln!(
            text,
            "{:<6} {:<19} ansatz {:.3e}  ode {}  pde {}",
            r.id,
            format!("{:?}", r.status),
            r.ansatz.tier.max_residual,
            fmt_opt(r.ode.as_ref().map(|t| t.max_residual)),
            fmt_opt(r.pde.as_ref().map(|t| t.max_residual)),
        );
        for n in &r.notes {
            let _ = writeln!(text, "       {n}");
        }
        let _ = writeln!(
            csv,
            "{},{},{:e},{},{}",
            r.id,
            serde_json::to_value(r.status)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            r.ansatz.tier.max_residual,
            r.ode.as_ref().map_or(String::new(), |t| format!("{:e}", t.max_residual)),
            r.pde.as_ref().map_or(String::new(), |t| format!("{:e}", t.max_residual)),
        );
    }
    let mut extra = Vec::new();
    if common.out.is_some() && samples > 0 {
        for s in &specs {
            let rows = solutions::sample_grid(s, samples).map_err(run_err)?;
            let mut body = String::from("t,x,y,re_u,im_u\n");
            for [t, x, y, re, im] in rows {
                let _ = writeln!(body, "{t},{x},{y},{re:e},{im:e}");
            }
            extra.push((format!("solution_{}.csv", s.id), body));
        }
    }
    let outcome = reports
        .iter()
        .map(|r| match r.status {
            Status::Verified => Outcome::Pass,
            Status::SuspectedMisprint => Outcome::Misprint,
            Status::Failure => Outcome::Failure,
        })
        .max()
        .unwrap_or(Outcome::Pass);
    let mut report = Report::new("solutions", common.seed, &reports)
        .with_tolerance("ansatz_spread", opts.ansatz_tol)
        .with_tolerance("ode_relative_residual", opts.ode_tol)
        .with_tolerance("pde_relative_residual", opts.pde_tol)
        .with_pass(outcome == Outcome::Pass);
    for s in &specs {
        report = report.with_params(s.id, s.params.to_f64_map());
    }
    emit(common, "solutions", &report, text, csv, extra)?;
    Ok(outcome)
}

fn converge(common: &Common, scheme: SchemeArg, levels: usize, finest: usize, one_sided: bool) -> Result<Outcome, CliError> {
    let refs: Vec<Reference> = if common.all {
        vec![Reference::Affine, Reference::Discount, Reference::Catalog("2.1-2".into())]
    } else if common.case.is_empty() {
        vec![Reference::Catalog("2.1-2".into())]
    } else {
        common
            .case
            .iter()
            .map(|c| c.parse().map_err(|e: String| usage(anyhow!(e))))
            .collect::<Result<_, _>>()?
    };
    if levels < 3 {
        return Err(usage(anyhow!("a ladder needs at least 3 levels")));
    }
    if finest >> (levels - 1) < 2 {
        return Err(usage(anyhow!("--finest {finest} is too coarse for {levels} levels")));
    }
    let scheme = match scheme {
        SchemeArg::Mcs => Scheme::default(),
        SchemeArg::Douglas => Scheme::Douglas { theta: 0.5 },
        SchemeArg::Explicit => Scheme::Explicit,
    };
    let file = param_file(common)?;
    let mut runs = Vec::new();
    for r in &refs {
        // u = x and u = e^{rt} solve every case; they run with constant volatility.
        let case = match r {
            Reference::Catalog(id) => case_of(id).map_err(usage)?,
            _ => CaseTag::ConstVol,
        };
        let p = file.resolve(case).map_err(usage)?;
        let mut ladder = default_ladder(&p, scheme, levels, finest);
        if one_sided {
            for g in &mut ladder {
                g.ux_stencil = UxStencil::OneSided;
            }
        }
        runs.push((r.clone(), p, ladder));
    }
    let reports: Vec<ConvergenceReport> = runs
        .par_iter()
        .map(|(r, p, ladder)| convergence_order(r, p, ladder))
        .collect::<Result<_, _>>()
        .map_err(run_err)?;

    let ok = |rep: &ConvergenceReport| match &rep.claim {
        OrderClaim::Exact => true,
        OrderClaim::Observed { orders } => orders.iter().all(|o| (1.8..=2.2).contains(o)),
        OrderClaim::NonMonotone => false,
    };
    let mut text = String::new();
    let mut csv = String::from("reference,nx,ny,nt,h,dt,error\n");
    for rep in &reports {
        let claim = match &rep.claim {
            OrderClaim::Exact => "exact".to_string(),
            OrderClaim::Observed { orders } => {
                format!("orders {}", orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>().join(", "))
            }
            OrderClaim::NonMonotone => "non-monotone errors, no order claimed".to_string(),
        };
        let _ = writeln!(text, "{}: {} [{}]", rep.reference, claim, if ok(rep) { "PASS" } else { "FAIL" });
        for l in &rep.levels {
            let _ = writeln!(
                text,
                "  {:>4}x{:<4} nt {:>5}  h {:.4e}  error {:.4e}",
                l.nx, l.ny, l.nt, l.h, l.error
            );
            let _ = writeln!(
                csv,
                "{},{},{},{},{:e},{:e},{:e}",
                rep.reference, l.nx, l.ny, l.nt, l.h, l.dt, l.error
            );
        }
    }
    let mut extra = Vec::new();
    if common.out.is_some() {
        for (r, p, ladder) in &runs {
            let grid = ladder.last().expect("non-empty ladder");
            let u = r.field(p).map_err(run_err)?;
            let t1 = grid.t.1;
            let mut sol = fd::solve::<f64>(p, grid, &|x, y| u(t1, x, y), &|t, x, y| u(t, x, y)).map_err(run_err)?;
            sol.case_id = Some(r.to_string());
            let mut buf = Vec::new();
            sol.write_csv(&mut buf).map_err(run_err)?;
            let name = r.to_string().replace(['=', '(', ')'], "_");
            extra.push((format!("fd_{name}.csv"), String::from_utf8(buf).expect("csv is utf-8")));
        }
    }
    let pass = reports.iter().all(ok);
    let mut report = Report::new("converge", common.seed, &reports)
        .with_tolerance("order_min", 1.8)
        .with_tolerance("order_max", 2.2)
        .with_tolerance("exact_level", fd::EXACT_LEVEL)
        .with_pass(pass);
    let mut seen = BTreeMap::new();
    for (r, p, _) in &runs {
        seen.insert(r.to_string(), p.to_f64_map());
    }
    for (k, v) in seen {
        report = report.with_params(k, v);
    }
    emit(common, "converge", &report, text, csv, extra)?;
    Ok(if pass { Outcome::Pass } else { Outcome::Failure })
}
