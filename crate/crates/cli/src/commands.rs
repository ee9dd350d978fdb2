//! Subcommand bodies. Each returns the process exit code or a staged failure.

use crate::config::{ConfigError, MeshFormat, RelationConfig, RunConfig};
use crate::stages::{self, Failure, Problem, Reconstruction, EXIT_CLASSIFY, EXIT_OK, EXIT_VERIFY};
use crate::{output, ClassifyArgs, ConvergenceArgs, MeshArg, ParallelArgs, RunArgs};
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use wsurf::classify::fmt6;
use wsurf::grid::{fitted_order, Field};
use wsurf::io::{read_field_csv, write_field_csv, write_fields_json, write_obj, write_ply};
use wsurf::parallel::{check_parallel_natural, parallel_surface_with};
use wsurf::pde::euclidean_counterpart;
use wsurf::reconstruct::SurfaceGrid;
use wsurf::verify::residual_fields;
use wsurf::Grid2;

fn print_json<T: Serialize + ?Sized>(value: &T) {
    println!("{}", output::to_string(value));
}

pub fn classify(args: &ClassifyArgs) -> Result<i32, Failure> {
    let mut rel = match &args.config {
        Some(path) => RunConfig::load(path)?.relation.unwrap_or_default(),
        None => RelationConfig::default(),
    };
    let flags = [
        (&mut rel.alpha, args.alpha),
        (&mut rel.beta, args.beta),
        (&mut rel.gamma, args.gamma),
        (&mut rel.delta, args.delta),
        (&mut rel.a, args.a),
        (&mut rel.b, args.b),
        (&mut rel.c, args.c),
        (&mut rel.d, args.d),
    ];
    for (slot, flag) in flags {
        if flag.is_some() {
            *slot = flag;
        }
    }
    let coeffs = rel.coefficients()?;
    let desc = match coeffs.relation().and_then(|r| wsurf::classify(&r)) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_CLASSIFY);
        }
    };
    if args.euclidean {
        let e = euclidean_counterpart(&desc.pde);
        print_json(&json!({ "descriptor": desc, "euclidean": e }));
        eprintln!("{}", desc.summary());
        eprintln!("euclidean counterpart: {}", e.equation());
    } else {
        print_json(&desc);
        eprintln!("{}", desc.summary());
    }
    Ok(EXIT_OK)
}

/// Config with command-line overrides applied, and the grid it describes.
struct Run {
    cfg: RunConfig,
    grid: Grid2,
    out: Option<PathBuf>,
}

fn load(args: &RunArgs) -> Result<Run, Failure> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(m) = args.max_iter {
        cfg.solver.max_iter = m;
    }
    if let Some(t) = args.newton_tol {
        cfg.solver.newton_tol = t;
    }
    if let Some(m) = args.mesh {
        cfg.output.mesh = match m {
            MeshArg::Obj => MeshFormat::Obj,
            MeshArg::Ply => MeshFormat::Ply,
            MeshArg::Both => MeshFormat::Both,
        };
    }
    if args.out.is_some() {
        cfg.output.dir = args.out.clone();
    }
    cfg.validate()?;
    let grid = cfg.grid.as_ref().ok_or(ConfigError::Missing("grid"))?.build(args.n)?;
    let out = cfg.output.dir.clone();
    Ok(Run { cfg, grid, out })
}

fn out_dir(run: &Run) -> Result<PathBuf, Failure> {
    let dir = run.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn wrote(path: PathBuf, files: &mut Vec<PathBuf>) -> PathBuf {
    files.push(path.clone());
    path
}

fn core_io(r: wsurf::Result<()>) -> Result<(), Failure> {
    r.map_err(|e| Failure::Output(e.to_string()))
}

fn write_mesh(fmt: MeshFormat, dir: &Path, stem: &str, surface: &SurfaceGrid, files: &mut Vec<PathBuf>) -> Result<(), Failure> {
    if matches!(fmt, MeshFormat::Obj | MeshFormat::Both) {
        core_io(write_obj(&wrote(dir.join(format!("{stem}.obj")), files), surface))?;
    }
    if matches!(fmt, MeshFormat::Ply | MeshFormat::Both) {
        core_io(write_ply(&wrote(dir.join(format!("{stem}.ply")), files), surface))?;
    }
    Ok(())
}

/// λ from `--lambda` or from the solver, with the solver report if solved.
fn lambda(run: &Run, args: &RunArgs, p: &Problem) -> Result<(Field, Option<wsurf::pde::SolverReport>), Failure> {
    match &args.lambda {
        Some(path) => {
            let lam = read_field_csv(path, &run.grid).map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))?;
            stages::admissible(&p.class, &lam)?;
            Ok((lam, None))
        }
        None => {
            let sol = stages::solve(&run.cfg, &p.class, run.grid)?;
            Ok((sol.lam, Some(sol.report)))
        }
    }
}

fn class_json(p: &Problem) -> serde_json::Value {
    json!({
        "class_id": p.class.form.class_id,
        "p": p.class.form.p,
        "q": p.class.form.q,
        "equation": p.class.form.equation(),
        "chart": { "a": p.class.a, "b": p.class.b, "nu0": p.class.nu0 },
        "classification": p.descriptor,
    })
}

pub fn solve(args: &RunArgs) -> Result<i32, Failure> {
    let run = load(args)?;
    let p = stages::problem(&run.cfg)?;
    let sol = stages::solve(&run.cfg, &p.class, run.grid)?;
    let error = stages::solution_error(&run.cfg, run.grid, &sol.lam)?;
    let mut files = Vec::new();
    if run.out.is_some() {
        let dir = out_dir(&run)?;
        core_io(write_field_csv(&wrote(dir.join("lambda.csv"), &mut files), &run.grid, &sol.lam))?;
        output::write_file(&wrote(dir.join("solver.json"), &mut files), &sol.report)?;
    }
    print_json(&json!({
        "class": class_json(&p),
        "grid": run.grid,
        "solver": sol.report,
        "lambda_error": error,
        "files": files,
    }));
    Ok(EXIT_OK)
}

fn build(args: &RunArgs) -> Result<(Run, Problem, Field, Option<wsurf::pde::SolverReport>, Reconstruction), Failure> {
    let run = load(args)?;
    let p = stages::problem(&run.cfg)?;
    let (lam, report) = lambda(&run, args, &p)?;
    let rec = stages::reconstruct(&run.cfg, &p.class, run.grid, &lam)?;
    Ok((run, p, lam, report, rec))
}

pub fn reconstruct(args: &RunArgs) -> Result<i32, Failure> {
    let (run, p, _, report, rec) = build(args)?;
    let dir = out_dir(&run)?;
    let mut files = Vec::new();
    write_mesh(run.cfg.output.mesh, &dir, "surface", &rec.surface, &mut files)?;
    print_json(&json!({
        "class": class_json(&p),
        "solver": report,
        "max_gram_drift": rec.surface.max_gram_drift(),
        "files": files,
    }));
    Ok(EXIT_OK)
}

pub fn verify(args: &RunArgs) -> Result<i32, Failure> {
    let (run, p, _, _, rec) = build(args)?;
    let verdict = stages::verify(&run.cfg, &p.class, &rec)?;
    print_json(&verdict);
    eprintln!(
        "gauss {}, codazzi {} / {}, F {}, M {}: {}",
        fmt6(verdict.report.gauss_max),
        fmt6(verdict.report.codazzi1_max),
        fmt6(verdict.report.codazzi2_max),
        fmt6(verdict.report.f_max),
        fmt6(verdict.report.m_max),
        if verdict.passed { "within tolerance" } else { "above tolerance" }
    );
    Ok(if verdict.passed { EXIT_OK } else { EXIT_VERIFY })
}

/// One entry of a parallel family; failures are reported per offset.
fn parallel_family(run: &Run, p: &Problem, rec: &Reconstruction, offsets: &[f64], files: &mut Vec<PathBuf>) -> Result<(Vec<serde_json::Value>, bool), Failure> {
    let chart = p.class.chart(run.grid).map_err(Failure::Reconstruct)?;
    let dir = match &run.out {
        Some(_) => Some(out_dir(run)?),
        None => None,
    };
    let mut entries = Vec::new();
    let mut all_ok = true;
    for (k, &a) in offsets.iter().enumerate() {
        let checked = check_parallel_natural(&chart, &p.class.pair, &rec.nu, a)
            .and_then(|r| parallel_surface_with(&rec.surface, &rec.invariants.nu1, &rec.invariants.nu2, a).map(|s| (r, s)));
        match checked {
            Ok((report, surface)) => {
                if let Some(dir) = &dir {
                    write_mesh(run.cfg.output.mesh, dir, &format!("parallel_{k}"), &surface, files)?;
                }
                entries.push(serde_json::to_value(report).expect("report serializes"));
            }
            Err(e) => {
                all_ok = false;
                entries.push(json!({ "a": a, "error": e.to_string() }));
            }
        }
    }
    Ok((entries, all_ok))
}

pub fn parallel(args: &ParallelArgs) -> Result<i32, Failure> {
    let (run, p, _, _, rec) = build(&args.run)?;
    let offsets = if args.offsets.is_empty() { run.cfg.parallel.offsets.clone() } else { args.offsets.clone() };
    if offsets.is_empty() {
        return Err(ConfigError::Invalid("no offsets: pass --offset or set parallel.offsets".into()).into());
    }
    let mut files = Vec::new();
    let (family, ok) = parallel_family(&run, &p, &rec, &offsets, &mut files)?;
    print_json(&json!({ "class": class_json(&p), "family": family, "files": files }));
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY })
}

pub fn pipeline(args: &RunArgs) -> Result<i32, Failure> {
    let (run, p, lam, report, rec) = build(args)?;
    let verdict = stages::verify(&run.cfg, &p.class, &rec)?;
    let dir = out_dir(&run)?;
    let mut files = Vec::new();
    write_mesh(run.cfg.output.mesh, &dir, "surface", &rec.surface, &mut files)?;
    output::write_file(&wrote(dir.join("verify.json"), &mut files), &verdict)?;
    if let Some(r) = &report {
        output::write_file(&wrote(dir.join("solver.json"), &mut files), r)?;
    }
    if let Some(d) = &p.descriptor {
        output::write_file(&wrote(dir.join("classification.json"), &mut files), d)?;
    }
    if run.cfg.output.fields {
        write_fields(&dir, &run, &lam, &rec, &mut files)?;
    }
    let mut parallel_ok = true;
    let mut family = Vec::new();
    if !run.cfg.parallel.offsets.is_empty() {
        let run_out = Run { out: Some(dir.clone()), ..run };
        let (f, ok) = parallel_family(&run_out, &p, &rec, &run_out.cfg.parallel.offsets, &mut files)?;
        output::write_file(&wrote(dir.join("parallel.json"), &mut files), &f)?;
        (family, parallel_ok) = (f, ok);
    }
    print_json(&json!({
        "class": class_json(&p),
        "solver": report,
        "verify": verdict,
        "parallel": family,
        "files": files,
    }));
    Ok(if verdict.passed && parallel_ok { EXIT_OK } else { EXIT_VERIFY })
}

fn write_fields(dir: &Path, run: &Run, lam: &Field, rec: &Reconstruction, files: &mut Vec<PathBuf>) -> Result<(), Failure> {
    let inv = &rec.invariants;
    let fields = [
        ("lambda", lam),
        ("nu", &rec.nu),
        ("nu1", &inv.nu1),
        ("nu2", &inv.nu2),
        ("gamma1", &inv.gamma1),
        ("gamma2", &inv.gamma2),
        ("E", &inv.e),
        ("G", &inv.g),
    ];
    core_io(write_fields_json(&wrote(dir.join("fields.json"), files), &run.grid, &fields))?;
    core_io(write_field_csv(&wrote(dir.join("lambda.csv"), files), &run.grid, lam))?;
    core_io(write_field_csv(&wrote(dir.join("nu.csv"), files), &run.grid, &rec.nu))?;
    let (rgrid, [c1, c2, gauss]) = residual_fields(&rec.surface).map_err(Failure::Reconstruct)?;
    let residuals = [("codazzi1", &c1), ("codazzi2", &c2), ("gauss", &gauss)];
    core_io(write_fields_json(&wrote(dir.join("residuals.json"), files), &rgrid, &residuals))
}

pub fn export(args: &RunArgs) -> Result<i32, Failure> {
    let (run, p, lam, _, rec) = build(args)?;
    let dir = out_dir(&run)?;
    let mut files = Vec::new();
    write_mesh(run.cfg.output.mesh, &dir, "surface", &rec.surface, &mut files)?;
    write_fields(&dir, &run, &lam, &rec, &mut files)?;
    print_json(&json!({ "class": class_json(&p), "files": files }));
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct Level {
    n_u: usize,
    n_v: usize,
    h: f64,
    lambda_error: Option<f64>,
    gauss: f64,
    codazzi1: f64,
    codazzi2: f64,
    #[serde(rename = "F")]
    f: f64,
    #[serde(rename = "M")]
    m: f64,
}

pub fn convergence(args: &ConvergenceArgs) -> Result<i32, Failure> {
    let run = load(&args.run)?;
    let levels = if args.levels.is_empty() { run.cfg.convergence.levels.clone() } else { args.levels.clone() };
    if levels.len() < 3 {
        return Err(ConfigError::Invalid(format!("a convergence study needs at least 3 levels, got {}", levels.len())).into());
    }
    let p = stages::problem(&run.cfg)?;
    let gcfg = run.cfg.grid.as_ref().ok_or(ConfigError::Missing("grid"))?;
    let mut rows = Vec::new();
    for &n in &levels {
        let grid = gcfg.build(Some(n))?;
        let sol = stages::solve(&run.cfg, &p.class, grid)?;
        let lambda_error = stages::solution_error(&run.cfg, grid, &sol.lam)?;
        let rec = stages::reconstruct(&run.cfg, &p.class, grid, &sol.lam)?;
        let r = stages::verify(&run.cfg, &p.class, &rec)?.report;
        rows.push(Level {
            n_u: grid.nu,
            n_v: grid.nv,
            h: grid.hu(),
            lambda_error,
            gauss: r.gauss_max,
            codazzi1: r.codazzi1_max,
            codazzi2: r.codazzi2_max,
            f: r.f_max,
            m: r.m_max,
        });
    }
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let order = |pick: fn(&Level) -> Option<f64>| -> Option<f64> {
        let errs: Option<Vec<f64>> = rows.iter().map(pick).collect();
        errs.map(|e| fitted_order(&hs, &e))
    };
    let orders = json!({
        "lambda_error": order(|r| r.lambda_error),
        "gauss": order(|r| Some(r.gauss)),
        "codazzi1": order(|r| Some(r.codazzi1)),
        "codazzi2": order(|r| Some(r.codazzi2)),
        "F": order(|r| Some(r.f)),
        "M": order(|r| Some(r.m)),
    });
    if args.json {
        print_json(&json!({ "class": class_json(&p), "levels": rows, "orders": orders }));
        return Ok(EXIT_OK);
    }
    let cell = |x: Option<f64>| x.map(fmt6).unwrap_or_else(|| "-".into());
    println!("{:>6} {:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}", "n_u", "n_v", "h", "lambda_err", "gauss", "codazzi1", "codazzi2", "F", "M");
    for r in &rows {
        println!(
            "{:>6} {:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
            r.n_u,
            r.n_v,
            fmt6(r.h),
            cell(r.lambda_error),
            fmt6(r.gauss),
            fmt6(r.codazzi1),
            fmt6(r.codazzi2),
            fmt6(r.f),
            fmt6(r.m)
        );
    }
    let o = |k: &str| cell(orders[k].as_f64());
    println!(
        "{:>6} {:>6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "order",
        "",
        "",
        o("lambda_error"),
        o("gauss"),
        o("codazzi1"),
        o("codazzi2"),
        o("F"),
        o("M")
    );
    Ok(EXIT_OK)
}
