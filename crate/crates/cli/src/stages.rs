//! Pipeline stages shared by the subcommands, with failures tagged by the
//! stage that raised them.

use crate::config::{BoundaryKind, ConfigError, RunConfig, SideKind, VerifySection};
use serde::Serialize;
use wsurf::grid::{max_abs, Field};
use wsurf::pde::{basic_class, solve_elliptic, solve_hyperbolic, BasicClass, BoundaryData, Sides, Solution};
use wsurf::reconstruct::{integrate_frame_with, Frame, SurfaceGrid};
use wsurf::verify::{verify_surface, VerifyReport};
use wsurf::{classify, BasicClassDescriptor, Grid2, InvariantGrid, SolverConfig};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CLASSIFY: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("classification failed: {0}")]
    Classify(wsurf::Error),
    #[error("solver failed: {0}")]
    Solver(wsurf::Error),
    #[error("reconstruction failed: {0}")]
    Reconstruct(wsurf::Error),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) | Failure::Output(_) => EXIT_USAGE,
            Failure::Classify(_) => EXIT_CLASSIFY,
            Failure::Solver(_) => EXIT_SOLVER,
            Failure::Reconstruct(_) => EXIT_VERIFY,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Output(e.to_string())
    }
}

/// The basic class to solve, and the classification that led to it.
pub struct Problem {
    pub descriptor: Option<BasicClassDescriptor>,
    pub class: BasicClass,
}

pub fn problem(cfg: &RunConfig) -> Result<Problem, Failure> {
    let (descriptor, id, p, q) = match (&cfg.class, &cfg.relation) {
        (Some(c), _) => (None, c.id, c.p, c.q),
        (None, Some(r)) => {
            let rel = r.coefficients()?.relation().map_err(Failure::Classify)?;
            let d = classify(&rel).map_err(Failure::Classify)?;
            let (id, p, q) = (d.class_id, d.p, d.q);
            (Some(d), id, p, q)
        }
        (None, None) => return Err(ConfigError::Invalid("give either [class] or [relation]".into()).into()),
    };
    let class = basic_class(id, p, q).map_err(Failure::Classify)?;
    Ok(Problem { descriptor, class })
}

pub fn solve(cfg: &RunConfig, class: &BasicClass, grid: Grid2) -> Result<Solution, Failure> {
    let b = cfg.boundary()?;
    let value = crate::config::parse_expr("boundary.value", &b.value)?;
    let boundary = match b.kind {
        BoundaryKind::Dirichlet => BoundaryData::Dirichlet(grid.sample(|u, v| value.eval_uv(u, v))),
        BoundaryKind::Cauchy => {
            let src = b.velocity.as_deref().ok_or_else(|| ConfigError::Invalid("Cauchy boundary needs `velocity`".into()))?;
            let velocity = crate::config::parse_expr("boundary.velocity", src)?;
            let v_start = if b.reverse { grid.v(grid.nv - 1) } else { grid.v0 };
            let along_u = |e: &wsurf::Expr| (0..grid.nu).map(|i| e.eval_uv(grid.u(i), v_start)).collect::<Vec<_>>();
            let edge = |u: f64| (0..grid.nv).map(|j| value.eval_uv(u, grid.v(j))).collect::<Vec<_>>();
            let sides = match b.sides {
                SideKind::Dirichlet => Sides::Dirichlet { left: edge(grid.u0), right: edge(grid.u(grid.nu - 1)) },
                SideKind::Neumann => Sides::Neumann,
            };
            BoundaryData::Cauchy { value: along_u(&value), velocity: along_u(&velocity), sides, reverse: b.reverse }
        }
    };
    let s = &cfg.solver;
    let solver_cfg = SolverConfig { max_iter: s.max_iter, newton_tol: s.newton_tol, damping: s.damping, ..SolverConfig::new(boundary) };
    let sol = if class.form.operator.is_elliptic() {
        solve_elliptic(&class.form, &grid, &solver_cfg)
    } else {
        solve_hyperbolic(&class.form, &grid, &solver_cfg)
    }
    .map_err(Failure::Solver)?;
    admissible(class, &sol.lam)?;
    Ok(sol)
}

/// Rejects λ outside the interval on which the class substitution is defined.
pub fn admissible(class: &BasicClass, lam: &Field) -> Result<(), Failure> {
    match lam.indexed_iter().find(|(_, &x)| !class.contains(x)) {
        Some(((i, j), &x)) => Err(Failure::Solver(wsurf::Error::Domain(format!(
            "λ = {x} at node ({i}, {j}) leaves the admissible interval ({}, {})",
            class.lam_lo, class.lam_hi
        )))),
        None => Ok(()),
    }
}

pub struct Reconstruction {
    pub nu: Field,
    pub invariants: InvariantGrid,
    pub surface: SurfaceGrid,
}

pub fn reconstruct(cfg: &RunConfig, class: &BasicClass, grid: Grid2, lam: &Field) -> Result<Reconstruction, Failure> {
    let nu = class.nu_field(lam);
    let chart = class.chart(grid).map_err(Failure::Reconstruct)?;
    let invariants = wsurf::invariants_from_nu(&chart, &class.pair, &nu).map_err(Failure::Reconstruct)?;
    let r = &cfg.reconstruct;
    let surface = integrate_frame_with(&invariants, Frame::default(), r.mode, r.path_tol).map_err(Failure::Reconstruct)?;
    Ok(Reconstruction { nu, invariants, surface })
}

/// Verification maxima next to the configured tolerances.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub report: VerifyReport,
    pub tolerances: VerifySection,
    pub passed: bool,
}

pub fn verify(cfg: &RunConfig, class: &BasicClass, rec: &Reconstruction) -> Result<Verdict, Failure> {
    let report = verify_surface(&rec.surface, Some((&class.pair, &rec.nu))).map_err(Failure::Reconstruct)?;
    let t = &cfg.verify;
    let passed = report.gauss_max < t.gauss_tol
        && report.codazzi1_max.max(report.codazzi2_max) < t.codazzi_tol
        && report.f_max.max(report.m_max) < t.fm_tol;
    Ok(Verdict { report, tolerances: t.clone(), passed })
}

/// Max |λ - exact| when the config carries a closed form.
pub fn solution_error(cfg: &RunConfig, grid: Grid2, lam: &Field) -> Result<Option<f64>, Failure> {
    let Some(src) = cfg.boundary()?.exact.as_deref() else { return Ok(None) };
    let exact = crate::config::parse_expr("boundary.exact", src)?;
    Ok(Some(max_abs(&(lam - &grid.sample(|u, v| exact.eval_uv(u, v))))))
}
