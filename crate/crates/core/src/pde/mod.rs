//! Natural PDEs: the four canonical operators, residual evaluators and solvers.

mod banded;
pub mod classes;
pub mod elliptic;
pub mod hyperbolic;

pub use classes::{basic_class, canonical_rhs, BasicClass};
pub use elliptic::solve_elliptic;
pub use hyperbolic::solve_hyperbolic;

use crate::chart::{ij_fields, NaturalChart};
use crate::error::{Error, Result};
use crate::expr::{Expr, Jet};
use crate::grid::{d1, d2, Axis, Field, Grid2};
use crate::weingarten::{WeingartenPair, TOL_SINGULAR};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OperatorKind {
    /// `λ_uu + λ_vv`
    Delta,
    /// `λ_uu - λ_vv`
    DeltaBar,
    /// `λ_uu + (1/λ)_vv`
    DeltaStar,
    /// `λ_uu - (1/λ)_vv`
    DeltaBarStar,
}

impl OperatorKind {
    /// Sign in front of the `v` term.
    pub fn sign(self) -> f64 {
        match self {
            OperatorKind::Delta | OperatorKind::DeltaStar => 1.0,
            OperatorKind::DeltaBar | OperatorKind::DeltaBarStar => -1.0,
        }
    }

    pub fn starred(self) -> bool {
        matches!(self, OperatorKind::DeltaStar | OperatorKind::DeltaBarStar)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            OperatorKind::Delta => "Δ",
            OperatorKind::DeltaBar => "Δ̄",
            OperatorKind::DeltaStar => "Δ*",
            OperatorKind::DeltaBarStar => "Δ̄*",
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            OperatorKind::Delta => "DELTA",
            OperatorKind::DeltaBar => "DELTA_BAR",
            OperatorKind::DeltaStar => "DELTA_STAR",
            OperatorKind::DeltaBarStar => "DELTA_BAR_STAR",
        }
    }

    /// Whether the operator, linearized about a field with `T' ≠ 0`, is
    /// elliptic. `Δ*` with `U = 1/T` has opposite-signed principal
    /// coefficients and is therefore hyperbolic; `Δ̄*` is elliptic.
    pub fn is_elliptic(self) -> bool {
        matches!(self, OperatorKind::Delta | OperatorKind::DeltaBarStar)
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Signature {
    Euclidean,
    Minkowski,
}

/// A PDE `δ(T(λ)) = R(λ)` with `δ` one of the canonical operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeForm {
    pub class_id: Option<u8>,
    pub operator: OperatorKind,
    pub signature: Signature,
    /// `T`, the transform the operator is applied to.
    pub lhs: Expr,
    /// `R`, the right-hand side.
    pub rhs: Expr,
    pub p: Option<f64>,
    pub q: Option<f64>,
    /// Name of the unknown in the printed forms (`λ` or `ν`).
    pub variable: String,
    pub lhs_text: String,
    pub rhs_text: String,
    /// Map between ν and the unknown, when they differ.
    pub substitution: Option<String>,
}

impl PdeForm {
    /// Printed equation, e.g. `Δ*(e^ν) = 2ν(ν+2)`.
    pub fn equation(&self) -> String {
        let op = self.operator.symbol();
        if self.lhs_text == self.variable {
            format!("{op}{} = {}", self.variable, self.rhs_text)
        } else {
            format!("{op}({}) = {}", self.lhs_text, self.rhs_text)
        }
    }

    pub fn t_jet(&self, lam: f64) -> Jet {
        self.lhs.jet(lam)
    }

    /// `U`, the quantity differentiated in `v`: `T` itself for Δ, Δ̄ and
    /// `1/T` for the starred operators.
    pub fn u_jet(&self, lam: f64) -> Jet {
        let t = self.lhs.jet(lam);
        if self.operator.starred() {
            Jet::constant(1.0) / t
        } else {
            t
        }
    }

    pub fn r_jet(&self, lam: f64) -> Jet {
        self.rhs.jet(lam)
    }

    /// Residual `δ(T(λ)) - R(λ)` on interior nodes; zero on the boundary ring.
    pub fn residual(&self, lam: &Field, grid: &Grid2) -> Result<Field> {
        grid.check_field(lam, "λ field")?;
        let t = lam.mapv(|x| self.lhs.eval(x));
        let applied = operator_apply(self.operator, &t, grid.hu(), grid.hv())?;
        let mut out = applied;
        let (n, m) = lam.dim();
        for i in 1..n.saturating_sub(1) {
            for j in 1..m.saturating_sub(1) {
                out[[i, j]] -= self.rhs.eval(lam[[i, j]]);
            }
        }
        Ok(out)
    }

    /// Same operator and transform, negated right-hand side, flipped signature.
    pub fn euclidean_counterpart(&self) -> PdeForm {
        let rhs_text = match self.rhs_text.strip_prefix('-') {
            Some(rest) => rest.trim_start().to_string(),
            None => format!("-{}", self.rhs_text),
        };
        PdeForm {
            signature: match self.signature {
                Signature::Euclidean => Signature::Minkowski,
                Signature::Minkowski => Signature::Euclidean,
            },
            rhs: self.rhs.negated(),
            rhs_text,
            ..self.clone()
        }
    }
}

/// Free-function form of [`PdeForm::euclidean_counterpart`].
pub fn euclidean_counterpart(form: &PdeForm) -> PdeForm {
    form.euclidean_counterpart()
}

/// Applies a canonical operator with centered differences. Boundary nodes are
/// left at zero.
pub fn operator_apply(op: OperatorKind, lam: &Field, h_u: f64, h_v: f64) -> Result<Field> {
    let (n, m) = lam.dim();
    if op.starred() {
        if let Some(((i, j), &x)) = lam.indexed_iter().find(|(_, x)| !(x.abs() >= TOL_SINGULAR)) {
            return Err(Error::SingularField { i, j, value: x });
        }
    }
    let w = if op.starred() { lam.mapv(|x| 1.0 / x) } else { lam.clone() };
    let s = op.sign();
    let mut out = Field::zeros((n, m));
    let (hu2, hv2) = (h_u * h_u, h_v * h_v);
    for i in 1..n.saturating_sub(1) {
        for j in 1..m.saturating_sub(1) {
            let luu = (lam[[i + 1, j]] - 2.0 * lam[[i, j]] + lam[[i - 1, j]]) / hu2;
            let wvv = (w[[i, j + 1]] - 2.0 * w[[i, j]] + w[[i, j - 1]]) / hv2;
            out[[i, j]] = luu + s * wvv;
        }
    }
    Ok(out)
}

struct NuDerivs {
    nu_u: Field,
    nu_v: Field,
    nu_uu: Field,
    nu_vv: Field,
}

fn nu_derivs(nu: &Field, grid: &Grid2) -> NuDerivs {
    NuDerivs {
        nu_u: d1(nu, Axis::U, grid.hu()),
        nu_v: d1(nu, Axis::V, grid.hv()),
        nu_uu: d2(nu, Axis::U, grid.hu()),
        nu_vv: d2(nu, Axis::V, grid.hv()),
    }
}

/// `LHS + f g` of the natural PDE
/// `𝔞² e^{2I}(J_uu + I_u J_u - J_u²) + 𝔟² e^{2J}(I_vv + I_v J_v - I_v²) = -f g`,
/// on interior nodes (zero on the boundary ring).
///
/// Only ν is differentiated on the grid; derivatives of `I`, `J` go through
/// the exact chain rule in ν.
pub fn natural_pde_residual(chart: &NaturalChart, pair: &WeingartenPair, nu: &Field) -> Result<Field> {
    let grid = chart.grid;
    if grid.nu < 5 || grid.nv < 5 {
        return Err(Error::Shape("natural PDE residual needs at least 5x5 nodes".into()));
    }
    let (i_f, j_f, _) = ij_fields(chart, pair, nu)?;
    let dv = nu_derivs(nu, &grid);
    let (a2, b2) = (chart.a * chart.a, chart.b * chart.b);
    let (n, m) = nu.dim();
    let mut out = Field::zeros((n, m));
    for p in 1..n - 1 {
        for q in 1..m - 1 {
            let x = nu[[p, q]];
            let (ij, jj) = pair.ij_jets(x);
            let (nu_u, nu_v) = (dv.nu_u[[p, q]], dv.nu_v[[p, q]]);
            let (i1, i2, j1, j2) = (ij.d1, ij.d2, jj.d1, jj.d2);
            let u_part = (j2 + i1 * j1 - j1 * j1) * nu_u * nu_u + j1 * dv.nu_uu[[p, q]];
            let v_part = (i2 + i1 * j1 - i1 * i1) * nu_v * nu_v + i1 * dv.nu_vv[[p, q]];
            let lhs = a2 * (2.0 * i_f[[p, q]]).exp() * u_part + b2 * (2.0 * j_f[[p, q]]).exp() * v_part;
            out[[p, q]] = lhs + pair.f(x) * pair.g(x);
        }
    }
    Ok(out)
}

/// The ν(u) reduction: `𝔞² e^{2I}(J_uu + I_u J_u - J_u²) + f g` at interior
/// nodes of the chart's `u` axis.
pub fn natural_ode_residual(chart: &NaturalChart, pair: &WeingartenPair, nu_of_u: &[f64]) -> Result<Vec<f64>> {
    let grid = chart.grid;
    if nu_of_u.len() != grid.nu {
        return Err(Error::Shape(format!("expected {} samples of ν(u), got {}", grid.nu, nu_of_u.len())));
    }
    let line = Grid2::new((grid.u0, grid.u1), (0.0, 0.0), grid.nu, 1)?;
    let nu = Field::from_shape_fn((grid.nu, 1), |(i, _)| nu_of_u[i]);
    let q = crate::weingarten::compute_ij(pair, chart.nu0, nu_of_u)?;
    let nu_u = d1(&nu, Axis::U, line.hu());
    let nu_uu = d2(&nu, Axis::U, line.hu());
    let a2 = chart.a * chart.a;
    let mut out = vec![0.0; grid.nu];
    for p in 1..grid.nu.saturating_sub(1) {
        let x = nu_of_u[p];
        let (ij, jj) = pair.ij_jets(x);
        let (i1, j1, j2) = (ij.d1, jj.d1, jj.d2);
        let d = nu_u[[p, 0]];
        let part = (j2 + i1 * j1 - j1 * j1) * d * d + j1 * nu_uu[[p, 0]];
        out[p] = a2 * (2.0 * q.i[p]).exp() * part + pair.f(x) * pair.g(x);
    }
    Ok(out)
}

/// Boundary condition on the `u = const` sides during hyperbolic marching.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sides {
    /// Values along `u = u0` and `u = u1`, one per `v` node.
    Dirichlet { left: Vec<f64>, right: Vec<f64> },
    /// Zero normal derivative, imposed with a mirror ghost node.
    Neumann,
}

/// Boundary or initial data for a solve.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryData {
    /// Full-size field; only its boundary ring is used.
    Dirichlet(Field),
    /// `λ` and `λ_v` along the starting line, one value per `u` node.
    Cauchy {
        value: Vec<f64>,
        velocity: Vec<f64>,
        sides: Sides,
        /// Start at `v = v1` and march toward `v0` instead.
        reverse: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iter: usize,
    pub newton_tol: f64,
    pub damping: f64,
    pub boundary: BoundaryData,
    /// Starting iterate for the elliptic solver; transfinite interpolation of
    /// the boundary when absent.
    pub initial: Option<Field>,
}

impl SolverConfig {
    pub fn new(boundary: BoundaryData) -> Self {
        SolverConfig { max_iter: 100, newton_tol: 1e-10, damping: 1.0, boundary, initial: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::Param("max_iter must be at least 1".into()));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::Param("newton_tol must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Param("damping must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub iterations: usize,
    pub final_residual: f64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub lam: Field,
    pub report: SolverReport,
}
