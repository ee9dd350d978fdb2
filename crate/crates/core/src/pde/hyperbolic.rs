//! Explicit leapfrog marching in `v` for the hyperbolic canonical forms.

use super::{BoundaryData, PdeForm, Sides, Solution, SolverConfig, SolverReport};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid2};
use crate::weingarten::TOL_SINGULAR;
use std::time::Instant;

/// Characteristic speed of the marched equation: 1 for `Δ̄`, `|T(λ)|` for `Δ*`.
fn speed(form: &PdeForm, row: &[f64]) -> f64 {
    if form.operator.starred() {
        row.iter().fold(0.0f64, |m, &x| m.max(form.lhs.eval(x).abs()))
    } else {
        1.0
    }
}

/// Solves `U(λ) = target` for λ by scalar Newton from `guess`.
fn invert(form: &PdeForm, target: f64, guess: f64) -> Option<f64> {
    let mut x = guess;
    for _ in 0..60 {
        let j = form.u_jet(x);
        let r = j.v - target;
        if r.abs() <= 4.0 * f64::EPSILON * target.abs().max(1e-300) {
            return Some(x);
        }
        if j.d1 == 0.0 || !j.d1.is_finite() {
            return None;
        }
        let step = r / j.d1;
        x -= step;
        if !x.is_finite() {
            return None;
        }
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            return Some(x);
        }
    }
    let r = form.u_jet(x).v - target;
    (r.abs() <= 1e-10 * target.abs().max(1.0)).then_some(x)
}

/// Marches `δ(T(λ)) = R(λ)` from Cauchy data on a `v = const` line for a
/// hyperbolic operator (`Δ̄` or `Δ*`).
///
/// With `U = T` (Δ̄) or `U = 1/T` (Δ*) and `s` the operator's sign, the
/// scheme is `U^{n+1} = 2U^n - U^{n-1} + k² s (R - D_uu T)`; the first step is
/// the Taylor expansion `U¹ = U⁰ + k U'(λ⁰) λ_v + k²/2 s (R - D_uu T)`.
pub fn solve_hyperbolic(form: &PdeForm, grid: &Grid2, cfg: &SolverConfig) -> Result<Solution> {
    let start = Instant::now();
    cfg.validate()?;
    if form.operator.is_elliptic() {
        return Err(Error::OperatorType(form.operator.tag().into(), "hyperbolic (DELTA_BAR or DELTA_STAR)".into()));
    }
    let BoundaryData::Cauchy { value, velocity, sides, reverse } = &cfg.boundary else {
        return Err(Error::Param("hyperbolic solve needs Cauchy data".into()));
    };
    let (n, m) = grid.shape();
    if value.len() != n || velocity.len() != n {
        return Err(Error::Shape(format!("Cauchy data must have {n} values")));
    }
    if let Sides::Dirichlet { left, right } = sides {
        if left.len() != m || right.len() != m {
            return Err(Error::Shape(format!("side data must have {m} values")));
        }
    }
    let (hu, hv) = (grid.hu(), grid.hv());
    let k = if *reverse { -hv } else { hv };
    let row_index = |step: usize| if *reverse { m - 1 - step } else { step };
    let mut lam = Field::zeros((n, m));
    for i in 0..n {
        lam[[i, row_index(0)]] = value[i];
    }
    let s = form.operator.sign();
    let check_cfl = |row: &[f64]| -> Result<()> {
        let c = speed(form, row);
        if n > 1 && hv * c > hu * (1.0 + 1e-12) {
            return Err(Error::Cfl { h_v: hv, bound: hu / c });
        }
        Ok(())
    };
    let transform_u = |x: f64, i: usize, j: usize| -> Result<f64> {
        let t = form.lhs.eval(x);
        if form.operator.starred() {
            if !(t.abs() >= TOL_SINGULAR) {
                return Err(Error::SingularField { i, j, value: t });
            }
            Ok(1.0 / t)
        } else {
            Ok(t)
        }
    };
    // s (R - D_uu T) at every node of the row that is marched
    let rhs_row = |row: &[f64]| -> Vec<f64> {
        let t: Vec<f64> = row.iter().map(|&x| form.lhs.eval(x)).collect();
        let hu2 = hu * hu;
        (0..n)
            .map(|i| {
                let tuu = if n < 3 {
                    0.0
                } else if i == 0 {
                    2.0 * (t[1] - t[0]) / hu2
                } else if i == n - 1 {
                    2.0 * (t[n - 2] - t[n - 1]) / hu2
                } else {
                    (t[i + 1] - 2.0 * t[i] + t[i - 1]) / hu2
                };
                s * (form.rhs.eval(row[i]) - tuu)
            })
            .collect()
    };
    if m == 1 {
        return Ok(Solution { lam, report: SolverReport { iterations: 0, final_residual: 0.0, wall_time: 0.0 } });
    }
    let marched = |i: usize| !matches!(sides, Sides::Dirichlet { .. }) || (i > 0 && i + 1 < n);
    let side_value = |i: usize, j: usize| match sides {
        Sides::Dirichlet { left, right } if i == 0 => Some(left[j]),
        Sides::Dirichlet { left: _, right } if i + 1 == n => Some(right[j]),
        _ => None,
    };
    check_cfl(value)?;

    let mut prev_u = Vec::with_capacity(n);
    for (i, &x) in value.iter().enumerate() {
        prev_u.push(transform_u(x, i, row_index(0))?);
    }
    let rhs0 = rhs_row(value);
    let j1 = row_index(1);
    let mut cur_u = vec![0.0; n];
    for i in 0..n {
        if let Some(v) = side_value(i, j1) {
            lam[[i, j1]] = v;
            cur_u[i] = transform_u(v, i, j1)?;
        } else {
            let du = form.u_jet(value[i]).d1;
            cur_u[i] = prev_u[i] + k * du * velocity[i] + 0.5 * k * k * rhs0[i];
            lam[[i, j1]] = invert(form, cur_u[i], value[i] + k * velocity[i])
                .ok_or(Error::NonConvergence { iterations: 1, best_residual: f64::NAN })?;
        }
    }
    for step in 1..m - 1 {
        let (jc, jn) = (row_index(step), row_index(step + 1));
        let row: Vec<f64> = (0..n).map(|i| lam[[i, jc]]).collect();
        check_cfl(&row)?;
        let rhs = rhs_row(&row);
        let mut next_u = vec![0.0; n];
        for i in 0..n {
            if let Some(v) = side_value(i, jn) {
                lam[[i, jn]] = v;
                next_u[i] = transform_u(v, i, jn)?;
            } else if marched(i) {
                next_u[i] = 2.0 * cur_u[i] - prev_u[i] + k * k * rhs[i];
                let guess = 2.0 * row[i] - lam[[i, row_index(step - 1)]];
                lam[[i, jn]] = invert(form, next_u[i], guess)
                    .ok_or(Error::NonConvergence { iterations: step + 1, best_residual: f64::NAN })?;
            }
        }
        prev_u = cur_u;
        cur_u = next_u;
    }
    if let Some(((i, j), &x)) = lam.indexed_iter().find(|(_, x)| !x.is_finite()) {
        return Err(Error::SingularField { i, j, value: x });
    }
    let final_residual = crate::grid::max_abs(&form.residual(&lam, grid)?);
    Ok(Solution {
        lam,
        report: SolverReport { iterations: m - 1, final_residual, wall_time: start.elapsed().as_secs_f64() },
    })
}
