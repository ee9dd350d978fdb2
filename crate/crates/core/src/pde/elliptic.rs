//! Damped Newton solver for the elliptic canonical forms.

use super::banded::Banded;
use super::{BoundaryData, PdeForm, Solution, SolverConfig, SolverReport};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid2};
use crate::weingarten::TOL_SINGULAR;
use std::time::Instant;

/// Transfinite (Coons) interpolation of the boundary ring into the interior.
pub fn coons(boundary: &Field) -> Field {
    let (n, m) = boundary.dim();
    let mut out = boundary.clone();
    if n < 3 || m < 3 {
        return out;
    }
    let b = boundary;
    for i in 1..n - 1 {
        for j in 1..m - 1 {
            let s = i as f64 / (n - 1) as f64;
            let t = j as f64 / (m - 1) as f64;
            let edges = (1.0 - s) * b[[0, j]] + s * b[[n - 1, j]] + (1.0 - t) * b[[i, 0]] + t * b[[i, m - 1]];
            let corners = (1.0 - s) * (1.0 - t) * b[[0, 0]]
                + s * (1.0 - t) * b[[n - 1, 0]]
                + (1.0 - s) * t * b[[0, m - 1]]
                + s * t * b[[n - 1, m - 1]];
            out[[i, j]] = edges - corners;
        }
    }
    out
}

struct System<'a> {
    form: &'a PdeForm,
    n: usize,
    m: usize,
    hu2: f64,
    hv2: f64,
    s: f64,
}

impl System<'_> {
    fn unknowns(&self) -> usize {
        (self.n - 2) * (self.m - 2)
    }

    fn index(&self, i: usize, j: usize) -> usize {
        (j - 1) * (self.n - 2) + (i - 1)
    }

    fn transforms(&self, lam: &Field) -> Result<(Field, Field)> {
        let t = lam.mapv(|x| self.form.lhs.eval(x));
        if self.form.operator.starred() {
            if let Some(((i, j), &x)) = t.indexed_iter().find(|(_, x)| !(x.abs() >= TOL_SINGULAR)) {
                return Err(Error::SingularField { i, j, value: x });
            }
            let u = t.mapv(|x| 1.0 / x);
            Ok((t, u))
        } else {
            Ok((t.clone(), t))
        }
    }

    fn residual(&self, lam: &Field) -> Result<Vec<f64>> {
        let (t, u) = self.transforms(lam)?;
        let mut out = vec![0.0; self.unknowns()];
        for j in 1..self.m - 1 {
            for i in 1..self.n - 1 {
                let tuu = (t[[i + 1, j]] - 2.0 * t[[i, j]] + t[[i - 1, j]]) / self.hu2;
                let uvv = (u[[i, j + 1]] - 2.0 * u[[i, j]] + u[[i, j - 1]]) / self.hv2;
                out[self.index(i, j)] = tuu + self.s * uvv - self.form.rhs.eval(lam[[i, j]]);
            }
        }
        Ok(out)
    }

    fn jacobian(&self, lam: &Field) -> Banded {
        let nn = self.n - 2;
        let mut jac = Banded::zeros(self.unknowns(), nn, nn);
        let dt = lam.mapv(|x| self.form.t_jet(x).d1);
        let du = lam.mapv(|x| self.form.u_jet(x).d1);
        for j in 1..self.m - 1 {
            for i in 1..self.n - 1 {
                let k = self.index(i, j);
                let diag = -2.0 * dt[[i, j]] / self.hu2 - 2.0 * self.s * du[[i, j]] / self.hv2
                    - self.form.r_jet(lam[[i, j]]).d1;
                jac.set(k, k, diag);
                if i > 1 {
                    jac.set(k, k - 1, dt[[i - 1, j]] / self.hu2);
                }
                if i + 2 < self.n {
                    jac.set(k, k + 1, dt[[i + 1, j]] / self.hu2);
                }
                if j > 1 {
                    jac.set(k, k - nn, self.s * du[[i, j - 1]] / self.hv2);
                }
                if j + 2 < self.m {
                    jac.set(k, k + nn, self.s * du[[i, j + 1]] / self.hv2);
                }
            }
        }
        jac
    }

    /// Five-point Laplacian, used for the fixed-point fallback.
    fn laplacian(&self) -> Banded {
        let nn = self.n - 2;
        let mut lap = Banded::zeros(self.unknowns(), nn, nn);
        for j in 1..self.m - 1 {
            for i in 1..self.n - 1 {
                let k = self.index(i, j);
                lap.set(k, k, -2.0 / self.hu2 - 2.0 / self.hv2);
                if i > 1 {
                    lap.set(k, k - 1, 1.0 / self.hu2);
                }
                if i + 2 < self.n {
                    lap.set(k, k + 1, 1.0 / self.hu2);
                }
                if j > 1 {
                    lap.set(k, k - nn, 1.0 / self.hv2);
                }
                if j + 2 < self.m {
                    lap.set(k, k + nn, 1.0 / self.hv2);
                }
            }
        }
        lap
    }

    fn apply_step(&self, lam: &Field, step: &[f64], t: f64) -> Field {
        let mut out = lam.clone();
        for j in 1..self.m - 1 {
            for i in 1..self.n - 1 {
                out[[i, j]] += t * step[self.index(i, j)];
            }
        }
        out
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x.abs()) })
}

/// Solves `δ(T(λ)) = R(λ)` with Dirichlet data for an elliptic operator
/// (`Δ` or `Δ̄*`).
///
/// Newton steps use the exact Jacobian of the discrete system, factored as a
/// banded matrix. When the Jacobian is singular the step falls back to
/// `λ ← λ - Δ_h⁻¹ F(λ)`. Steps are halved while they fail to lower the max
/// residual.
pub fn solve_elliptic(form: &PdeForm, grid: &Grid2, cfg: &SolverConfig) -> Result<Solution> {
    let start = Instant::now();
    cfg.validate()?;
    if !form.operator.is_elliptic() {
        return Err(Error::OperatorType(form.operator.tag().into(), "elliptic (DELTA or DELTA_BAR_STAR)".into()));
    }
    let BoundaryData::Dirichlet(data) = &cfg.boundary else {
        return Err(Error::Param("elliptic solve needs Dirichlet boundary data".into()));
    };
    grid.check_field(data, "boundary data")?;
    let mut lam = match &cfg.initial {
        Some(init) => {
            grid.check_field(init, "initial guess")?;
            init.clone()
        }
        None => coons(data),
    };
    let (n, m) = grid.shape();
    for i in 0..n {
        for j in 0..m {
            if grid.is_boundary(i, j) {
                lam[[i, j]] = data[[i, j]];
            }
        }
    }
    if n < 3 || m < 3 {
        return Ok(Solution { lam, report: SolverReport { iterations: 0, final_residual: 0.0, wall_time: 0.0 } });
    }
    let sys = System { form, n, m, hu2: grid.hu().powi(2), hv2: grid.hv().powi(2), s: form.operator.sign() };
    let mut f = sys.residual(&lam)?;
    let mut res = max_abs(&f);
    let mut iterations = 0;
    let mut laplacian: Option<Banded> = None;
    while res >= cfg.newton_tol {
        if iterations >= cfg.max_iter {
            return Err(Error::NonConvergence { iterations, best_residual: res });
        }
        iterations += 1;
        let mut step: Vec<f64> = f.iter().map(|x| -x).collect();
        let mut jac = sys.jacobian(&lam);
        if jac.factor() {
            jac.solve(&mut step);
        } else {
            let lap = laplacian.get_or_insert_with(|| {
                let mut l = sys.laplacian();
                l.factor();
                l
            });
            lap.solve(&mut step);
        }
        let mut t = cfg.damping;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = sys.apply_step(&lam, &step, t);
            match sys.residual(&trial) {
                Ok(ft) => {
                    let rt = max_abs(&ft);
                    if rt < res {
                        lam = trial;
                        f = ft;
                        res = rt;
                        accepted = true;
                        break;
                    }
                }
                Err(Error::SingularField { .. }) => {}
                Err(e) => return Err(e),
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::NonConvergence { iterations, best_residual: res });
        }
    }
    Ok(Solution {
        lam,
        report: SolverReport { iterations, final_residual: res, wall_time: start.elapsed().as_secs_f64() },
    })
}
