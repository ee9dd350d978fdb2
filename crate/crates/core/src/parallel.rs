//! Parallel surfaces `z̄ = z + a l`: transformed curvatures, Weingarten
//! functions, linear relations and natural-chart data.

use crate::chart::{invariants_from_nu, NaturalChart};
use crate::classify::LinearRelation;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::grid::Field;
use crate::invariants::check_natural_parameters;
use crate::pde::natural_pde_residual;
use crate::reconstruct::{Frame, SurfaceGrid};
use crate::verify::forms_from_mesh;
use crate::weingarten::{interior_samples, WeingartenPair};
use serde::{Deserialize, Serialize};

/// Smallest admissible `|1 - aν|`.
pub const OFFSET_TOL: f64 = 1e-8;

/// An offset `a` together with the certified constant sign ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParallelOffset {
    pub a: f64,
    pub epsilon: f64,
}

fn check_a(a: f64) -> Result<()> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::Param(format!("offset must be finite and nonzero, got {a}")));
    }
    Ok(())
}

/// `ε = sign((1 - aν1)(1 - aν2))`, required constant over all pairs given.
fn certify_epsilon(a: f64, pairs: impl Iterator<Item = (f64, f64)>) -> Result<f64> {
    let mut eps = 0.0;
    let mut margin = f64::INFINITY;
    for (n1, n2) in pairs {
        let (m1, m2) = (1.0 - a * n1, 1.0 - a * n2);
        margin = margin.min(m1.abs()).min(m2.abs());
        if !(m1.abs() >= OFFSET_TOL && m2.abs() >= OFFSET_TOL) {
            return Err(Error::SingularOffset { a, margin });
        }
        let e = (m1 * m2).signum();
        if eps == 0.0 {
            eps = e;
        } else if e != eps {
            return Err(Error::SingularOffset { a, margin: 0.0 });
        }
    }
    Ok(if eps == 0.0 { 1.0 } else { eps })
}

/// Curvatures of the parallel surface: `ν̄i = ε νi/(1 - a νi)`.
pub fn parallel_invariants(nu1: &Field, nu2: &Field, a: f64) -> Result<(Field, Field, f64)> {
    check_a(a)?;
    if nu1.dim() != nu2.dim() {
        return Err(Error::Shape("ν1 and ν2 differ in shape".into()));
    }
    let eps = certify_epsilon(a, nu1.iter().copied().zip(nu2.iter().copied()))?;
    let map = |x: f64| eps * x / (1.0 - a * x);
    Ok((nu1.mapv(map), nu2.mapv(map), eps))
}

/// Inverse of [`parallel_invariants`]: `ν = ε ν̄/(1 + a ε ν̄)`.
pub fn parallel_invariants_inverse(nu1_bar: &Field, nu2_bar: &Field, a: f64, eps: f64) -> (Field, Field) {
    let map = |x: f64| eps * x / (1.0 + a * eps * x);
    (nu1_bar.mapv(map), nu2_bar.mapv(map))
}

/// `(H, H', K')` of the original surface from `(H̄, H̄', K̄')` of the parallel one.
pub fn invariants_from_parallel(h_bar: f64, hp_bar: f64, k_bar: f64, a: f64, eps: f64) -> (f64, f64, f64) {
    let d = 1.0 + 2.0 * a * eps * h_bar + a * a * k_bar;
    ((eps * h_bar + a * k_bar) / d, eps * hp_bar / d, k_bar / d)
}

/// Weingarten functions of the parallel surface, `f̄ = εf/(1 - af)` and
/// `ḡ = εg/(1 - ag)`, on the pair's own interval.
pub fn parallel_weingarten(pair: &WeingartenPair, a: f64) -> Result<(WeingartenPair, f64)> {
    parallel_weingarten_on(pair, a, pair.lo, pair.hi)
}

/// As [`parallel_weingarten`], restricted to the subinterval `(lo, hi)`.
pub fn parallel_weingarten_on(pair: &WeingartenPair, a: f64, lo: f64, hi: f64) -> Result<(WeingartenPair, f64)> {
    check_a(a)?;
    let (lo, hi) = (lo.max(pair.lo), hi.min(pair.hi));
    if !(lo < hi) {
        return Err(Error::Domain(format!("empty interval ({lo}, {hi})")));
    }
    let pts = interior_samples(lo, hi, 512)
        .into_iter()
        .map(|x| (pair.f(x), pair.g(x)))
        .filter(|(f, g)| f.is_finite() && g.is_finite());
    let eps = certify_epsilon(a, pts)?;
    let bar = |e: &Expr| Expr::c(eps) * e.clone() / (Expr::c(1.0) - Expr::c(a) * e.clone());
    let out = WeingartenPair::new(bar(&pair.f), bar(&pair.g), lo, hi)?;
    if out.swapped {
        return Err(Error::Domain("parallel pair reversed the order of the curvatures".into()));
    }
    Ok((out, eps))
}

/// Coefficients of the relation satisfied by the parallel surface:
/// `ε(α + 2aγ)H̄ + εβH̄' + γ = (δ - aα - a²γ)K̄'`.
pub fn parallel_relation(rel: &LinearRelation, a: f64, eps: f64) -> Result<LinearRelation> {
    if !(rel.discriminant() != 0.0) {
        return Err(Error::DegenerateRelation(rel.discriminant()));
    }
    if eps != 1.0 && eps != -1.0 {
        return Err(Error::Param(format!("ε must be ±1, got {eps}")));
    }
    let (al, be, ga, de) = (rel.alpha, rel.beta, rel.gamma, rel.delta);
    Ok(LinearRelation::new(eps * (al + 2.0 * a * ga), eps * be, ga, de - a * al - a * a * ga))
}

/// Offsets a sampled surface along its normal, `z̄ = z + a l`, with
/// principal curvatures read off the mesh.
pub fn parallel_surface(surface: &SurfaceGrid, a: f64) -> Result<SurfaceGrid> {
    let fm = forms_from_mesh(surface);
    let nu1 = &fm.l / &fm.e;
    let nu2 = &fm.n / &fm.g;
    parallel_surface_with(surface, &nu1, &nu2, a)
}

/// As [`parallel_surface`] with the principal curvatures supplied. Tangent
/// directions keep the sign of `1 - aνi` and the normal becomes `εl`, so the
/// frame stays positively oriented.
pub fn parallel_surface_with(surface: &SurfaceGrid, nu1: &Field, nu2: &Field, a: f64) -> Result<SurfaceGrid> {
    surface.grid.check_field(nu1, "nu1")?;
    surface.grid.check_field(nu2, "nu2")?;
    check_a(a)?;
    let eps = certify_epsilon(a, nu1.iter().copied().zip(nu2.iter().copied()))?;
    let frames = ndarray::Array2::from_shape_fn(surface.frames.dim(), |ix| {
        let f = surface.frames[ix];
        let s1 = (1.0 - a * nu1[ix]).signum();
        let s2 = (1.0 - a * nu2[ix]).signum();
        Frame { z: f.z + a * f.l, x: s1 * f.x, y: s2 * f.y, l: eps * f.l }.renormalized()
    });
    Ok(SurfaceGrid { grid: surface.grid, frames, chart: None })
}

/// Diagnostics for the parallel member of a natural chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParallelReport {
    pub a: f64,
    pub epsilon: f64,
    pub a_bar: f64,
    pub b_bar: f64,
    /// Max deviation of `√(ĒḠ)(ν̄1 - ν̄2)` from its mean.
    pub constancy_residual: f64,
    /// The same, relative to the mean.
    pub constancy_relative: f64,
    /// Max pointwise difference `|N̄ - N|` of the natural-PDE residuals.
    pub residual_difference: f64,
    /// Max of `|(1 - af)(1 - ag) N̄ - N|`. The residuals are related by this
    /// factor identically in ν, so they vanish together but are not equal
    /// off the solution set.
    pub scaled_difference: f64,
    /// Max of the original natural-PDE residual, for scale.
    pub residual_max: f64,
}

/// Builds the parallel pair and chart for offset `a` and compares it with the
/// original: natural-parameter constancy and equality of the natural PDE.
pub fn check_parallel_natural(chart: &NaturalChart, pair: &WeingartenPair, nu: &Field, a: f64) -> Result<ParallelReport> {
    check_a(a)?;
    let (mut lo, mut hi) = (chart.nu0, chart.nu0);
    for &x in nu.iter() {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    let pad = 0.01 * (hi - lo).max(1e-3);
    let (bar_pair, eps) = parallel_weingarten_on(pair, a, lo - pad, hi + pad)?;
    let (f0, g0) = (pair.f(chart.nu0), pair.g(chart.nu0));
    let a_bar = chart.a / (1.0 - a * f0).abs();
    let b_bar = chart.b / (1.0 - a * g0).abs();
    let bar_chart = NaturalChart::new(a_bar, b_bar, chart.nu0, chart.grid)?;
    let inv = invariants_from_nu(&bar_chart, &bar_pair, nu)?;
    let constancy = check_natural_parameters(&inv);
    let mean = {
        let w: Vec<f64> = inv
            .e
            .iter()
            .zip(inv.g.iter())
            .zip(inv.nu1.iter().zip(inv.nu2.iter()))
            .map(|((e, g), (n1, n2))| (e * g).sqrt() * (n1 - n2))
            .collect();
        w.iter().sum::<f64>() / w.len() as f64
    };
    let r0 = natural_pde_residual(chart, pair, nu)?;
    let r1 = natural_pde_residual(&bar_chart, &bar_pair, nu)?;
    let scaled = Field::from_shape_fn(nu.dim(), |ix| {
        let x = nu[ix];
        (1.0 - a * pair.f(x)) * (1.0 - a * pair.g(x)) * r1[ix] - r0[ix]
    });
    Ok(ParallelReport {
        a,
        epsilon: eps,
        a_bar,
        b_bar,
        constancy_residual: constancy,
        constancy_relative: constancy / mean.abs(),
        residual_difference: crate::grid::max_abs(&(&r1 - &r0)),
        scaled_difference: crate::grid::max_abs(&scaled),
        residual_max: crate::grid::max_abs(&r0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn invariant_examples() {
        let (n1, n2, e) = parallel_invariants(&arr2(&[[1.0]]), &arr2(&[[-1.0]]), 2.0).unwrap();
        assert_eq!(e, -1.0);
        assert_eq!(n1[[0, 0]], 1.0);
        assert!((n2[[0, 0]] - 1.0 / 3.0).abs() < 1e-16);
        let (n1, n2, e) = parallel_invariants(&arr2(&[[-1.0]]), &arr2(&[[0.0]]), 1.0).unwrap();
        assert_eq!((n1[[0, 0]], n2[[0, 0]], e), (-0.5, 0.0, 1.0));
        assert!(matches!(
            parallel_invariants(&arr2(&[[-1.0]]), &arr2(&[[0.0]]), -1.0),
            Err(Error::SingularOffset { .. })
        ));
        assert!(matches!(parallel_invariants(&arr2(&[[-1.0]]), &arr2(&[[0.0]]), 0.0), Err(Error::Param(_))));
    }

    #[test]
    fn straddling_grid_is_rejected() {
        let n1 = arr2(&[[0.5, 2.0]]);
        let n2 = arr2(&[[0.0, 0.0]]);
        assert!(matches!(parallel_invariants(&n1, &n2, 1.0), Err(Error::SingularOffset { .. })));
    }

    #[test]
    fn weingarten_example() {
        let wide = WeingartenPair::parse("nu + 1", "nu - 1", -0.9, 0.9).unwrap();
        assert!(matches!(parallel_weingarten(&wide, 1.0), Err(Error::SingularOffset { .. })));
        let pair = WeingartenPair::parse("nu + 1", "nu - 1", 0.1, 0.9).unwrap();
        let (bar, eps) = parallel_weingarten(&pair, 1.0).unwrap();
        assert_eq!(eps, -1.0);
        for x in [0.15, 0.5, 0.8] {
            assert!((bar.f(x) - (x + 1.0) / x).abs() < 1e-12);
            assert!((bar.g(x) - (-(x - 1.0) / (2.0 - x))).abs() < 1e-12);
            let m = (1.0 - (x + 1.0)) * (1.0 - (x - 1.0));
            assert!((bar.f(x) - bar.g(x) - 2.0 * eps / m).abs() < 1e-12);
        }
    }

    #[test]
    fn weingarten_eps_plus() {
        // on ν < -1, 1-f = -ν and 1-g = 2-ν are both positive
        let pair = WeingartenPair::parse("nu + 1", "nu - 1", -5.0, -1.5).unwrap();
        let (bar, eps) = parallel_weingarten(&pair, 1.0).unwrap();
        assert_eq!(eps, 1.0);
        assert!((bar.f(-2.0) - (-1.0 / 2.0)).abs() < 1e-15);
        assert!((bar.g(-2.0) - (-3.0 / 4.0)).abs() < 1e-15);
    }

    #[test]
    fn relation_examples() {
        let r = parallel_relation(&LinearRelation::new(1.0, 0.0, 0.0, 0.0), 0.3, 1.0).unwrap();
        assert_eq!((r.alpha, r.beta, r.gamma, r.delta), (1.0, 0.0, 0.0, -0.3));
        let r = parallel_relation(&LinearRelation::new(0.0, 0.0, -2.0, 1.0), 0.5, 1.0).unwrap();
        assert_eq!((r.alpha, r.beta, r.gamma, r.delta), (-2.0, 0.0, -2.0, 1.5));
        assert!(matches!(
            parallel_relation(&LinearRelation::new(1.0, 1.0, 0.0, 0.0), 0.5, 1.0),
            Err(Error::DegenerateRelation(_))
        ));
    }

    #[test]
    fn relation_is_satisfied_by_parallel_curvatures() {
        let rel = LinearRelation::new(0.7, -0.4, 1.3, 0.9);
        let a = 0.2;
        // a point (ν1, ν2) on the relation: solve for ν1 given ν2
        let nu2 = -0.6;
        // δν1ν2 - α(ν1+ν2)/2 - β(ν1-ν2)/2 - γ = 0 is linear in ν1
        let c1 = rel.delta * nu2 - 0.5 * rel.alpha - 0.5 * rel.beta;
        let c0 = -0.5 * rel.alpha * nu2 + 0.5 * rel.beta * nu2 - rel.gamma;
        let nu1 = -c0 / c1;
        assert!(rel.eval(nu1, nu2).abs() < 1e-14);
        let (b1, b2, eps) = parallel_invariants(&arr2(&[[nu1]]), &arr2(&[[nu2]]), a).unwrap();
        let bar = parallel_relation(&rel, a, eps).unwrap();
        assert!(bar.eval(b1[[0, 0]], b2[[0, 0]]).abs() < 1e-13);
        assert!((bar.discriminant() - rel.discriminant()).abs() < 1e-13);
    }
}
