//! Natural principal charts: metric and invariants determined by a single
//! field ν and the constants 𝔞, 𝔟, ν₀.

use crate::error::{Error, Result};
use crate::grid::{d1_4, Axis, Field, Grid2};
use crate::invariants::InvariantGrid;
use crate::weingarten::{compute_ij, QuadratureResult, WeingartenPair};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalChart {
    pub a: f64,
    pub b: f64,
    pub nu0: f64,
    pub grid: Grid2,
}

impl NaturalChart {
    pub fn new(a: f64, b: f64, nu0: f64, grid: Grid2) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Param(format!("chart constants must be positive, got a={a}, b={b}")));
        }
        if !nu0.is_finite() {
            return Err(Error::Param("ν0 must be finite".into()));
        }
        if grid.nu < 3 || grid.nv < 3 {
            return Err(Error::Shape("natural chart needs at least 3 nodes per axis".into()));
        }
        Ok(NaturalChart { a, b, nu0, grid })
    }

    /// The same chart over a different grid.
    pub fn with_grid(&self, grid: Grid2) -> Result<Self> {
        NaturalChart::new(self.a, self.b, self.nu0, grid)
    }
}

/// `I`, `J` evaluated over a field, in the field's shape.
pub fn ij_fields(chart: &NaturalChart, pair: &WeingartenPair, nu: &Field) -> Result<(Field, Field, QuadratureResult)> {
    chart.grid.check_field(nu, "ν field")?;
    let samples: Vec<f64> = nu.iter().copied().collect();
    let q = compute_ij(pair, chart.nu0, &samples)?;
    let dim = nu.dim();
    let i = Field::from_shape_vec(dim, q.i.clone()).map_err(|e| Error::Shape(e.to_string()))?;
    let j = Field::from_shape_vec(dim, q.j.clone()).map_err(|e| Error::Shape(e.to_string()))?;
    Ok((i, j, q))
}

/// `E = 𝔞⁻² e^{-2I(ν)}`, `G = 𝔟⁻² e^{-2J(ν)}`.
pub fn metric_from_chart(chart: &NaturalChart, pair: &WeingartenPair, nu: &Field) -> Result<(Field, Field)> {
    let (i, j, _) = ij_fields(chart, pair, nu)?;
    let a2 = chart.a * chart.a;
    let b2 = chart.b * chart.b;
    Ok((i.mapv(|x| (-2.0 * x).exp() / a2), j.mapv(|x| (-2.0 * x).exp() / b2)))
}

/// Builds the full invariant grid: `ν1 = f(ν)`, `ν2 = g(ν)`,
/// `γ1 = 𝔟 e^J I_v`, `γ2 = -𝔞 e^I J_u`, and the chart metric.
///
/// `I_v = I'(ν) ν_v` and `J_u = J'(ν) ν_u`, with ν differentiated on the grid
/// at fourth order, so that the boundary stencils do not leave an error
/// pattern that later differentiation of a reconstructed mesh would amplify.
pub fn invariants_from_nu(chart: &NaturalChart, pair: &WeingartenPair, nu: &Field) -> Result<InvariantGrid> {
    let (i, j, _) = ij_fields(chart, pair, nu)?;
    let grid = chart.grid;
    let nu_u = d1_4(nu, Axis::U, grid.hu());
    let nu_v = d1_4(nu, Axis::V, grid.hv());
    let dim = nu.dim();
    let mut nu1 = Field::zeros(dim);
    let mut nu2 = Field::zeros(dim);
    let mut gamma1 = Field::zeros(dim);
    let mut gamma2 = Field::zeros(dim);
    for ((p, q), &x) in nu.indexed_iter() {
        let (jf, jg) = (pair.f.jet(x), pair.g.jet(x));
        let d = jf.v - jg.v;
        nu1[[p, q]] = jf.v;
        nu2[[p, q]] = jg.v;
        let i_prime = jf.d1 / d;
        let j_prime = -jg.d1 / d;
        gamma1[[p, q]] = chart.b * j[[p, q]].exp() * i_prime * nu_v[[p, q]];
        gamma2[[p, q]] = -chart.a * i[[p, q]].exp() * j_prime * nu_u[[p, q]];
    }
    let a2 = chart.a * chart.a;
    let b2 = chart.b * chart.b;
    let e = i.mapv(|x| (-2.0 * x).exp() / a2);
    let g = j.mapv(|x| (-2.0 * x).exp() / b2);
    let mut inv = InvariantGrid::new(grid, nu1, nu2, gamma1, gamma2, e, g)?;
    inv.nu = Some(nu.clone());
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{check_natural_parameters, lemma_functions};

    fn linear_pair() -> WeingartenPair {
        WeingartenPair::parse("nu + 1", "nu - 1", f64::NEG_INFINITY, f64::INFINITY).unwrap()
    }

    #[test]
    fn metric_examples() {
        let grid = Grid2::square(0.0, 1.0, 3).unwrap();
        let chart = NaturalChart::new(1.0, 1.0, 0.0, grid).unwrap();
        let nu = grid.sample(|_, _| 2.0);
        let (e, g) = metric_from_chart(&chart, &linear_pair(), &nu).unwrap();
        assert!((e[[1, 1]] - (-2f64).exp()).abs() < 1e-13);
        assert!((g[[1, 1]] - 2f64.exp()).abs() < 1e-12);
        let chart2 = NaturalChart::new(2.0, 1.0, 0.0, grid).unwrap();
        let (e, g) = metric_from_chart(&chart2, &linear_pair(), &grid.zeros()).unwrap();
        assert!(e.iter().all(|&x| x == 0.25) && g.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn geodesic_curvatures_for_linear_field() {
        let grid = Grid2::square(-1.0, 1.0, 9).unwrap();
        let chart = NaturalChart::new(1.0, 1.0, 0.0, grid).unwrap();
        let nu = grid.sample(|u, _| u);
        let inv = invariants_from_nu(&chart, &linear_pair(), &nu).unwrap();
        for ((i, j), &g2) in inv.gamma2.indexed_iter() {
            let u = grid.u(i);
            assert!((g2 - (u / 2.0).exp() / 2.0).abs() < 1e-12);
            assert_eq!(inv.gamma1[[i, j]], 0.0);
        }
        assert!(check_natural_parameters(&inv) < 1e-12);
        let (lam, mu) = lemma_functions(&inv, &linear_pair(), 0.0).unwrap();
        assert!(lam.iter().chain(mu.iter()).all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn lemma_functions_give_inverse_chart_constants() {
        let pair = WeingartenPair::parse("nu", "-nu", 0.0, f64::INFINITY).unwrap();
        let grid = Grid2::square(0.0, 1.0, 17).unwrap();
        let chart = NaturalChart::new(2.0, 1.0, 1.0, grid).unwrap();
        let nu = grid.sample(|u, v| 1.0 + u * u + 0.5 * v);
        let inv = invariants_from_nu(&chart, &pair, &nu).unwrap();
        let (lam, mu) = lemma_functions(&inv, &pair, 1.0).unwrap();
        let spread = |f: &Field| f.iter().cloned().fold(f64::MIN, f64::max) - f.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread(&lam) < 1e-10 && spread(&mu) < 1e-10);
        assert!((lam[[0, 0]] - 0.5).abs() < 1e-10);
        assert!((mu[[0, 0]] - 1.0).abs() < 1e-10);
        let rel = check_natural_parameters(&inv) / 2.0;
        assert!(rel < 1e-10, "{rel}");
    }

    #[test]
    fn rejects_bad_charts() {
        let grid = Grid2::square(0.0, 1.0, 3).unwrap();
        assert!(NaturalChart::new(0.0, 1.0, 0.0, grid).is_err());
        assert!(NaturalChart::new(1.0, -1.0, 0.0, grid).is_err());
        assert!(NaturalChart::new(1.0, 1.0, 0.0, Grid2::square(0.0, 1.0, 2).unwrap()).is_err());
    }
}
