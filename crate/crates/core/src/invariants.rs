//! Invariant fields of a surface in principal parameters and the formulas
//! relating them to the fundamental forms.

use crate::error::{Error, Result};
use crate::grid::{d1, Axis, Field, Grid2};
use crate::weingarten::{compute_ij, WeingartenPair};
use serde::{Deserialize, Serialize};

/// Default gate on `max |F|`, `max |M|` when reading principal parameters
/// off sampled forms.
pub const DEFAULT_PRINCIPAL_TOL: f64 = 1e-3;

/// Sampled principal curvatures, principal geodesic curvatures and metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantGrid {
    pub grid: Grid2,
    /// The Weingarten parameter, when the grid was built from one.
    pub nu: Option<Field>,
    pub nu1: Field,
    pub nu2: Field,
    pub gamma1: Field,
    pub gamma2: Field,
    pub e: Field,
    pub g: Field,
}

impl InvariantGrid {
    pub fn new(grid: Grid2, nu1: Field, nu2: Field, gamma1: Field, gamma2: Field, e: Field, g: Field) -> Result<Self> {
        for (f, name) in [(&nu1, "nu1"), (&nu2, "nu2"), (&gamma1, "gamma1"), (&gamma2, "gamma2"), (&e, "E"), (&g, "G")] {
            grid.check_field(f, name)?;
        }
        Ok(InvariantGrid { grid, nu: None, nu1, nu2, gamma1, gamma2, e, g })
    }

    /// Grid with every field constant.
    pub fn constant(grid: Grid2, nu1: f64, nu2: f64, gamma1: f64, gamma2: f64, e: f64, g: f64) -> Self {
        let c = |x: f64| Field::from_elem((grid.nu, grid.nv), x);
        InvariantGrid { grid, nu: None, nu1: c(nu1), nu2: c(nu2), gamma1: c(gamma1), gamma2: c(gamma2), e: c(e), g: c(g) }
    }

    pub fn h_u(&self) -> f64 {
        self.grid.hu()
    }

    pub fn h_v(&self) -> f64 {
        self.grid.hv()
    }

    /// Mean curvature `(ν1 + ν2)/2`.
    pub fn h(&self) -> Field {
        (&self.nu1 + &self.nu2) * 0.5
    }

    /// `(ν1 - ν2)/2`.
    pub fn h_prime(&self) -> Field {
        (&self.nu1 - &self.nu2) * 0.5
    }

    /// Extrinsic Gauss curvature `ν1 ν2`.
    pub fn k_prime(&self) -> Field {
        &self.nu1 * &self.nu2
    }

    /// Intrinsic Gauss curvature, `-K'`.
    pub fn k(&self) -> Field {
        -self.k_prime()
    }

    /// Checks `E, G > 0` and `ν1 > ν2` at every node.
    pub fn check_conventions(&self) -> Result<()> {
        for ((i, j), &e) in self.e.indexed_iter() {
            let g = self.g[[i, j]];
            if !(e > 0.0 && g > 0.0) {
                return Err(Error::Domain(format!("metric not positive at node ({i}, {j})")));
            }
            if !(self.nu1[[i, j]] > self.nu2[[i, j]]) {
                return Err(Error::Domain(format!("ν1 > ν2 violated at node ({i}, {j})")));
            }
        }
        Ok(())
    }
}

/// Coefficients of the first and second fundamental forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormFields {
    pub e: Field,
    pub f: Field,
    pub g: Field,
    pub l: Field,
    pub m: Field,
    pub n: Field,
}

/// `λ = √E e^I` and `μ = √G e^J`; constant on natural charts.
pub fn lemma_functions(grid: &InvariantGrid, pair: &WeingartenPair, nu0: f64) -> Result<(Field, Field)> {
    let nu = grid
        .nu
        .as_ref()
        .ok_or_else(|| Error::Param("invariant grid carries no ν field".into()))?;
    let samples: Vec<f64> = nu.iter().copied().collect();
    let q = compute_ij(pair, nu0, &samples)?;
    let dim = nu.dim();
    let lam = Field::from_shape_fn(dim, |(i, j)| grid.e[[i, j]].sqrt() * q.i[i * dim.1 + j].exp());
    let mu = Field::from_shape_fn(dim, |(i, j)| grid.g[[i, j]].sqrt() * q.j[i * dim.1 + j].exp());
    Ok((lam, mu))
}

/// Max deviation of `√(EG)(ν1 - ν2)` from its grid mean.
pub fn check_natural_parameters(grid: &InvariantGrid) -> f64 {
    let w: Vec<f64> = grid
        .e
        .iter()
        .zip(grid.g.iter())
        .zip(grid.nu1.iter().zip(grid.nu2.iter()))
        .map(|((e, g), (n1, n2))| (e * g).sqrt() * (n1 - n2))
        .collect();
    if w.is_empty() {
        return 0.0;
    }
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    w.iter().fold(0.0, |m, x| m.max((x - mean).abs()))
}

/// Reads principal curvatures and geodesic curvatures off the fundamental
/// forms. Fails if the parameters are not principal within `tol`.
pub fn invariants_from_forms(forms: &FormFields, grid: Grid2, tol: f64) -> Result<InvariantGrid> {
    for (f, name) in [(&forms.e, "E"), (&forms.f, "F"), (&forms.g, "G"), (&forms.l, "L"), (&forms.m, "M"), (&forms.n, "N")] {
        grid.check_field(f, name)?;
    }
    let max_f = crate::grid::max_abs(&forms.f);
    let max_m = crate::grid::max_abs(&forms.m);
    if max_f > tol || max_m > tol {
        return Err(Error::NotPrincipal { max_f, max_m });
    }
    let nu1 = &forms.l / &forms.e;
    let nu2 = &forms.n / &forms.g;
    let e_v = d1(&forms.e, Axis::V, grid.hv());
    let g_u = d1(&forms.g, Axis::U, grid.hu());
    let gamma1 = Field::from_shape_fn(grid.shape(), |(i, j)| {
        let (e, g) = (forms.e[[i, j]], forms.g[[i, j]]);
        -e_v[[i, j]] / (2.0 * e * g.sqrt())
    });
    let gamma2 = Field::from_shape_fn(grid.shape(), |(i, j)| {
        let (e, g) = (forms.e[[i, j]], forms.g[[i, j]]);
        g_u[[i, j]] / (2.0 * g * e.sqrt())
    });
    InvariantGrid::new(grid, nu1, nu2, gamma1, gamma2, forms.e.clone(), forms.g.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forms(grid: &Grid2, e: impl Fn(f64, f64) -> f64, g: impl Fn(f64, f64) -> f64, l: f64, n: f64) -> FormFields {
        FormFields {
            e: grid.sample(&e),
            f: grid.zeros(),
            g: grid.sample(&g),
            l: grid.sample(|u, v| l * e(u, v)),
            m: grid.zeros(),
            n: grid.sample(|u, v| n * g(u, v)),
        }
    }

    #[test]
    fn cylinder_forms() {
        let grid = Grid2::square(0.0, 1.0, 9).unwrap();
        let fm = FormFields { l: grid.sample(|_, _| -1.0), ..forms(&grid, |_, _| 1.0, |_, _| 1.0, 0.0, 0.0) };
        let inv = invariants_from_forms(&fm, grid, DEFAULT_PRINCIPAL_TOL).unwrap();
        assert!(inv.nu1.iter().all(|&x| x == -1.0));
        assert!(inv.nu2.iter().all(|&x| x == 0.0));
        assert!(inv.gamma1.iter().chain(inv.gamma2.iter()).all(|&x| x == 0.0));
        assert!(inv.k().iter().zip(inv.k_prime().iter()).all(|(a, b)| *a == -*b));
    }

    #[test]
    fn exponential_metric_gives_unit_geodesic_curvature() {
        let grid = Grid2::square(0.0, 1.0, 65).unwrap();
        let fm = forms(&grid, |_, v| (2.0 * v).exp(), |_, _| 1.0, 0.0, 0.0);
        let inv = invariants_from_forms(&fm, grid, DEFAULT_PRINCIPAL_TOL).unwrap();
        // second-order differences of e^{2v}: error ~ h^2
        assert!(inv.gamma1.iter().all(|&x| (x + 1.0).abs() < 2e-3));
    }

    #[test]
    fn rejects_non_principal() {
        let grid = Grid2::square(0.0, 1.0, 5).unwrap();
        let mut fm = forms(&grid, |_, _| 1.0, |_, _| 1.0, 1.0, 0.0);
        fm.f.fill(0.1);
        assert!(matches!(invariants_from_forms(&fm, grid, DEFAULT_PRINCIPAL_TOL), Err(Error::NotPrincipal { .. })));
    }

    #[test]
    fn reassembly_round_trip() {
        let grid = Grid2::square(0.0, 1.0, 9).unwrap();
        let fm = forms(&grid, |u, v| 1.0 + u * v, |u, _| 2.0 + u, 0.3, -0.7);
        let fm = FormFields { l: grid.sample(|u, v| (u - v) * (1.0 + u * v)), ..fm };
        let inv = invariants_from_forms(&fm, grid, DEFAULT_PRINCIPAL_TOL).unwrap();
        assert_eq!(&inv.nu1 * &inv.e, fm.l.mapv(|x| x));
        let back = &inv.nu2 * &inv.g;
        assert!(back.iter().zip(fm.n.iter()).all(|(a, b)| (a - b).abs() <= 1e-15 * b.abs()));
    }

    #[test]
    fn natural_residual_detects_perturbation() {
        let grid = Grid2::square(0.0, 1.0, 5).unwrap();
        let mut inv = InvariantGrid::constant(grid, 1.0, -1.0, 0.0, 0.0, 1.0, 1.0);
        assert_eq!(check_natural_parameters(&inv), 0.0);
        inv.e[[2, 2]] = 2.0;
        let c = 2.0;
        let jump = (2f64.sqrt() - 1.0) * c;
        let n = 25.0;
        // mean shifts by jump/n; the perturbed node deviates by jump(1 - 1/n)
        assert!((check_natural_parameters(&inv) - jump * (1.0 - 1.0 / n)).abs() < 1e-14);
        let single = InvariantGrid::constant(Grid2::square(0.0, 0.0, 1).unwrap(), 1.0, -1.0, 0.0, 0.0, 1.0, 1.0);
        assert_eq!(check_natural_parameters(&single), 0.0);
    }
}
