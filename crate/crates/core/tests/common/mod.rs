//! Closed-form fixtures shared by the integration tests.
#![allow(dead_code)]

use wsurf::chart::invariants_from_nu;
use wsurf::grid::{Field, Grid2};
use wsurf::pde::{basic_class, BasicClass};
use wsurf::{InvariantGrid, NaturalChart};

/// Cylinder data: ν1 = -1, ν2 = 0, γ = 0, E = G = 1.
pub fn cylinder(grid: Grid2) -> InvariantGrid {
    InvariantGrid::constant(grid, -1.0, 0.0, 0.0, 0.0, 1.0, 1.0)
}

/// `(sinh u, v, cosh u)`.
pub fn cylinder_z(u: f64, v: f64) -> [f64; 3] {
    [u.sinh(), v, u.cosh()]
}

/// A space-like surface of revolution: `E = 1`, `G = cosh²u`, `γ1 = 0`,
/// `γ2 = tanh u`, `ν2 = √(1 - C sech²u)`, `ν1 = 1/ν2`.
pub fn revolution(grid: Grid2, c: f64) -> InvariantGrid {
    let nu2 = grid.sample(|u, _| (1.0 - c / u.cosh().powi(2)).sqrt());
    let nu1 = nu2.mapv(|x| 1.0 / x);
    InvariantGrid::new(
        grid,
        nu1,
        nu2,
        grid.zeros(),
        grid.sample(|u, _| u.tanh()),
        grid.sample(|_, _| 1.0),
        grid.sample(|u, _| u.cosh().powi(2)),
    )
    .unwrap()
}

/// Exact solution of `Δλ = e^λ`: `ln(8a²/(1 - a²r²)²)` with `a = 1/2`.
pub fn liouville(u: f64, v: f64) -> f64 {
    let a2 = 0.25;
    (8.0 * a2 / (1.0 - a2 * (u * u + v * v)).powi(2)).ln()
}

/// Class-1 natural data on `[0.2, 1]²` built from the exact Liouville solution.
pub fn class1(n: usize) -> (BasicClass, NaturalChart, Field, InvariantGrid) {
    let c = basic_class(1, None, None).unwrap();
    let grid = Grid2::square(0.2, 1.0, n).unwrap();
    let lam = grid.sample(liouville);
    let nu = c.nu_field(&lam);
    let chart = c.chart(grid).unwrap();
    let inv = invariants_from_nu(&chart, &c.pair, &nu).unwrap();
    (c, chart, nu, inv)
}
