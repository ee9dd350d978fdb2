mod common;

use common::*;
use proptest::prelude::*;
use wsurf::grid::{Field, Grid2};
use wsurf::parallel::*;

#[test]
fn natural_pde_is_preserved_by_offsets() {
    let (c, chart, nu, _) = class1(65);
    for a in [0.05, 0.1, -0.05] {
        let r = check_parallel_natural(&chart, &c.pair, &nu, a).unwrap();
        assert_eq!(r.epsilon, 1.0);
        assert!(r.scaled_difference < 1e-8, "a={a}: {r:?}");
        assert!(r.constancy_relative < 1e-10, "a={a}: {r:?}");
    }
}

#[test]
fn natural_pde_is_preserved_for_a_perturbed_field() {
    // (1 - af)(1 - ag) N̄ = N holds identically in ν, so it holds for fields
    // that do not solve the PDE; the unscaled residuals differ there
    let (c, chart, nu, _) = class1(33);
    let nu = &nu * &chart.grid.sample(|u, v| 1.0 + 0.1 * (3.0 * u).sin() * v);
    let r = check_parallel_natural(&chart, &c.pair, &nu, 0.1).unwrap();
    assert!(r.residual_max > 1e-2);
    assert!(r.scaled_difference < 1e-8, "{r:?}");
    assert!(r.residual_difference > 1e-2, "{r:?}");
}

fn fields(nu1: f64, nu2: f64) -> (Field, Field) {
    let g = Grid2::square(0.0, 1.0, 4).unwrap();
    (g.sample(|u, v| nu1 + 0.1 * u - 0.05 * v), g.sample(|u, v| nu2 - 0.1 * v * u))
}

proptest! {
    #[test]
    fn invariant_round_trip(nu1 in -3.0..3.0f64, gap in 0.1..3.0f64, a in 0.02..0.2f64) {
        let (n1, n2) = fields(nu1, nu1 - gap);
        let (b1, b2, eps) = parallel_invariants(&n1, &n2, a).unwrap();
        let (r1, r2) = parallel_invariants_inverse(&b1, &b2, a, eps);
        for (x, y) in n1.iter().zip(r1.iter()).chain(n2.iter().zip(r2.iter())) {
            prop_assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()));
        }
        // mean, half-difference and extrinsic curvature of the original
        for ix in [(0, 0), (2, 3)] {
            let (hb, hpb, kb) = ((b1[ix] + b2[ix]) / 2.0, (b1[ix] - b2[ix]) / 2.0, b1[ix] * b2[ix]);
            let (h, hp, k) = invariants_from_parallel(hb, hpb, kb, a, eps);
            prop_assert!((h - (n1[ix] + n2[ix]) / 2.0).abs() < 1e-12);
            prop_assert!((hp - (n1[ix] - n2[ix]) / 2.0).abs() < 1e-12);
            prop_assert!((k - n1[ix] * n2[ix]).abs() < 1e-12);
        }
    }

    #[test]
    fn offsets_compose(nu1 in -2.0..2.0f64, gap in 0.1..2.0f64, a in -0.1..0.1f64, b in -0.1..0.1f64) {
        prop_assume!(a.abs() > 1e-3 && b.abs() > 1e-3 && (a + b).abs() > 1e-3);
        let (n1, n2) = fields(nu1, nu1 - gap);
        let (a1, a2, ea) = parallel_invariants(&n1, &n2, a).unwrap();
        prop_assert_eq!(ea, 1.0);
        let (c1, c2, eb) = parallel_invariants(&a1, &a2, b).unwrap();
        let (d1, d2, ec) = parallel_invariants(&n1, &n2, a + b).unwrap();
        prop_assert_eq!(eb, ec);
        for (x, y) in c1.iter().zip(d1.iter()).chain(c2.iter().zip(d2.iter())) {
            prop_assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()));
        }
    }
}

#[test]
fn residual_difference_decays_on_exact_data() {
    let d = |n| {
        let (c, chart, nu, _) = class1(n);
        check_parallel_natural(&chart, &c.pair, &nu, 0.1).unwrap().residual_difference
    };
    let (a, b, c) = (d(33), d(65), d(129));
    // still pre-asymptotic near the corner (1, 1), where λ is steepest
    assert!(a / b > 2.5 && b / c > 3.0 && b / c > a / b, "{a} {b} {c}");
}

#[test]
fn cylinder_offset_keeps_natural_constant() {
    let grid = Grid2::square(0.0, 1.0, 5).unwrap();
    let inv = cylinder(grid);
    let (b1, b2, eps) = parallel_invariants(&inv.nu1, &inv.nu2, 1.0).unwrap();
    assert_eq!(eps, 1.0);
    let e = inv.e.mapv(|x| x * 4.0);
    let g = inv.g.clone();
    let w: Vec<f64> = (0..5).map(|i| (e[[i, i]] * g[[i, i]]).sqrt() * (b1[[i, i]] - b2[[i, i]])).collect();
    assert!(w.iter().all(|&x| x == w[0]));
    assert!(b1.iter().all(|&x| x == -0.5) && b2.iter().all(|&x| x == 0.0));
}

#[test]
fn focal_offset_is_rejected() {
    let (c, chart, nu, _) = class1(17);
    // ν1 = e^λ ranges over [2, 8] on this chart, so a = 1/4 reaches 1 - aν1 = 0
    assert!(matches!(check_parallel_natural(&chart, &c.pair, &nu, 0.25), Err(wsurf::Error::SingularOffset { .. })));
}
