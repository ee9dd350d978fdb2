//! Uniform rectangular grids and finite-difference operators on them.

use crate::error::{Error, Result};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Scalar field sampled on a grid, indexed `[i, j]` with `i` along `u`.
pub type Field = Array2<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
    pub nu: usize,
    pub nv: usize,
}

impl Grid2 {
    pub fn new(u: (f64, f64), v: (f64, f64), nu: usize, nv: usize) -> Result<Self> {
        if nu == 0 || nv == 0 {
            return Err(Error::Shape("grid needs at least one node per axis".into()));
        }
        let ok = |a: f64, b: f64, n: usize| a.is_finite() && b.is_finite() && (b > a || (n == 1 && b >= a));
        if !ok(u.0, u.1, nu) || !ok(v.0, v.1, nv) {
            return Err(Error::Shape(format!("invalid grid range u={u:?} v={v:?}")));
        }
        Ok(Grid2 { u0: u.0, u1: u.1, v0: v.0, v1: v.1, nu, nv })
    }

    /// Square grid with `n` nodes per axis.
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Grid2::new((lo, hi), (lo, hi), n, n)
    }

    pub fn hu(&self) -> f64 {
        if self.nu > 1 { (self.u1 - self.u0) / (self.nu - 1) as f64 } else { 0.0 }
    }

    pub fn hv(&self) -> f64 {
        if self.nv > 1 { (self.v1 - self.v0) / (self.nv - 1) as f64 } else { 0.0 }
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u0 + i as f64 * self.hu()
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v0 + j as f64 * self.hv()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nu, self.nv)
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nu || j + 1 == self.nv
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Field {
        Array2::from_shape_fn((self.nu, self.nv), |(i, j)| f(self.u(i), self.v(j)))
    }

    pub fn zeros(&self) -> Field {
        Array2::zeros((self.nu, self.nv))
    }

    /// Grid with `2n - 1` nodes per axis covering the same rectangle.
    pub fn refined(&self) -> Grid2 {
        Grid2 { nu: 2 * self.nu - 1, nv: 2 * self.nv - 1, ..*self }
    }

    pub fn check_field(&self, f: &Field, what: &str) -> Result<()> {
        if f.dim() != (self.nu, self.nv) {
            return Err(Error::Shape(format!(
                "{what} has shape {:?}, grid is {}x{}",
                f.dim(),
                self.nu,
                self.nv
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    U,
    V,
}

fn lane_d1(x: &[f64], h: f64, out: &mut [f64]) {
    let n = x.len();
    match n {
        0 => {}
        1 => out[0] = 0.0,
        2 => {
            let d = (x[1] - x[0]) / h;
            out[0] = d;
            out[1] = d;
        }
        _ => {
            out[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h);
            for k in 1..n - 1 {
                out[k] = (x[k + 1] - x[k - 1]) / (2.0 * h);
            }
            out[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * h);
        }
    }
}

fn lane_d1_4(x: &[f64], h: f64, out: &mut [f64]) {
    let n = x.len();
    if n < 5 {
        return lane_d1(x, h, out);
    }
    let c = 12.0 * h;
    out[0] = (-25.0 * x[0] + 48.0 * x[1] - 36.0 * x[2] + 16.0 * x[3] - 3.0 * x[4]) / c;
    out[1] = (-3.0 * x[0] - 10.0 * x[1] + 18.0 * x[2] - 6.0 * x[3] + x[4]) / c;
    for k in 2..n - 2 {
        out[k] = (x[k - 2] - 8.0 * x[k - 1] + 8.0 * x[k + 1] - x[k + 2]) / c;
    }
    out[n - 2] = (3.0 * x[n - 1] + 10.0 * x[n - 2] - 18.0 * x[n - 3] + 6.0 * x[n - 4] - x[n - 5]) / c;
    out[n - 1] = (25.0 * x[n - 1] - 48.0 * x[n - 2] + 36.0 * x[n - 3] - 16.0 * x[n - 4] + 3.0 * x[n - 5]) / c;
}

fn lane_d2(x: &[f64], h: f64, out: &mut [f64]) {
    let n = x.len();
    let h2 = h * h;
    match n {
        0 => {}
        1 | 2 => out.iter_mut().for_each(|o| *o = 0.0),
        3 => {
            let d = (x[2] - 2.0 * x[1] + x[0]) / h2;
            out.iter_mut().for_each(|o| *o = d);
        }
        _ => {
            out[0] = (2.0 * x[0] - 5.0 * x[1] + 4.0 * x[2] - x[3]) / h2;
            for k in 1..n - 1 {
                out[k] = (x[k + 1] - 2.0 * x[k] + x[k - 1]) / h2;
            }
            out[n - 1] = (2.0 * x[n - 1] - 5.0 * x[n - 2] + 4.0 * x[n - 3] - x[n - 4]) / h2;
        }
    }
}

fn apply(f: &Field, axis: Axis, h: f64, op: fn(&[f64], f64, &mut [f64])) -> Field {
    let mut out = Array2::zeros(f.dim());
    let ax = match axis {
        Axis::U => ndarray::Axis(0),
        Axis::V => ndarray::Axis(1),
    };
    let mut buf_in = Vec::new();
    let mut buf_out = Vec::new();
    for (lane, mut dst) in f.lanes(ax).into_iter().zip(out.lanes_mut(ax)) {
        buf_in.clear();
        buf_in.extend(lane.iter().copied());
        buf_out.resize(buf_in.len(), 0.0);
        op(&buf_in, h, &mut buf_out);
        dst.iter_mut().zip(&buf_out).for_each(|(d, s)| *d = *s);
    }
    out
}

/// First derivative: centered in the interior, second-order one-sided at the ends.
pub fn d1(f: &Field, axis: Axis, h: f64) -> Field {
    apply(f, axis, h, lane_d1)
}

/// Fourth-order first derivative, one-sided five-point stencils near the ends.
/// Falls back to [`d1`] on lanes shorter than five nodes.
pub fn d1_4(f: &Field, axis: Axis, h: f64) -> Field {
    apply(f, axis, h, lane_d1_4)
}

/// Second derivative: centered in the interior, second-order one-sided at the ends.
pub fn d2(f: &Field, axis: Axis, h: f64) -> Field {
    apply(f, axis, h, lane_d2)
}

/// Mixed derivative `∂u∂v`.
pub fn d_uv(f: &Field, hu: f64, hv: f64) -> Field {
    d1(&d1(f, Axis::U, hu), Axis::V, hv)
}

pub fn max_abs(f: &Field) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Max of `|f|` over nodes at least `ring` steps from the boundary.
pub fn max_abs_interior(f: &Field, ring: usize) -> f64 {
    let (n, m) = f.dim();
    let mut best = 0.0f64;
    for i in ring..n.saturating_sub(ring) {
        for j in ring..m.saturating_sub(ring) {
            best = best.max(f[[i, j]].abs());
        }
    }
    best
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn fitted_order(hs: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_derivative_is_exact_on_quartics() {
        let g = Grid2::new((0.0, 1.0), (-1.0, 2.0), 7, 9).unwrap();
        let f = g.sample(|u, v| u.powi(4) - 2.0 * u * v.powi(3) + v);
        let du = d1_4(&f, Axis::U, g.hu());
        let dv = d1_4(&f, Axis::V, g.hv());
        for i in 0..7 {
            for j in 0..9 {
                let (u, v) = (g.u(i), g.v(j));
                assert!((du[[i, j]] - (4.0 * u.powi(3) - 2.0 * v.powi(3))).abs() < 1e-11);
                assert!((dv[[i, j]] - (-6.0 * u * v * v + 1.0)).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn derivatives_exact_on_quadratics() {
        let g = Grid2::new((0.0, 1.0), (-1.0, 2.0), 7, 9).unwrap();
        let f = g.sample(|u, v| 3.0 * u * u - u * v + 2.0 * v * v);
        let fu = d1(&f, Axis::U, g.hu());
        let fvv = d2(&f, Axis::V, g.hv());
        let fuv = d_uv(&f, g.hu(), g.hv());
        for i in 0..g.nu {
            for j in 0..g.nv {
                let (u, v) = (g.u(i), g.v(j));
                assert!((fu[[i, j]] - (6.0 * u - v)).abs() < 1e-11);
                assert!((fvv[[i, j]] - 4.0).abs() < 1e-9);
                assert!((fuv[[i, j]] + 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn second_derivative_is_second_order() {
        let err = |n: usize| {
            let g = Grid2::square(0.0, 1.0, n).unwrap();
            let f = g.sample(|u, _| u.sin());
            let fuu = d2(&f, Axis::U, g.hu());
            let ex = g.sample(|u, _| -u.sin());
            max_abs(&(fuu - ex))
        };
        let order = fitted_order(&[1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0], &[err(17), err(33), err(65)]);
        assert!((order - 2.0).abs() < 0.2, "order {order}");
    }

    #[test]
    fn degenerate_grids() {
        assert!(Grid2::new((0.0, 1.0), (0.0, 1.0), 0, 3).is_err());
        assert!(Grid2::new((1.0, 0.0), (0.0, 1.0), 3, 3).is_err());
        let g = Grid2::new((0.5, 0.5), (0.0, 1.0), 1, 2).unwrap();
        let f = g.sample(|_, v| v);
        assert_eq!(d1(&f, Axis::U, g.hu())[[0, 1]], 0.0);
        assert_eq!(d1(&f, Axis::V, g.hv())[[0, 0]], 1.0);
    }
}
