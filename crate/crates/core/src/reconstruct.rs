//! Surface reconstruction from invariants by integrating the moving frame
//! along grid lines.

use crate::chart::NaturalChart;
use crate::error::{Error, Result};
use crate::grid::{d1, max_abs_interior, Axis, Field, Grid2};
use crate::invariants::InvariantGrid;
use crate::minkowski::{det3, MinkowskiVec};
use crate::verify::gauss_codazzi_residual;
use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Orthonormality drift tolerated before renormalization, per step.
pub const DRIFT_TOL: f64 = 1e-3;
/// Default bound on the path discrepancy accepted by [`integrate_frame`].
pub const DEFAULT_PATH_TOL: f64 = 1e-2;

/// Position and positively oriented frame `X, Y` (space-like), `l` (time-like).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub z: MinkowskiVec,
    pub x: MinkowskiVec,
    pub y: MinkowskiVec,
    pub l: MinkowskiVec,
}

impl Default for Frame {
    fn default() -> Self {
        Frame::standard(MinkowskiVec::ZERO)
    }
}

impl Frame {
    /// `X = e1, Y = e2, l = e3` at `z`.
    pub fn standard(z: MinkowskiVec) -> Self {
        Frame { z, x: MinkowskiVec::E1, y: MinkowskiVec::E2, l: MinkowskiVec::E3 }
    }

    /// Max entry of `Gram - diag(1, 1, -1)`.
    pub fn gram_drift(&self) -> f64 {
        let (x, y, l) = (&self.x, &self.y, &self.l);
        [x.dot(x) - 1.0, y.dot(y) - 1.0, l.dot(l) + 1.0, x.dot(y), x.dot(l), y.dot(l)]
            .iter()
            .fold(0.0, |m, d| m.max(d.abs()))
    }

    pub fn orientation(&self) -> f64 {
        det3(&self.x, &self.y, &self.l)
    }

    /// Checks orthonormality within `tol` and positive orientation.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let d = self.gram_drift();
        if !(d <= tol) {
            return Err(Error::Param(format!("frame is not orthonormal (drift {d:.3e})")));
        }
        if !(self.orientation() > 0.0) {
            return Err(Error::Param("frame is not positively oriented".into()));
        }
        Ok(())
    }

    /// Gram–Schmidt for signature (2, 1).
    pub fn renormalized(&self) -> Frame {
        let unit = |v: MinkowskiVec| (1.0 / v.square().abs().sqrt()) * v;
        let x = unit(self.x);
        let y = unit(self.y - x.dot(&self.y) * x);
        let l = unit(self.l - x.dot(&self.l) * x - y.dot(&self.l) * y);
        Frame { z: self.z, x, y, l }
    }

    /// Image under `p ↦ M p + t`.
    pub fn transformed(&self, m: &[[f64; 3]; 3], t: MinkowskiVec) -> Frame {
        let ap = |v: &MinkowskiVec| {
            let a = v.to_array();
            MinkowskiVec::from_array(std::array::from_fn(|r| m[r][0] * a[0] + m[r][1] * a[1] + m[r][2] * a[2]))
        };
        Frame { z: ap(&self.z) + t, x: ap(&self.x), y: ap(&self.y), l: ap(&self.l) }
    }

    fn diff_norm(&self, o: &Frame) -> f64 {
        [self.z - o.z, self.x - o.x, self.y - o.y, self.l - o.l]
            .iter()
            .fold(0.0, |m, d| m.max(d.coord_norm()))
    }

    fn axpy(&self, h: f64, d: &Frame) -> Frame {
        Frame { z: self.z + h * d.z, x: self.x + h * d.x, y: self.y + h * d.y, l: self.l + h * d.l }
    }
}

/// Sampled immersion: one frame per grid node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGrid {
    pub grid: Grid2,
    pub frames: Array2<Frame>,
    /// Present when the surface was built from a natural chart.
    pub chart: Option<NaturalChart>,
}

impl SurfaceGrid {
    pub fn positions(&self) -> Array2<MinkowskiVec> {
        self.frames.mapv(|f| f.z)
    }

    pub fn normals(&self) -> Array2<MinkowskiVec> {
        self.frames.mapv(|f| f.l)
    }

    /// Largest Gram drift over all stored frames.
    pub fn max_gram_drift(&self) -> f64 {
        self.frames.iter().fold(0.0, |m, f| m.max(f.gram_drift()))
    }

    pub fn transformed(&self, m: &[[f64; 3]; 3], t: MinkowskiVec) -> SurfaceGrid {
        SurfaceGrid { grid: self.grid, frames: self.frames.mapv(|f| f.transformed(m, t)), chart: self.chart }
    }
}

/// Which invariant data drive the integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReconstructMode {
    /// General data with `(ν1 - ν2)γ1γ2 ≠ 0`; path consistency enforced.
    StronglyRegular,
    /// `γ1` is taken to vanish identically; path consistency enforced.
    Gamma1Zero,
    /// Raw invariants, integrated as given.
    Prescribed,
}

/// Coefficients along one grid line: metric factor, geodesic curvature and
/// principal curvature at each node.
struct Line {
    s: Vec<f64>,
    gamma: Vec<f64>,
    nu: Vec<f64>,
    h: f64,
    dir: Axis,
}

fn rate(dir: Axis, s: f64, gamma: f64, nu: f64, f: &Frame) -> Frame {
    match dir {
        Axis::U => Frame {
            z: s * f.x,
            x: s * (gamma * f.y - nu * f.l),
            y: -(s * gamma) * f.x,
            l: -(s * nu) * f.x,
        },
        Axis::V => Frame {
            z: s * f.y,
            x: (s * gamma) * f.y,
            y: s * (-gamma * f.x - nu * f.l),
            l: -(s * nu) * f.y,
        },
    }
}

impl Line {
    /// Integrates from node 0, returning every node's frame. `idx` maps a line
    /// position to its grid node for error reporting.
    fn integrate(&self, start: Frame, idx: impl Fn(usize) -> (usize, usize)) -> Result<Vec<Frame>> {
        let n = self.s.len();
        let mut out = Vec::with_capacity(n);
        out.push(start);
        let mut f = start;
        for k in 0..n.saturating_sub(1) {
            let c0 = (self.s[k], self.gamma[k], self.nu[k]);
            let c1 = (self.s[k + 1], self.gamma[k + 1], self.nu[k + 1]);
            let cm = (0.5 * (c0.0 + c1.0), 0.5 * (c0.1 + c1.1), 0.5 * (c0.2 + c1.2));
            let h = self.h;
            let k1 = rate(self.dir, c0.0, c0.1, c0.2, &f);
            let k2 = rate(self.dir, cm.0, cm.1, cm.2, &f.axpy(0.5 * h, &k1));
            let k3 = rate(self.dir, cm.0, cm.1, cm.2, &f.axpy(0.5 * h, &k2));
            let k4 = rate(self.dir, c1.0, c1.1, c1.2, &f.axpy(h, &k3));
            let next = Frame {
                z: f.z + (h / 6.0) * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
                x: f.x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
                y: f.y + (h / 6.0) * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
                l: f.l + (h / 6.0) * (k1.l + 2.0 * k2.l + 2.0 * k3.l + k4.l),
            };
            let drift = next.gram_drift();
            if !(drift <= DRIFT_TOL) {
                let (i, j) = idx(k + 1);
                return Err(Error::FrameDrift { i, j, drift });
            }
            f = next.renormalized();
            out.push(f);
        }
        Ok(out)
    }
}

struct Coeffs {
    se: Field,
    sg: Field,
    g1: Field,
    g2: Field,
    n1: Field,
    n2: Field,
    hu: f64,
    hv: f64,
}

impl Coeffs {
    fn new(inv: &InvariantGrid, mode: ReconstructMode) -> Result<Coeffs> {
        if let Some(((i, j), _)) = inv.e.indexed_iter().chain(inv.g.indexed_iter()).find(|(_, x)| !(**x > 0.0)) {
            return Err(Error::Domain(format!("metric not positive at node ({i}, {j})")));
        }
        let g1 = match mode {
            ReconstructMode::Gamma1Zero => Field::zeros(inv.gamma1.dim()),
            _ => inv.gamma1.clone(),
        };
        Ok(Coeffs {
            se: inv.e.mapv(f64::sqrt),
            sg: inv.g.mapv(f64::sqrt),
            g1,
            g2: inv.gamma2.clone(),
            n1: inv.nu1.clone(),
            n2: inv.nu2.clone(),
            hu: inv.h_u(),
            hv: inv.h_v(),
        })
    }

    fn row(&self, j: usize) -> Line {
        Line {
            s: self.se.column(j).to_vec(),
            gamma: self.g1.column(j).to_vec(),
            nu: self.n1.column(j).to_vec(),
            h: self.hu,
            dir: Axis::U,
        }
    }

    fn column(&self, i: usize) -> Line {
        Line {
            s: self.sg.row(i).to_vec(),
            gamma: self.g2.row(i).to_vec(),
            nu: self.n2.row(i).to_vec(),
            h: self.hv,
            dir: Axis::V,
        }
    }

    /// Sweep `u` along `v0`, then `v` along every column.
    fn sweep_u_then_v(&self, initial: Frame) -> Result<Array2<Frame>> {
        let (nu, nv) = self.se.dim();
        let base = self.row(0).integrate(initial, |k| (k, 0))?;
        let cols: Vec<Vec<Frame>> = (0..nu)
            .into_par_iter()
            .map(|i| self.column(i).integrate(base[i], |k| (i, k)))
            .collect::<Result<_>>()?;
        Ok(Array2::from_shape_fn((nu, nv), |(i, j)| cols[i][j]))
    }

    /// Sweep `v` along `u0`, then `u` along every row.
    fn sweep_v_then_u(&self, initial: Frame) -> Result<Array2<Frame>> {
        let (nu, nv) = self.se.dim();
        let base = self.column(0).integrate(initial, |k| (0, k))?;
        let rows: Vec<Vec<Frame>> = (0..nv)
            .into_par_iter()
            .map(|j| self.row(j).integrate(base[j], |k| (k, j)))
            .collect::<Result<_>>()?;
        Ok(Array2::from_shape_fn((nu, nv), |(i, j)| rows[j][i]))
    }
}

/// Integrates the frame equations from `initial` at `(u0, v0)`, first along
/// `u` and then along each `v`-column.
pub fn integrate_frame(inv: &InvariantGrid, initial: Frame, mode: ReconstructMode) -> Result<SurfaceGrid> {
    integrate_frame_with(inv, initial, mode, DEFAULT_PATH_TOL)
}

/// As [`integrate_frame`] with an explicit bound on the path discrepancy.
/// The bound is not enforced in [`ReconstructMode::Prescribed`].
pub fn integrate_frame_with(inv: &InvariantGrid, initial: Frame, mode: ReconstructMode, path_tol: f64) -> Result<SurfaceGrid> {
    initial.validate(1e-9)?;
    let c = Coeffs::new(inv, mode)?;
    let frames = c.sweep_u_then_v(initial)?;
    if mode != ReconstructMode::Prescribed {
        let alt = c.sweep_v_then_u(initial)?;
        let discrepancy = max_diff(&frames, &alt);
        if !(discrepancy <= path_tol) {
            return Err(Error::Compatibility { discrepancy, tolerance: path_tol });
        }
    }
    Ok(SurfaceGrid { grid: inv.grid, frames, chart: None })
}

fn max_diff(a: &Array2<Frame>, b: &Array2<Frame>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max(x.diff_norm(y)))
}

/// Integrates u-then-v and v-then-u over the whole grid and returns the
/// largest coordinate-norm difference of position and frame vectors. Every
/// node is compared, not only the far corner, so that a local defect whose
/// effect leaves the grid before the last row is still seen.
pub fn path_independence(inv: &InvariantGrid, initial: Frame) -> Result<f64> {
    let (nu, nv) = inv.grid.shape();
    if nu == 1 || nv == 1 {
        return Ok(0.0);
    }
    let c = Coeffs::new(inv, ReconstructMode::Prescribed)?;
    let a = c.sweep_u_then_v(initial)?;
    let b = c.sweep_v_then_u(initial)?;
    Ok(max_diff(&a, &b))
}

/// Result of [`check_compatibility`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    /// Whether the strict sign conditions on `γ1(ν1)_v`, `γ2(ν2)_u` were checked.
    pub strongly_regular: bool,
    /// `min(γ1(ν1)_v, γ2(ν2)_u)` over the grid.
    pub condition1_margin: f64,
    /// Nodes where either product is negative.
    pub condition1_failures: Vec<(usize, usize)>,
    /// Nodes where either product vanishes to rounding.
    pub condition1_degenerate: usize,
    pub codazzi1_max: f64,
    pub codazzi2_max: f64,
    pub gauss_max: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks the integrability conditions of the invariant data: the sign
/// conditions (strongly regular case only), both Codazzi equations and the
/// Gauss equation. Residual maxima exclude two boundary rings, where the
/// one-sided differences of the `γ` data lose an order.
pub fn check_compatibility(inv: &InvariantGrid, strongly_regular: bool, tol: f64) -> CompatibilityReport {
    let (c1, c2, gs) = gauss_codazzi_residual(inv);
    let (mut margin, mut failures, mut degenerate) = (f64::INFINITY, Vec::new(), 0);
    if strongly_regular {
        let n1v = d1(&inv.nu1, Axis::V, inv.h_v());
        let n2u = d1(&inv.nu2, Axis::U, inv.h_u());
        for ((i, j), &g1) in inv.gamma1.indexed_iter() {
            let p = g1 * n1v[[i, j]];
            let q = inv.gamma2[[i, j]] * n2u[[i, j]];
            let m = p.min(q);
            margin = margin.min(m);
            let scale = 1e-14 * (1.0 + g1.abs() + inv.gamma2[[i, j]].abs()).powi(2);
            if m < -scale {
                failures.push((i, j));
            } else if m <= scale {
                degenerate += 1;
            }
        }
    } else {
        margin = f64::NAN;
    }
    let codazzi1_max = max_abs_interior(&c1, 2);
    let codazzi2_max = max_abs_interior(&c2, 2);
    let gauss_max = max_abs_interior(&gs, 2);
    let passed = failures.is_empty() && codazzi1_max <= tol && codazzi2_max <= tol && gauss_max <= tol;
    CompatibilityReport {
        strongly_regular,
        condition1_margin: margin,
        condition1_failures: failures,
        condition1_degenerate: degenerate,
        codazzi1_max,
        codazzi2_max,
        gauss_max,
        tolerance: tol,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cylinder(n: usize) -> InvariantGrid {
        InvariantGrid::constant(Grid2::square(0.0, 1.0, n).unwrap(), -1.0, 0.0, 0.0, 0.0, 1.0, 1.0)
    }

    #[test]
    fn single_node_returns_initial_frame() {
        let inv = InvariantGrid::constant(Grid2::square(0.0, 0.0, 1).unwrap(), 0.0, -1.0, 0.0, 0.0, 1.0, 1.0);
        let f0 = Frame::standard(MinkowskiVec::E3);
        let s = integrate_frame(&inv, f0, ReconstructMode::Prescribed).unwrap();
        assert_eq!(s.frames.dim(), (1, 1));
        assert_eq!(s.frames[[0, 0]], f0);
        assert_eq!(path_independence(&inv, f0).unwrap(), 0.0);
    }

    #[test]
    fn renormalization_restores_gram() {
        let f = Frame {
            z: MinkowskiVec::ZERO,
            x: MinkowskiVec::new(1.01, 0.02, 0.0),
            y: MinkowskiVec::new(-0.01, 0.99, 0.03),
            l: MinkowskiVec::new(0.02, 0.01, 1.02),
        };
        let r = f.renormalized();
        assert!(r.gram_drift() < 1e-14);
        assert!(r.orientation() > 0.0);
    }

    #[test]
    fn rejects_bad_initial_frame() {
        let f = Frame { l: -MinkowskiVec::E3, ..Frame::default() };
        assert!(integrate_frame(&cylinder(5), f, ReconstructMode::Prescribed).is_err());
    }

    #[test]
    fn cylinder_compatibility_is_exact() {
        let inv = InvariantGrid::constant(Grid2::square(0.0, 1.0, 9).unwrap(), -1.0, 0.0, 0.0, 0.0, 1.0, 1.0);
        let r = check_compatibility(&inv, false, 1e-12);
        assert_eq!(r.gauss_max, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn sign_flip_is_reported() {
        let grid = Grid2::square(0.0, 1.0, 9).unwrap();
        let nu1 = grid.sample(|u, v| 2.0 + u + v);
        let nu2 = grid.sample(|u, v| -1.0 - u - v);
        let mut inv = InvariantGrid::new(grid, nu1, nu2, grid.zeros(), grid.zeros(), grid.sample(|_, _| 1.0), grid.sample(|_, _| 1.0)).unwrap();
        // γ2 positive and γ1 positive where ν1 grows in v, flipped for u > 1/2
        inv.gamma2.fill(-1.0);
        inv.gamma1 = grid.sample(|u, _| if u > 0.5 { -1.0 } else { 1.0 });
        let r = check_compatibility(&inv, true, 1e10);
        let flipped: Vec<_> = (0..9).filter(|&i| grid.u(i) > 0.5).collect();
        assert_eq!(r.condition1_failures.len(), flipped.len() * 9);
        assert!(r.condition1_failures.iter().all(|(i, _)| flipped.contains(i)));
        assert!(!r.passed);
    }
}
