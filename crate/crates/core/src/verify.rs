//! Independent checks on reconstructed meshes: fundamental forms by finite
//! differences, Gauss–Codazzi residuals and curvature comparison.

use crate::grid::{d1, d2, d_uv, max_abs, max_abs_interior, Axis, Field, Grid2};
use crate::invariants::{invariants_from_forms, FormFields, InvariantGrid};
use crate::minkowski::MinkowskiVec;
use crate::reconstruct::SurfaceGrid;
use crate::weingarten::WeingartenPair;
use crate::error::Result;
use serde::{Deserialize, Serialize};

/// Source of the normal used for `L, M, N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NormalSource {
    /// The `l` stored in the integrated frames.
    #[default]
    Frames,
    /// `l` recomputed from the Lorentzian cross product of the tangents.
    CrossProduct,
}

fn component(surface: &SurfaceGrid, k: usize) -> Field {
    surface.frames.mapv(|f| f.z.to_array()[k])
}

fn vec_fields(fields: &[Field; 3], i: usize, j: usize) -> MinkowskiVec {
    MinkowskiVec::new(fields[0][[i, j]], fields[1][[i, j]], fields[2][[i, j]])
}

/// First and second fundamental forms of a sampled immersion.
pub fn forms_from_mesh(surface: &SurfaceGrid) -> FormFields {
    forms_from_mesh_with(surface, NormalSource::Frames)
}

pub fn forms_from_mesh_with(surface: &SurfaceGrid, normal: NormalSource) -> FormFields {
    let grid = surface.grid;
    let (hu, hv) = (grid.hu(), grid.hv());
    let z: [Field; 3] = [component(surface, 0), component(surface, 1), component(surface, 2)];
    let each = |op: &dyn Fn(&Field) -> Field| -> [Field; 3] { [op(&z[0]), op(&z[1]), op(&z[2])] };
    let zu = each(&|f| d1(f, Axis::U, hu));
    let zv = each(&|f| d1(f, Axis::V, hv));
    let zuu = each(&|f| d2(f, Axis::U, hu));
    let zvv = each(&|f| d2(f, Axis::V, hv));
    let zuv = each(&|f| d_uv(f, hu, hv));
    let shape = grid.shape();
    let mut out = FormFields {
        e: Field::zeros(shape),
        f: Field::zeros(shape),
        g: Field::zeros(shape),
        l: Field::zeros(shape),
        m: Field::zeros(shape),
        n: Field::zeros(shape),
    };
    for ((i, j), fr) in surface.frames.indexed_iter() {
        let (a, b) = (vec_fields(&zu, i, j), vec_fields(&zv, i, j));
        let l = match normal {
            NormalSource::Frames => fr.l,
            NormalSource::CrossProduct => {
                let c = a.cross(&b);
                -(1.0 / c.square().abs().sqrt()) * c
            }
        };
        out.e[[i, j]] = a.dot(&a);
        out.f[[i, j]] = a.dot(&b);
        out.g[[i, j]] = b.dot(&b);
        out.l[[i, j]] = l.dot(&vec_fields(&zuu, i, j));
        out.m[[i, j]] = l.dot(&vec_fields(&zuv, i, j));
        out.n[[i, j]] = l.dot(&vec_fields(&zvv, i, j));
    }
    out
}

/// Pointwise residuals `(codazzi1, codazzi2, gauss)`:
/// `γ1 - (ν1)_v/(√G(ν1-ν2))`, `γ2 - (ν2)_u/(√E(ν1-ν2))` and
/// `(γ2)_u/√E - (γ1)_v/√G + γ1² + γ2² - ν1ν2`.
pub fn gauss_codazzi_residual(grid: &InvariantGrid) -> (Field, Field, Field) {
    let (hu, hv) = (grid.h_u(), grid.h_v());
    let n1v = d1(&grid.nu1, Axis::V, hv);
    let n2u = d1(&grid.nu2, Axis::U, hu);
    let g2u = d1(&grid.gamma2, Axis::U, hu);
    let g1v = d1(&grid.gamma1, Axis::V, hv);
    let shape = grid.grid.shape();
    let mut c1 = Field::zeros(shape);
    let mut c2 = Field::zeros(shape);
    let mut gs = Field::zeros(shape);
    for i in 0..shape.0 {
        for j in 0..shape.1 {
            let (se, sg) = (grid.e[[i, j]].sqrt(), grid.g[[i, j]].sqrt());
            let (n1, n2) = (grid.nu1[[i, j]], grid.nu2[[i, j]]);
            let (g1, g2) = (grid.gamma1[[i, j]], grid.gamma2[[i, j]]);
            c1[[i, j]] = g1 - n1v[[i, j]] / (sg * (n1 - n2));
            c2[[i, j]] = g2 - n2u[[i, j]] / (se * (n1 - n2));
            gs[[i, j]] = g2u[[i, j]] / se - g1v[[i, j]] / sg + g1 * g1 + g2 * g2 - n1 * n2;
        }
    }
    (c1, c2, gs)
}

/// Deviation of mesh curvatures from the Weingarten data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub nu1_max: f64,
    pub nu1_mean: f64,
    pub nu2_max: f64,
    pub nu2_mean: f64,
    /// Maxima with one boundary ring excluded.
    pub nu1_max_interior: f64,
    pub nu2_max_interior: f64,
}

fn mean_abs(f: &Field) -> f64 {
    if f.is_empty() { 0.0 } else { f.iter().map(|x| x.abs()).sum::<f64>() / f.len() as f64 }
}

/// Compares `L/E`, `N/G` of the mesh with `f(ν)`, `g(ν)`.
pub fn compare_curvatures(surface: &SurfaceGrid, pair: &WeingartenPair, nu: &Field) -> Result<CurvatureReport> {
    surface.grid.check_field(nu, "nu")?;
    let fm = forms_from_mesh(surface);
    let d1f = Field::from_shape_fn(nu.dim(), |ix| fm.l[ix] / fm.e[ix] - pair.f(nu[ix]));
    let d2f = Field::from_shape_fn(nu.dim(), |ix| fm.n[ix] / fm.g[ix] - pair.g(nu[ix]));
    Ok(CurvatureReport {
        nu1_max: max_abs(&d1f),
        nu1_mean: mean_abs(&d1f),
        nu2_max: max_abs(&d2f),
        nu2_mean: mean_abs(&d2f),
        nu1_max_interior: max_abs_interior(&d1f, 1),
        nu2_max_interior: max_abs_interior(&d2f, 1),
    })
}

/// Summary written by the `verify` command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub codazzi1_max: f64,
    pub codazzi2_max: f64,
    pub gauss_max: f64,
    pub nu1_dev: Option<f64>,
    pub nu2_dev: Option<f64>,
    #[serde(rename = "F_max")]
    pub f_max: f64,
    #[serde(rename = "M_max")]
    pub m_max: f64,
    pub h_u: f64,
    pub h_v: f64,
}

/// Boundary rings excluded from the residual maxima in [`verify_surface`].
/// The Gauss residual differentiates the mesh three times, and each one-sided
/// boundary stencil costs one order on the next ring in.
pub const REPORT_RING: usize = 3;

/// Recovers invariants from the mesh and reports interior residual maxima.
/// Curvature deviations are included when Weingarten data are supplied.
pub fn verify_surface(surface: &SurfaceGrid, data: Option<(&WeingartenPair, &Field)>) -> Result<VerifyReport> {
    let fm = forms_from_mesh(surface);
    let inv = invariants_from_forms(&fm, surface.grid, f64::INFINITY)?;
    let (c1, c2, gs) = gauss_codazzi_residual(&inv);
    let (nu1_dev, nu2_dev) = match data {
        Some((pair, nu)) => {
            let r = compare_curvatures(surface, pair, nu)?;
            (Some(r.nu1_max_interior), Some(r.nu2_max_interior))
        }
        None => (None, None),
    };
    Ok(VerifyReport {
        codazzi1_max: max_abs_interior(&c1, REPORT_RING),
        codazzi2_max: max_abs_interior(&c2, REPORT_RING),
        gauss_max: max_abs_interior(&gs, REPORT_RING),
        nu1_dev,
        nu2_dev,
        f_max: max_abs(&fm.f),
        m_max: max_abs(&fm.m),
        h_u: surface.grid.hu(),
        h_v: surface.grid.hv(),
    })
}

/// Residual fields for plotting, in the order codazzi1, codazzi2, gauss.
pub fn residual_fields(surface: &SurfaceGrid) -> Result<(Grid2, [Field; 3])> {
    let inv = invariants_from_forms(&forms_from_mesh(surface), surface.grid, f64::INFINITY)?;
    let (a, b, c) = gauss_codazzi_residual(&inv);
    Ok((surface.grid, [a, b, c]))
}
