//! Field, mesh and report files.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid2};
use crate::reconstruct::SurfaceGrid;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Writes `u,v,value` rows, `i` outer, 17 significant digits.
pub fn write_field_csv(path: &Path, grid: &Grid2, field: &Field) -> Result<()> {
    grid.check_field(field, "field")?;
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "u,v,value")?;
    for ((i, j), x) in field.indexed_iter() {
        writeln!(w, "{:.16e},{:.16e},{:.16e}", grid.u(i), grid.v(j), x)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_field_csv`] back onto `grid`. Rows must
/// cover every node exactly once, in any order.
pub fn read_field_csv(path: &Path, grid: &Grid2) -> Result<Field> {
    let r = BufReader::new(File::open(path)?);
    let mut out = Field::from_elem(grid.shape(), f64::NAN);
    let locate = |x: f64, x0: f64, h: f64, n: usize| -> Option<usize> {
        let k = if n == 1 { 0.0 } else { ((x - x0) / h).round() };
        let tol = 1e-9 * (1.0 + x.abs());
        (k >= 0.0 && (k as usize) < n && (x0 + k * h - x).abs() <= tol.max(1e-9 * h)).then_some(k as usize)
    };
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with('u')) {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        let bad = |msg: &str| Error::Parse { pos: lineno + 1, msg: msg.to_string() };
        if parts.len() != 3 {
            return Err(bad("expected u,v,value"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(&e.to_string()))?;
        let i = locate(nums[0], grid.u0, grid.hu(), grid.nu).ok_or_else(|| bad("u is not a grid node"))?;
        let j = locate(nums[1], grid.v0, grid.hv(), grid.nv).ok_or_else(|| bad("v is not a grid node"))?;
        out[[i, j]] = nums[2];
    }
    if out.iter().any(|x| x.is_nan()) {
        return Err(Error::Shape("CSV does not cover every grid node".into()));
    }
    Ok(out)
}

#[derive(Serialize)]
struct FieldsJson<'a> {
    chart: &'a Grid2,
    fields: BTreeMap<&'a str, Vec<Vec<f64>>>,
}

/// Writes `{chart, fields}` with each field as a list of rows (`i` outer).
pub fn write_fields_json(path: &Path, grid: &Grid2, fields: &[(&str, &Field)]) -> Result<()> {
    let mut map = BTreeMap::new();
    for (name, f) in fields {
        grid.check_field(f, name)?;
        map.insert(*name, f.outer_iter().map(|r| r.to_vec()).collect());
    }
    write_json(path, &FieldsJson { chart: grid, fields: map })
}

/// Pretty JSON of any serializable value.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn vertex(i: usize, j: usize, nv: usize) -> usize {
    i * nv + j
}

/// Quads split into two triangles each, vertex indices from 0.
fn triangles(grid: &Grid2) -> Vec<[usize; 3]> {
    let (nu, nv) = grid.shape();
    let mut t = Vec::with_capacity(2 * nu.saturating_sub(1) * nv.saturating_sub(1));
    for i in 0..nu.saturating_sub(1) {
        for j in 0..nv.saturating_sub(1) {
            let (a, b, c, d) = (vertex(i, j, nv), vertex(i + 1, j, nv), vertex(i + 1, j + 1, nv), vertex(i, j + 1, nv));
            t.push([a, b, c]);
            t.push([a, c, d]);
        }
    }
    t
}

/// ASCII OBJ: positions, the frame normal `l` per vertex, triangle faces.
pub fn write_obj(path: &Path, surface: &SurfaceGrid) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# {} x {} grid", surface.grid.nu, surface.grid.nv)?;
    for f in surface.frames.iter() {
        writeln!(w, "v {:.16e} {:.16e} {:.16e}", f.z.x1, f.z.x2, f.z.x3)?;
    }
    for f in surface.frames.iter() {
        writeln!(w, "vn {:.16e} {:.16e} {:.16e}", f.l.x1, f.l.x2, f.l.x3)?;
    }
    for [a, b, c] in triangles(&surface.grid) {
        writeln!(w, "f {0}//{0} {1}//{1} {2}//{2}", a + 1, b + 1, c + 1)?;
    }
    w.flush()?;
    Ok(())
}

/// Binary little-endian PLY with `x y z nx ny nz` as 32-bit floats.
pub fn write_ply(path: &Path, surface: &SurfaceGrid) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let tris = triangles(&surface.grid);
    write!(
        w,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\n\
         property float nx\nproperty float ny\nproperty float nz\nelement face {}\nproperty list uchar int vertex_indices\nend_header\n",
        surface.frames.len(),
        tris.len()
    )?;
    for f in surface.frames.iter() {
        for x in [f.z.x1, f.z.x2, f.z.x3, f.l.x1, f.l.x2, f.l.x3] {
            w.write_all(&(x as f32).to_le_bytes())?;
        }
    }
    for t in tris {
        w.write_all(&[3u8])?;
        for k in t {
            w.write_all(&(k as i32).to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reconstruct::Frame;
    use crate::MinkowskiVec;

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        let g = Grid2::new((0.1, 0.7), (-1.0, 1.0), 4, 5).unwrap();
        let f = g.sample(|u, v| (u * 3.0).sin() + v / 3.0);
        write_field_csv(&p, &g, &f).unwrap();
        assert_eq!(read_field_csv(&p, &g).unwrap(), f);
        let other = Grid2::new((0.1, 0.7), (-1.0, 1.0), 4, 6).unwrap();
        assert!(read_field_csv(&p, &other).is_err());
    }

    fn flat(n: usize) -> SurfaceGrid {
        let grid = Grid2::square(0.0, 1.0, n).unwrap();
        let frames = ndarray::Array2::from_shape_fn((n, n), |(i, j)| Frame::standard(MinkowskiVec::new(grid.u(i), grid.v(j), 0.0)));
        SurfaceGrid { grid, frames, chart: None }
    }

    #[test]
    fn obj_counts() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.obj");
        write_obj(&p, &flat(3)).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 9);
        assert_eq!(text.lines().filter(|l| l.starts_with("vn ")).count(), 9);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 8);
    }

    #[test]
    fn ply_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.ply");
        write_ply(&p, &flat(3)).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        let end = b"end_header\n";
        let h = bytes.windows(end.len()).position(|w| w == end).unwrap() + end.len();
        assert_eq!(bytes.len() - h, 9 * 24 + 8 * 13);
        // second vertex is (0, 0.5, 0) with normal (0, 0, 1)
        let at = |k: usize| f32::from_le_bytes(bytes[h + 4 * k..h + 4 * k + 4].try_into().unwrap());
        assert_eq!([at(6), at(7), at(8), at(11)], [0.0, 0.5, 0.0, 1.0]);
    }
}
