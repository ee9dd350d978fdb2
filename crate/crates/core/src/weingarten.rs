//! Weingarten pairs `(f, g)` and the quadratures `I`, `J`.

use crate::error::{Error, Result};
use crate::expr::{Expr, Jet};
use serde::{Deserialize, Serialize};

/// Nodes used for the dense quadrature table.
pub const TABLE_NODES: usize = 2049;

/// Relative threshold below which `|f - g|` counts as umbilic.
pub const TOL_SINGULAR: f64 = 1e-8;

/// Principal curvatures `ν1 = f(ν)`, `ν2 = g(ν)` on an open interval of `ν`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeingartenPair {
    pub f: Expr,
    pub g: Expr,
    /// Open interval of admissible ν; infinite ends allowed.
    pub lo: f64,
    pub hi: f64,
    /// True when the supplied functions were exchanged to make `f - g > 0`.
    pub swapped: bool,
}

/// Sample points strictly inside `(lo, hi)`, mapping infinite ends through `t/(1-t)`.
pub(crate) fn interior_samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..n)
        .map(|k| {
            let t = k as f64 / n as f64;
            match (lo.is_finite(), hi.is_finite()) {
                (true, true) => lo + (hi - lo) * t,
                (true, false) => lo + t / (1.0 - t),
                (false, true) => hi - (1.0 - t) / t,
                (false, false) => (t - 0.5) / (t * (1.0 - t)),
            }
        })
        .collect()
}

impl WeingartenPair {
    /// Builds a validated pair, swapping `f` and `g` if needed so that `f > g`.
    pub fn new(f: Expr, g: Expr, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Domain(format!("empty interval ({lo}, {hi})")));
        }
        let mut pair = WeingartenPair { f, g, lo, hi, swapped: false };
        let mut sign_diff = 0.0f64;
        let mut sign_f1 = 0.0f64;
        let mut sign_g1 = 0.0f64;
        for x in interior_samples(lo, hi, 256) {
            let (jf, jg) = (pair.f.jet(x), pair.g.jet(x));
            if !(jf.v.is_finite() && jg.v.is_finite() && jf.d1.is_finite() && jg.d1.is_finite()) {
                continue;
            }
            let d = jf.v - jg.v;
            if d.abs() < TOL_SINGULAR * jf.v.abs().max(1.0) {
                return Err(Error::Domain(format!("f - g vanishes near ν = {x}")));
            }
            if jf.d1 == 0.0 || jg.d1 == 0.0 {
                return Err(Error::Domain(format!("f'g' vanishes at ν = {x}")));
            }
            for (s, val) in [(&mut sign_diff, d), (&mut sign_f1, jf.d1), (&mut sign_g1, jg.d1)] {
                if *s == 0.0 {
                    *s = val.signum();
                } else if *s != val.signum() {
                    return Err(Error::Domain(format!("sign change of f-g or f'g' near ν = {x}")));
                }
            }
        }
        if sign_diff == 0.0 {
            return Err(Error::Domain("pair not finite anywhere on its interval".into()));
        }
        if sign_diff < 0.0 {
            std::mem::swap(&mut pair.f, &mut pair.g);
            pair.swapped = true;
        }
        Ok(pair)
    }

    /// Parses both functions from text.
    pub fn parse(f: &str, g: &str, lo: f64, hi: f64) -> Result<Self> {
        WeingartenPair::new(Expr::parse(f)?, Expr::parse(g)?, lo, hi)
    }

    /// Unvalidated pair, used for fixtures such as constant curvatures.
    pub fn raw(f: Expr, g: Expr, lo: f64, hi: f64) -> Self {
        WeingartenPair { f, g, lo, hi, swapped: false }
    }

    pub fn contains(&self, nu: f64) -> bool {
        nu > self.lo && nu < self.hi
    }

    pub fn f(&self, nu: f64) -> f64 {
        self.f.eval(nu)
    }

    pub fn g(&self, nu: f64) -> f64 {
        self.g.eval(nu)
    }

    /// Returns `(I', J')` and their ν-derivatives `(I'', J'')` at ν.
    pub fn ij_jets(&self, nu: f64) -> (Jet, Jet) {
        let (f, g) = (self.f.jet(nu), self.g.jet(nu));
        let d = f.v - g.v;
        let dd = f.d1 - g.d1;
        let i1 = f.d1 / d;
        let j1 = -g.d1 / d;
        let i2 = f.d2 / d - f.d1 * dd / (d * d);
        let j2 = -g.d2 / d + g.d1 * dd / (d * d);
        (Jet { v: 0.0, d1: i1, d2: i2 }, Jet { v: 0.0, d1: j1, d2: j2 })
    }

    fn check_point(&self, nu: f64) -> Result<()> {
        if !nu.is_finite() || !self.contains(nu) {
            return Err(Error::Domain(format!("ν = {nu} outside ({}, {})", self.lo, self.hi)));
        }
        let (f, g) = (self.f(nu), self.g(nu));
        if !((f - g).abs() >= TOL_SINGULAR * f.abs().max(1.0)) {
            return Err(Error::Domain(format!("|f - g| below tolerance at ν = {nu}")));
        }
        Ok(())
    }
}

/// Tabulated `I` and `J` with cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct QuadratureResult {
    pub nu0: f64,
    nodes: Vec<f64>,
    i_tab: Vec<f64>,
    j_tab: Vec<f64>,
    di_tab: Vec<f64>,
    dj_tab: Vec<f64>,
    /// Values at the requested samples, in input order.
    pub samples: Vec<f64>,
    pub i: Vec<f64>,
    pub j: Vec<f64>,
}

/// Cumulative integral of tabulated `y` on a uniform grid: Simpson on node
/// pairs, with a one-panel corrector for odd nodes. Fourth order overall.
fn cumulative_simpson(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (y[0] + y[1]);
        return out;
    }
    let mut k = 0;
    while k + 2 < n {
        out[k + 1] = out[k] + h / 12.0 * (5.0 * y[k] + 8.0 * y[k + 1] - y[k + 2]);
        out[k + 2] = out[k] + h / 3.0 * (y[k] + 4.0 * y[k + 1] + y[k + 2]);
        k += 2;
    }
    if k + 1 < n {
        // odd number of intervals: close with the mirrored corrector
        out[k + 1] = out[k] + h / 12.0 * (-y[k - 1] + 8.0 * y[k] + 5.0 * y[k + 1]);
    }
    out
}

fn hermite(x0: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

impl QuadratureResult {
    /// Interpolated `(I, J)` at ν; errors outside the tabulated range.
    pub fn eval(&self, nu: f64) -> Result<(f64, f64)> {
        let (a, b) = (self.nodes[0], self.nodes[self.nodes.len() - 1]);
        let slack = 1e-12 * (1.0 + a.abs().max(b.abs()));
        if !(nu >= a - slack && nu <= b + slack) {
            return Err(Error::Domain(format!("ν = {nu} outside quadrature table [{a}, {b}]")));
        }
        if self.nodes.len() == 1 {
            return Ok((0.0, 0.0));
        }
        let n = self.nodes.len() - 1;
        let h = (b - a) / n as f64;
        let k = (((nu - a) / h).floor().max(0.0) as usize).min(n - 1);
        let x0 = self.nodes[k];
        let i = hermite(x0, h, self.i_tab[k], self.i_tab[k + 1], self.di_tab[k], self.di_tab[k + 1], nu);
        let j = hermite(x0, h, self.j_tab[k], self.j_tab[k + 1], self.dj_tab[k], self.dj_tab[k + 1], nu);
        Ok((i, j))
    }

    /// Range covered by the table.
    pub fn range(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }
}

/// Computes `I = ∫ f'/(f-g)` and `J = ∫ g'/(g-f)` normalized to vanish at `nu0`.
pub fn compute_ij(pair: &WeingartenPair, nu0: f64, nu_samples: &[f64]) -> Result<QuadratureResult> {
    pair.check_point(nu0)?;
    let mut lo = nu0;
    let mut hi = nu0;
    for &s in nu_samples {
        pair.check_point(s)?;
        lo = lo.min(s);
        hi = hi.max(s);
    }
    let n = if hi > lo { TABLE_NODES } else { 1 };
    let h = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    let nodes: Vec<f64> = (0..n).map(|k| if k + 1 == n { hi } else { lo + k as f64 * h }).collect();
    let mut di = Vec::with_capacity(n);
    let mut dj = Vec::with_capacity(n);
    for &x in &nodes {
        let (jf, jg) = (pair.f.jet(x), pair.g.jet(x));
        let d = jf.v - jg.v;
        if !(d.abs() >= TOL_SINGULAR * jf.v.abs().max(1.0)) {
            return Err(Error::Domain(format!("|f - g| below tolerance at ν = {x} inside the sampled range")));
        }
        di.push(jf.d1 / d);
        dj.push(-jg.d1 / d);
    }
    let i_tab = cumulative_simpson(&di, h);
    let j_tab = cumulative_simpson(&dj, h);
    let mut q = QuadratureResult {
        nu0,
        nodes,
        i_tab,
        j_tab,
        di_tab: di,
        dj_tab: dj,
        samples: nu_samples.to_vec(),
        i: Vec::new(),
        j: Vec::new(),
    };
    let (i0, j0) = q.eval(nu0)?;
    q.i_tab.iter_mut().for_each(|v| *v -= i0);
    q.j_tab.iter_mut().for_each(|v| *v -= j0);
    let (mut iv, mut jv) = (Vec::with_capacity(nu_samples.len()), Vec::with_capacity(nu_samples.len()));
    for &s in nu_samples {
        let (a, b) = if s == nu0 { (0.0, 0.0) } else { q.eval(s)? };
        iv.push(a);
        jv.push(b);
    }
    q.i = iv;
    q.j = jv;
    Ok(q)
}
