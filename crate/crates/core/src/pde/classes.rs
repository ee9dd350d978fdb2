//! The ten basic classes: canonical PDE forms and, for each, a Weingarten
//! pair with a natural chart in which the natural PDE becomes the canonical one.

use super::{OperatorKind, PdeForm, Signature};
use crate::chart::NaturalChart;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::grid::{Field, Grid2};
use crate::weingarten::WeingartenPair;
use std::f64::consts::FRAC_PI_4;

fn ex(src: String) -> Expr {
    Expr::parse(&src).expect("built-in expression")
}

fn check_params(class_id: u8, p: Option<f64>, q: Option<f64>) -> Result<(f64, f64)> {
    let need_p = matches!(class_id, 4..=7 | 10);
    let p_val = match (need_p, p) {
        (true, Some(p)) if p.is_finite() => p,
        (true, _) => return Err(Error::Param(format!("class {class_id} needs a finite parameter p"))),
        (false, _) => 0.0,
    };
    let q_val = match (class_id, q) {
        (10, Some(q)) if q.is_finite() => q,
        (10, _) => return Err(Error::Param("class 10 needs a finite parameter q".into())),
        _ => 0.0,
    };
    let ok = match class_id {
        1..=3 | 8 | 9 => true,
        4 | 6 => p_val * p_val > 1.0,
        5 | 7 => p_val * p_val < 1.0 && p_val != 0.0,
        10 => p_val != 0.0 && q_val > 0.0,
        _ => return Err(Error::Param(format!("class id {class_id} not in 1..=10"))),
    };
    if !ok {
        let rule = match class_id {
            4 | 6 => "p^2 > 1",
            5 | 7 => "p^2 < 1, p != 0",
            _ => "p != 0, q > 0",
        };
        return Err(Error::Param(format!("class {class_id} requires {rule}, got p={p_val}, q={q_val}")));
    }
    Ok((p_val, q_val))
}

/// The canonical PDE of basic class `class_id` (Minkowski signature).
pub fn canonical_rhs(class_id: u8, p: Option<f64>, q: Option<f64>) -> Result<PdeForm> {
    let (pv, qv) = check_params(class_id, p, q)?;
    use OperatorKind::*;
    let (op, var, lhs, rhs, lhs_text, rhs_text, subst): (OperatorKind, &str, Expr, Expr, &str, &str, Option<&str>) =
        match class_id {
            1 => (Delta, "λ", Expr::x(), ex("exp(x)".into()), "λ", "e^λ", Some("ν = -e^λ")),
            2 => (Delta, "λ", Expr::x(), ex("sinh(x)".into()), "λ", "sinh λ", Some("ν = (1-e^λ)/2")),
            3 => (DeltaStar, "ν", ex("exp(x)".into()), ex("2*x*(x+2)".into()), "e^ν", "2ν(ν+2)", None),
            4 | 5 => (
                if class_id == 4 { DeltaStar } else { DeltaBarStar },
                "ν",
                ex(format!("x^({pv})")),
                ex(format!("2*({pv})*(({pv})+1)/(({pv})-1)^2*x")),
                "ν^p",
                "2p(p+1)/(p-1)^2 ν",
                None,
            ),
            6 | 7 => (
                if class_id == 6 { DeltaStar } else { DeltaBarStar },
                "λ",
                ex(format!("x^({pv})")),
                ex(format!("({pv})*((({pv})-1)*x+2)*((({pv})+1)*x+2)/(2*(({pv})-1)*x)")),
                "λ^p",
                "p((p-1)λ+2)((p+1)λ+2)/(2(p-1)λ)",
                Some("ν = ((p-1)λ+2)/2"),
            ),
            8 => (DeltaBar, "λ", Expr::x(), ex("-sin(x)".into()), "λ", "-sin λ", Some("ν = tan λ")),
            9 => (DeltaStar, "λ", ex("exp(x)".into()), Expr::c(2.0), "e^λ", "2", Some("ν = (λ-4)/(λ-2)")),
            10 => (
                DeltaStar,
                "λ",
                ex(format!("exp(({pv})*atan(x/sqrt({qv}))/sqrt({qv}))")),
                ex(format!("({pv})*({qv})/2*x*(({pv})*x-2*({qv}))/(x^2+({qv}))")),
                "e^{p𝓘}",
                "(pq/2)λ(pλ-2q)/(λ^2+q)",
                Some("ν = λ + p/2; 𝓘 = (1/√q) arctan(λ/√q)"),
            ),
            _ => unreachable!("checked above"),
        };
    Ok(PdeForm {
        class_id: Some(class_id),
        operator: op,
        signature: Signature::Minkowski,
        lhs,
        rhs,
        p: if matches!(class_id, 4..=7 | 10) { Some(pv) } else { None },
        q: if class_id == 10 { Some(qv) } else { None },
        variable: var.into(),
        lhs_text: lhs_text.into(),
        rhs_text: rhs_text.into(),
        substitution: subst.map(String::from),
    })
}

/// A basic class realized as a Weingarten pair plus the natural chart in
/// which its natural PDE reads `δ(T(λ)) = R(λ)` under `ν = ν(λ)`.
#[derive(Debug, Clone)]
pub struct BasicClass {
    pub form: PdeForm,
    pub pair: WeingartenPair,
    /// ν as a function of the unknown λ.
    pub nu_of_lam: Expr,
    /// Open interval of admissible λ.
    pub lam_lo: f64,
    pub lam_hi: f64,
    pub lam0: f64,
    pub nu0: f64,
    pub a: f64,
    pub b: f64,
    k_r: f64,
}

impl BasicClass {
    pub fn chart(&self, grid: Grid2) -> Result<NaturalChart> {
        NaturalChart::new(self.a, self.b, self.nu0, grid)
    }

    pub fn nu(&self, lam: f64) -> f64 {
        self.nu_of_lam.eval(lam)
    }

    pub fn nu_field(&self, lam: &Field) -> Field {
        lam.mapv(|x| self.nu(x))
    }

    /// Factor `w(λ)` with natural residual `= w(λ) · (δT(λ) - R(λ))`.
    pub fn weight(&self, lam: f64) -> f64 {
        let nu = self.nu(lam);
        let nu0 = self.nu0;
        let d = self.pair.f(nu) - self.pair.g(nu);
        let d0 = self.pair.f(nu0) - self.pair.g(nu0);
        -self.k_r * d / d0
    }

    pub fn contains(&self, lam: f64) -> bool {
        lam > self.lam_lo && lam < self.lam_hi
    }
}

/// Builds the natural data of a basic class.
pub fn basic_class(class_id: u8, p: Option<f64>, q: Option<f64>) -> Result<BasicClass> {
    let form = canonical_rhs(class_id, p, q)?;
    let (pv, qv) = check_params(class_id, p, q)?;
    let inf = f64::INFINITY;
    // (f, g, ν-interval, ν(λ), λ-interval, λ0)
    let (f, g, nu_lo, nu_hi, map, lam_lo, lam_hi, lam0): (String, String, f64, f64, String, f64, f64, f64) = match class_id {
        1 => ("x".into(), "-x".into(), -inf, 0.0, "-exp(x)".into(), -inf, inf, 0.0),
        2 => ("1-x".into(), "x".into(), -inf, 0.5, "(1-exp(x))/2".into(), -inf, inf, 0.0),
        3 => ("x+2".into(), "x".into(), -inf, inf, "x".into(), -inf, inf, 0.0),
        4 | 5 => {
            let r = (pv - 1.0) / (pv + 1.0);
            let s = (pv + 1.0).signum();
            (format!("({s})*x"), format!("({})*x", s * r), 0.0, inf, "x".into(), 0.0, inf, 1.0)
        }
        6 | 7 => {
            let (lo, hi) = if pv > 1.0 { (1.0, inf) } else { (-inf, 1.0) };
            (
                format!("(({pv})+1)*(x-1)/(({pv})-1)+1"),
                "x".into(),
                lo,
                hi,
                format!("((({pv})-1)*x+2)/2"),
                0.0,
                inf,
                1.0,
            )
        }
        8 => (
            "x/(1+sqrt(1+x^2))".into(),
            "-(1+sqrt(1+x^2))/x".into(),
            0.0,
            inf,
            "tan(x)".into(),
            0.0,
            std::f64::consts::FRAC_PI_2,
            FRAC_PI_4,
        ),
        9 => ("(x-1)/(2-x)".into(), "x-1".into(), -inf, 1.0, "(x-4)/(x-2)".into(), 2.0, inf, 4.0),
        10 => {
            let m = pv * pv / 4.0 + qv;
            (
                format!("x-({pv})/2"),
                format!("({pv})/2-({m})/x"),
                0.0,
                inf,
                format!("x+({pv})/2"),
                -pv / 2.0,
                inf,
                1.0 - pv / 2.0,
            )
        }
        _ => unreachable!("checked by canonical_rhs"),
    };
    let pair = WeingartenPair::new(ex(f), ex(g), nu_lo, nu_hi)?;
    let nu_of_lam = ex(map);
    let nu0 = nu_of_lam.eval(lam0);

    // Chart normalization: match the u- and v-coefficients of the natural
    // PDE at λ0, and the zeroth-order term anywhere R ≠ 0.
    let slope = |lam: f64| {
        let nj = nu_of_lam.jet(lam);
        let (fj, gj) = (pair.f.jet(nj.v), pair.g.jet(nj.v));
        (fj.v, gj.v, fj.d1 * nj.d1, gj.d1 * nj.d1)
    };
    let (f0, g0, f0_l, g0_l) = slope(lam0);
    let d0 = f0 - g0;
    let k1 = (g0_l / d0) / form.t_jet(lam0).d1;
    let k2 = (-f0_l / d0) / form.u_jet(lam0).d1;
    let lam1 = [lam0, lam0 + 0.37, lam0 - 0.29 * (lam0 - lam_lo).min(1.0), lam0 + 0.61]
        .into_iter()
        .find(|&l| l > lam_lo && l < lam_hi && form.rhs.eval(l).abs() > 1e-3)
        .ok_or_else(|| Error::Param("no sample point with nonzero right-hand side".into()))?;
    let (f1, g1, _, _) = slope(lam1);
    let k_r = d0 * f1 * g1 / ((f1 - g1) * form.rhs.eval(lam1));
    let a2 = k_r / k1;
    let b2 = form.operator.sign() * k_r / k2;
    if !(a2 > 0.0 && b2 > 0.0) {
        return Err(Error::Param(format!("class {class_id}: no real natural chart (a^2={a2}, b^2={b2})")));
    }
    Ok(BasicClass {
        form,
        pair,
        nu_of_lam,
        lam_lo,
        lam_hi,
        lam0,
        nu0,
        a: a2.sqrt(),
        b: b2.sqrt(),
        k_r,
    })
}
