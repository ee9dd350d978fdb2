//! Classification of linear relations `δK' = αH + βH' + γ` into the ten
//! basic classes.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::parallel::parallel_relation;
use crate::pde::{canonical_rhs, OperatorKind, PdeForm, Signature};
use serde::{Deserialize, Serialize};

/// Default relative tolerance for branch zero tests.
pub const BRANCH_TOL: f64 = 1e-12;

/// `δK' = αH + βH' + γ`, optionally remembering the fractional form
/// `ν1 = (Aν2 + B)/(Cν2 + D)` it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearRelation {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fractional: Option<[f64; 4]>,
}

impl LinearRelation {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        LinearRelation { alpha, beta, gamma, delta, fractional: None }
    }

    /// `α² - β² + 4γδ`; the relation is degenerate when it vanishes.
    pub fn discriminant(&self) -> f64 {
        self.alpha * self.alpha - self.beta * self.beta + 4.0 * self.gamma * self.delta
    }

    fn scale(&self) -> f64 {
        [self.alpha, self.beta, self.gamma, self.delta].iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn check(&self, tol: f64) -> Result<()> {
        let s = self.scale();
        if ![self.alpha, self.beta, self.gamma, self.delta].iter().all(|x| x.is_finite()) {
            return Err(Error::Param("relation coefficients must be finite".into()));
        }
        if s == 0.0 || self.discriminant().abs() <= tol * s * s {
            return Err(Error::DegenerateRelation(self.discriminant()));
        }
        // βH' = 0 alone forces ν1 = ν2
        if self.alpha.abs() <= tol * s && self.gamma.abs() <= tol * s && self.delta.abs() <= tol * s {
            return Err(Error::Umbilic);
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> LinearRelation {
        LinearRelation::new(c * self.alpha, c * self.beta, c * self.gamma, c * self.delta)
    }

    /// Residual of the relation at given curvatures.
    pub fn eval(&self, nu1: f64, nu2: f64) -> f64 {
        let h = 0.5 * (nu1 + nu2);
        let hp = 0.5 * (nu1 - nu2);
        self.delta * nu1 * nu2 - (self.alpha * h + self.beta * hp + self.gamma)
    }
}

/// `ν1 = (Aν2 + B)/(Cν2 + D)` as `CK' = (A-D)H - (A+D)H' + B`.
pub fn fractional_to_linear(a: f64, b: f64, c: f64, d: f64) -> Result<LinearRelation> {
    if a == d && b == 0.0 && c == 0.0 {
        return Err(Error::Umbilic);
    }
    let det = b * c - a * d;
    if det == 0.0 {
        return Err(Error::DegenerateRelation(0.0));
    }
    let rel = LinearRelation { alpha: a - d, beta: -(a + d), gamma: b, delta: c, fractional: Some([a, b, c, d]) };
    debug_assert!((rel.discriminant() - 4.0 * det).abs() <= 1e-12 * (1.0 + det.abs()));
    Ok(rel)
}

/// Output of [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicClassDescriptor {
    pub class_id: u8,
    /// Short name of the basic class, e.g. `K'=-1`.
    pub label: String,
    pub branch: String,
    pub p: Option<f64>,
    pub q: Option<f64>,
    /// Parallel offset used to reach a `δ = 0` relation (0 if none).
    pub offset_a: f64,
    /// ε used when transporting the relation to the parallel surface.
    pub epsilon: f64,
    /// True when ε was assumed rather than determined from data.
    pub epsilon_assumed: bool,
    /// Homothety factor taking the (reduced) family to the basic class.
    pub similarity_scale: f64,
    /// Sign of the coefficient that was normalized away.
    pub scale_sign: f64,
    /// `sign(α² - β²)` where the proof uses it.
    pub eta: Option<f64>,
    /// Relation after the parallel reduction and normalization.
    pub reduced: LinearRelation,
    pub substitution: Option<String>,
    /// Canonical PDE of the basic class.
    pub pde: PdeForm,
    /// PDE of the family before the similarity normalization.
    pub family: PdeForm,
}

impl BasicClassDescriptor {
    /// One-line summary, e.g.
    /// `class 8 (K'=-1): Δ̄λ = -sin λ, ν = tan λ, offset a=0, scale s=1`.
    pub fn summary(&self) -> String {
        let mut out = format!("class {} ({}): {}", self.class_id, self.label, self.pde.equation());
        if let Some(s) = &self.pde.substitution {
            out.push_str(&format!(", {s}"));
        }
        if let Some(p) = self.p {
            out.push_str(&format!(", p={}", fmt6(p)));
        }
        if let Some(q) = self.q {
            out.push_str(&format!(", q={}", fmt6(q)));
        }
        out.push_str(&format!(", offset a={}, scale s={}", fmt6(self.offset_a), fmt6(self.similarity_scale)));
        out
    }
}

/// Six significant digits, trailing zeros trimmed.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s }
    } else {
        format!("{x:.5e}")
    }
}

fn label(class_id: u8) -> &'static str {
    match class_id {
        1 => "H=0",
        2 => "H=1/2",
        3 => "H'=1",
        4 | 5 => "H=pH'",
        6 | 7 => "H=pH'+1",
        8 => "K'=-1",
        9 => "K'=2H'",
        _ => "K'=pH'-q",
    }
}

struct Branch {
    class_id: u8,
    name: &'static str,
    p: Option<f64>,
    q: Option<f64>,
    /// Signed homothety factor.
    scale: f64,
    eta: Option<f64>,
    family: PdeForm,
}

fn is_zero(x: f64, scale: f64, tol: f64) -> bool {
    x.abs() <= tol * scale
}

fn num(x: f64) -> String {
    fmt6(x)
}

fn signed(x: f64) -> String {
    if x < 0.0 { format!("-{}", num(-x)) } else { format!("+{}", num(x)) }
}

fn ex(src: String) -> Expr {
    Expr::parse(&src).expect("generated expression")
}

fn numeric_form(class_id: u8, op: OperatorKind, var: &str, lhs: Expr, rhs: Expr, lhs_text: String, rhs_text: String) -> PdeForm {
    PdeForm {
        class_id: Some(class_id),
        operator: op,
        signature: Signature::Minkowski,
        lhs,
        rhs,
        p: None,
        q: None,
        variable: var.into(),
        lhs_text,
        rhs_text,
        substitution: None,
    }
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + b.abs())
}

/// Coefficient text: `6 sinh λ`, `sinh λ`, `-16 sin λ`.
fn times(c: f64, body: &str) -> String {
    if near(c, 1.0) {
        body.into()
    } else if near(c, -1.0) {
        format!("-{body}")
    } else {
        format!("{} {body}", num(c))
    }
}

/// Branch I: `αH + βH' + γ = 0`.
fn branch_one(rel: &LinearRelation, tol: f64) -> Result<Branch> {
    let (al, be, ga) = (rel.alpha, rel.beta, rel.gamma);
    let s = rel.scale();
    if is_zero(al, s, tol) {
        if is_zero(ga, s, tol) {
            return Err(Error::Umbilic);
        }
        // βH' + γ = 0, H' = h
        let h = -ga / be;
        let form = if near(h, 1.0) {
            canonical_rhs(3, None, None)?
        } else {
            let k = 1.0 / h;
            numeric_form(
                3,
                OperatorKind::DeltaStar,
                "ν",
                ex(format!("exp(({k})*x)")),
                ex(format!("2*x*(x+2*({h}))")),
                format!("e^{{{}ν}}", num(k)),
                format!("2ν(ν+{})", num(2.0 * h)),
            )
        };
        return Ok(Branch { class_id: 3, name: "I.1", p: None, q: None, scale: h, eta: None, family: form });
    }
    let eta = (al * al - be * be).signum();
    if is_zero(ga, s, tol) {
        if is_zero(be, s, tol) {
            let form = canonical_rhs(1, None, None)?;
            return Ok(Branch { class_id: 1, name: "I.2", p: None, q: None, scale: 1.0, eta: Some(eta), family: form });
        }
        let p = -be / al;
        let id = if eta < 0.0 { 4 } else { 5 };
        let form = canonical_rhs(id, Some(p), None)?;
        return Ok(Branch { class_id: id, name: "I.2", p: Some(p), q: None, scale: 1.0, eta: Some(eta), family: form });
    }
    if is_zero(be, s, tol) {
        // H = h, basic |H| = 1/2
        let h = -ga / al;
        let form = if near(h.abs(), 0.5) {
            canonical_rhs(2, None, None)?
        } else {
            let c = 2.0 * h.abs();
            numeric_form(2, OperatorKind::Delta, "λ", Expr::x(), ex(format!("({c})*sinh(x)")), "λ".into(), times(c, "sinh λ"))
        };
        return Ok(Branch { class_id: 2, name: "I.3", p: None, q: None, scale: 2.0 * h, eta: None, family: form });
    }
    // H = pH' + s
    let p = -be / al;
    let sc = -ga / al;
    let id = if eta < 0.0 { 6 } else { 7 };
    let form = if near(sc, 1.0) {
        canonical_rhs(id, Some(p), None)?
    } else {
        let g = -sc;
        let op = if id == 6 { OperatorKind::DeltaStar } else { OperatorKind::DeltaBarStar };
        numeric_form(
            id,
            op,
            "λ",
            ex(format!("x^({p})")),
            ex(format!("({p})*((({p})-1)*x-2*({g}))*((({p})+1)*x-2*({g}))/(2*(({p})-1)*x)")),
            format!("λ^{}", num(p)),
            format!(
                "{}(({})λ{})(({})λ{})/({}λ)",
                num(p),
                num(p - 1.0),
                signed(-2.0 * g),
                num(p + 1.0),
                signed(-2.0 * g),
                num(2.0 * (p - 1.0))
            ),
        )
    };
    let mut form = form;
    form.p = Some(p);
    Ok(Branch { class_id: id, name: "I.4", p: Some(p), q: None, scale: sc, eta: Some(eta), family: form })
}

/// Branch II with `δ = 1`: `K' = αH + βH' + γ`, no offset needed or `α = 0`.
fn branch_two_direct(al: f64, be: f64, ga: f64, s: f64, tol: f64) -> Result<Option<Branch>> {
    if !is_zero(al, s, tol) {
        return Ok(None);
    }
    if is_zero(ga, s, tol) {
        // K' = βH'
        let form = if near(be, 2.0) {
            canonical_rhs(9, None, None)?
        } else {
            let c = be.powi(4) / 8.0;
            numeric_form(9, OperatorKind::DeltaStar, "λ", ex("exp(x)".into()), Expr::c(c), "e^λ".into(), num(c))
        };
        return Ok(Some(Branch { class_id: 9, name: "II.5", p: None, q: None, scale: be / 2.0, eta: None, family: form }));
    }
    if ga < 0.0 {
        return Ok(Some(branch_seven(be, ga, s, tol)?));
    }
    Ok(None)
}

/// II.7 after the offset: `K' = βH' + γ` with `γ < 0`.
fn branch_seven(be: f64, ga: f64, s: f64, tol: f64) -> Result<Branch> {
    if is_zero(be, s, tol) {
        let k2 = -ga;
        let form = if near(k2, 1.0) {
            canonical_rhs(8, None, None)?
        } else {
            numeric_form(8, OperatorKind::DeltaBar, "λ", Expr::x(), ex(format!("-({k2})*sin(x)")), "λ".into(), times(-k2, "sin λ"))
        };
        return Ok(Branch { class_id: 8, name: "II.7", p: None, q: None, scale: k2.sqrt(), eta: None, family: form });
    }
    let (p, q) = (be, -ga);
    let form = canonical_rhs(10, Some(p), Some(q))?;
    Ok(Branch { class_id: 10, name: "II.7", p: Some(p), q: Some(q), scale: 1.0, eta: None, family: form })
}

/// Runs the case analysis with the default tolerance.
pub fn classify(rel: &LinearRelation) -> Result<BasicClassDescriptor> {
    classify_with_tol(rel, BRANCH_TOL)
}

/// Case analysis; zero tests are relative to the largest coefficient.
pub fn classify_with_tol(rel: &LinearRelation, tol: f64) -> Result<BasicClassDescriptor> {
    rel.check(tol)?;
    let s = rel.scale();
    let mut offset = 0.0;
    let epsilon = 1.0;
    let mut epsilon_assumed = false;
    let (reduced, branch) = if is_zero(rel.delta, s, tol) {
        let r = LinearRelation::new(rel.alpha, rel.beta, rel.gamma, 0.0);
        (r, branch_one(&r, tol)?)
    } else {
        let d = rel.delta;
        let (al, be, ga) = (rel.alpha / d, rel.beta / d, rel.gamma / d);
        let norm = LinearRelation::new(al, be, ga, 1.0);
        let sn = norm.scale();
        match branch_two_direct(al, be, ga, sn, tol)? {
            Some(b) => (norm, b),
            None if al * al + 4.0 * ga >= -tol * sn * sn => {
                // II.6: choose a with 1 - aα - a²γ = 0, then branch I
                let a = if is_zero(ga, sn, tol) {
                    1.0 / al
                } else {
                    let disc = (al * al + 4.0 * ga).max(0.0).sqrt();
                    let r1 = (-al + disc) / (2.0 * ga);
                    let r2 = (-al - disc) / (2.0 * ga);
                    if (r1.abs() - r2.abs()).abs() <= tol * r1.abs().max(r2.abs()) {
                        r1.max(r2)
                    } else if r1.abs() < r2.abs() {
                        r1
                    } else {
                        r2
                    }
                };
                offset = a;
                epsilon_assumed = true;
                let mut r = parallel_relation(&norm, a, epsilon)?;
                r.delta = 0.0;
                (r, branch_one(&r, tol)?)
            }
            None => {
                // II.7: a = -α/(2γ) removes the H term
                let a = -al / (2.0 * ga);
                offset = a;
                epsilon_assumed = true;
                let r = parallel_relation(&norm, a, epsilon)?;
                let c = r.delta;
                let r = LinearRelation::new(0.0, r.beta / c, r.gamma / c, 1.0);
                let b = branch_seven(r.beta, r.gamma, r.scale(), tol)?;
                (r, b)
            }
        }
    };
    let pde = canonical_rhs(branch.class_id, branch.p, branch.q)?;
    Ok(BasicClassDescriptor {
        class_id: branch.class_id,
        label: label(branch.class_id).into(),
        branch: branch.name.into(),
        p: branch.p,
        q: branch.q,
        offset_a: offset,
        epsilon,
        epsilon_assumed,
        similarity_scale: branch.scale.abs(),
        scale_sign: if branch.scale < 0.0 { -1.0 } else { 1.0 },
        eta: branch.eta,
        reduced,
        substitution: pde.substitution.clone(),
        pde,
        family: branch.family,
    })
}

/// The family PDE of a relation, before the similarity normalization.
pub fn family_pde(rel: &LinearRelation) -> Result<PdeForm> {
    Ok(classify(rel)?.family)
}
