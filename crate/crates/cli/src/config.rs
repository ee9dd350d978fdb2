//! TOML run configuration. Every table mirrors the inputs of one pipeline
//! stage; unknown keys are rejected.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use wsurf::reconstruct::ReconstructMode;
use wsurf::{Expr, Grid2, LinearRelation};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub relation: Option<RelationConfig>,
    pub class: Option<ClassConfig>,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub solver: SolverSection,
    pub boundary: Option<BoundaryConfig>,
    #[serde(default)]
    pub reconstruct: ReconstructSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub parallel: ParallelSection,
    #[serde(default)]
    pub convergence: ConvergenceSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Either `alpha..delta` (linear form) or `A..D` (fractional form).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationConfig {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    #[serde(rename = "B")]
    pub b: Option<f64>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    #[serde(rename = "D")]
    pub d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassConfig {
    pub id: u8,
    pub p: Option<f64>,
    pub q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub u: [f64; 2],
    pub v: [f64; 2],
    /// Nodes per axis; `nu`/`nv` override it per axis.
    pub n: Option<usize>,
    pub nu: Option<usize>,
    pub nv: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub max_iter: usize,
    pub newton_tol: f64,
    pub damping: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection { max_iter: 100, newton_tol: 1e-10, damping: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Dirichlet,
    Cauchy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideKind {
    #[default]
    Dirichlet,
    Neumann,
}

/// Boundary data as expressions in `u`, `v`.
///
/// Dirichlet problems take `value` on the boundary (and as the initial
/// guess). Cauchy problems take `value` and `velocity` at the first v line
/// and, for Dirichlet sides, `value` along the two u edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub kind: BoundaryKind,
    pub value: String,
    pub velocity: Option<String>,
    #[serde(default)]
    pub sides: SideKind,
    #[serde(default)]
    pub reverse: bool,
    /// Closed-form λ, used for error columns in convergence studies.
    pub exact: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructSection {
    pub mode: ReconstructMode,
    pub path_tol: f64,
}

impl Default for ReconstructSection {
    fn default() -> Self {
        ReconstructSection { mode: ReconstructMode::StronglyRegular, path_tol: wsurf::reconstruct::DEFAULT_PATH_TOL }
    }
}

/// Verification passes when every listed maximum is below its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub gauss_tol: f64,
    pub codazzi_tol: f64,
    pub fm_tol: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection { gauss_tol: 0.1, codazzi_tol: 0.05, fm_tol: 1e-3 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParallelSection {
    #[serde(default)]
    pub offsets: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    /// Nodes per axis at each level; the v-axis count scales with the
    /// configured aspect ratio.
    #[serde(default)]
    pub levels: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    Ply,
    #[default]
    Both,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub mesh: MeshFormat,
    /// Also write λ, ν and the residual fields as CSV.
    #[serde(default)]
    pub fields: bool,
}

/// Problems with the configuration; all map to the usage exit code.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {source}")]
    Toml { path: PathBuf, source: toml::de::Error },
    #[error("missing [{0}] section")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        toml::from_str(&text).map_err(|source| ConfigError::Toml { path: path.into(), source })
    }

    pub fn grid(&self) -> Result<Grid2, ConfigError> {
        let g = self.grid.as_ref().ok_or(ConfigError::Missing("grid"))?;
        g.build(None)
    }

    pub fn boundary(&self) -> Result<&BoundaryConfig, ConfigError> {
        self.boundary.as_ref().ok_or(ConfigError::Missing("boundary"))
    }

    /// Checks the parts every pipeline command relies on.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.class.is_none() && self.relation.is_none() {
            return Err(ConfigError::Invalid("give either [class] or [relation]".into()));
        }
        self.grid()?;
        let b = self.boundary()?;
        parse_expr("boundary.value", &b.value)?;
        if let Some(v) = &b.velocity {
            parse_expr("boundary.velocity", v)?;
        }
        if let Some(x) = &b.exact {
            parse_expr("boundary.exact", x)?;
        }
        if b.kind == BoundaryKind::Cauchy && b.velocity.is_none() {
            return Err(ConfigError::Invalid("Cauchy boundary needs `velocity`".into()));
        }
        let s = &self.solver;
        if s.max_iter == 0 || !(s.newton_tol > 0.0) || !(s.damping > 0.0 && s.damping <= 1.0) {
            return Err(ConfigError::Invalid("solver needs max_iter ≥ 1, newton_tol > 0, damping in (0, 1]".into()));
        }
        if !(self.reconstruct.path_tol > 0.0) {
            return Err(ConfigError::Invalid("reconstruct.path_tol must be positive".into()));
        }
        Ok(())
    }
}

impl GridConfig {
    /// The grid, optionally with `n` nodes on the u axis and the v count
    /// scaled to keep the configured ratio.
    pub fn build(&self, level: Option<usize>) -> Result<Grid2, ConfigError> {
        let base_u = self.nu.or(self.n).ok_or_else(|| ConfigError::Invalid("grid needs `n` or `nu`".into()))?;
        let base_v = self.nv.or(self.n).ok_or_else(|| ConfigError::Invalid("grid needs `n` or `nv`".into()))?;
        let (nu, nv) = match level {
            None => (base_u, base_v),
            Some(n) => {
                if base_u < 2 || (base_v - 1) % (base_u - 1) != 0 {
                    return Err(ConfigError::Invalid("convergence levels need nv - 1 to be a multiple of nu - 1".into()));
                }
                (n, (n - 1) * ((base_v - 1) / (base_u - 1)) + 1)
            }
        };
        Grid2::new((self.u[0], self.u[1]), (self.v[0], self.v[1]), nu, nv).map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

/// Relation coefficients as given by the user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficients {
    Linear([f64; 4]),
    Fractional([f64; 4]),
}

impl Coefficients {
    /// The linear relation; fractional input may already be degenerate.
    pub fn relation(self) -> wsurf::Result<LinearRelation> {
        match self {
            Coefficients::Linear([a, b, g, d]) => Ok(LinearRelation::new(a, b, g, d)),
            Coefficients::Fractional([a, b, c, d]) => wsurf::fractional_to_linear(a, b, c, d),
        }
    }
}

impl RelationConfig {
    pub fn coefficients(&self) -> Result<Coefficients, ConfigError> {
        let lin = [self.alpha, self.beta, self.gamma, self.delta];
        let frac = [self.a, self.b, self.c, self.d];
        let any = |xs: &[Option<f64>]| xs.iter().any(Option::is_some);
        match (any(&lin), any(&frac)) {
            (true, true) => Err(ConfigError::Invalid("give either alpha..delta or A..D, not both".into())),
            (false, false) => Err(ConfigError::Invalid("relation coefficients missing".into())),
            (true, false) => Ok(Coefficients::Linear(lin.map(|x| x.unwrap_or(0.0)))),
            (false, true) => Ok(Coefficients::Fractional(frac.map(|x| x.unwrap_or(0.0)))),
        }
    }
}

pub fn parse_expr(what: &str, src: &str) -> Result<Expr, ConfigError> {
    Expr::parse(src).map_err(|e| ConfigError::Invalid(format!("{what}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [class]
        id = 1
        [grid]
        u = [0.2, 1.0]
        v = [0.2, 1.0]
        n = 9
        [boundary]
        kind = "dirichlet"
        value = "u + v"
    "#;

    #[test]
    fn minimal_config_validates_with_defaults() {
        let cfg: RunConfig = toml::from_str(MINIMAL).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.solver, SolverSection::default());
        assert_eq!(cfg.reconstruct.mode, ReconstructMode::StronglyRegular);
        assert_eq!(cfg.grid().unwrap().shape(), (9, 9));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("n = 9", "n = 9\nspacing = 2");
        assert!(toml::from_str::<RunConfig>(&text).is_err());
        assert!(toml::from_str::<RunConfig>(&format!("{MINIMAL}\n[extra]\nx = 1")).is_err());
    }

    #[test]
    fn cauchy_needs_velocity_and_expressions_must_parse() {
        let cfg: RunConfig = toml::from_str(&MINIMAL.replace("\"dirichlet\"", "\"cauchy\"")).unwrap();
        assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))));
        let cfg: RunConfig = toml::from_str(&MINIMAL.replace("u + v", "u +")).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn levels_keep_the_aspect_ratio() {
        let g = GridConfig { u: [0.0, 1.0], v: [0.0, 2.0], n: None, nu: Some(5), nv: Some(9) };
        assert_eq!(g.build(Some(17)).unwrap().shape(), (17, 33));
        let bad = GridConfig { nv: Some(8), ..g };
        assert!(bad.build(Some(17)).is_err());
    }

    #[test]
    fn relation_forms_are_exclusive() {
        let lin = RelationConfig { alpha: Some(1.0), ..Default::default() };
        assert_eq!(lin.coefficients().unwrap(), Coefficients::Linear([1.0, 0.0, 0.0, 0.0]));
        let both = RelationConfig { a: Some(2.0), ..lin.clone() };
        assert!(both.coefficients().is_err());
        assert!(RelationConfig::default().coefficients().is_err());
        let frac = RelationConfig { a: Some(1.0), d: Some(1.0), ..Default::default() };
        assert_eq!(frac.coefficients().unwrap().relation(), Err(wsurf::Error::Umbilic));
    }
}
