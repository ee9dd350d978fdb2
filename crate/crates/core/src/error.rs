use thiserror::Error;

/// Errors raised across the surface toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameters are not principal: max|F| = {max_f:.3e}, max|M| = {max_m:.3e}")]
    NotPrincipal { max_f: f64, max_m: f64 },

    #[error("field too close to zero for a starred operator ({value:.3e} at node ({i}, {j}))")]
    SingularField { i: usize, j: usize, value: f64 },

    #[error("solver did not converge after {iterations} iterations (best residual {best_residual:.3e})")]
    NonConvergence { iterations: usize, best_residual: f64 },

    #[error("CFL condition violated: h_v = {h_v:.3e} exceeds the stable bound {bound:.3e}")]
    Cfl { h_v: f64, bound: f64 },

    #[error("operator {0} is not supported by this solver: {1}")]
    OperatorType(String, String),

    #[error("invalid parameters: {0}")]
    Param(String),

    #[error("invariants are incompatible: path discrepancy {discrepancy:.3e} exceeds {tolerance:.3e}")]
    Compatibility { discrepancy: f64, tolerance: f64 },

    #[error("frame drift {drift:.3e} before renormalization at node ({i}, {j})")]
    FrameDrift { i: usize, j: usize, drift: f64 },

    #[error("offset a = {a} hits the focal set: |1 - a nu| = {margin:.3e}")]
    SingularOffset { a: f64, margin: f64 },

    #[error("degenerate linear relation: alpha^2 - beta^2 + 4 gamma delta = {0}")]
    DegenerateRelation(f64),

    #[error("umbilic relation excluded (A = D, B = C = 0)")]
    Umbilic,

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
