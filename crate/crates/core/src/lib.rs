//! Weingarten surfaces in Minkowski 3-space: natural-parameter PDEs,
//! numerical solvers, surface reconstruction and verification.

pub mod chart;
pub mod classify;
pub mod error;
pub mod expr;
pub mod grid;
pub mod invariants;
pub mod io;
pub mod minkowski;
pub mod parallel;
pub mod pde;
pub mod reconstruct;
pub mod verify;
pub mod weingarten;

pub use error::{Error, Result};
pub use expr::Expr;
pub use grid::{Field, Grid2};
pub use minkowski::MinkowskiVec;
pub use weingarten::{compute_ij, QuadratureResult, WeingartenPair};
pub use chart::{invariants_from_nu, metric_from_chart, NaturalChart};
pub use invariants::{check_natural_parameters, invariants_from_forms, lemma_functions, FormFields, InvariantGrid};
pub use pde::{OperatorKind, PdeForm, Signature, SolverConfig};
pub use classify::{classify, family_pde, fractional_to_linear, BasicClassDescriptor, LinearRelation};
pub use reconstruct::{integrate_frame, path_independence, Frame, ReconstructMode, SurfaceGrid};
