//! Constant-dimension subspace codes: finite fields, subspaces, rank-metric
//! codes, the combining constructions, bounds and verification.

pub mod bounds;
pub mod cdc;
pub mod constructions;
pub mod error;
pub mod gf;
pub mod io;
pub mod linalg;
pub mod rankmetric;
pub mod subspace;
pub mod verify;

pub use bounds::{BoundKind, BoundResult};
pub use cdc::{Cdc, Provenance, SpreadFamily};
pub use constructions::{Imports, RecipeOutput};
pub use error::{Error, Result};
pub use gf::Field;
pub use linalg::Matrix;
pub use rankmetric::RankCodeHandle;
pub use subspace::Subspace;
pub use verify::VerificationReport;
