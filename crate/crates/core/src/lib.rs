//! Computable Lorentzian pre-length spaces: finite causal structures and
//! sampled continuous exemplars, with checkers for the axioms, τ-lengths,
//! geodesics, triangle-comparison curvature bounds, extensions, boundaries
//! and timelike completeness.

pub mod bitmatrix;
pub mod curvature;
pub mod curves;
pub mod extension;
pub mod io;
pub mod ext_real;
pub mod models;
pub mod paths;
pub mod space;
pub mod spaces;
pub mod tolerance;

pub use ext_real::ExtReal;
pub use space::{PointId, SpaceDescription, SpaceError};
