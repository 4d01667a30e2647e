//! Real and tropical homology of patchworked hypersurfaces, computed exactly over F2.
//!
//! The pipeline goes polytope -> primitive triangulation -> cubical subdivision
//! -> tropical cosheaves and real-lift filtrations -> spectral sequence pages
//! -> invariants of the real part.

pub mod error;
pub mod f2_linalg;
pub mod polytope;
pub mod triangulation;
pub mod cubical_complex;
pub mod tropical;
pub mod group_algebra;
pub mod spectral;
pub mod patchwork;
pub mod invariants;

pub use error::{Error, Result};
