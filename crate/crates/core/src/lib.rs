//! Exact point counting and zeta-function reconstruction for toric
//! hypersurfaces over finite fields, together with the lattice-polytope
//! combinatorics (Hodge numbers, Hodge polygons) and Newton-polygon tools
//! needed to compare counts against their combinatorial predictions.

pub mod error;
pub mod ffield;

pub use error::{Error, Result};
pub mod cli;
pub mod counting;
pub mod intpoly;
pub mod lattice;
pub mod laurent;
pub(crate) mod linalg;
pub mod newtonpolygon;
pub mod rational;
pub mod regularity;
pub mod zetareconstruct;
