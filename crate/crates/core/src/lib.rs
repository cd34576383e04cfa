//! Exact tools for valuated Δ-matroids on the vertices of the 0-1 cube.
//!
//! The crate is organised bottom-up:
//!
//! * [`cube`] – subsets of `[n]`, cube faces, the hyperoctahedral group and
//!   convex circuit representations of cube points.
//! * [`delta`] – Δ-matroid axioms, polytope edges and rank functions.
//! * [`subdivision`] – exact LP face tests, the local 3- and 4-face
//!   certificates, the full checker, cell enumeration and cone dimensions.
//! * [`field`] – computable valued fields with involution.
//! * [`repr`] – principal minors, determinantal polynomials, Rayleigh
//!   differences and the representability constructions.
//!
//! Everything is exact: rationals are `BigRational`, field elements are
//! canonical rational functions, and no floating point is used in any
//! decision procedure.

pub mod cube;
pub mod delta;
pub mod error;
pub mod exec;
pub mod field;
pub mod hull;
pub mod linalg;
pub mod lp;
pub mod rat;
pub mod repr;
pub mod subdivision;

pub use error::{Error, Result};

/// Library version embedded in machine-readable reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
