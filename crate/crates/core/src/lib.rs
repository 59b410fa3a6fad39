//! Convex hulls of compact group orbits: membership tests, support
//! functions, boundary polynomials and a PSD feasibility solver.

mod error;
pub mod linalg;
pub mod majorization;
pub mod trigpoly;
pub mod verdict;
pub mod matrix_orbitopes;
pub mod feasibility;
pub mod moment;
pub mod grassmann;
pub mod poly;
pub mod boundary;
pub mod sylvester;

pub use error::{Error, Result};
