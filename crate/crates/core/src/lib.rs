//! Polynomial lattice point sets over `F_p` built by reduced
//! component-by-component construction, with tools to evaluate their quality
//! and weighted star discrepancy.

pub mod bounds;
pub mod cbc;
pub mod character;
pub mod discrepancy;
pub mod error;
pub mod fieldpoly;
pub mod pointset;
pub mod quality;
pub mod vector_file;

pub use error::{Error, Result};
pub use fieldpoly::{Modulus, ModulusKind, Poly};
pub use pointset::PointSet;
pub use quality::{GeneratingVector, WeightSystem};
