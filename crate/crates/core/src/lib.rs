//! Exact rational-homotopy computations for mapping spaces `map(X, Y)`
//! where `Y` has a two-stage minimal Sullivan model.

pub mod cdga;
pub mod dsl;
pub mod error;
pub mod graded;
pub mod linfty;
pub mod mapspace;
pub mod qlinalg;
pub mod random;
pub mod report;
pub mod transfer;

pub use error::{Error, Result};
