//! Commutative differential graded algebras.
//!
//! [`FiniteCdga`] covers finite-dimensional algebras given by structure
//! constants (cohomology algebras, models of `X`). [`SullivanAlgebra`] covers
//! free algebras `ΛV` given by the differential of each generator (models of
//! `Y`). [`ChainRetract`] is the deformation retract of a finite complex onto
//! its homology obtained from a splitting `C = U ⊕ dU ⊕ H`.

pub(crate) mod finite;
pub(crate) mod retract;
pub(crate) mod sullivan;

pub use finite::{tensor_product, AlgebraMorphism, FiniteCdga};
pub use retract::{harmonious_decomposition, ChainRetract, HomotopyRetract};
pub use sullivan::{
    is_minimal, two_stage_split, wordlength_parts, Monomial, Polynomial, SullivanAlgebra,
};

use crate::error::Result;

/// Cohomology of `a` as a CDGA with zero differential. Classes are
/// represented by the retract's chosen cocycles and multiplied through them.
pub fn cohomology(a: &FiniteCdga) -> Result<FiniteCdga> {
    a.validate()?;
    let retract = harmonious_decomposition(a)?;
    Ok(retract.cohomology_algebra())
}
