//! Subspace constructions and block forms of contractions.

mod asymptotic;
mod blocks;
mod canonical;
mod partial_isometric;
mod quasi;
mod structure;

pub use asymptotic::{asymptotic_limit, AsymptoticLimit};
pub use blocks::{BlockDecomposition, BlockSummary};
pub use canonical::{canonical_form_37, form_39_check, CanonicalFlags, CanonicalForm, Form39Report};
pub use partial_isometric::{
    max_partial_isometric_subspace, three_block_form_23, MaxPartialIsometricResult, MaxSubspaceResiduals,
};
pub use quasi::{quasi_isometry_structure, QuasiIsometryStructure};
pub use structure::{
    refined_decomposition_41, theorem31_structure, DiagonalSplit, RefinedDecomposition, SubspaceComparison,
    Theorem31Report,
};
