//! Dense complex linear algebra primitives and subspace algebra.

mod eigen;
mod matrix;
mod order;
mod subspace;
mod tolerances;

pub use eigen::{
    check_hermitian, hermitian_abs, hermitian_eig, pinv, psd_sqrt, singular_values, spectral_norm, svd, HermitianEigen,
    Svd,
};
pub use matrix::{c64, ComplexMatrix, C64};
pub(crate) use order::loewner_leq_with_scale;
pub use order::{loewner_leq, LoewnerOutcome};
pub use subspace::{
    compress, kernel, kernel_with_reference, projector, range_closure, range_with_reference, restricted_norm,
    subspace_algebra, Subspace, SubspaceOp, SubspaceOutcome,
};
pub use tolerances::Tolerances;
