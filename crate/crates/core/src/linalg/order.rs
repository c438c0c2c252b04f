use serde::{Deserialize, Serialize};

use super::eigen::{check_hermitian, hermitian_eig, spectral_norm};
use super::matrix::ComplexMatrix;
use super::tolerances::Tolerances;
use crate::error::{Error, Result};

/// Outcome of a Loewner comparison `A ≤ B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoewnerOutcome {
    pub holds: bool,
    /// Minimum eigenvalue of `B − A`.
    pub defect: f64,
    /// The slack the defect was compared against (`tol.psd·scale`).
    pub slack: f64,
}

/// `A ≤ B` in the Loewner order, with slack `tol.psd·max(‖A‖, ‖B‖, 1)`.
pub fn loewner_leq(a: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerances) -> Result<LoewnerOutcome> {
    check_hermitian(a, tol)?;
    check_hermitian(b, tol)?;
    let scale = spectral_norm(a).max(spectral_norm(b)).max(1.0);
    loewner_leq_with_scale(a, b, scale, tol)
}

/// Loewner comparison with a caller-supplied norm scale.
pub(crate) fn loewner_leq_with_scale(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    scale: f64,
    tol: &Tolerances,
) -> Result<LoewnerOutcome> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "Loewner comparison of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let diff = (b - a).hermitian_part();
    let eig = hermitian_eig(&diff, tol)?;
    let defect = eig.min_eigenvalue().unwrap_or(0.0);
    let slack = tol.psd * scale.max(1.0);
    Ok(LoewnerOutcome { holds: defect >= -slack, defect, slack })
}
