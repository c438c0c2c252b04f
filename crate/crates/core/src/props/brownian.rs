//! 2-isometries and the Brownian block form.
//!
//! In finite dimension every 2-isometry is unitary, so the positive-covariance
//! branch is only ever reached through its rejection paths.

use crate::error::{Error, Result};
use crate::linalg::{compress, kernel_with_reference, spectral_norm, ComplexMatrix, Subspace, Tolerances};
use crate::props::classes::two_isometry_residual;

/// `T = [[V, σE], [0, U]]` on `N(T*T − I) ⊕ R(T*T − I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianDecomposition {
    pub sigma: f64,
    pub h0: Subspace,
    pub h1: Subspace,
    pub v: ComplexMatrix,
    pub e: ComplexMatrix,
    pub u: ComplexMatrix,
}

struct Split {
    h0: Subspace,
    h1: Subspace,
    scale: f64,
}

fn defect_split(t: &ComplexMatrix, tol: &Tolerances) -> Result<Split> {
    let n = t.rows();
    let scale = spectral_norm(t).max(1.0);
    let d = &t.gram().hermitian_part() - &ComplexMatrix::identity(n);
    let h0 = kernel_with_reference(&d, scale * scale, tol)?;
    let h1 = h0.complement(tol)?;
    Ok(Split { h0, h1, scale })
}

fn ensure_two_isometry(t: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    t.ensure_square()?;
    let scale = spectral_norm(t).max(1.0);
    let residual = two_isometry_residual(t);
    if residual > tol.eq * scale.powi(4) {
        return Err(Error::NotTwoIsometry { residual });
    }
    Ok(())
}

fn mismatch(what: &str, residual: f64, limit: f64) -> Result<()> {
    if residual > limit {
        return Err(Error::StructureMismatch(format!("{what}: residual {residual:.3e} exceeds {limit:.3e}")));
    }
    Ok(())
}

pub fn brownian_decompose(t: &ComplexMatrix, tol: &Tolerances) -> Result<BrownianDecomposition> {
    ensure_two_isometry(t, tol)?;
    let n = t.rows();
    let d = &t.gram().hermitian_part() - &ComplexMatrix::identity(n);
    let sigma_sq = spectral_norm(&d);
    let split = defect_split(t, tol)?;
    // σ itself would amplify rounding noise by a square root.
    if sigma_sq <= tol.eq * split.scale * split.scale {
        return Err(Error::SigmaZero);
    }
    let sigma = sigma_sq.sqrt();
    let limit = tol.eq * split.scale * split.scale;
    let Split { h0, h1, .. } = split;

    mismatch("lower-left block", compress(t, &h0, &h1)?.norm_fro(), limit)?;
    let v = compress(t, &h0, &h0)?;
    let e = compress(t, &h1, &h0)?.scale(1.0 / sigma);
    let u = compress(t, &h1, &h1)?;
    mismatch("V isometric", v.gram().dist_fro(&ComplexMatrix::identity(v.cols())), limit)?;
    mismatch("U unitary", u.gram().dist_fro(&ComplexMatrix::identity(u.cols())), limit)?;
    mismatch("U unitary", u.co_gram().dist_fro(&ComplexMatrix::identity(u.rows())), limit)?;
    mismatch("R(E) in N(V*)", (&v.adjoint() * &e).norm_fro(), limit)?;
    let ee = e.gram();
    mismatch("U commutes with E*E", (&u * &ee).dist_fro(&(&ee * &u)), limit)?;
    Ok(BrownianDecomposition { sigma, h0, h1, v, e, u })
}

/// Block form `[[S, R], [0, Q]]` of a 2-isometry on `N(T*T − I) ⊕ R(T*T − I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoIsometryStructure {
    pub h0: Subspace,
    pub h1: Subspace,
    pub s: ComplexMatrix,
    pub r: ComplexMatrix,
    pub q: ComplexMatrix,
    /// `‖P_{h1}·T|_{h0}‖_F`.
    pub lower_left_residual: f64,
    /// `‖S*S − I‖_F`.
    pub s_isometry_residual: f64,
    /// `‖S*R‖_F`.
    pub s_star_r_residual: f64,
    /// `‖Q*DQ − D‖_F` with `D = R*R + Q*Q − I`.
    pub identity_residual: f64,
    /// `D` is injective on `h1` (vacuous when `h1 = {0}`).
    pub d_injective: bool,
}

pub fn two_isometry_structure(t: &ComplexMatrix, tol: &Tolerances) -> Result<TwoIsometryStructure> {
    ensure_two_isometry(t, tol)?;
    let Split { h0, h1, scale } = defect_split(t, tol)?;
    let s = compress(t, &h0, &h0)?;
    let r = compress(t, &h1, &h0)?;
    let q = compress(t, &h1, &h1)?;
    let lower_left_residual = compress(t, &h0, &h1)?.norm_fro();
    let s_isometry_residual = s.gram().dist_fro(&ComplexMatrix::identity(s.cols()));
    let s_star_r_residual = (&s.adjoint() * &r).norm_fro();
    let d = &(&r.gram() + &q.gram()) - &ComplexMatrix::identity(q.cols());
    let identity_residual = (&(&q.adjoint() * &d) * &q).dist_fro(&d);
    let d_injective = kernel_with_reference(&d, scale * scale, tol)?.is_zero();
    Ok(TwoIsometryStructure {
        h0,
        h1,
        s,
        r,
        q,
        lower_left_residual,
        s_isometry_residual,
        s_star_r_residual,
        identity_residual,
        d_injective,
    })
}
