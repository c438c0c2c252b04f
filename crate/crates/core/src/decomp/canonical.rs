//! Isometric-part block forms `[[S, R], [0, Q]]` and the two-partial-isometry form.

use serde::{Deserialize, Serialize};

use super::asymptotic::asymptotic_limit;
use super::blocks::{ensure_contraction, partial_isometry_residual, BlockDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{
    compress, kernel_with_reference, loewner_leq_with_scale, spectral_norm, ComplexMatrix, Subspace, Tolerances,
};
use crate::props::fong_tsui_check;

/// Flags attached to the form on `N(I − S_{T₀}) ⊕ R(I − S_{T₀})`, `T₀ = T/‖T‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalFlags {
    /// `R` injective on `G⊥` (vacuous when `G⊥ = {0}`).
    pub r_injective: bool,
    /// `‖Q²‖_F ≤ tol.eq·‖T‖²`.
    pub q_square_zero: bool,
    /// Least `m ≤ dim G⊥` with `Q^m ≈ 0`.
    pub q_nilpotent_order: Option<usize>,
    /// `I ≤ T*T`.
    pub expansive: bool,
    /// `S*R = 0`.
    pub s_star_r_zero: bool,
    /// `‖Q‖ ≤ 1`.
    pub q_contraction: bool,
    /// `R` is a partial isometry.
    pub r_partial_isometry: bool,
    /// `‖S/‖T‖‖` isometric residual.
    pub s_isometry_residual: f64,
    /// `‖P_{G⊥}·T|_G‖_F`.
    pub lower_left_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    pub g: Subspace,
    pub decomposition: BlockDecomposition,
    pub flags: CanonicalFlags,
}

impl CanonicalForm {
    pub fn s(&self) -> &ComplexMatrix {
        self.decomposition.block(0, 0)
    }
    pub fn r(&self) -> &ComplexMatrix {
        self.decomposition.block(0, 1)
    }
    pub fn q(&self) -> &ComplexMatrix {
        self.decomposition.block(1, 1)
    }
}

pub fn canonical_form_37(t: &ComplexMatrix, tol: &Tolerances) -> Result<CanonicalForm> {
    t.ensure_square()?;
    let norm = spectral_norm(t);
    if norm == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let t0 = t.scale(1.0 / norm);
    let g = asymptotic_limit(&t0, tol)?.max_isometric;
    let g_perp = g.complement(tol)?;
    let decomposition = BlockDecomposition::new(t, vec![g.clone(), g_perp.clone()], &["G=N(I-S_T0)", "G⊥"])?;
    let s = decomposition.block(0, 0);
    let r = decomposition.block(0, 1);
    let q = decomposition.block(1, 1);
    let scale = norm.max(1.0);
    let limit = tol.eq * scale * scale;

    let r_injective = kernel_with_reference(r, norm, tol)?.is_zero();
    let q_square_zero = (q * q).norm_fro() <= limit;
    let mut q_nilpotent_order = None;
    let mut power = ComplexMatrix::identity(q.rows());
    for m in 1..=q.rows() {
        power = &power * q;
        if power.norm_fro() <= tol.eq * norm.powi(m as i32) {
            q_nilpotent_order = Some(m);
            break;
        }
    }
    let id = ComplexMatrix::identity(t.rows());
    let expansive = loewner_leq_with_scale(&id, &t.gram().hermitian_part(), scale * scale, tol)?.holds;
    let s_unit = s.scale(1.0 / norm);
    let flags = CanonicalFlags {
        r_injective,
        q_square_zero,
        q_nilpotent_order,
        expansive,
        s_star_r_zero: (&s.adjoint() * r).norm_fro() <= limit,
        q_contraction: spectral_norm(q) <= 1.0 + tol.psd,
        r_partial_isometry: partial_isometry_residual(r) <= limit,
        s_isometry_residual: s_unit.gram().dist_fro(&ComplexMatrix::identity(s.cols())),
        lower_left_residual: decomposition.block(1, 0).norm_fro(),
    };
    Ok(CanonicalForm { g, decomposition, flags })
}

/// `[[W, R], [0, W′]]` on `G ⊕ G⊥` for an invariant `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct Form39Report {
    pub w: ComplexMatrix,
    pub w_prime: ComplexMatrix,
    pub r: ComplexMatrix,
    /// Both diagonal blocks are partial isometries.
    pub form_holds: bool,
    /// Both diagonal blocks are `‖T‖` times partial isometries.
    pub scaled_form_holds: bool,
    pub condition_holds: bool,
    pub self_adjoint: bool,
}

pub fn form_39_check(t: &ComplexMatrix, g: &Subspace, tol: &Tolerances) -> Result<Form39Report> {
    let norm = ensure_contraction(t, tol)?;
    let scale = norm.max(1.0);
    let limit = tol.eq * scale;
    let g_perp = g.complement(tol)?;
    let residual = compress(t, g, &g_perp)?.norm_fro();
    if residual > limit {
        return Err(Error::NotInvariant { residual });
    }
    let w = compress(t, g, g)?;
    let w_prime = compress(t, &g_perp, &g_perp)?;
    let r = compress(t, &g_perp, g)?;
    let pi = |a: &ComplexMatrix| partial_isometry_residual(a) <= limit;
    let form_holds = pi(&w) && pi(&w_prime);
    let scaled_form_holds = norm > 0.0 && pi(&w.scale(1.0 / norm)) && pi(&w_prime.scale(1.0 / norm));
    let condition = fong_tsui_check(t, tol)?;
    let report = Form39Report {
        w,
        w_prime,
        r,
        form_holds,
        scaled_form_holds,
        condition_holds: condition.fong_tsui_holds,
        self_adjoint: condition.self_adjoint,
    };
    if (form_holds || scaled_form_holds) && report.condition_holds && !report.self_adjoint {
        return Err(Error::TheoremViolation("partial-isometry block form satisfies the condition but is not self-adjoint".into()));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn unitary_is_all_isometric() {
        let c = canonical_form_37(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0]), &tol()).unwrap();
        assert!(c.g.is_full());
        assert_eq!(c.r().cols(), 0);
        assert_eq!(c.q().rows(), 0);
    }

    #[test]
    fn diagonal_canonical_form() {
        let c = canonical_form_37(&ComplexMatrix::from_real_diagonal(&[1.0, 0.5]), &tol()).unwrap();
        assert!(c.g.distance(&Subspace::coordinate(2, &[0])).unwrap() < 1e-12);
        assert!((c.s().get(0, 0).norm() - 1.0).abs() < 1e-12);
        assert!(c.r().norm_fro() < 1e-12);
        assert!((c.q().get(0, 0).norm() - 0.5).abs() < 1e-12);
        assert!(!c.flags.r_injective && !c.flags.q_square_zero);
    }

    #[test]
    fn nilpotent_lands_in_q() {
        let t = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let c = canonical_form_37(&t, &tol()).unwrap();
        assert!(c.g.is_zero());
        assert!(c.q().dist_fro(&t) < 1e-14);
        assert!(c.flags.q_square_zero);
        assert_eq!(c.flags.q_nilpotent_order, Some(2));
        assert_eq!(canonical_form_37(&ComplexMatrix::zeros(2, 2), &tol()), Err(Error::ZeroOperator));
    }

    #[test]
    fn form_39_examples() {
        let t = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let r = form_39_check(&t, &Subspace::coordinate(2, &[0]), &tol()).unwrap();
        assert!(r.w.norm_fro() < 1e-15 && r.w_prime.norm_fro() < 1e-15);
        assert!((r.r.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!(r.form_holds && !r.condition_holds);

        let s = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let r = form_39_check(&s, &Subspace::full(2), &tol()).unwrap();
        assert!(r.w.dist_fro(&s) < 1e-15 && r.form_holds && r.self_adjoint);

        let h = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        let r = form_39_check(&h, &Subspace::coordinate(2, &[0]), &tol()).unwrap();
        assert!(!r.form_holds);

        assert!(matches!(form_39_check(&t, &Subspace::coordinate(2, &[1]), &tol()), Err(Error::NotInvariant { .. })));
    }
}
