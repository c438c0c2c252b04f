//! Modulus, real part, the condition `|T| ≤ |Re T|` and the Douglas factor.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{
    hermitian_abs, hermitian_eig, kernel_with_reference, loewner_leq_with_scale, pinv, psd_sqrt, spectral_norm,
    ComplexMatrix, Tolerances,
};

/// Operator functions of a square `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFunctions {
    /// `|T| = (T*T)^{1/2}`.
    pub modulus: ComplexMatrix,
    /// `Re T = (T + T*)/2`.
    pub real_part: ComplexMatrix,
    /// `|Re T|`.
    pub abs_real_part: ComplexMatrix,
    /// `‖T‖ = σ_max`.
    pub norm: f64,
}

impl OperatorFunctions {
    /// `max(‖T‖, 1)`, the scale all equality slacks are measured against.
    pub fn scale(&self) -> f64 {
        self.norm.max(1.0)
    }
}

pub fn operator_functions(t: &ComplexMatrix, tol: &Tolerances) -> Result<OperatorFunctions> {
    t.ensure_square()?;
    let modulus = psd_sqrt(&t.gram().hermitian_part(), tol)?;
    let real_part = t.hermitian_part();
    let abs_real_part = hermitian_abs(&real_part, tol)?;
    Ok(OperatorFunctions { modulus, real_part, abs_real_part, norm: spectral_norm(t) })
}

/// `max(‖T‖, 1)`.
pub fn operator_scale(t: &ComplexMatrix) -> f64 {
    spectral_norm(t).max(1.0)
}

/// Polar factor of the real part: `Re T = Ũ·|Re T|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarRealPart {
    /// Symmetry on the closed range of `Re T`, zero on its kernel.
    pub u_tilde: ComplexMatrix,
    pub abs_real_part: ComplexMatrix,
    /// `‖Re T − Ũ·|Re T|‖_F`.
    pub factorization_residual: f64,
    /// Whether `N(I − |Re T|) = N(Ũ − Re T)` as subspaces.
    pub fixed_points_agree: bool,
}

pub fn polar_real_part(t: &ComplexMatrix, tol: &Tolerances) -> Result<PolarRealPart> {
    t.ensure_square()?;
    let n = t.rows();
    let re = t.hermitian_part();
    let eig = hermitian_eig(&re, tol)?;
    let cutoff = tol.rank * eig.max_abs_eigenvalue() * n.max(1) as f64;
    let sign = |l: f64| if l.abs() <= cutoff { 0.0 } else { l.signum() };
    let u_tilde = eig.apply(sign);
    let abs_real_part = eig.apply(|l| if l.abs() <= cutoff { 0.0 } else { l.abs() });
    let factorization_residual = re.dist_fro(&(&u_tilde * &abs_real_part));
    let id = ComplexMatrix::identity(n);
    let fixed_abs = kernel_with_reference(&(&id - &abs_real_part), 1.0, tol)?;
    let fixed_u = kernel_with_reference(&(&u_tilde - &re), 1.0, tol)?;
    let fixed_points_agree = fixed_abs.equals(&fixed_u, tol)?;
    Ok(PolarRealPart { u_tilde, abs_real_part, factorization_residual, fixed_points_agree })
}

/// The condition `|T| ≤ |Re T|` and its companion criteria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub fong_tsui_holds: bool,
    /// Minimum eigenvalue of `|Re T| − |T|`.
    pub fong_tsui_defect: f64,
    /// Slack the defect is compared against.
    pub fong_tsui_slack: f64,
    /// `|T|² ≤ (Re T)²`, compared at `‖T‖ = 1` with slack `tol.psd`.
    pub fong_istratescu_holds: bool,
    pub fong_istratescu_defect: f64,
    pub self_adjoint: bool,
    /// `‖T − T*‖_F / ‖T‖_F`.
    pub asymmetry: f64,
    /// `T` commutes with the polar symmetry `Ũ` of `Re T`.
    pub mortad_commutes: bool,
    /// `‖T·Ũ − Ũ·T‖_F`.
    pub mortad_residual: f64,
}

pub fn fong_tsui_check(t: &ComplexMatrix, tol: &Tolerances) -> Result<ConditionReport> {
    let f = operator_functions(t, tol)?;
    fong_tsui_check_with(t, &f, tol)
}

/// Same as [`fong_tsui_check`] reusing precomputed operator functions.
pub fn fong_tsui_check_with(t: &ComplexMatrix, f: &OperatorFunctions, tol: &Tolerances) -> Result<ConditionReport> {
    let scale = f.scale();
    let ft = loewner_leq_with_scale(&f.modulus, &f.abs_real_part, scale, tol)?;
    let re_sq = (&f.real_part * &f.real_part).hermitian_part();
    // Both sides are quadratic in T, so the comparison runs at ‖T‖ = 1; an
    // absolute slack would accept any small enough operator.
    let norm_sq = if f.norm > 0.0 { f.norm * f.norm } else { 1.0 };
    let fi = loewner_leq_with_scale(
        &t.gram().hermitian_part().scale(1.0 / norm_sq),
        &re_sq.scale(1.0 / norm_sq),
        1.0,
        tol,
    )?;
    let self_adjoint = t.asymmetry_fro() <= tol.eq * t.norm_fro();
    let polar = polar_real_part(t, tol)?;
    let mortad_residual = (t * &polar.u_tilde).dist_fro(&(&polar.u_tilde * t));
    Ok(ConditionReport {
        fong_tsui_holds: ft.holds,
        fong_tsui_defect: ft.defect,
        fong_tsui_slack: ft.slack,
        fong_istratescu_holds: fi.holds,
        fong_istratescu_defect: fi.defect * norm_sq,
        self_adjoint,
        asymmetry: t.relative_asymmetry(),
        mortad_commutes: mortad_residual <= tol.eq * scale,
        mortad_residual,
    })
}

/// Minimal-norm solution of `A·|Re T|^{1/2} = |T|^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DouglasFactor {
    pub a: ComplexMatrix,
    pub norm_a: f64,
    /// `‖A·|Re T|^{1/2} − |T|^{1/2}‖_F`.
    pub residual: f64,
    /// Residual within `tol.eq·scale`, i.e. the range inclusion holds.
    pub range_condition: bool,
    /// `‖A‖ ≤ 1 + tol.psd`.
    pub contractive: bool,
}

impl DouglasFactor {
    /// A contractive exact factor exists, which is equivalent to `|T| ≤ |Re T|`.
    pub fn certifies_condition(&self) -> bool {
        self.range_condition && self.contractive
    }
}

pub fn douglas_factor(t: &ComplexMatrix, tol: &Tolerances) -> Result<DouglasFactor> {
    let f = operator_functions(t, tol)?;
    douglas_factor_with(&f, tol)
}

pub fn douglas_factor_with(f: &OperatorFunctions, tol: &Tolerances) -> Result<DouglasFactor> {
    let root_mod = psd_sqrt(&f.modulus, tol)?;
    let root_re = psd_sqrt(&f.abs_real_part, tol)?;
    let a = &root_mod * &pinv(&root_re, tol)?;
    let residual = (&a * &root_re).dist_fro(&root_mod);
    let norm_a = spectral_norm(&a);
    Ok(DouglasFactor {
        range_condition: residual <= tol.eq * f.scale(),
        contractive: norm_a <= 1.0 + tol.psd,
        a,
        norm_a,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn nilpotent() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])
    }

    #[test]
    fn nilpotent_modulus_and_real_part() {
        let f = operator_functions(&nilpotent(), &tol()).unwrap();
        assert!(f.modulus.dist_fro(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0])) < 1e-12);
        assert!(f.abs_real_part.dist_fro(&ComplexMatrix::from_real_diagonal(&[0.5, 0.5])) < 1e-12);
        assert_abs_diff_eq!(f.norm, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn hermitian_input_has_equal_moduli() {
        let t = ComplexMatrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 1) => c64(0.3, 0.2),
            (1, 0) => c64(0.3, -0.2),
            (2, 2) => c64(-0.7, 0.0),
            (0, 0) => c64(0.1, 0.0),
            _ => c64(0.0, 0.0),
        });
        let f = operator_functions(&t, &tol()).unwrap();
        assert!(f.abs_real_part.dist_fro(&f.modulus) < 1e-12);
    }

    #[test]
    fn symmetry_satisfies_condition() {
        let r = fong_tsui_check(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0]), &tol()).unwrap();
        assert!(r.fong_tsui_holds);
        assert_abs_diff_eq!(r.fong_tsui_defect, 0.0, epsilon = 1e-14);
        assert!(r.self_adjoint && r.fong_istratescu_holds && r.mortad_commutes);
    }

    #[test]
    fn nilpotent_fails_with_half_defect() {
        // |Re T| − |T| = diag(.5, −.5)
        let r = fong_tsui_check(&nilpotent(), &tol()).unwrap();
        assert!(!r.fong_tsui_holds);
        assert_abs_diff_eq!(r.fong_tsui_defect, -0.5, epsilon = 1e-10);
        assert!(!r.self_adjoint && !r.fong_istratescu_holds);
    }

    #[test]
    fn three_cycle_fails() {
        // |T| = I while Re T has eigenvalues cos(2πk/3) = 1, −1/2, −1/2
        let p = ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let r = fong_tsui_check(&p, &tol()).unwrap();
        assert!(!r.fong_tsui_holds);
        assert_abs_diff_eq!(r.fong_tsui_defect, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn polar_examples() {
        let psd = ComplexMatrix::from_real_diagonal(&[2.0, 0.0, 0.5]);
        let p = polar_real_part(&psd, &tol()).unwrap();
        assert!(p.u_tilde.dist_fro(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 1.0])) < 1e-14);

        let neg = polar_real_part(&ComplexMatrix::from_real_diagonal(&[-3.0]), &tol()).unwrap();
        assert_abs_diff_eq!(neg.u_tilde.get(0, 0).re, -1.0, epsilon = 1e-15);

        // T = [[0, I], [0, 0]] on C² ⊕ C²
        let t = ComplexMatrix::from_fn(4, 4, |i, j| if j == i + 2 { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
        let p = polar_real_part(&t, &tol()).unwrap();
        let swap = ComplexMatrix::from_fn(4, 4, |i, j| if i + 2 == j || j + 2 == i { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
        assert!(p.u_tilde.dist_fro(&swap) < 1e-12);
        let tu = &t * &p.u_tilde;
        let ut = &p.u_tilde * &t;
        assert!(tu.dist_fro(&ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0, 0.0])) < 1e-12);
        assert!(ut.dist_fro(&ComplexMatrix::from_real_diagonal(&[0.0, 0.0, 1.0, 1.0])) < 1e-12);
        assert!(p.factorization_residual < 1e-12);
        assert!(p.fixed_points_agree);
    }

    #[test]
    fn douglas_examples() {
        let h = ComplexMatrix::from_real_diagonal(&[0.5, -1.0, 0.0]);
        let d = douglas_factor(&h, &tol()).unwrap();
        assert!(d.a.dist_fro(&ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0])) < 1e-10);
        assert!(d.certifies_condition());

        // |T|^{1/2} = diag(0, 1), |Re T|^{1/2} = I/√2
        let d = douglas_factor(&nilpotent(), &tol()).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[0.0, 2f64.sqrt()]);
        assert!(d.a.dist_fro(&expected) < 1e-12);
        assert_abs_diff_eq!(d.norm_a, 2f64.sqrt(), epsilon = 1e-12);
        assert!(d.range_condition && !d.contractive);

        let z = douglas_factor(&ComplexMatrix::zeros(2, 2), &tol()).unwrap();
        assert_eq!(z.norm_a, 0.0);
        assert!(z.certifies_condition());
    }
}
