//! Membership tests for the operator classes.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{kernel, kernel_with_reference, loewner_leq_with_scale, spectral_norm, ComplexMatrix, Tolerances};

/// A flag together with the residual it was decided on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub holds: bool,
    pub residual: f64,
}

impl Membership {
    fn new(holds: bool, residual: f64) -> Self {
        Self { holds, residual }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiMembership {
    pub m: usize,
    pub holds: bool,
    /// `‖T*^{m+1}T^{m+1} − T*^m T^m‖_F`.
    pub residual: f64,
}

/// Class flags of one operator. Residual meanings:
/// contraction `‖T‖ − 1`; pure contraction `dim N(I − T*T)`;
/// isometry `‖T*T − I‖_F`; unitary the larger of `‖T*T − I‖_F`, `‖TT* − I‖_F`;
/// symmetry `‖T − T*‖_F` (on top of unitary); partial isometry `‖(T*T)² − T*T‖_F`;
/// hyponormal the minimum eigenvalue of `T*T − TT*`; self-adjoint `‖T − T*‖_F`;
/// 2-isometry `‖T*²T² − 2T*T + I‖_F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMembership {
    pub contraction: Membership,
    pub pure_contraction: Membership,
    pub isometry: Membership,
    pub unitary: Membership,
    pub symmetry: Membership,
    pub partial_isometry: Membership,
    pub hyponormal: Membership,
    pub self_adjoint: Membership,
    pub nilpotent_order: Option<usize>,
    pub quasi_isometry: Vec<QuasiMembership>,
    pub two_isometry: Membership,
    /// Covariance of a Brownian isometry; never positive in finite dimension.
    pub brownian_sigma: Option<f64>,
}

impl ClassMembership {
    pub fn quasi(&self, m: usize) -> Option<&QuasiMembership> {
        self.quasi_isometry.iter().find(|q| q.m == m)
    }
}

/// `T*^k T^k`.
pub(crate) fn gram_power(t: &ComplexMatrix, k: usize) -> ComplexMatrix {
    t.pow(k).gram()
}

pub(crate) fn quasi_residual(t: &ComplexMatrix, m: usize) -> f64 {
    gram_power(t, m + 1).dist_fro(&gram_power(t, m))
}

pub(crate) fn two_isometry_residual(t: &ComplexMatrix) -> f64 {
    let n = t.rows();
    let expr = &(&gram_power(t, 2) - &t.gram().scale(2.0)) + &ComplexMatrix::identity(n);
    expr.norm_fro()
}

/// Slack for an expression homogeneous of degree `k` in `T`.
fn slack(tol: &Tolerances, scale: f64, k: i32) -> f64 {
    tol.eq * scale.powi(k)
}

pub fn classify(t: &ComplexMatrix, m_list: &[usize], tol: &Tolerances) -> Result<ClassMembership> {
    t.ensure_square()?;
    let n = t.rows();
    let id = ComplexMatrix::identity(n);
    let norm = spectral_norm(t);
    let scale = norm.max(1.0);
    let gram = t.gram().hermitian_part();
    let co_gram = t.co_gram().hermitian_part();

    let asym = t.asymmetry_fro();
    let self_adjoint = Membership::new(asym <= tol.eq * t.norm_fro(), asym);

    let iso_res = gram.dist_fro(&id);
    let mut isometry = Membership::new(iso_res <= slack(tol, scale, 2), iso_res);
    let co_res = co_gram.dist_fro(&id);

    let pi_res = (&gram * &gram).dist_fro(&gram);
    let partial_isometry = Membership::new(pi_res <= slack(tol, scale, 4), pi_res);
    if partial_isometry.holds && kernel(t, tol)?.is_zero() {
        isometry.holds = true;
    }
    let unitary_res = iso_res.max(co_res);
    // Square matrices: an isometry is onto.
    let unitary = Membership::new(isometry.holds, unitary_res);
    let symmetry = Membership::new(unitary.holds && self_adjoint.holds, asym);

    let contraction = Membership::new(norm <= 1.0 + tol.psd || isometry.holds, norm - 1.0);
    let defect_dim = kernel_with_reference(&(&id - &gram), 1.0, tol)?.dim();
    let pure_contraction = Membership::new(contraction.holds && defect_dim == 0, defect_dim as f64);

    let hypo = loewner_leq_with_scale(&co_gram, &gram, scale * scale, tol)?;
    let hyponormal = Membership::new(hypo.holds, hypo.defect);

    let mut nilpotent_order = None;
    let mut power = t.clone();
    for k in 1..=n {
        if power.norm_fro() <= tol.eq * norm.powi(k as i32) {
            nilpotent_order = Some(k);
            break;
        }
        power = &power * t;
    }

    let quasi_isometry = m_list
        .iter()
        .map(|&m| {
            let residual = quasi_residual(t, m);
            QuasiMembership { m, holds: residual <= slack(tol, scale, 2 * (m as i32 + 1)), residual }
        })
        .collect();

    let two_res = two_isometry_residual(t);
    let two_isometry = Membership::new(two_res <= slack(tol, scale, 4), two_res);

    let brownian_sigma = if two_isometry.holds {
        crate::props::brownian_decompose(t, tol).ok().map(|b| b.sigma)
    } else {
        None
    };

    Ok(ClassMembership {
        contraction,
        pure_contraction,
        isometry,
        unitary,
        symmetry,
        partial_isometry,
        hyponormal,
        self_adjoint,
        nilpotent_order,
        quasi_isometry,
        two_isometry,
        brownian_sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn nilpotent_two_by_two() {
        let t = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let c = classify(&t, &[1, 2], &tol()).unwrap();
        assert!(c.partial_isometry.holds);
        assert_eq!(c.nilpotent_order, Some(2));
        assert!(!c.hyponormal.holds);
        assert!(c.contraction.holds && !c.pure_contraction.holds);
        assert!(!c.isometry.holds && !c.unitary.holds);
        // T² = 0 makes it an m-quasi-isometry for m ≥ 2 but not m = 1.
        assert!(!c.quasi(1).unwrap().holds);
        assert!(c.quasi(2).unwrap().holds);
    }

    #[test]
    fn idempotent_is_one_quasi_isometry() {
        let t = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let c = classify(&t, &[1], &tol()).unwrap();
        assert!(c.quasi(1).unwrap().holds);
        assert!(!c.contraction.holds);
        assert!((c.contraction.residual - (2f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn unitary_is_everything_isometric() {
        let s = 0.5f64.sqrt();
        let u = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c64(s, 0.0),
            (0, 1) => c64(0.0, s),
            (1, 0) => c64(0.0, s),
            _ => c64(s, 0.0),
        });
        let c = classify(&u, &[1, 2, 3, 4], &tol()).unwrap();
        assert!(c.unitary.holds && c.isometry.holds && c.contraction.holds);
        assert!(c.quasi_isometry.iter().all(|q| q.holds));
        assert!(c.two_isometry.holds);
        assert!(!c.symmetry.holds);
        assert_eq!(c.brownian_sigma, None);
    }

    #[test]
    fn symmetry_implications() {
        let c = classify(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0, 1.0]), &[], &tol()).unwrap();
        assert!(c.symmetry.holds && c.unitary.holds && c.isometry.holds && c.contraction.holds);
        assert!(c.hyponormal.holds && c.self_adjoint.holds && c.partial_isometry.holds);
        assert_eq!(c.nilpotent_order, None);
    }

    #[test]
    fn zero_and_pure() {
        let c = classify(&ComplexMatrix::zeros(3, 3), &[1], &tol()).unwrap();
        assert_eq!(c.nilpotent_order, Some(1));
        assert!(c.pure_contraction.holds && c.partial_isometry.holds);
        let c = classify(&ComplexMatrix::from_real_diagonal(&[0.5, -0.25]), &[], &tol()).unwrap();
        assert!(c.pure_contraction.holds && !c.partial_isometry.holds);
    }
}
