//! Structure of contractive m-quasi-isometries on `R(T^m) ⊕ N(T*^m)`.

use super::blocks::{ensure_contraction, BlockDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{kernel_with_reference, range_with_reference, ComplexMatrix, Tolerances};
use crate::props::classes::quasi_residual;
use crate::props::fong_tsui_check;

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiIsometryStructure {
    pub m: usize,
    pub decomposition: BlockDecomposition,
    /// `‖P_{R(T^m)} − (I − P_{N(T*^m)})‖_F`.
    pub split_residual: f64,
    pub reconstruction_residual: f64,
    /// `‖Q^m‖_F`.
    pub q_power_residual: f64,
    /// `‖S*S − I‖_F`.
    pub s_isometry_residual: f64,
    pub condition_holds: bool,
    pub self_adjoint: bool,
    /// The stronger conclusions for `m ≥ 3` were checked (and held).
    pub conclusions_checked: bool,
}

impl QuasiIsometryStructure {
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

pub fn quasi_isometry_structure(t: &ComplexMatrix, m: usize, tol: &Tolerances) -> Result<QuasiIsometryStructure> {
    let norm = ensure_contraction(t, tol)?;
    let n = t.rows();
    let scale = norm.max(1.0);
    let limit = tol.eq * scale;
    let residual = quasi_residual(t, m);
    if m == 0 || residual > tol.eq * scale.powi(2 * (m as i32 + 1)) {
        return Err(Error::NotQuasiIsometry { m, residual });
    }
    let tm = t.pow(m);
    let reference = scale.powi(m as i32);
    let g = range_with_reference(&tm, reference, tol)?;
    let tail = kernel_with_reference(&tm.adjoint(), reference, tol)?;
    let g_perp = g.complement(tol)?;
    let split_residual = tail.distance(&g_perp)?;
    if split_residual > tol.eq.sqrt() {
        return Err(Error::StructureMismatch(format!("R(T^{m}) and N(T*^{m}) are not complementary")));
    }
    let decomposition = BlockDecomposition::new(t, vec![g, g_perp], &["R(T^m)", "N(T*^m)"])?;
    let q_power_residual = decomposition.block(1, 1).pow(m).norm_fro();
    let s = decomposition.block(0, 0);
    let s_isometry_residual = s.gram().dist_fro(&ComplexMatrix::identity(s.cols()));
    let condition = fong_tsui_check(t, tol)?;
    let mut out = QuasiIsometryStructure {
        m,
        reconstruction_residual: decomposition.reconstruction_residual(t),
        decomposition,
        split_residual,
        q_power_residual,
        s_isometry_residual,
        condition_holds: condition.fong_tsui_holds,
        self_adjoint: condition.self_adjoint,
        conclusions_checked: false,
    };
    if q_power_residual > limit || out.decomposition.block(1, 0).norm_fro() > limit {
        return Err(Error::StructureMismatch(format!("Q^{m} residual {q_power_residual:.3e}")));
    }
    if out.condition_holds {
        if m >= 3 {
            assert_m_ge_3(t, &out, n, limit, tol)?;
            out.conclusions_checked = true;
        } else if !out.self_adjoint {
            return Err(Error::TheoremViolation(format!(
                "contractive {m}-quasi-isometry satisfies the condition but is not self-adjoint"
            )));
        }
    }
    Ok(out)
}

fn assert_m_ge_3(t: &ComplexMatrix, q: &QuasiIsometryStructure, n: usize, limit: f64, tol: &Tolerances) -> Result<()> {
    let id = ComplexMatrix::identity(n);
    let g = &q.decomposition.parts[0];
    let k1 = kernel_with_reference(&(&id - &t.gram().hermitian_part()), 1.0, tol)?;
    let k2 = kernel_with_reference(&(&id - &t.co_gram().hermitian_part()), 1.0, tol)?;
    if !(k1.equals(g, tol)? && k2.equals(g, tol)?) {
        return Err(Error::TheoremViolation("defect kernels differ from the closure of R(T^m)".into()));
    }
    let s = q.s();
    let s_id = ComplexMatrix::identity(s.rows());
    if s.asymmetry_fro() > limit || (s * s).dist_fro(&s_id) > limit {
        return Err(Error::TheoremViolation("S is not a symmetry".into()));
    }
    if q.r().norm_fro() > limit {
        return Err(Error::TheoremViolation("R does not vanish".into()));
    }
    // Self-adjoint exactly when the nilpotent tail vanishes.
    if q.self_adjoint != (q.q().norm_fro() <= limit) {
        return Err(Error::TheoremViolation("self-adjointness does not match Q = 0".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn symmetry_plus_zero() {
        let t = ComplexMatrix::from_real_diagonal(&[1.0, -1.0, 0.0]);
        let q = quasi_isometry_structure(&t, 3, &tol()).unwrap();
        assert!(q.s().dist_fro(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])) < 1e-12);
        assert!(q.q().norm_fro() < 1e-14);
        assert!(q.condition_holds && q.self_adjoint && q.conclusions_checked);
    }

    #[test]
    fn symmetry_plus_nilpotent() {
        let nil = ComplexMatrix::from_real_rows(&[&[0.0, 0.5], &[0.0, 0.0]]);
        let t = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]).direct_sum(&nil);
        let q = quasi_isometry_structure(&t, 3, &tol()).unwrap();
        assert!(!q.condition_holds);
        assert!(q.q().pow(3).norm_fro() < 1e-14);
        assert!(q.reconstruction_residual < 1e-12);
        assert_eq!(q.decomposition.dims(), vec![2, 2]);
    }

    #[test]
    fn scaled_idempotent() {
        // T = [[1,1],[0,0]]/√2 fails T*²T² = T*T, but (√2·T) is idempotent.
        let t = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]).scale(0.5f64.sqrt());
        assert!(matches!(quasi_isometry_structure(&t, 1, &tol()), Err(Error::NotQuasiIsometry { .. })));
        let unscaled = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(quasi_isometry_structure(&unscaled, 1, &tol()), Err(Error::NotContraction { .. })));
        // An orthogonal projection is a contractive 1-quasi-isometry.
        let p = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let q = quasi_isometry_structure(&p, 1, &tol()).unwrap();
        assert_eq!(q.decomposition.dims(), vec![1, 1]);
    }

    #[test]
    fn rejections() {
        let t = ComplexMatrix::from_real_diagonal(&[0.5, 1.0]);
        assert!(matches!(quasi_isometry_structure(&t, 2, &tol()), Err(Error::NotQuasiIsometry { m: 2, .. })));
        let big = ComplexMatrix::from_real_diagonal(&[2.0]);
        assert!(matches!(quasi_isometry_structure(&big, 1, &tol()), Err(Error::NotContraction { .. })));
    }
}
