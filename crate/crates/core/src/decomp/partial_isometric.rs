//! The largest `T`-invariant subspace on which a contraction is a partial isometry.

use serde::{Deserialize, Serialize};

use super::blocks::{ensure_contraction, partial_isometry_residual, BlockDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{compress, kernel, kernel_with_reference, ComplexMatrix, Subspace, Tolerances};

/// Residuals of the defining properties of `M`, all expected at rounding level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxSubspaceResiduals {
    /// `N(T) ⊆ M`.
    pub kernel_in_m: f64,
    /// `M ⊆ N(T) ⊕ N(I − T*T)`.
    pub m_in_upper: f64,
    /// `‖P_{M⊥}·T|_M‖_F`.
    pub invariance: f64,
    /// `‖(W*W)² − W*W‖_F`.
    pub w_partial_isometry: f64,
    /// `‖W*R‖_F`.
    pub w_star_r: f64,
    /// `N(I − Q*Q) ⊆ N(I − T*T)`.
    pub q_defect_in_k: f64,
}

impl MaxSubspaceResiduals {
    pub fn worst(&self) -> f64 {
        [self.kernel_in_m, self.m_in_upper, self.invariance, self.w_partial_isometry, self.w_star_r, self.q_defect_in_k]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxPartialIsometricResult {
    pub m: Subspace,
    /// `H₀ = N(T)`.
    pub h0: Subspace,
    /// `H₁ ⊆ N(I − T*T)`, with `M = H₀ ⊕ H₁`.
    pub h1: Subspace,
    /// `H₂ = M⊥`.
    pub h2: Subspace,
    /// `N(I − T*T)`.
    pub k: Subspace,
    /// Closure of `R(T*T − (T*T)²)`.
    pub h_prime: Subspace,
    /// Form `[[W, R], [0, Q]]` on `M ⊕ M⊥`.
    pub two_block: BlockDecomposition,
    /// Form on `H₀ ⊕ H₁ ⊕ H₂`.
    pub three_block: BlockDecomposition,
    /// `N(I − Q*Q)` embedded in the ambient space.
    pub q_defect: Subspace,
    /// `N(T) ⊕ N(I − T*T) = M ⊕ N(I − Q*Q)`, decided by `N(I − T*T) ∩ M⊥ ⊆ N(R)`.
    pub eq22_holds: bool,
    /// `‖R·P‖_F` over an orthonormal basis of `N(I − T*T) ∩ M⊥`.
    pub eq22_residual: f64,
    /// `T(N(T) ⊕ N(I − T*T)) ⊆ N(T) ⊕ N(I − T*T)`.
    pub n_sum_invariant: bool,
    pub n_sum_residual: f64,
    pub q_pure: bool,
    /// Refinement passes after the first that still shrank `H₁`.
    pub refinement_steps: usize,
    pub residuals: MaxSubspaceResiduals,
}

impl MaxPartialIsometricResult {
    pub fn w(&self) -> &ComplexMatrix {
        self.two_block.block(0, 0)
    }

    pub fn r(&self) -> &ComplexMatrix {
        self.two_block.block(0, 1)
    }

    pub fn q(&self) -> &ComplexMatrix {
        self.two_block.block(1, 1)
    }
}

/// `(N(T), N(I − T*T))` with the rank cutoffs used throughout.
pub(crate) fn kernel_and_defect(t: &ComplexMatrix, tol: &Tolerances) -> Result<(Subspace, Subspace)> {
    let n = t.rows();
    let gram = t.gram().hermitian_part();
    let h0 = kernel(t, tol)?;
    let k = kernel_with_reference(&(&ComplexMatrix::identity(n) - &gram), 1.0, tol)?;
    Ok((h0, k))
}

/// `H′ = R(T*T − (T*T)²)`, taken as `(N(T) ⊕ N(I − T*T))⊥` so that a singular
/// value near the rank cutoff cannot fall between the kernel tests on `σ` and `σ²`.
fn defect_complement(h0: &Subspace, k: &Subspace, tol: &Tolerances) -> Result<Subspace> {
    h0.sum(k, tol)?.complement(tol)
}

/// `‖P_{S⊥}·T|_S‖_F`.
pub(crate) fn invariance_residual(t: &ComplexMatrix, s: &Subspace, tol: &Tolerances) -> Result<f64> {
    let perp = s.complement(tol)?;
    Ok(compress(t, s, &perp)?.norm_fro())
}

pub fn max_partial_isometric_subspace(t: &ComplexMatrix, tol: &Tolerances) -> Result<MaxPartialIsometricResult> {
    let norm = ensure_contraction(t, tol)?;
    let n = t.rows();
    let scale = norm.max(1.0);
    let limit = tol.eq * scale;
    let (h0, k) = kernel_and_defect(t, tol)?;
    let h_prime = defect_complement(&h0, &k, tol)?;

    // H₁ is the largest L ⊆ K with T·L ⊆ N(T) ⊕ L. The first pass is the
    // kernel of P_{H′}·T|_K; a single pass is not invariant in general
    // (weighted shifts with a unit weight followed by a smaller one), so the
    // step is repeated until the dimension stabilizes.
    let mut h1 = k.clone();
    let mut refinement_steps = 0;
    for pass in 0..=n {
        let target = h0.sum(&h1, tol)?.complement(tol)?;
        let step = compress(t, &h1, &target)?;
        let inner = kernel_with_reference(&step, scale, tol)?;
        if inner.dim() == h1.dim() {
            break;
        }
        h1 = h1.lift(&inner)?;
        if pass > 0 {
            refinement_steps += 1;
        }
    }

    let m = h0.sum(&h1, tol)?;
    let h2 = m.complement(tol)?;
    let two_block = BlockDecomposition::new(t, vec![m.clone(), h2.clone()], &["M", "M⊥"])?;
    let three_block =
        BlockDecomposition::new(t, vec![h0.clone(), h1.clone(), h2.clone()], &["H0=N(T)", "H1", "H2=M⊥"])?;

    let w = two_block.block(0, 0);
    let r = two_block.block(0, 1);
    let q = two_block.block(1, 1);
    let q_gram = q.gram().hermitian_part();
    let q_defect_inner = kernel_with_reference(&(&ComplexMatrix::identity(q.cols()) - &q_gram), 1.0, tol)?;
    let q_defect = h2.lift(&q_defect_inner)?;
    let q_pure = q_defect.is_zero();

    let upper = h0.sum(&k, tol)?;
    let n_sum_residual = invariance_residual(t, &upper, tol)?;
    let n_sum_invariant = n_sum_residual <= limit;

    // N(I − T*T) ∩ M⊥ ⊆ N(R), with R acting on M⊥ coordinates.
    let k_perp = k.intersect(&h2, tol)?;
    let eq22_residual = if k_perp.is_zero() {
        0.0
    } else {
        let coords = &h2.basis().adjoint() * k_perp.basis();
        (r * &coords).norm_fro()
    };
    let eq22_holds = eq22_residual <= limit;

    let residuals = MaxSubspaceResiduals {
        kernel_in_m: h0.containment_residual(&m)?,
        m_in_upper: m.containment_residual(&upper)?,
        invariance: two_block.block(1, 0).norm_fro(),
        w_partial_isometry: partial_isometry_residual(w),
        w_star_r: (&w.adjoint() * r).norm_fro(),
        q_defect_in_k: q_defect.containment_residual(&k)?,
    };
    if residuals.worst() > tol.eq.sqrt() * scale {
        return Err(Error::StructureMismatch(format!(
            "maximal partial-isometric subspace residual {:.3e}",
            residuals.worst()
        )));
    }

    Ok(MaxPartialIsometricResult {
        m,
        h0,
        h1,
        h2,
        k,
        h_prime,
        two_block,
        three_block,
        q_defect,
        eq22_holds,
        eq22_residual,
        n_sum_invariant,
        n_sum_residual,
        q_pure,
        refinement_steps,
        residuals,
    })
}

/// Form on `N(T) ⊕ N(I − T*T) ⊕ H′` with `H′` the closure of `R(T*T − (T*T)²)`.
pub fn three_block_form_23(t: &ComplexMatrix, tol: &Tolerances) -> Result<BlockDecomposition> {
    ensure_contraction(t, tol)?;
    let n = t.rows();
    let (h0, k) = kernel_and_defect(t, tol)?;
    let h_prime = defect_complement(&h0, &k, tol)?;
    let total = h0.dim() + k.dim() + h_prime.dim();
    if total != n {
        return Err(Error::SpanMismatch { total, ambient: n });
    }
    let residual = h0.sum(&k, tol)?.sum(&h_prime, tol)?.complement(tol)?;
    if !residual.is_zero() {
        return Err(Error::SpanMismatch { total: n - residual.dim(), ambient: n });
    }
    BlockDecomposition::new(t, vec![h0, k, h_prime], &["N(T)", "N(I-T*T)", "H'"])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn dist(a: &Subspace, b: &Subspace) -> f64 {
        a.distance(b).unwrap()
    }

    #[test]
    fn symmetry_is_all_of_m() {
        let r = max_partial_isometric_subspace(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0]), &tol()).unwrap();
        assert!(r.m.is_full());
        assert_eq!(r.q().rows(), 0);
        assert!(r.q_pure && r.eq22_holds && r.n_sum_invariant);
    }

    #[test]
    fn strict_contraction_scalar() {
        let r = max_partial_isometric_subspace(&ComplexMatrix::from_real_diagonal(&[0.5]), &tol()).unwrap();
        assert!(r.m.is_zero());
        assert!(r.q_pure);
    }

    #[test]
    fn three_by_three_example() {
        let t = ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.5], &[0.0, 0.0, 0.0]]);
        let r = max_partial_isometric_subspace(&t, &tol()).unwrap();
        assert!(dist(&r.m, &Subspace::coordinate(3, &[0, 1])) < 1e-12);
        assert!(dist(&r.h1, &Subspace::coordinate(3, &[0])) < 1e-12);
        assert!(dist(&r.h_prime, &Subspace::coordinate(3, &[2])) < 1e-12);
        // W*W is the projection onto H₁ = span{e₁} inside M.
        let pw = &(r.m.basis() * &r.w().gram()) * &r.m.basis().adjoint();
        assert!(pw.dist_fro(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0])) < 1e-12);
        // R maps e₃ to e₂/2.
        let r_ambient = r.m.basis() * &(r.r() * &r.h2.basis().adjoint());
        let expected = ComplexMatrix::from_fn(3, 3, |i, j| if (i, j) == (1, 2) { c64(0.5, 0.0) } else { c64(0.0, 0.0) });
        assert!(r_ambient.dist_fro(&expected) < 1e-12);
        assert!(r.q().norm_fro() < 1e-14);
        assert!(r.residuals.w_star_r < 1e-14);
        assert!(r.q_pure && r.n_sum_invariant);
        assert!(r.residuals.worst() < 1e-12);
    }

    #[test]
    fn one_pass_is_refined_on_weighted_shift() {
        // e₁ → e₂ → e₃ → e₄/2 → 0: the first pass keeps e₁, but T·e₁ = e₂ leaves N(T) ⊕ span{e₁}.
        let t = ComplexMatrix::from_fn(4, 4, |i, j| match (i, j) {
            (1, 0) | (2, 1) => c64(1.0, 0.0),
            (3, 2) => c64(0.5, 0.0),
            _ => c64(0.0, 0.0),
        });
        let r = max_partial_isometric_subspace(&t, &tol()).unwrap();
        assert!(dist(&r.m, &Subspace::coordinate(4, &[3])) < 1e-12);
        assert!(r.h1.is_zero());
        assert_eq!(r.refinement_steps, 1);
        assert!(r.residuals.invariance < 1e-14);
        assert!(!r.q_pure && !r.n_sum_invariant);
    }

    #[test]
    fn not_a_contraction() {
        let t = ComplexMatrix::from_real_diagonal(&[2.0]);
        assert!(matches!(max_partial_isometric_subspace(&t, &tol()), Err(Error::NotContraction { .. })));
        assert!(matches!(three_block_form_23(&t, &tol()), Err(Error::NotContraction { .. })));
    }

    #[test]
    fn form_23_examples() {
        let d = three_block_form_23(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0]), &tol()).unwrap();
        assert_eq!(d.dims(), vec![0, 2, 0]);

        let t = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let d = three_block_form_23(&t, &tol()).unwrap();
        assert_eq!(d.dims(), vec![1, 1, 0]);
        assert!(dist(&d.parts[0], &Subspace::coordinate(2, &[0])) < 1e-12);
        assert!((d.block(0, 1).get(0, 0).norm() - 1.0).abs() < 1e-12);
        assert!(d.block(0, 0).norm_fro() < 1e-14 && d.block(1, 0).norm_fro() < 1e-14);

        let d = three_block_form_23(&ComplexMatrix::from_real_diagonal(&[0.5]), &tol()).unwrap();
        assert_eq!(d.dims(), vec![0, 0, 1]);
        assert!((d.block(2, 2).get(0, 0).re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn pure_q_does_not_force_invariant_sum() {
        // T e₁ = 0, T e₂ = (e₁ + e₃)/√2, T e₃ = e₂/2. Then N(T) = span{e₁},
        // N(I − T*T) = span{e₂}, and T e₂ leaves their sum, so M = span{e₁}.
        // On M⊥ = span{e₂, e₃}, Q = [[0, 1/2], [1/√2, 0]] has norm 1/√2.
        let s = 0.5f64.sqrt();
        let t = ComplexMatrix::from_real_rows(&[&[0.0, s, 0.0], &[0.0, 0.0, 0.5], &[0.0, s, 0.0]]);
        let r = max_partial_isometric_subspace(&t, &tol()).unwrap();
        assert!(r.m.distance(&Subspace::coordinate(3, &[0])).unwrap() < 1e-12);
        assert!(r.q_pure && !r.n_sum_invariant && !r.eq22_holds);
    }
}
