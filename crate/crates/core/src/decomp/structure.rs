//! Kernel structure of contractions with `|T| ≤ |Re T|`, and the refined five-part split.

use serde::{Deserialize, Serialize};

use super::blocks::{ensure_contraction, BlockDecomposition};
use super::partial_isometric::kernel_and_defect;
use crate::error::{Error, Result};
use crate::linalg::{compress, kernel_with_reference, hermitian_abs, ComplexMatrix, Subspace, Tolerances};
use crate::props::{fong_tsui_check, ConditionReport};

/// One pairwise comparison of subspaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubspaceComparison {
    pub equal: bool,
    /// Projector distance `‖P₁ − P₂‖_F`.
    pub distance: f64,
}

impl SubspaceComparison {
    fn of(a: &Subspace, b: &Subspace, tol: &Tolerances) -> Result<Self> {
        let distance = a.distance(b)?;
        Ok(Self { equal: distance <= tol.eq, distance })
    }
}

/// `T = U ⊕ Z` on `N(I − T*T) ⊕ N(I − T*T)⊥`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSplit {
    pub u: ComplexMatrix,
    pub z: ComplexMatrix,
    /// Largest off-diagonal block norm.
    pub off_diagonal: f64,
    pub u_symmetry: bool,
    pub z_pure: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem31Report {
    pub condition: ConditionReport,
    pub condition_holds: bool,
    /// `N(I − T*T)`, `N(I − TT*)` and `N(I − |Re T|)`.
    pub defect_kernels: [Subspace; 3],
    /// Comparisons (0,1), (0,2), (1,2) of `defect_kernels`.
    pub kernel_equalities: [SubspaceComparison; 3],
    /// Compression of `T` to `N(I − T*T)`.
    pub symmetry_part: ComplexMatrix,
    /// `‖S − S*‖_F` and `‖S² − I‖_F` for the symmetry part.
    pub symmetry_residuals: (f64, f64),
    /// Largest block coupling `N(I − T*T)` with its complement.
    pub reducing_residual: f64,
    /// `N(Re T) = N(T) ∩ N(T*)`.
    pub re_kernel_identity: SubspaceComparison,
    /// `N(T*) = N(Re T) ⊕ (N(T*) ∩ N(T)⊥)`.
    pub n_tstar_split: SubspaceComparison,
    pub n_re: Subspace,
    pub n_t: Subspace,
    pub n_tstar: Subspace,
    /// Present when `N(T) = N(Re T)`.
    pub diag_split: Option<DiagonalSplit>,
    /// Form on `H₁ ⊕ H₀ ⊕ H₂` with `H₁ = N(I − T*T)`, `H₀ = N(T)`.
    pub form_41: BlockDecomposition,
    /// Largest block that must vanish in that form.
    pub form_41_residual: f64,
}

/// Blocks of `[[W₁, 0, 0], [0, 0, R₀], [0, 0, Q]]` that vanish.
const FORM_41_ZEROS: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 1), (2, 0), (2, 1)];

pub fn theorem31_structure(t: &ComplexMatrix, tol: &Tolerances) -> Result<Theorem31Report> {
    let norm = ensure_contraction(t, tol)?;
    let n = t.rows();
    let scale = norm.max(1.0);
    let limit = tol.eq * scale;
    let id = ComplexMatrix::identity(n);
    let condition = fong_tsui_check(t, tol)?;
    let (n_t, k1) = kernel_and_defect(t, tol)?;
    let k2 = kernel_with_reference(&(&id - &t.co_gram().hermitian_part()), 1.0, tol)?;
    let abs_re = hermitian_abs(&t.hermitian_part(), tol)?;
    let k3 = kernel_with_reference(&(&id - &abs_re), 1.0, tol)?;
    let kernel_equalities =
        [SubspaceComparison::of(&k1, &k2, tol)?, SubspaceComparison::of(&k1, &k3, tol)?, SubspaceComparison::of(&k2, &k3, tol)?];

    let k1_perp = k1.complement(tol)?;
    let symmetry_part = compress(t, &k1, &k1)?;
    let sym_id = ComplexMatrix::identity(symmetry_part.rows());
    let symmetry_residuals = (symmetry_part.asymmetry_fro(), (&symmetry_part * &symmetry_part).dist_fro(&sym_id));
    let reducing_residual = compress(t, &k1, &k1_perp)?.norm_fro().max(compress(t, &k1_perp, &k1)?.norm_fro());

    let n_re = kernel_with_reference(&t.hermitian_part(), scale, tol)?;
    let n_tstar = kernel_with_reference(&t.adjoint(), scale, tol)?;
    let re_kernel_identity = SubspaceComparison::of(&n_re, &n_t.intersect(&n_tstar, tol)?, tol)?;
    let tail = n_tstar.intersect(&n_t.complement(tol)?, tol)?;
    let n_tstar_split = SubspaceComparison::of(&n_tstar, &n_re.sum(&tail, tol)?, tol)?;

    let diag_split = if n_t.equals(&n_re, tol)? {
        let u = symmetry_part.clone();
        let z = compress(t, &k1_perp, &k1_perp)?;
        let u_id = ComplexMatrix::identity(u.rows());
        let u_symmetry = u.asymmetry_fro() <= limit && (&u * &u).dist_fro(&u_id) <= limit;
        let z_defect = kernel_with_reference(&(&ComplexMatrix::identity(z.cols()) - &z.gram()), 1.0, tol)?;
        Some(DiagonalSplit { u, z, off_diagonal: reducing_residual, u_symmetry, z_pure: z_defect.is_zero() })
    } else {
        None
    };

    let h2 = k1.sum(&n_t, tol)?.complement(tol)?;
    let form_41 = BlockDecomposition::new(t, vec![k1.clone(), n_t.clone(), h2], &["H1=N(I-T*T)", "H0=N(T)", "H2"])?;
    let form_41_residual = form_41.zero_pattern_residual(&FORM_41_ZEROS);

    let report = Theorem31Report {
        condition_holds: condition.fong_tsui_holds,
        condition,
        defect_kernels: [k1, k2, k3],
        kernel_equalities,
        symmetry_part,
        symmetry_residuals,
        reducing_residual,
        re_kernel_identity,
        n_tstar_split,
        n_re,
        n_t,
        n_tstar,
        diag_split,
        form_41,
        form_41_residual,
    };
    if report.condition_holds {
        assert_theorem31(&report, limit)?;
    }
    Ok(report)
}

fn violation(what: &str) -> Result<()> {
    Err(Error::TheoremViolation(what.to_string()))
}

fn assert_theorem31(r: &Theorem31Report, limit: f64) -> Result<()> {
    if !r.kernel_equalities.iter().all(|c| c.equal) {
        return violation("defect kernels of T*T, TT* and |Re T| differ");
    }
    if r.symmetry_residuals.0 > limit || r.symmetry_residuals.1 > limit {
        return violation("compression to N(I - T*T) is not a symmetry");
    }
    if r.reducing_residual > limit {
        return violation("N(I - T*T) does not reduce T");
    }
    if !r.re_kernel_identity.equal {
        return violation("N(Re T) differs from N(T) ∩ N(T*)");
    }
    if !r.n_tstar_split.equal {
        return violation("N(T*) does not split over N(Re T)");
    }
    if let Some(d) = &r.diag_split {
        if !(d.u_symmetry && d.z_pure) {
            return violation("diagonal split U ⊕ Z fails");
        }
    }
    if r.form_41_residual > limit {
        return violation("zero pattern of the H1 ⊕ H0 ⊕ H2 form");
    }
    Ok(())
}

/// Five-part refinement `H₁ ⊕ N(Re T) ⊕ N(Q*) ⊕ H₀′ ⊕ R(Q)` and the induced form of `T*`.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedDecomposition {
    pub decomposition: BlockDecomposition,
    /// `T*` on `H₁ ⊕ N(T*) ⊕ H₃` with `H₃ = H₀′ ⊕ R(Q)`.
    pub adjoint_form: BlockDecomposition,
    /// `R✱`, the block of `T*` from `H₃` to `N(T*)`.
    pub r_star: ComplexMatrix,
    /// `Q✱`, the block of `T*` from `H₃` to itself.
    pub q_star: ComplexMatrix,
    pub pattern_residual: f64,
    pub adjoint_pattern_residual: f64,
    /// `N(T*) = N(Re T) ⊕ N(Q*)`.
    pub n_tstar_split: SubspaceComparison,
}

impl RefinedDecomposition {
    pub fn w1(&self) -> &ComplexMatrix {
        self.decomposition.block(0, 0)
    }
    pub fn r00(&self) -> &ComplexMatrix {
        self.decomposition.block(3, 2)
    }
    pub fn r01(&self) -> &ComplexMatrix {
        self.decomposition.block(3, 4)
    }
    pub fn q0(&self) -> &ComplexMatrix {
        self.decomposition.block(4, 2)
    }
    pub fn q1(&self) -> &ComplexMatrix {
        self.decomposition.block(4, 4)
    }
}

/// Nonzero blocks of the five-part form of `T`.
const REFINED_NONZERO: [(usize, usize); 5] = [(0, 0), (3, 2), (3, 4), (4, 2), (4, 4)];
const ADJOINT_ZEROS: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 1), (2, 0), (2, 1)];

pub fn refined_decomposition_41(t: &ComplexMatrix, tol: &Tolerances) -> Result<RefinedDecomposition> {
    let norm = ensure_contraction(t, tol)?;
    let condition = fong_tsui_check(t, tol)?;
    if !condition.fong_tsui_holds {
        return Err(Error::ConditionFails { defect: condition.fong_tsui_defect });
    }
    let scale = norm.max(1.0);
    let limit = tol.eq * scale;
    let (n_t, h1) = kernel_and_defect(t, tol)?;
    let n_re = kernel_with_reference(&t.hermitian_part(), scale, tol)?;
    let h2 = h1.sum(&n_t, tol)?.complement(tol)?;
    let q = compress(t, &h2, &h2)?;
    let n_qstar = h2.lift(&kernel_with_reference(&q.adjoint(), scale, tol)?)?;
    let range_q = h2.lift(&kernel_with_reference(&q.adjoint(), scale, tol)?.complement(tol)?)?;
    let h0_prime = n_t.minus(&n_re, tol)?;

    let decomposition = BlockDecomposition::new(
        t,
        vec![h1.clone(), n_re.clone(), n_qstar.clone(), h0_prime.clone(), range_q.clone()],
        &["H1", "N(Re T)", "N(Q*)", "H0'", "R(Q)"],
    )?;
    let zeros: Vec<(usize, usize)> =
        (0..5).flat_map(|i| (0..5).map(move |j| (i, j))).filter(|p| !REFINED_NONZERO.contains(p)).collect();
    let pattern_residual = decomposition.zero_pattern_residual(&zeros);

    let n_tstar_computed = n_re.sum(&n_qstar, tol)?;
    let h3 = h0_prime.sum(&range_q, tol)?;
    let adjoint = t.adjoint();
    let adjoint_form =
        BlockDecomposition::new(&adjoint, vec![h1, n_tstar_computed.clone(), h3], &["H1", "N(T*)", "H3"])?;
    let adjoint_pattern_residual = adjoint_form.zero_pattern_residual(&ADJOINT_ZEROS);
    let n_tstar = kernel_with_reference(&adjoint, scale, tol)?;
    let n_tstar_split = SubspaceComparison::of(&n_tstar, &n_tstar_computed, tol)?;

    // R✱ and Q✱ in the sub-bases (N(Re T), N(Q*)) and (H₀′, R(Q)).
    let src = [&h0_prime, &range_q];
    let r_star = ComplexMatrix::from_blocks(&[
        src.iter().map(|s| compress(&adjoint, s, &n_re)).collect::<Result<Vec<_>>>()?,
        src.iter().map(|s| compress(&adjoint, s, &n_qstar)).collect::<Result<Vec<_>>>()?,
    ]);
    let q_star = ComplexMatrix::from_blocks(&[
        src.iter().map(|s| compress(&adjoint, s, &h0_prime)).collect::<Result<Vec<_>>>()?,
        src.iter().map(|s| compress(&adjoint, s, &range_q)).collect::<Result<Vec<_>>>()?,
    ]);

    if pattern_residual > limit || adjoint_pattern_residual > limit {
        return Err(Error::TheoremViolation(format!(
            "five-part zero pattern residual {:.3e}, adjoint {:.3e}",
            pattern_residual, adjoint_pattern_residual
        )));
    }
    if !n_tstar_split.equal {
        return Err(Error::TheoremViolation("N(T*) differs from N(Re T) ⊕ N(Q*)".into()));
    }
    Ok(RefinedDecomposition {
        decomposition,
        adjoint_form,
        r_star,
        q_star,
        pattern_residual,
        adjoint_pattern_residual,
        n_tstar_split,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn diagonal_satisfier() {
        let t = ComplexMatrix::from_real_diagonal(&[1.0, -1.0, 0.5]);
        let r = theorem31_structure(&t, &tol()).unwrap();
        assert!(r.condition_holds);
        let e12 = Subspace::coordinate(3, &[0, 1]);
        for k in &r.defect_kernels {
            assert!(k.distance(&e12).unwrap() < 1e-12);
        }
        assert!(r.symmetry_part.dist_fro(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])) < 1e-12);
        let d = r.diag_split.as_ref().unwrap();
        assert!((d.z.get(0, 0).re - 0.5).abs() < 1e-12 && d.z.rows() == 1);
        assert!(d.u_symmetry && d.z_pure);
    }

    #[test]
    fn zero_operator() {
        let r = theorem31_structure(&ComplexMatrix::zeros(2, 2), &tol()).unwrap();
        assert!(r.condition_holds);
        assert!(r.defect_kernels.iter().all(Subspace::is_zero));
        assert!(r.n_re.is_full() && r.n_t.is_full());
    }

    #[test]
    fn nilpotent_kernels_differ() {
        let t = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let r = theorem31_structure(&t, &tol()).unwrap();
        assert!(!r.condition_holds);
        assert!(r.defect_kernels[0].distance(&Subspace::coordinate(2, &[1])).unwrap() < 1e-12);
        assert!(r.defect_kernels[1].distance(&Subspace::coordinate(2, &[0])).unwrap() < 1e-12);
        assert!(!r.kernel_equalities[0].equal);
    }

    #[test]
    fn refined_examples() {
        let d = refined_decomposition_41(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0, 0.0]), &tol()).unwrap();
        assert_eq!(d.decomposition.dims(), vec![2, 1, 0, 0, 0]);
        assert!(d.decomposition.parts[0].distance(&Subspace::coordinate(3, &[0, 1])).unwrap() < 1e-12);

        let d = refined_decomposition_41(&ComplexMatrix::zeros(2, 2), &tol()).unwrap();
        assert_eq!(d.decomposition.dims(), vec![0, 2, 0, 0, 0]);

        let t = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(refined_decomposition_41(&t, &tol()), Err(Error::ConditionFails { .. })));
    }

    #[test]
    fn refined_hermitian_has_no_coupling() {
        let t = ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.3, 0.2, 0.0], &[0.0, 0.2, -0.4, 0.0], &[0.0, 0.0, 0.0, 0.0]]);
        let d = refined_decomposition_41(&t, &tol()).unwrap();
        assert!(d.r00().norm_fro() < 1e-12 && d.q0().norm_fro() < 1e-12);
        assert_eq!(d.decomposition.dims(), vec![1, 1, 0, 0, 2]);
        assert!(d.decomposition.reconstruction_residual(&t) < 1e-12);
    }
}
