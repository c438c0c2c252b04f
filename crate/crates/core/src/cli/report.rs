//! The versioned analysis report written by `analyze`.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::io::{sha256_hex, MatrixFile};
use crate::conjecture::{verdict, Branch, Recheck};
use crate::decomp::{
    max_partial_isometric_subspace, theorem31_structure, BlockSummary, MaxSubspaceResiduals, SubspaceComparison,
};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, singular_values, ComplexMatrix, Tolerances};
use crate::props::{classify, fong_tsui_check_with, operator_functions, polar_real_part, ClassMembership, ConditionReport};

pub const REPORT_SCHEMA: &str = "fongtsui.analysis";
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub version: u32,
    pub input_sha256: String,
    pub dim: usize,
    pub tolerances: Tolerances,
    pub operator: OperatorSummary,
    pub condition: ConditionReport,
    pub classes: ClassMembership,
    pub polar: PolarSummary,
    pub max_partial_isometric: Section<MaxPartialIsometricSummary>,
    pub theorem31: Section<Theorem31Summary>,
    pub verdict: VerdictSummary,
    /// Seconds per stage; only present when requested, since it breaks byte-for-byte determinism.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

/// A stage that only applies to some operators (contractions, mostly).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "result", rename_all = "snake_case")]
pub enum Section<T> {
    Computed(T),
    Skipped { reason: String },
}

impl<T> Section<T> {
    pub fn computed(&self) -> Option<&T> {
        match self {
            Section::Computed(v) => Some(v),
            Section::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSummary {
    pub norm: f64,
    pub frobenius_norm: f64,
    /// `‖T − T*‖_F / ‖T‖_F`.
    pub relative_asymmetry: f64,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// Eigenvalues of `Re T`, ascending.
    pub real_part_eigenvalues: Vec<f64>,
    /// Eigenvalues of `|Re T| − |T|`, ascending.
    pub defect_spectrum: Vec<f64>,
}

/// `Ũ` is the symmetry of the polar decomposition of `Re T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarSummary {
    pub u_tilde: MatrixFile,
    pub t_u: MatrixFile,
    pub u_t: MatrixFile,
    /// `‖Re T − Ũ·|Re T|‖_F`.
    pub factorization_residual: f64,
    pub fixed_points_agree: bool,
    /// `‖TŨ − ŨT‖_F`.
    pub commutator: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxPartialIsometricSummary {
    pub dims: BTreeMap<String, usize>,
    pub two_block: BlockSummary,
    pub three_block: BlockSummary,
    pub eq22_holds: bool,
    pub eq22_residual: f64,
    pub n_sum_invariant: bool,
    pub n_sum_residual: f64,
    pub q_pure: bool,
    /// Dimension of `N(I − Q*Q)`; zero exactly when `Q` is pure.
    pub q_defect_dim: usize,
    pub refinement_steps: usize,
    pub residuals: MaxSubspaceResiduals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem31Summary {
    pub condition_holds: bool,
    pub dims: BTreeMap<String, usize>,
    /// `N(I − T*T)` against `N(I − TT*)`, `N(I − T*T)` against `N(I − |Re T|)`, and the last pair.
    pub kernel_equalities: [SubspaceComparison; 3],
    pub symmetry_hermitian_residual: f64,
    pub symmetry_square_residual: f64,
    pub reducing_residual: f64,
    pub re_kernel_identity: SubspaceComparison,
    pub n_tstar_split: SubspaceComparison,
    pub diag_split: Option<DiagSplitSummary>,
    pub form_41: BlockSummary,
    pub form_41_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagSplitSummary {
    pub off_diagonal: f64,
    pub u_symmetry: bool,
    pub z_pure: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateLine {
    #[serde(flatten)]
    pub branch: Branch,
    pub description: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub condition_holds: bool,
    pub self_adjoint: bool,
    pub certificates: Vec<CertificateLine>,
    pub soundness_violation: Option<String>,
    /// Unit vector, `[re, im]` per coordinate.
    pub violated_direction: Option<Vec<[f64; 2]>>,
    pub recheck: Option<Recheck>,
}

struct Stopwatch {
    enabled: bool,
    last: Instant,
    laps: BTreeMap<String, f64>,
}

impl Stopwatch {
    fn new(enabled: bool) -> Self {
        Self { enabled, last: Instant::now(), laps: BTreeMap::new() }
    }

    fn lap(&mut self, name: &str) {
        let now = Instant::now();
        self.laps.insert(name.to_string(), (now - self.last).as_secs_f64());
        self.last = now;
    }

    fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.enabled.then_some(self.laps)
    }
}

fn dims<const N: usize>(pairs: [(&str, usize); N]) -> BTreeMap<String, usize> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Contraction-only stages are skipped with the error text as the reason;
/// a theorem violation is never swallowed.
fn section<T>(r: Result<T>) -> Result<Section<T>> {
    match r {
        Ok(v) => Ok(Section::Computed(v)),
        Err(e @ Error::TheoremViolation(_)) => Err(e),
        Err(e) => Ok(Section::Skipped { reason: e.to_string() }),
    }
}

pub fn analyze(raw: &[u8], t: &ComplexMatrix, quasi_orders: &[usize], tol: &Tolerances, timings: bool) -> Result<AnalysisReport> {
    t.ensure_square()?;
    tol.validate()?;
    let mut clock = Stopwatch::new(timings);

    let f = operator_functions(t, tol)?;
    let condition = fong_tsui_check_with(t, &f, tol)?;
    let defect_spectrum = hermitian_eig(&(&f.abs_real_part - &f.modulus).hermitian_part(), tol)?.eigenvalues;
    let operator = OperatorSummary {
        norm: f.norm,
        frobenius_norm: t.norm_fro(),
        relative_asymmetry: t.relative_asymmetry(),
        singular_values: singular_values(t, tol)?,
        real_part_eigenvalues: hermitian_eig(&f.real_part, tol)?.eigenvalues,
        defect_spectrum,
    };
    clock.lap("operator_functions");

    let classes = classify(t, quasi_orders, tol)?;
    clock.lap("classify");

    let p = polar_real_part(t, tol)?;
    let t_u = t * &p.u_tilde;
    let u_t = &p.u_tilde * t;
    let polar = PolarSummary {
        commutator: t_u.dist_fro(&u_t),
        u_tilde: MatrixFile::from_matrix(&p.u_tilde),
        t_u: MatrixFile::from_matrix(&t_u),
        u_t: MatrixFile::from_matrix(&u_t),
        factorization_residual: p.factorization_residual,
        fixed_points_agree: p.fixed_points_agree,
    };
    clock.lap("polar");

    let max_partial_isometric = section(max_partial_isometric_subspace(t, tol).map(|r| MaxPartialIsometricSummary {
        dims: dims([
            ("h0", r.h0.dim()),
            ("h1", r.h1.dim()),
            ("h2", r.h2.dim()),
            ("k", r.k.dim()),
            ("h_prime", r.h_prime.dim()),
            ("m", r.m.dim()),
        ]),
        two_block: r.two_block.summary(),
        three_block: r.three_block.summary(),
        eq22_holds: r.eq22_holds,
        eq22_residual: r.eq22_residual,
        n_sum_invariant: r.n_sum_invariant,
        n_sum_residual: r.n_sum_residual,
        q_pure: r.q_pure,
        q_defect_dim: r.q_defect.dim(),
        refinement_steps: r.refinement_steps,
        residuals: r.residuals,
    }))?;
    clock.lap("max_partial_isometric");

    let theorem31 = section(theorem31_structure(t, tol).map(|r| Theorem31Summary {
        condition_holds: r.condition_holds,
        dims: dims([
            ("defect_kernel", r.defect_kernels[0].dim()),
            ("n_re", r.n_re.dim()),
            ("n_t", r.n_t.dim()),
            ("n_tstar", r.n_tstar.dim()),
        ]),
        kernel_equalities: r.kernel_equalities,
        symmetry_hermitian_residual: r.symmetry_residuals.0,
        symmetry_square_residual: r.symmetry_residuals.1,
        reducing_residual: r.reducing_residual,
        re_kernel_identity: r.re_kernel_identity,
        n_tstar_split: r.n_tstar_split,
        diag_split: r.diag_split.as_ref().map(|d| DiagSplitSummary {
            off_diagonal: d.off_diagonal,
            u_symmetry: d.u_symmetry,
            z_pure: d.z_pure,
        }),
        form_41: r.form_41.summary(),
        form_41_residual: r.form_41_residual,
    }))?;
    clock.lap("theorem31");

    let v = verdict(t, tol)?;
    let verdict = VerdictSummary {
        condition_holds: v.condition.fong_tsui_holds,
        self_adjoint: v.self_adjoint,
        certificates: v
            .certificates
            .iter()
            .map(|c| CertificateLine { branch: c.branch, description: c.branch.describe(), residual: c.residual })
            .collect(),
        soundness_violation: v.soundness_violation.clone(),
        violated_direction: v.violated_direction.as_ref().map(|d| MatrixFile::from_matrix(d).data),
        recheck: v.recheck,
    };
    clock.lap("verdict");

    Ok(AnalysisReport {
        schema: REPORT_SCHEMA.to_string(),
        version: REPORT_VERSION,
        input_sha256: sha256_hex(raw),
        dim: t.rows(),
        tolerances: *tol,
        operator,
        condition,
        classes,
        polar,
        max_partial_isometric,
        theorem31,
        verdict,
        timings: clock.finish(),
    })
}
