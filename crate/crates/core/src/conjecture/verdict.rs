//! The verdict on a single operator: does `|T| ≤ |Re T|` hold, and which known
//! result explains the resulting self-adjointness.

use serde::{Deserialize, Serialize};

use crate::decomp::{canonical_form_37, quasi_isometry_structure};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, spectral_norm, ComplexMatrix, Tolerances};
use crate::props::{classify, fong_tsui_check_with, operator_functions, ConditionReport};

/// Theorem branches that force self-adjointness under the condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum Branch {
    /// `TT* ≤ T*T`.
    Hyponormal,
    /// `T/‖T‖` is a partial isometry.
    ScaledPartialIsometry,
    /// Contraction with `T*^{m+1}T^{m+1} = T*^m T^m`, `m ∈ {1, 2}`.
    ContractiveQuasiIsometry { m: usize },
    /// Isometric-part form with `R` injective or `Q² = 0`.
    IsometricBlockForm,
    /// `T*T ≥ I` with an isometric `S`, `S*R = 0`, `Q` contractive.
    ExpansiveBlockForm,
    /// `T` commutes with the polar symmetry of `Re T`.
    MortadCommutation,
    /// Holds for every operator on a finite-dimensional space.
    FiniteDimension,
}

impl Branch {
    pub fn describe(&self) -> String {
        match self {
            Branch::Hyponormal => "hyponormal".into(),
            Branch::ScaledPartialIsometry => "real multiple of a partial isometry".into(),
            Branch::ContractiveQuasiIsometry { m } => format!("contractive {m}-quasi-isometry"),
            Branch::IsometricBlockForm => "isometric block form, R injective or Q^2 = 0".into(),
            Branch::ExpansiveBlockForm => "expansive block form with S*R = 0 and Q contractive".into(),
            Branch::MortadCommutation => "commutes with the polar symmetry of Re T".into(),
            Branch::FiniteDimension => "finite dimension".into(),
        }
    }
}

/// A branch whose hypothesis (other than the condition itself) holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub branch: Branch,
    /// Residual of the hypothesis check, in the units of the underlying operation.
    pub residual: f64,
}

/// Outcome of rerunning at tightened tolerances near the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Recheck {
    pub factor: f64,
    pub fong_tsui_holds: bool,
    pub fong_tsui_defect: f64,
    pub self_adjoint: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub condition: ConditionReport,
    pub self_adjoint: bool,
    /// Applicable branches, in declaration order. When the condition fails this
    /// lists what would have applied had it held.
    pub certificates: Vec<Certificate>,
    /// Set when the condition holds but `T ≠ T*`, or a branch check raised a violation.
    pub soundness_violation: Option<String>,
    /// Unit eigenvector of `|Re T| − |T|` for its smallest eigenvalue.
    pub violated_direction: Option<ComplexMatrix>,
    pub recheck: Option<Recheck>,
}

impl Verdict {
    pub fn has(&self, branch: Branch) -> bool {
        self.certificates.iter().any(|c| c.branch == branch)
    }

    pub fn is_sound(&self) -> bool {
        self.soundness_violation.is_none()
    }
}

const RECHECK_FACTOR: f64 = 100.0;

pub fn verdict(t: &ComplexMatrix, tol: &Tolerances) -> Result<Verdict> {
    t.ensure_square()?;
    let f = operator_functions(t, tol)?;
    let condition = fong_tsui_check_with(t, &f, tol)?;
    if f.norm == 0.0 {
        return Ok(Verdict {
            condition,
            self_adjoint: true,
            certificates: vec![Certificate { branch: Branch::FiniteDimension, residual: 0.0 }],
            soundness_violation: None,
            violated_direction: None,
            recheck: None,
        });
    }
    let mut violation = None;
    let certificates = certificates(t, f.norm, &condition, tol, &mut violation)?;
    if condition.fong_tsui_holds && !condition.self_adjoint && violation.is_none() {
        violation = Some(format!(
            "condition holds (defect {:.3e}) but asymmetry is {:.3e}",
            condition.fong_tsui_defect, condition.asymmetry
        ));
    }

    let violated_direction = if condition.fong_tsui_holds {
        None
    } else {
        hermitian_eig(&(&f.abs_real_part - &f.modulus).hermitian_part(), tol)?.min_eigenvector()
    };

    let slack = condition.fong_tsui_slack;
    let near = condition.fong_tsui_defect < -slack && condition.fong_tsui_defect > -10.0 * slack;
    let recheck = if near || violation.is_some() {
        let tight = tol.tightened(RECHECK_FACTOR);
        let c = fong_tsui_check_with(t, &operator_functions(t, &tight)?, &tight)?;
        Some(Recheck {
            factor: RECHECK_FACTOR,
            fong_tsui_holds: c.fong_tsui_holds,
            fong_tsui_defect: c.fong_tsui_defect,
            self_adjoint: c.self_adjoint,
        })
    } else {
        None
    };

    Ok(Verdict {
        self_adjoint: condition.self_adjoint,
        condition,
        certificates,
        soundness_violation: violation,
        violated_direction,
        recheck,
    })
}

fn certificates(
    t: &ComplexMatrix,
    norm: f64,
    condition: &ConditionReport,
    tol: &Tolerances,
    violation: &mut Option<String>,
) -> Result<Vec<Certificate>> {
    let mut out = Vec::new();
    let mut push = |branch, residual| out.push(Certificate { branch, residual });
    let scale = norm.max(1.0);
    let limit = tol.eq * scale;
    let classes = classify(t, &[1, 2], tol)?;

    if classes.hyponormal.holds {
        push(Branch::Hyponormal, (-classes.hyponormal.residual).max(0.0));
    }
    let unit = classify(&t.scale(1.0 / norm), &[], tol)?;
    if unit.partial_isometry.holds {
        push(Branch::ScaledPartialIsometry, unit.partial_isometry.residual);
    }
    if classes.contraction.holds {
        for q in classes.quasi_isometry.iter().filter(|q| q.holds) {
            match quasi_isometry_structure(t, q.m, tol) {
                Ok(_) => push(Branch::ContractiveQuasiIsometry { m: q.m }, q.residual),
                Err(Error::TheoremViolation(msg)) => *violation = Some(msg),
                // A numerically borderline split; the branch just does not certify.
                Err(_) => {}
            }
        }
    }

    let form = canonical_form_37(t, tol)?;
    let fl = &form.flags;
    let form_residual = fl.s_isometry_residual.max(fl.lower_left_residual / scale);
    if form_residual <= limit && (fl.r_injective || fl.q_square_zero) {
        push(Branch::IsometricBlockForm, form_residual);
    }
    let s = form.s();
    let s_iso = s.gram().dist_fro(&ComplexMatrix::identity(s.cols()));
    let s_star_r = (&s.adjoint() * form.r()).norm_fro();
    let expansive_residual = s_iso.max(s_star_r).max(fl.lower_left_residual);
    if fl.expansive && spectral_norm(form.q()) <= 1.0 + tol.psd && expansive_residual <= limit * scale {
        push(Branch::ExpansiveBlockForm, expansive_residual);
    }

    if condition.mortad_commutes {
        push(Branch::MortadCommutation, condition.mortad_residual);
    }
    push(Branch::FiniteDimension, 0.0);
    Ok(out)
}
