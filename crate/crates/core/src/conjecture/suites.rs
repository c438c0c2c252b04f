//! Theorem suites: each runs one property set over a seeded corpus and
//! aggregates pass counts, worst residuals and failing seeds.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::corpus::{corpus_item, CorpusItem, Family};
use super::verdict::verdict;
use crate::decomp::{
    asymptotic_limit, max_partial_isometric_subspace, quasi_isometry_structure, refined_decomposition_41,
    theorem31_structure, three_block_form_23, MaxPartialIsometricResult,
};
use crate::error::{Error, Result};
use crate::generators::{gaussian, shift_symmetry_pair, stream_rng, ClassKind};
use crate::linalg::{compress, hermitian_eig, range_with_reference, ComplexMatrix, Subspace, Tolerances};
use crate::par::Execution;
use crate::props::{classify, douglas_factor, fong_tsui_check, operator_scale, polar_real_part};

/// Residual bound used by every suite, relative to `max(‖T‖, 1)` to the appropriate power.
pub const SUITE_LIMIT: f64 = 1e-8;
/// Bound for the asymptotic-limit identities, which are checked more tightly.
pub const LIMIT_IDENTITY_BOUND: f64 = 1e-9;
/// Failures kept in a report; the count is always exact.
const MAX_RECORDED_FAILURES: usize = 25;
const KRYLOV_TAG: u64 = 0x4B_5259 << 32;
const KRYLOV_SEEDS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteId {
    Thm21,
    Thm31,
    Cor22,
    Cor35,
    Rmk23,
    Oracle10,
    Findim11,
    Polar41,
    Douglas42,
}

impl SuiteId {
    pub const ALL: [SuiteId; 9] = [
        SuiteId::Thm21,
        SuiteId::Thm31,
        SuiteId::Cor22,
        SuiteId::Cor35,
        SuiteId::Rmk23,
        SuiteId::Oracle10,
        SuiteId::Findim11,
        SuiteId::Polar41,
        SuiteId::Douglas42,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SuiteId::Thm21 => "thm21",
            SuiteId::Thm31 => "thm31",
            SuiteId::Cor22 => "cor22",
            SuiteId::Cor35 => "cor35",
            SuiteId::Rmk23 => "rmk23",
            SuiteId::Oracle10 => "oracle10",
            SuiteId::Findim11 => "findim11",
            SuiteId::Polar41 => "polar41",
            SuiteId::Douglas42 => "douglas42",
        }
    }

    pub fn default_dims(&self) -> RangeInclusive<usize> {
        match self {
            SuiteId::Thm21 => 2..=12,
            SuiteId::Cor35 => 2..=10,
            SuiteId::Polar41 => 1..=4,
            _ => 2..=8,
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL.into_iter().find(|id| id.name() == s).ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub trials: usize,
    pub dims: RangeInclusive<usize>,
    pub seed: u64,
    pub execution: Execution,
}

impl SuiteConfig {
    pub fn new(trials: usize, dims: RangeInclusive<usize>, seed: u64) -> Self {
        Self { trials, dims, seed, execution: Execution::available() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub index: usize,
    pub seed: u64,
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteId,
    pub trials: usize,
    pub passes: usize,
    pub failures: usize,
    /// Largest normalized residual seen per named check.
    pub worst_residuals: BTreeMap<String, f64>,
    /// First failures, by trial index.
    pub failing: Vec<FailureRecord>,
    /// Counts recorded without being asserted.
    pub observations: BTreeMap<String, f64>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failures == 0 && self.passes == self.trials
    }

    pub fn failing_seeds(&self) -> Vec<u64> {
        self.failing.iter().map(|f| f.seed).collect()
    }
}

/// Outcome of one trial.
#[derive(Debug, Default)]
struct Trial {
    residuals: Vec<(&'static str, f64)>,
    failure: Option<String>,
    observations: Vec<(&'static str, f64)>,
}

impl Trial {
    /// Records a residual and fails the trial if it exceeds `bound`.
    fn bounded(&mut self, name: &'static str, value: f64, bound: f64) {
        self.residuals.push((name, value));
        if value.is_nan() || value > bound {
            self.fail(format!("{name} = {value:.3e} exceeds {bound:.1e}"));
        }
    }

    fn require(&mut self, ok: bool, what: &str) {
        if !ok {
            self.fail(what.to_string());
        }
    }

    fn fail(&mut self, reason: String) {
        if self.failure.is_none() {
            self.failure = Some(reason);
        }
    }

    fn observe(&mut self, name: &'static str, flag: bool) {
        self.observations.push((name, if flag { 1.0 } else { 0.0 }));
    }
}

/// Parses and runs a suite by name.
pub fn theorem_suite(suite_id: &str, trials: usize, dims: RangeInclusive<usize>, seed: u64, tol: &Tolerances) -> Result<SuiteReport> {
    let id: SuiteId = suite_id.parse()?;
    run_suite(id, &SuiteConfig::new(trials, dims, seed), tol)
}

pub fn run_suite(id: SuiteId, config: &SuiteConfig, tol: &Tolerances) -> Result<SuiteReport> {
    tol.validate()?;
    if id != SuiteId::Polar41 && (config.dims.is_empty() || *config.dims.start() == 0) {
        return Err(Error::InvalidSpec(format!("dims {}..{} must be a nonempty range of positive sizes", config.dims.start(), config.dims.end())));
    }
    let outcomes = config.execution.map(config.trials, |i| run_trial(id, config, i, tol));
    let mut report = SuiteReport {
        suite: id,
        trials: config.trials,
        passes: 0,
        failures: 0,
        worst_residuals: BTreeMap::new(),
        failing: Vec::new(),
        observations: BTreeMap::new(),
    };
    for (index, outcome) in outcomes.into_iter().enumerate() {
        let (seed, label, trial) = match outcome {
            Ok(v) => v,
            // The corpus item itself could not be built.
            Err(e) => (config.seed, String::from("corpus"), Trial { failure: Some(e.to_string()), ..Trial::default() }),
        };
        for (name, v) in trial.residuals {
            let w = report.worst_residuals.entry(name.to_string()).or_insert(0.0);
            *w = w.max(v);
        }
        for (name, v) in trial.observations {
            *report.observations.entry(name.to_string()).or_insert(0.0) += v;
        }
        match trial.failure {
            None => report.passes += 1,
            Some(reason) => {
                report.failures += 1;
                if report.failing.len() < MAX_RECORDED_FAILURES {
                    report.failing.push(FailureRecord { index, seed, label, reason });
                }
            }
        }
    }
    Ok(report)
}

fn family_for(id: SuiteId, index: usize) -> Family {
    match id {
        SuiteId::Oracle10 => Family::Generic,
        SuiteId::Cor35 => Family::QuasiIsometries { m_min: 3, m_max: 4 },
        SuiteId::Douglas42 if index % 2 == 1 => Family::Generic,
        _ => Family::Contractions,
    }
}

fn run_trial(id: SuiteId, config: &SuiteConfig, index: usize, tol: &Tolerances) -> Result<(u64, String, Trial)> {
    if id == SuiteId::Polar41 {
        let h = 1 + index % 4;
        let trial = catch(polar41(h));
        return Ok((h as u64, format!("half_dim={h}"), trial));
    }
    let item = corpus_item(family_for(id, index), &config.dims, config.seed, index)?;
    let trial = catch(match id {
        SuiteId::Thm21 => thm21(&item, tol),
        SuiteId::Thm31 => thm31(&item, tol),
        SuiteId::Cor22 => cor22(&item, tol),
        SuiteId::Cor35 => cor35(&item, tol),
        SuiteId::Rmk23 => rmk23(&item, tol),
        SuiteId::Oracle10 => oracle10(&item, tol),
        SuiteId::Findim11 => findim11(&item, tol),
        SuiteId::Douglas42 => douglas42(&item, tol),
        SuiteId::Polar41 => unreachable!(),
    });
    Ok((item.seed, item.label, trial))
}

/// Any error raised inside a property counts as a failed trial.
fn catch(r: Result<Trial>) -> Trial {
    r.unwrap_or_else(|e| Trial { failure: Some(e.to_string()), ..Trial::default() })
}

fn thm21(item: &CorpusItem, tol: &Tolerances) -> Result<Trial> {
    let t = &item.t;
    let mut tr = Trial::default();
    let scale = operator_scale(t);
    let bound = SUITE_LIMIT * scale;
    let mp = max_partial_isometric_subspace(t, tol)?;
    let r = &mp.residuals;
    tr.bounded("sandwich_lower", r.kernel_in_m, bound);
    tr.bounded("sandwich_upper", r.m_in_upper, bound);
    tr.bounded("invariance", r.invariance, bound);
    tr.bounded("w_partial_isometry", r.w_partial_isometry, bound);
    tr.bounded("w_star_r", r.w_star_r, bound);
    tr.bounded("q_defect_in_k", r.q_defect_in_k, bound);
    tr.bounded("reconstruction", mp.two_block.reconstruction_residual(t), bound);

    check_sum_invariance(&mut tr, &mp);
    let upper = mp.h0.sum(&mp.k, tol)?;
    let via_q = mp.m.sum(&mp.q_defect, tol)?;
    tr.require(mp.eq22_holds == upper.equals(&via_q, tol)?, "kernel-sum criterion disagrees with N(R) inclusion");

    let three = three_block_form_23(t, tol)?;
    let first_column = three.zero_pattern_residual(&[(1, 0), (2, 0)]).max(three.block(0, 0).norm_fro());
    tr.bounded("form23_first_column", first_column, bound);

    let escape = krylov_escape(t, &mp, item.seed, tol)?;
    tr.bounded("krylov_escape", escape, bound);
    tr.observe("refined", mp.refinement_steps > 0);
    Ok(tr)
}

/// Invariance of `N(T) ⊕ N(I − T*T)` forces `Q` pure. The converse fails once
/// `R` couples into the defect space (`T e₂ = (e₁ + e₃)/√2`, `T e₃ = e₂/2`
/// has `M = span{e₁}` and a pure `Q`), so it is counted, not asserted.
fn check_sum_invariance(tr: &mut Trial, mp: &MaxPartialIsometricResult) {
    tr.require(!mp.n_sum_invariant || mp.q_pure, "N(T) ⊕ N(I - T*T) is invariant but Q is not pure");
    tr.observe("pure_q_without_invariant_sum", mp.q_pure && !mp.n_sum_invariant);
}

/// Largest distance by which a sampled invariant partial-isometric Krylov
/// subspace sticks out of `M`. Seed vectors are drawn from the whole space and
/// from `N(I − T*T)`, `N(T) ⊕ N(I − T*T)` and `M`, where such subspaces live.
pub(crate) fn krylov_escape(t: &ComplexMatrix, mp: &MaxPartialIsometricResult, seed: u64, tol: &Tolerances) -> Result<f64> {
    let n = t.rows();
    let mut rng = stream_rng(seed, KRYLOV_TAG);
    let upper = mp.h0.sum(&mp.k, tol)?;
    let pools = [Subspace::full(n), mp.k.clone(), upper, mp.m.clone()];
    let mut worst: f64 = 0.0;
    for s in 0..KRYLOV_SEEDS {
        let pool = &pools[s % pools.len()];
        if pool.is_zero() {
            continue;
        }
        let v = pool.basis() * &gaussian(&mut rng, pool.dim(), 1);
        let krylov = krylov_space(t, &v, tol)?;
        let w = compress(t, &krylov, &krylov)?;
        let g = w.gram();
        if (&g * &g).dist_fro(&g) <= tol.eq {
            worst = worst.max(krylov.containment_residual(&mp.m)?);
        }
    }
    Ok(worst)
}

/// Smallest `T`-invariant subspace containing `v`.
pub(crate) fn krylov_space(t: &ComplexMatrix, v: &ComplexMatrix, tol: &Tolerances) -> Result<Subspace> {
    let n = t.rows();
    let unit = v.scale(1.0 / v.norm_fro());
    let mut s = range_with_reference(&unit, 1.0, tol)?;
    for _ in 0..n {
        let image = t * s.basis();
        let next = range_with_reference(&ComplexMatrix::hstack(&[s.basis(), &image], n), 1.0, tol)?;
        if next.dim() == s.dim() {
            break;
        }
        s = next;
    }
    Ok(s)
}

fn thm31(item: &CorpusItem, tol: &Tolerances) -> Result<Trial> {
    let t = &item.t;
    let mut tr = Trial::default();
    let rep = theorem31_structure(t, tol)?;
    tr.observe("satisfiers", rep.condition_holds);
    if rep.condition_holds {
        for (name, c) in ["kernels_12", "kernels_13", "kernels_23"].into_iter().zip(&rep.kernel_equalities) {
            tr.bounded(name, c.distance, SUITE_LIMIT);
        }
        tr.bounded("symmetry_hermitian", rep.symmetry_residuals.0, SUITE_LIMIT);
        tr.bounded("symmetry_square", rep.symmetry_residuals.1, SUITE_LIMIT);
        tr.bounded("re_kernel_identity", rep.re_kernel_identity.distance, SUITE_LIMIT);
        tr.bounded("n_tstar_split", rep.n_tstar_split.distance, SUITE_LIMIT);
        let refined = refined_decomposition_41(t, tol)?;
        tr.bounded("refined_r00", refined.r00().norm_fro(), SUITE_LIMIT);
        tr.bounded("refined_q0", refined.q0().norm_fro(), SUITE_LIMIT);
        tr.bounded("refined_reconstruction", refined.decomposition.reconstruction_residual(t), SUITE_LIMIT);
    }
    Ok(tr)
}

fn cor22(item: &CorpusItem, tol: &Tolerances) -> Result<Trial> {
    let mut tr = Trial::default();
    let mp = max_partial_isometric_subspace(&item.t, tol)?;
    check_sum_invariance(&mut tr, &mp);
    tr.observe("q_pure", mp.q_pure);
    tr.observe("n_sum_invariant", mp.n_sum_invariant);
    Ok(tr)
}

fn cor35(item: &CorpusItem, tol: &Tolerances) -> Result<Trial> {
    let t = &item.t;
    let mut tr = Trial::default();
    let m = match item.kind {
        Some(ClassKind::MQuasiIsometry { m, .. }) => m,
        _ => 3 + item.index % 2,
    };
    let q = quasi_isometry_structure(t, m, tol)?;
    tr.bounded("reconstruction", q.reconstruction_residual, SUITE_LIMIT);
    tr.bounded("q_power", q.q_power_residual, SUITE_LIMIT);
    tr.bounded("split", q.split_residual, SUITE_LIMIT);
    if item.kind == Some(ClassKind::SymmetryPlusZero) {
        tr.require(q.condition_holds, "symmetry ⊕ 0 does not satisfy the condition");
    }
    if q.condition_holds {
        tr.require(q.conclusions_checked && q.self_adjoint, "conclusion chain not established");
    }
    let q_nonzero = q.q().norm_fro() > SUITE_LIMIT;
    tr.observe("satisfiers", q.condition_holds);
    tr.observe("nonzero_nilpotent_tail", q_nonzero);
    // Whether Q^m = 0 with m ≥ 3 still forces Q = 0 is open; only record what happens.
    tr.observe("open_question_nonzero_tail_with_condition", q_nonzero && q.condition_holds);
    Ok(tr)
}

fn rmk23(item: &CorpusItem, tol: &Tolerances) -> Result<Trial> {
    let t = &item.t;
    let mut tr = Trial::default();
    let a = asymptotic_limit(t, tol)?;
    let s = &a.s_t;
    tr.bounded("s_t_hermitian", s.asymmetry_fro(), LIMIT_IDENTITY_BOUND);
    let eig = hermitian_eig(&s.hermitian_part(), tol)?;
    let lo = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let hi = eig.eigenvalues.last().copied().unwrap_or(0.0);
    tr.bounded("s_t_nonnegative", (-lo).max(0.0), LIMIT_IDENTITY_BOUND);
    tr.bounded("s_t_below_identity", (hi - 1.0).max(0.0), LIMIT_IDENTITY_BOUND);
    let fixed = &(&t.adjoint() * s) * t;
    tr.bounded("fixed_point", fixed.dist_fro(s), LIMIT_IDENTITY_BOUND);

    let b = a.max_isometric.basis();
    let tb = t * b;
    tr.bounded("isometric_on_limit", tb.gram().dist_fro(&ComplexMatrix::identity(b.cols())), LIMIT_IDENTITY_BOUND);
    let mp = max_partial_isometric_subspace(t, tol)?;
    let inter = mp.m.intersect(&mp.k, tol)?;
    tr.bounded("limit_in_m_cap_k", a.max_isometric.containment_residual(&inter)?, SUITE_LIMIT);
    tr.observe("strict_inclusion", a.max_isometric.dim() < inter.dim());
    tr.residuals.push(("iterations", a.iterations as f64));
    Ok(tr)
}

fn oracle10(item: &CorpusItem, tol: &Tolerances) -> Result<Trial> {
    let mut tr = Trial::default();
    let c = fong_tsui_check(&item.t, tol)?;
    let hermitian = item.t.relative_asymmetry() <= SUITE_LIMIT;
    tr.require(
        c.fong_istratescu_holds == hermitian,
        &format!("|T|² ≤ (Re T)² is {} at relative asymmetry {:.3e}", c.fong_istratescu_holds, item.t.relative_asymmetry()),
    );
    tr.observe("hermitian", hermitian);
    Ok(tr)
}

fn findim11(item: &CorpusItem, tol: &Tolerances) -> Result<Trial> {
    let t = &item.t;
    let mut tr = Trial::default();
    let v = verdict(t, tol)?;
    if let Some(msg) = &v.soundness_violation {
        let recheck = v.recheck.map(|r| format!(" (tightened: holds={}, self_adjoint={})", r.fong_tsui_holds, r.self_adjoint));
        tr.fail(format!("soundness: {msg}{}", recheck.unwrap_or_default()));
    }
    tr.require(!v.condition.fong_tsui_holds || v.self_adjoint, "condition holds on a non-self-adjoint operator");
    let bound = tol.eq * operator_scale(t);
    for c in &v.certificates {
        tr.bounded("certificate", c.residual, bound);
    }
    tr.observe("satisfiers", v.condition.fong_tsui_holds);
    let hyponormal = classify(t, &[], tol)?.hyponormal.holds;
    tr.observe("hyponormal", hyponormal);
    tr.observe("hyponormal_satisfiers", hyponormal && v.condition.fong_tsui_holds);
    tr.observe("rechecked", v.recheck.is_some());
    Ok(tr)
}

fn douglas42(item: &CorpusItem, tol: &Tolerances) -> Result<Trial> {
    let t = &item.t;
    let mut tr = Trial::default();
    let c = fong_tsui_check(t, tol)?;
    let d = douglas_factor(t, tol)?;
    let certified = d.residual <= SUITE_LIMIT * operator_scale(t) && d.norm_a <= 1.0 + 1e-9;
    tr.require(
        certified == c.fong_tsui_holds,
        &format!(
            "condition {} but factor residual {:.3e}, ‖A‖ = {:.12}",
            c.fong_tsui_holds, d.residual, d.norm_a
        ),
    );
    if c.fong_tsui_holds {
        tr.residuals.push(("satisfier_residual", d.residual));
    }
    tr.observe("satisfiers", c.fong_tsui_holds);
    Ok(tr)
}

fn polar41(h: usize) -> Result<Trial> {
    let mut tr = Trial::default();
    let (t, u) = shift_symmetry_pair(h)?;
    let id = ComplexMatrix::identity(h);
    let zero = ComplexMatrix::zeros(h, h);
    tr.require(&t * &u == id.direct_sum(&zero), "TU differs from I ⊕ 0");
    tr.require(&u * &t == zero.direct_sum(&id), "UT differs from 0 ⊕ I");
    tr.require(u == u.adjoint() && &u * &u == ComplexMatrix::identity(2 * h), "U is not a symmetry");
    let tol = Tolerances::default();
    let polar = polar_real_part(&t, &tol)?;
    tr.bounded("polar_symmetry", polar.u_tilde.dist_fro(&u), SUITE_LIMIT);
    let classes = classify(&t, &[], &tol)?;
    tr.require(classes.partial_isometry.holds, "T is not a partial isometry");
    let c = fong_tsui_check(&t, &tol)?;
    tr.require(!c.mortad_commutes, "T commutes with the polar symmetry of Re T");
    tr.require(!c.fong_tsui_holds, "the condition holds on the example");
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert_eq!(theorem_suite("thm99", 1, 2..=3, 0, &tol()), Err(Error::UnknownSuite("thm99".into())));
        for id in SuiteId::ALL {
            assert_eq!(id.name().parse::<SuiteId>().unwrap(), id);
        }
    }

    #[test]
    fn small_runs_pass() {
        for id in SuiteId::ALL {
            let r = theorem_suite(id.name(), 12, id.default_dims(), 5, &tol()).unwrap();
            assert!(r.all_passed(), "{id}: {:?}", r.failing);
        }
    }

    #[test]
    fn polar41_reproduces_exact_identities() {
        let r = theorem_suite("polar41", 4, 1..=4, 0, &tol()).unwrap();
        assert_eq!(r.passes, 4);
        assert!(r.worst_residuals["polar_symmetry"] < 1e-12);
    }

    #[test]
    fn krylov_span_of_shift() {
        // The shift e₁ → e₂ → e₃: the Krylov space of e₁ is everything, of e₃ just span{e₃}.
        let t = ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let e = |i| ComplexMatrix::from_fn(3, 1, |r, _| crate::linalg::c64(if r == i { 1.0 } else { 0.0 }, 0.0));
        assert_eq!(krylov_space(&t, &e(0), &tol()).unwrap().dim(), 3);
        assert_eq!(krylov_space(&t, &e(2), &tol()).unwrap().dim(), 1);
    }

    #[test]
    fn reports_are_deterministic_across_execution() {
        let mut c = SuiteConfig::new(10, 2..=6, 8);
        let a = run_suite(SuiteId::Findim11, &c, &tol()).unwrap();
        c.execution = Execution::Sequential;
        let b = run_suite(SuiteId::Findim11, &c, &tol()).unwrap();
        assert_eq!(a, b);
    }
}
