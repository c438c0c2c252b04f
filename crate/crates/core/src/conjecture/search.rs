//! Randomized local search for operators with `|T| ≤ |Re T|` that stay away
//! from the Hermitian matrices.
//!
//! The objective is the normalized defect `min-eig(|Re T| − |T|) / ‖T‖`, which
//! is invariant under positive scaling. A counterexample would need an
//! objective `≥ −tol.psd` at asymmetry `≥ δ`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{gaussian, stream_rng};
use crate::linalg::{c64, hermitian_eig, ComplexMatrix, Tolerances};
use crate::par::Execution;
use crate::props::operator_functions;

const STREAM_TAG: u64 = 0x5EA5 << 32;
const REJECTIONS_BEFORE_DECAY: usize = 20;
const STEP_FLOOR: f64 = 1e-9;
const INITIAL_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub dim: usize,
    pub restarts: usize,
    pub iters_per_restart: usize,
    /// Minimum relative asymmetry `‖T − T*‖_F / ‖T‖_F` of admissible points.
    pub delta: f64,
    pub seed: u64,
    pub execution: Execution,
}

impl SearchParams {
    pub fn new(dim: usize, restarts: usize, iters_per_restart: usize, delta: f64, seed: u64) -> Self {
        Self { dim, restarts, iters_per_restart, delta, seed, execution: Execution::available() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_defect: f64,
    pub best_asymmetry: f64,
    /// Best point found, normalized to `‖T‖ = 1`.
    pub incumbent: ComplexMatrix,
    pub evaluations: usize,
    /// Best objective of each restart, by restart index.
    pub trace: Vec<f64>,
}

/// `(min-eig(|Re T| − |T|) / ‖T‖, ‖T‖)`, or `None` for the zero matrix or a failed factorization.
pub fn normalized_defect(t: &ComplexMatrix, tol: &Tolerances) -> Option<(f64, f64)> {
    let f = operator_functions(t, tol).ok()?;
    if f.norm == 0.0 {
        return None;
    }
    let diff = (&f.abs_real_part - &f.modulus).hermitian_part();
    let min = hermitian_eig(&diff, tol).ok()?.min_eigenvalue()?;
    Some((min / f.norm, f.norm))
}

struct RestartOutcome {
    best: f64,
    asymmetry: f64,
    incumbent: ComplexMatrix,
    evaluations: usize,
}

pub fn counterexample_search(params: &SearchParams, tol: &Tolerances) -> Result<SearchResult> {
    if params.dim < 2 {
        return Err(Error::InvalidSpec(format!("search needs dim ≥ 2, got {}", params.dim)));
    }
    if !(params.delta >= 0.0 && params.delta < 2.0) {
        return Err(Error::InvalidSpec(format!("delta must lie in [0, 2), got {}", params.delta)));
    }
    if params.restarts == 0 {
        return Err(Error::InvalidSpec("at least one restart is required".into()));
    }
    let outcomes = params.execution.map(params.restarts, |r| run_restart(params, r, tol));
    let mut best_index = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.best > outcomes[best_index].best {
            best_index = i;
        }
    }
    let evaluations = outcomes.iter().map(|o| o.evaluations).sum();
    let trace = outcomes.iter().map(|o| o.best).collect();
    let winner = outcomes.into_iter().nth(best_index).expect("restarts ≥ 1");
    Ok(SearchResult {
        best_defect: winner.best,
        best_asymmetry: winner.asymmetry,
        incumbent: winner.incumbent,
        evaluations,
        trace,
    })
}

/// Hermitian `H` plus a skew-Hermitian `sK` with relative asymmetry exactly `a`.
///
/// `H` and `K` are orthogonal in the real Frobenius product, so
/// `‖H + sK‖² = ‖H‖² + s²‖K‖²` and `a = 2s‖K‖ / ‖H + sK‖` solves to
/// `s‖K‖ = a‖H‖ / √(4 − a²)`.
fn near_hermitian_start(rng: &mut ChaCha8Rng, n: usize, a: f64) -> ComplexMatrix {
    let h = gaussian(rng, n, n).hermitian_part();
    let k = gaussian(rng, n, n).hermitian_part().scale_complex(c64(0.0, 1.0));
    let s = a * h.norm_fro() / ((4.0 - a * a).sqrt() * k.norm_fro());
    &h + &k.scale(s)
}

fn run_restart(params: &SearchParams, restart: usize, tol: &Tolerances) -> RestartOutcome {
    let n = params.dim;
    let delta = params.delta;
    let mut rng = stream_rng(params.seed, STREAM_TAG | restart as u64);
    let target = (1.05 * delta).min(1.99);
    let mut current = if restart.is_multiple_of(2) {
        let g = gaussian(&mut rng, n, n);
        if g.relative_asymmetry() >= delta {
            g
        } else {
            near_hermitian_start(&mut rng, n, target)
        }
    } else {
        near_hermitian_start(&mut rng, n, target)
    };
    let mut evaluations = 1;
    let (mut value, norm) = normalized_defect(&current, tol).unwrap_or((f64::NEG_INFINITY, 1.0));
    current = current.scale(1.0 / norm);

    let mut step = INITIAL_STEP;
    let mut rejections = 0;
    for _ in 0..params.iters_per_restart {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let mut proposal = current.clone();
        proposal.set(i, j, current.get(i, j) + c64(re, im) * step);

        let mut accepted = false;
        if proposal.relative_asymmetry() >= delta {
            evaluations += 1;
            if let Some((v, norm)) = normalized_defect(&proposal, tol) {
                if v > value {
                    value = v;
                    current = proposal.scale(1.0 / norm);
                    accepted = true;
                }
            }
        }
        if accepted {
            rejections = 0;
        } else {
            rejections += 1;
            if rejections == REJECTIONS_BEFORE_DECAY {
                step = (step * 0.5).max(STEP_FLOOR);
                rejections = 0;
            }
        }
    }
    RestartOutcome { best: value, asymmetry: current.relative_asymmetry(), incumbent: current, evaluations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn two_by_two_stays_negative() {
        let r = counterexample_search(&SearchParams::new(2, 50, 200, 0.1, 3), &tol()).unwrap();
        assert!(r.best_defect < -1e-4, "best {}", r.best_defect);
        assert!(r.best_asymmetry >= 0.1);
        assert_eq!(r.trace.len(), 50);
        assert!(r.trace.iter().all(|&v| v <= r.best_defect));
    }

    #[test]
    fn zero_delta_reaches_hermitian_points() {
        let r = counterexample_search(&SearchParams::new(3, 4, 10, 0.0, 1), &tol()).unwrap();
        assert!(r.best_defect.abs() < 1e-12, "best {}", r.best_defect);
    }

    #[test]
    fn deterministic_trace() {
        let mut p = SearchParams::new(3, 6, 60, 0.1, 11);
        let a = counterexample_search(&p, &tol()).unwrap();
        p.execution = Execution::Sequential;
        let b = counterexample_search(&p, &tol()).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.incumbent, b.incumbent);
        assert_eq!(a.evaluations, b.evaluations);
    }

    #[test]
    fn near_hermitian_start_has_requested_asymmetry() {
        let mut rng = stream_rng(5, 0);
        let t = near_hermitian_start(&mut rng, 4, 0.105);
        assert!((t.relative_asymmetry() - 0.105).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(counterexample_search(&SearchParams::new(1, 1, 1, 0.1, 0), &tol()).is_err());
        assert!(counterexample_search(&SearchParams::new(2, 1, 1, -0.1, 0), &tol()).is_err());
    }
}
