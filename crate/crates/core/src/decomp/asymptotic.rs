//! The asymptotic limit `S_T = lim T*ⁿTⁿ` of a contraction.

use super::blocks::ensure_contraction;
use crate::error::{Error, Result};
use crate::linalg::{kernel_with_reference, ComplexMatrix, Subspace, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticLimit {
    pub s_t: ComplexMatrix,
    /// Number of squaring passes until the sequence settled.
    pub iterations: usize,
    /// `N(I − S_T)`, the largest invariant subspace on which `T` is isometric.
    pub max_isometric: Subspace,
}

/// Runs `A_k = T*^{2^k}·T^{2^k}` by repeated squaring of the power.
///
/// This is a subsequence of the monotone sequence `T*ⁿTⁿ`, so it has the same
/// limit, but a spectral radius of `1 − ε` costs `O(log 1/ε)` passes instead
/// of `O(1/ε)`. Each squaring doubles the rounding error of the power, so the
/// pass also stops once the change drops under that floor, `2^k·n·ε_mach`.
pub fn asymptotic_limit(t: &ComplexMatrix, tol: &Tolerances) -> Result<AsymptoticLimit> {
    ensure_contraction(t, tol)?;
    let n = t.rows();
    let stop = tol.conv * n.max(1) as f64;
    let mut power = t.clone();
    let mut current = ComplexMatrix::identity(n);
    for iteration in 1..=tol.max_iter {
        let next = power.gram().hermitian_part();
        let delta = next.dist_fro(&current);
        current = next;
        if !current.is_finite() {
            break;
        }
        let floor = 2f64.powi(iteration.min(1000) as i32 - 1) * n.max(1) as f64 * f64::EPSILON;
        if delta <= stop.max(floor) {
            let id = ComplexMatrix::identity(n);
            let max_isometric = kernel_with_reference(&(&id - &current), 1.0, tol)?;
            return Ok(AsymptoticLimit { s_t: current, iterations: iteration, max_isometric });
        }
        power = &power * &power;
    }
    Err(Error::NoConvergence { routine: "asymptotic_limit" })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn unitary_limit_is_identity() {
        let (s, c) = 0.7f64.sin_cos();
        let u = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c64(c, 0.0),
            (0, 1) => c64(0.0, s),
            (1, 0) => c64(0.0, s),
            _ => c64(c, 0.0),
        });
        let a = asymptotic_limit(&u, &tol()).unwrap();
        assert!(a.s_t.dist_fro(&ComplexMatrix::identity(2)) < 1e-12);
        assert!(a.max_isometric.is_full());
    }

    #[test]
    fn diagonal_limit() {
        let a = asymptotic_limit(&ComplexMatrix::from_real_diagonal(&[1.0, 0.5]), &tol()).unwrap();
        assert!(a.s_t.dist_fro(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-12);
        assert!(a.max_isometric.distance(&Subspace::coordinate(2, &[0])).unwrap() < 1e-12);
    }

    #[test]
    fn nilpotent_limit_vanishes() {
        let t = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let a = asymptotic_limit(&t, &tol()).unwrap();
        assert_eq!(a.s_t.norm_fro(), 0.0);
        assert!(a.max_isometric.is_zero());
    }

    #[test]
    fn slow_spectral_radius_converges() {
        let a = asymptotic_limit(&ComplexMatrix::from_real_diagonal(&[0.9999, 1.0]), &tol()).unwrap();
        assert!(a.iterations < 40);
        assert!(a.s_t.dist_fro(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0])) < 1e-12);
    }

    #[test]
    fn rejects_expansion() {
        let t = ComplexMatrix::from_real_diagonal(&[1.5]);
        assert!(matches!(asymptotic_limit(&t, &tol()), Err(Error::NotContraction { .. })));
    }
}
