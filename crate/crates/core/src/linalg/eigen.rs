//! Hermitian eigendecomposition, SVD and the spectral functions built on them.
//!
//! The Hermitian eigensolver is `nalgebra`'s; the SVD is a one-sided Jacobi
//! iteration. Ordering, rank policy and the PSD clamping rules live here.

use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::{ComplexMatrix, C64};
use super::tolerances::Tolerances;
use crate::error::{Error, Result};

/// Eigenvalues ascending with the matching unitary eigenvector matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `Q·diag(f(λ))·Q*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let q = self.eigenvectors.as_nalgebra();
        let n = q.nrows();
        let mut scaled = q.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let v = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= v;
            }
        }
        ComplexMatrix::from_nalgebra(scaled * q.adjoint())
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    /// Eigenvector for the smallest eigenvalue, as an n×1 matrix.
    pub fn min_eigenvector(&self) -> Option<ComplexMatrix> {
        if self.eigenvalues.is_empty() {
            None
        } else {
            Some(self.eigenvectors.column(0))
        }
    }
}

/// Thin SVD: `A = U·diag(σ)·V*` with `σ` descending, `U` m×k, `V` n×k, `k = min(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Rank cutoff `tol.rank·σ_max·max(rows, cols)` for the factored matrix.
    pub fn cutoff(&self, tol: &Tolerances, rows: usize, cols: usize) -> f64 {
        tol.rank * self.sigma_max() * rows.max(cols) as f64
    }
}

/// Floor below which eigenvalues of a PSD matrix are indistinguishable from rounding noise.
fn noise_floor(n: usize, scale: f64) -> f64 {
    8.0 * n.max(1) as f64 * f64::EPSILON * scale
}

pub fn check_hermitian(a: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    a.ensure_square()?;
    let residual = a.asymmetry_fro();
    let limit = tol.eq * a.norm_fro();
    if residual > limit {
        return Err(Error::NotHermitian { residual, limit });
    }
    Ok(())
}

fn sorted_order(values: &[f64], descending: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        let ord = values[a].total_cmp(&values[b]);
        let ord = if descending { ord.reverse() } else { ord };
        ord.then(a.cmp(&b))
    });
    idx
}

fn permute_columns(m: &DMatrix<C64>, order: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), order.len(), |i, j| m[(i, order[j])])
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(a: &ComplexMatrix, tol: &Tolerances) -> Result<HermitianEigen> {
    check_hermitian(a, tol)?;
    let n = a.rows();
    if n == 0 {
        return Ok(HermitianEigen { eigenvalues: vec![], eigenvectors: ComplexMatrix::zeros(0, 0) });
    }
    let sym = a.hermitian_part().into_nalgebra();
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, tol.max_iter.max(1000))
        .ok_or(Error::NoConvergence { routine: "hermitian_eig" })?;
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = sorted_order(&values, false);
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let eigenvectors = ComplexMatrix::from_nalgebra(permute_columns(&eig.eigenvectors, &order));
    Ok(HermitianEigen { eigenvalues, eigenvectors })
}

/// Thin singular value decomposition with descending singular values.
///
/// One-sided Jacobi on the columns of `A` (or of `A*` when `A` is wide).
/// The complex `nalgebra` SVD returns inaccurate factors for some rank
/// deficient inputs, so it is not used.
pub fn svd(a: &ComplexMatrix, tol: &Tolerances) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    let k = m.min(n);
    if k == 0 {
        return Ok(Svd { u: ComplexMatrix::zeros(m, 0), singular_values: vec![], v: ComplexMatrix::zeros(n, 0) });
    }
    let (u, values, v) = if m >= n {
        jacobi_svd(a.as_nalgebra().clone(), tol.max_iter)?
    } else {
        let (u, s, v) = jacobi_svd(a.as_nalgebra().adjoint(), tol.max_iter)?;
        (v, s, u)
    };
    let order = sorted_order(&values, true);
    Ok(Svd {
        u: ComplexMatrix::from_nalgebra(permute_columns(&u, &order)),
        singular_values: order.iter().map(|&i| values[i]).collect(),
        v: ComplexMatrix::from_nalgebra(permute_columns(&v, &order)),
    })
}

const JACOBI_MIN_SWEEPS: usize = 64;

/// Tall `a` (m ≥ n): returns `(U m×n, σ, V n×n)` unsorted.
fn jacobi_svd(mut a: DMatrix<C64>, max_iter: usize) -> Result<(DMatrix<C64>, Vec<f64>, DMatrix<C64>)> {
    let (m, n) = (a.nrows(), a.ncols());
    let mut v = DMatrix::<C64>::identity(n, n);
    // Work at unit Frobenius norm; columns below ε² of it are treated as zero
    // so that their squared norms never underflow. The largest entry is
    // divided out first so that the norm itself cannot overflow.
    let max_abs = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_abs > 0.0 {
        a.apply(|z| *z = z.unscale(max_abs));
    }
    let unit_frob = a.norm();
    if unit_frob > 0.0 {
        a.apply(|z| *z = z.unscale(unit_frob));
    }
    let frob = max_abs * unit_frob;
    let negligible = (f64::EPSILON * f64::EPSILON).powi(2);
    let sweeps = max_iter.max(JACOBI_MIN_SWEEPS);
    let threshold = m as f64 * f64::EPSILON;
    let mut converged = false;
    for _ in 0..sweeps {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dotc(&a.column(j));
                let g = gamma.norm();
                if alpha.min(beta) <= negligible || g == 0.0 || g <= threshold * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, i, j, c, s, phase);
                rotate(&mut v, i, j, c, s, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { routine: "svd" });
    }
    let unit: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
    let floor = f64::EPSILON * unit.iter().copied().fold(0.0, f64::max) * m as f64;
    let mut u = DMatrix::<C64>::zeros(m, n);
    let mut missing = Vec::new();
    for (j, &norm) in unit.iter().enumerate() {
        if norm > floor && norm > 0.0 {
            u.set_column(j, &a.column(j).map(|z| z.unscale(norm)));
        } else {
            missing.push(j);
        }
    }
    complete_orthonormal(&mut u, &missing);
    Ok((u, unit.iter().map(|s| s * frob).collect(), v))
}

/// Plane rotation of columns `i`, `j` after removing the phase `γ/|γ|` from column `j`.
fn rotate(x: &mut DMatrix<C64>, i: usize, j: usize, c: f64, s: f64, phase: C64) {
    let ph = phase.conj();
    for r in 0..x.nrows() {
        let xi = x[(r, i)];
        let xj = x[(r, j)] * ph;
        x[(r, i)] = xi * c - xj * s;
        x[(r, j)] = (xi * s + xj * c) * phase;
    }
}

/// Fills the listed columns with unit vectors orthogonal to every other column.
///
/// Each one is the standard basis vector with the largest residual after two
/// rounds of Gram–Schmidt against the columns filled so far.
fn complete_orthonormal(u: &mut DMatrix<C64>, missing: &[usize]) {
    let m = u.nrows();
    for &j in missing {
        let mut best: Option<DMatrix<C64>> = None;
        let mut best_norm = -1.0;
        for e in 0..m {
            let mut w = DMatrix::<C64>::zeros(m, 1);
            w[(e, 0)] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for col in 0..u.ncols() {
                    if u.column(col).norm() == 0.0 {
                        continue;
                    }
                    let proj = u.column(col).dotc(&w.column(0));
                    let basis = u.column(col).clone_owned();
                    w.column_mut(0).axpy(-proj, &basis, C64::new(1.0, 0.0));
                }
            }
            let norm = w.norm();
            if norm > best_norm {
                best_norm = norm;
                best = Some(w);
            }
        }
        if let Some(w) = best {
            u.set_column(j, &w.column(0).map(|z| z.unscale(best_norm)));
        }
    }
}

/// Full right singular basis (n×n) with singular values padded by zeros to length n.
///
/// Wide matrices are padded with zero rows so the factorization yields a
/// complete basis of the domain.
pub(crate) fn right_singular_full(a: &ComplexMatrix, tol: &Tolerances) -> Result<(Vec<f64>, ComplexMatrix)> {
    let (m, n) = (a.rows(), a.cols());
    if n == 0 {
        return Ok((vec![], ComplexMatrix::zeros(0, 0)));
    }
    if m >= n {
        let s = svd(a, tol)?;
        return Ok((s.singular_values, s.v));
    }
    let mut padded = DMatrix::zeros(n, n);
    padded.view_mut((0, 0), (m, n)).copy_from(a.as_nalgebra());
    let s = svd(&ComplexMatrix::from_nalgebra(padded), tol)?;
    Ok((s.singular_values, s.v))
}

/// Largest singular value.
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    match svd(a, &Tolerances::default()) {
        Ok(s) => s.sigma_max(),
        Err(_) => a.norm_fro(),
    }
}

/// Principal square root of a Hermitian PSD matrix.
///
/// Negative eigenvalues within `tol.psd·‖A‖` are clamped to zero, as are
/// positive ones at the rounding-noise level.
pub fn psd_sqrt(a: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a, tol)?;
    let scale = eig.max_abs_eigenvalue();
    let limit = -tol.psd * scale;
    if let Some(min) = eig.min_eigenvalue() {
        if min < limit {
            return Err(Error::NotPsd { min_eigenvalue: min, limit });
        }
    }
    let floor = noise_floor(a.rows(), scale);
    Ok(eig.apply(|l| if l <= floor { 0.0 } else { l.sqrt() }))
}

/// `|A| = (A²)^{1/2}` of a Hermitian matrix, computed from eigenvalue magnitudes.
pub fn hermitian_abs(a: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a, tol)?;
    let floor = noise_floor(a.rows(), eig.max_abs_eigenvalue());
    Ok(eig.apply(|l| if l.abs() <= floor { 0.0 } else { l.abs() }))
}

/// Moore–Penrose pseudoinverse with the `tol.rank` cutoff.
pub fn pinv(a: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 {
        return Ok(ComplexMatrix::zeros(n, m));
    }
    let s = svd(a, tol)?;
    let cutoff = s.cutoff(tol, m, n);
    let k = s.singular_values.len();
    let v = s.v.as_nalgebra();
    let u = s.u.as_nalgebra();
    let mut vs = v.clone();
    for j in 0..k {
        let sigma = s.singular_values[j];
        let inv = if sigma > cutoff && sigma > 0.0 { 1.0 / sigma } else { 0.0 };
        for i in 0..n {
            vs[(i, j)] *= inv;
        }
    }
    Ok(ComplexMatrix::from_nalgebra(vs * u.adjoint()))
}

/// Singular values of `A` padded to length `n = cols`.
pub fn singular_values(a: &ComplexMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    Ok(svd(a, tol)?.singular_values)
}
