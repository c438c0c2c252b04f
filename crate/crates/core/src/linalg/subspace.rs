//! Subspaces carried by orthonormal bases, and the kernel/range/projector algebra.
//!
//! Equality and containment are always decided through projector distances;
//! bases are never compared directly.

use super::eigen::{right_singular_full, svd};
use super::matrix::ComplexMatrix;
use super::tolerances::Tolerances;
use crate::error::{Error, Result};

/// A subspace of `C^ambient_dim` given by an orthonormal column basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: ComplexMatrix,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: ComplexMatrix::zeros(ambient_dim, 0) }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: ComplexMatrix::identity(ambient_dim) }
    }

    /// Wraps a basis that the caller guarantees to be orthonormal.
    pub fn from_orthonormal(basis: ComplexMatrix) -> Self {
        Self { ambient_dim: basis.rows(), basis }
    }

    /// Span of the standard basis vectors `e_i` for the given indices.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Self {
        let basis = ComplexMatrix::from_fn(ambient_dim, indices.len(), |i, j| {
            if indices[j] == i {
                super::matrix::c64(1.0, 0.0)
            } else {
                super::matrix::c64(0.0, 0.0)
            }
        });
        Self { ambient_dim, basis }
    }

    /// Orthonormalized span of arbitrary columns.
    pub fn span(vectors: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        range_closure(vectors, tol)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn projector(&self) -> ComplexMatrix {
        self.basis.co_gram()
    }

    /// Embeds a subspace given in coordinates of `self`'s basis into the ambient space.
    pub fn lift(&self, inner: &Subspace) -> Result<Subspace> {
        if inner.ambient_dim != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot lift a subspace of C^{} through a basis of dimension {}",
                inner.ambient_dim,
                self.dim()
            )));
        }
        Ok(Subspace { ambient_dim: self.ambient_dim, basis: &self.basis * &inner.basis })
    }

    /// `‖(I − P_other)·basis‖_F`, zero iff `self ⊆ other`.
    pub fn containment_residual(&self, other: &Subspace) -> Result<f64> {
        same_ambient(self, other)?;
        if self.is_zero() {
            return Ok(0.0);
        }
        let coords = &other.basis.adjoint() * &self.basis;
        let back = &other.basis * &coords;
        Ok(self.basis.dist_fro(&back))
    }

    /// `‖P_self − P_other‖_F`.
    pub fn distance(&self, other: &Subspace) -> Result<f64> {
        same_ambient(self, other)?;
        Ok(self.projector().dist_fro(&other.projector()))
    }

    pub fn contains(&self, other: &Subspace, tol: &Tolerances) -> Result<bool> {
        Ok(other.containment_residual(self)? <= tol.eq)
    }

    pub fn equals(&self, other: &Subspace, tol: &Tolerances) -> Result<bool> {
        Ok(self.distance(other)? <= tol.eq)
    }

    pub fn complement(&self, tol: &Tolerances) -> Result<Subspace> {
        if self.is_zero() {
            return Ok(Subspace::full(self.ambient_dim));
        }
        kernel_with_reference(&self.basis.adjoint(), 1.0, tol)
    }

    pub fn sum(&self, other: &Subspace, tol: &Tolerances) -> Result<Subspace> {
        same_ambient(self, other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let stacked = ComplexMatrix::hstack(&[&self.basis, &other.basis], self.ambient_dim);
        range_with_reference(&stacked, 1.0, tol)
    }

    /// Intersection via the kernel of `2I − P₁ − P₂`.
    pub fn intersect(&self, other: &Subspace, tol: &Tolerances) -> Result<Subspace> {
        same_ambient(self, other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.ambient_dim));
        }
        let n = self.ambient_dim;
        let two_i = ComplexMatrix::identity(n).scale(2.0);
        let m = &(&two_i - &self.projector()) - &other.projector();
        kernel_with_reference(&m, 1.0, tol)
    }

    /// Orthogonal difference `self ⊖ other`, i.e. `self ∩ other⊥`.
    pub fn minus(&self, other: &Subspace, tol: &Tolerances) -> Result<Subspace> {
        let c = other.complement(tol)?;
        self.intersect(&c, tol)
    }

    /// `‖P_other·P_self‖_F`, zero iff the subspaces are orthogonal.
    pub fn overlap(&self, other: &Subspace) -> Result<f64> {
        same_ambient(self, other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(0.0);
        }
        Ok((&other.basis.adjoint() * &self.basis).norm_fro())
    }

    /// `‖basis*·basis − I‖_F`.
    pub fn orthonormality_residual(&self) -> f64 {
        self.basis.gram().dist_fro(&ComplexMatrix::identity(self.dim()))
    }
}

fn same_ambient(a: &Subspace, b: &Subspace) -> Result<()> {
    if a.ambient_dim != b.ambient_dim {
        return Err(Error::DimensionMismatch(format!(
            "subspaces live in C^{} and C^{}",
            a.ambient_dim, b.ambient_dim
        )));
    }
    Ok(())
}

/// Null space of `A`: right singular vectors with `σ ≤ tol.rank·σ_max·max(rows, cols)`.
pub fn kernel(a: &ComplexMatrix, tol: &Tolerances) -> Result<Subspace> {
    kernel_with_reference(a, 0.0, tol)
}

/// Null space with the rank cutoff measured against `max(σ_max, reference)`.
///
/// Blocks compressed out of a larger operator use the parent's norm as the
/// reference so that an analytically zero block is not judged by its own
/// rounding noise.
pub fn kernel_with_reference(a: &ComplexMatrix, reference: f64, tol: &Tolerances) -> Result<Subspace> {
    let (m, n) = (a.rows(), a.cols());
    if n == 0 {
        return Ok(Subspace::zero(0));
    }
    if m == 0 {
        return Ok(Subspace::full(n));
    }
    let (sigma, v) = right_singular_full(a, tol)?;
    let sigma_max = sigma.first().copied().unwrap_or(0.0).max(reference);
    let cutoff = tol.rank * sigma_max * m.max(n) as f64;
    let keep: Vec<usize> = (0..n).filter(|&j| sigma.get(j).copied().unwrap_or(0.0) <= cutoff).collect();
    Ok(select_columns(&v, &keep))
}

/// Closure of the range of `A`: left singular vectors with `σ` above the cutoff.
pub fn range_closure(a: &ComplexMatrix, tol: &Tolerances) -> Result<Subspace> {
    range_with_reference(a, 0.0, tol)
}

pub fn range_with_reference(a: &ComplexMatrix, reference: f64, tol: &Tolerances) -> Result<Subspace> {
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 {
        return Ok(Subspace::zero(m));
    }
    let s = svd(a, tol)?;
    let sigma_max = s.sigma_max().max(reference);
    let cutoff = tol.rank * sigma_max * m.max(n) as f64;
    let keep: Vec<usize> =
        (0..s.singular_values.len()).filter(|&j| s.singular_values[j] > cutoff && s.singular_values[j] > 0.0).collect();
    Ok(select_columns(&s.u, &keep))
}

fn select_columns(m: &ComplexMatrix, keep: &[usize]) -> Subspace {
    let basis = ComplexMatrix::from_fn(m.rows(), keep.len(), |i, j| m.get(i, keep[j]));
    Subspace::from_orthonormal(basis)
}

/// `P_S` as an ambient matrix.
pub fn projector(s: &Subspace) -> ComplexMatrix {
    s.projector()
}

/// Block of `T` from `from` to `to` in their bases: `to.basis*·T·from.basis`.
pub fn compress(t: &ComplexMatrix, from: &Subspace, to: &Subspace) -> Result<ComplexMatrix> {
    if t.cols() != from.ambient_dim() || t.rows() != to.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, subspaces live in C^{} (from) and C^{} (to)",
            t.rows(),
            t.cols(),
            from.ambient_dim(),
            to.ambient_dim()
        )));
    }
    Ok(&(&to.basis().adjoint() * t) * from.basis())
}

/// Operations of the subspace algebra, as exposed through [`subspace_algebra`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceOp {
    Complement,
    Sum,
    Intersect,
    Contains,
    Equal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubspaceOutcome {
    Subspace(Subspace),
    Flag(bool),
}

/// Single entry point dispatching on [`SubspaceOp`]; binary operations require `s2`.
pub fn subspace_algebra(op: SubspaceOp, s1: &Subspace, s2: Option<&Subspace>, tol: &Tolerances) -> Result<SubspaceOutcome> {
    let second = || s2.ok_or_else(|| Error::DimensionMismatch(format!("{op:?} needs two subspaces")));
    Ok(match op {
        SubspaceOp::Complement => SubspaceOutcome::Subspace(s1.complement(tol)?),
        SubspaceOp::Sum => SubspaceOutcome::Subspace(s1.sum(second()?, tol)?),
        SubspaceOp::Intersect => SubspaceOutcome::Subspace(s1.intersect(second()?, tol)?),
        SubspaceOp::Contains => SubspaceOutcome::Flag(s1.contains(second()?, tol)?),
        SubspaceOp::Equal => SubspaceOutcome::Flag(s1.equals(second()?, tol)?),
    })
}

/// Largest singular value of `A` restricted to a subspace, i.e. `‖A·basis‖₂`.
pub fn restricted_norm(a: &ComplexMatrix, s: &Subspace) -> f64 {
    if s.is_zero() {
        return 0.0;
    }
    super::eigen::spectral_norm(&(a * s.basis()))
}
