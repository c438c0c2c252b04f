use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{compress, spectral_norm, ComplexMatrix, Subspace, Tolerances};

/// Pairwise-orthogonal parts of the ambient space and the blocks of `T` between them.
///
/// `blocks[i][j]` is the block from `parts[j]` to `parts[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub parts: Vec<Subspace>,
    pub labels: Vec<String>,
    pub blocks: Vec<Vec<ComplexMatrix>>,
}

/// Dimensions and block norms, for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    /// Spectral norms, `block_norms[i][j]` for the block from part `j` to part `i`.
    pub block_norms: Vec<Vec<f64>>,
}

impl BlockDecomposition {
    pub fn new(t: &ComplexMatrix, parts: Vec<Subspace>, labels: &[&str]) -> Result<Self> {
        if parts.len() != labels.len() {
            return Err(Error::DimensionMismatch(format!("{} parts but {} labels", parts.len(), labels.len())));
        }
        let blocks = parts
            .iter()
            .map(|to| parts.iter().map(|from| compress(t, from, to)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { parts, labels: labels.iter().map(|s| s.to_string()).collect(), blocks })
    }

    pub fn block(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.blocks[i][j]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(Subspace::dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims().iter().sum()
    }

    pub fn ambient_dim(&self) -> usize {
        self.parts.first().map_or(0, Subspace::ambient_dim)
    }

    pub fn spans(&self) -> bool {
        self.total_dim() == self.ambient_dim()
    }

    /// Concatenated bases of all parts.
    pub fn basis(&self) -> ComplexMatrix {
        let bases: Vec<&ComplexMatrix> = self.parts.iter().map(Subspace::basis).collect();
        ComplexMatrix::hstack(&bases, self.ambient_dim())
    }

    pub fn assembled(&self) -> ComplexMatrix {
        ComplexMatrix::from_blocks(&self.blocks)
    }

    /// `‖B·A·B* − T‖_F` where `A` is the assembled block matrix and `B` the concatenated basis.
    pub fn reconstruction_residual(&self, t: &ComplexMatrix) -> f64 {
        let b = self.basis();
        (&(&b * &self.assembled()) * &b.adjoint()).dist_fro(t)
    }

    /// Largest `‖B_i*·B_j‖_F` over distinct parts.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.parts.len() {
            for j in i + 1..self.parts.len() {
                worst = worst.max(self.parts[i].overlap(&self.parts[j]).unwrap_or(f64::INFINITY));
            }
        }
        worst
    }

    /// Largest Frobenius norm over the listed `(row, col)` blocks.
    pub fn zero_pattern_residual(&self, zeros: &[(usize, usize)]) -> f64 {
        zeros.iter().map(|&(i, j)| self.blocks[i][j].norm_fro()).fold(0.0, f64::max)
    }

    pub fn summary(&self) -> BlockSummary {
        BlockSummary {
            labels: self.labels.clone(),
            dims: self.dims(),
            block_norms: self.blocks.iter().map(|row| row.iter().map(spectral_norm).collect()).collect(),
        }
    }
}

/// `‖T‖`, or `NotContraction` if it exceeds `1 + tol.psd`.
pub(crate) fn ensure_contraction(t: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    t.ensure_square()?;
    let norm = spectral_norm(t);
    if norm > 1.0 + tol.psd {
        return Err(Error::NotContraction { norm });
    }
    Ok(norm)
}

/// `‖(A*A)² − A*A‖_F`.
pub(crate) fn partial_isometry_residual(a: &ComplexMatrix) -> f64 {
    let g = a.gram();
    (&g * &g).dist_fro(&g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    #[test]
    fn round_trip_with_empty_part() {
        let t = ComplexMatrix::from_fn(3, 3, |i, j| c64((i + 2 * j) as f64, (i as f64) - (j as f64)));
        let parts = vec![Subspace::coordinate(3, &[2]), Subspace::zero(3), Subspace::coordinate(3, &[0, 1])];
        let d = BlockDecomposition::new(&t, parts, &["a", "b", "c"]).unwrap();
        assert!(d.spans());
        assert_eq!(d.dims(), vec![1, 0, 2]);
        assert!(d.reconstruction_residual(&t) < 1e-12);
        assert_eq!(d.orthogonality_residual(), 0.0);
        assert_eq!(d.block(0, 2).rows(), 1);
        assert_eq!(d.block(0, 2).cols(), 2);
        assert_eq!(d.block(0, 2).get(0, 1), t.get(2, 1));
    }
}
