//! Dense complex matrix carrier.
//!
//! [`ComplexMatrix`] wraps a column-major `nalgebra` matrix but exposes a
//! row-major view for construction and serialization, which is the layout used
//! by every file format in this crate.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Shorthand for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

/// Dense rectangular matrix of complex scalars with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.get(i, j);
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Builds a matrix from row-major entries, rejecting bad lengths and non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "entry ({}, {}) is not finite",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self(DMatrix::from_row_iterator(rows, cols, entries)))
    }

    /// Convenience constructor for real matrices given as rows.
    ///
    /// Panics on ragged input; intended for literals in code and tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self(DMatrix::from_fn(r, c, |i, j| c64(rows[i][j], 0.0)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self(DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) }))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(DMatrix::from_fn(n, n, |i, j| if i == j { c64(diag[i], 0.0) } else { c64(0.0, 0.0) }))
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.0
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.rows() == 0 || self.cols() == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.0[(i, j)] = z;
    }

    pub fn row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn ensure_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare { rows: self.rows(), cols: self.cols() })
        }
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self(self.0.map(|z| z * alpha))
    }

    pub fn scale_complex(&self, alpha: C64) -> Self {
        Self(self.0.map(|z| z * alpha))
    }

    pub fn norm_fro(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows().min(self.cols())).map(|i| self.0[(i, i)]).sum()
    }

    /// `(A + A*)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * c64(0.5, 0.0))
    }

    /// `‖A − A*‖_F`.
    pub fn asymmetry_fro(&self) -> f64 {
        (&self.0 - self.0.adjoint()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖A − A*‖_F / ‖A‖_F`, zero for the zero matrix.
    pub fn relative_asymmetry(&self) -> f64 {
        let n = self.norm_fro();
        if n == 0.0 {
            0.0
        } else {
            self.asymmetry_fro() / n
        }
    }

    pub fn pow(&self, k: usize) -> Self {
        assert!(self.is_square(), "pow of non-square matrix");
        let mut acc = Self::identity(self.rows());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `A*·A`.
    pub fn gram(&self) -> Self {
        Self(self.0.adjoint() * &self.0)
    }

    /// `A·A*`.
    pub fn co_gram(&self) -> Self {
        Self(&self.0 * self.0.adjoint())
    }

    /// Concatenates columns of matrices with equal row counts.
    pub fn hstack(parts: &[&ComplexMatrix], rows: usize) -> Self {
        let cols: usize = parts.iter().map(|p| p.cols()).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let mut offset = 0;
        for p in parts {
            assert_eq!(p.rows(), rows, "hstack row mismatch");
            out.view_mut((0, offset), (rows, p.cols())).copy_from(&p.0);
            offset += p.cols();
        }
        Self(out)
    }

    /// Block-diagonal `A ⊕ B`.
    pub fn direct_sum(&self, other: &ComplexMatrix) -> Self {
        let (r1, c1) = (self.rows(), self.cols());
        let (r2, c2) = (other.rows(), other.cols());
        let mut out = DMatrix::zeros(r1 + r2, c1 + c2);
        out.view_mut((0, 0), (r1, c1)).copy_from(&self.0);
        out.view_mut((r1, c1), (r2, c2)).copy_from(&other.0);
        Self(out)
    }

    /// Assembles a block matrix from a grid of blocks with consistent shapes.
    pub fn from_blocks(grid: &[Vec<ComplexMatrix>]) -> Self {
        if grid.is_empty() {
            return Self::zeros(0, 0);
        }
        let row_sizes: Vec<usize> = grid.iter().map(|row| row[0].rows()).collect();
        let col_sizes: Vec<usize> = grid[0].iter().map(|b| b.cols()).collect();
        let total_r: usize = row_sizes.iter().sum();
        let total_c: usize = col_sizes.iter().sum();
        let mut out = DMatrix::zeros(total_r, total_c);
        let mut ro = 0;
        for (i, row) in grid.iter().enumerate() {
            let mut co = 0;
            for (j, block) in row.iter().enumerate() {
                assert_eq!(block.rows(), row_sizes[i], "block row mismatch");
                assert_eq!(block.cols(), col_sizes[j], "block col mismatch");
                out.view_mut((ro, co), (block.rows(), block.cols())).copy_from(&block.0);
                co += col_sizes[j];
            }
            ro += row_sizes[i];
        }
        Self(out)
    }

    pub fn column(&self, j: usize) -> Self {
        Self(self.0.columns(j, 1).into_owned())
    }

    pub fn columns(&self, start: usize, count: usize) -> Self {
        Self(self.0.columns(start, count).into_owned())
    }

    pub fn sub_block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self(self.0.view((r0, c0), (rows, cols)).into_owned())
    }

    /// `‖self − other‖_F`; panics on shape mismatch.
    pub fn dist_fro(&self, other: &ComplexMatrix) -> f64 {
        (self - other).norm_fro()
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols(), rhs.rows(), "matrix product shape mismatch");
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_round_trip() {
        let entries = vec![c64(1.0, 0.0), c64(2.0, -1.0), c64(0.0, 3.0), c64(4.0, 0.5), c64(5.0, 0.0), c64(6.0, 0.0)];
        let m = ComplexMatrix::from_row_major(2, 3, entries.clone()).unwrap();
        assert_eq!(m.get(0, 1), c64(2.0, -1.0));
        assert_eq!(m.get(1, 0), c64(4.0, 0.5));
        assert_eq!(m.row_major(), entries);
    }

    #[test]
    fn rejects_bad_length_and_nan() {
        assert!(ComplexMatrix::from_row_major(2, 2, vec![c64(0.0, 0.0); 3]).is_err());
        let mut e = vec![c64(0.0, 0.0); 4];
        e[2] = c64(f64::NAN, 0.0);
        assert!(matches!(ComplexMatrix::from_row_major(2, 2, e), Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn blocks_and_direct_sum() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0]]);
        let b = ComplexMatrix::from_real_rows(&[&[2.0, 3.0]]);
        let s = a.direct_sum(&b);
        assert_eq!((s.rows(), s.cols()), (2, 3));
        assert_eq!(s.get(1, 2), c64(3.0, 0.0));
        let grid = vec![vec![a.clone(), b.clone()], vec![ComplexMatrix::zeros(1, 1), b]];
        let m = ComplexMatrix::from_blocks(&grid);
        assert_eq!((m.rows(), m.cols()), (2, 3));
        assert_eq!(m.get(1, 1), c64(2.0, 0.0));
    }
}
