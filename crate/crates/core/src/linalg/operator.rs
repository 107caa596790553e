use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::StateVector;
use crate::error::{Error, Result};

/// Absolute tolerance on `|A_ij - conj(A_ji)|` accepted at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Dense complex Hermitian matrix.
///
/// Construction verifies Hermiticity and then symmetrizes exactly, so every
/// value of this type satisfies `A = A^†` bitwise.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<C64>,
}

impl HermitianOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::InvalidInput("empty operator".into()));
        }
        let deviation = hermiticity_deviation(&matrix);
        if !(deviation <= HERMITICITY_TOL) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Projects an arbitrary square matrix onto its Hermitian part `(A + A^†)/2`.
    pub fn symmetrized(matrix: DMatrix<C64>) -> Self {
        let adjoint = matrix.adjoint();
        let matrix = (matrix + adjoint).unscale(2.0);
        Self { matrix }
    }

    pub fn from_real(matrix: DMatrix<f64>) -> Result<Self> {
        Self::new(matrix.map(|x| C64::new(x, 0.0)))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    /// True when every entry has an exactly vanishing imaginary part.
    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|c| c.im == 0.0)
    }

    pub fn try_add(&self, other: &HermitianOperator) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn try_sub(&self, other: &HermitianOperator) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(factor),
        }
    }

    /// `H + c·I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut matrix = self.matrix.clone();
        for i in 0..matrix.nrows() {
            matrix[(i, i)] += c;
        }
        Self { matrix }
    }

    /// `H^2`, Hermitian for Hermitian `H`.
    pub fn squared(&self) -> Self {
        Self::symmetrized(&self.matrix * &self.matrix)
    }

    pub fn apply(&self, psi: &StateVector) -> Result<DVector<C64>> {
        self.check_dim(psi.dim())?;
        Ok(&self.matrix * psi.amplitudes())
    }

    /// `A·B - B·A` as a raw matrix (anti-Hermitian for Hermitian inputs).
    pub fn commutator(&self, other: &HermitianOperator) -> Result<DMatrix<C64>> {
        self.check_dim(other.dim())?;
        Ok(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim() != other {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other,
            });
        }
        Ok(())
    }
}

pub(crate) fn hermiticity_deviation(matrix: &DMatrix<C64>) -> f64 {
    let n = matrix.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in j..n {
            let d = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
            if d.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(d);
        }
    }
    worst
}

/// Compressed-sparse-row complex matrix.
///
/// Spin-chain terms have one nonzero per row per Pauli string, so the
/// propagator applies Hamiltonians through this form instead of dense
/// matrix–vector products.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseOperator {
    /// Builds from `(row, col, value)` triplets, summing duplicates and
    /// dropping exact zeros.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.max(c) + 1,
            });
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if rows.last() == Some(&r) && cols.last() == Some(&c) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }
        let mut kept_cols = Vec::with_capacity(cols.len());
        let mut kept_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != C64::new(0.0, 0.0) {
                row_ptr[r + 1] += 1;
                kept_cols.push(c);
                kept_vals.push(v);
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            dim,
            row_ptr,
            cols: kept_cols,
            vals: kept_vals,
        })
    }

    pub fn from_dense(op: &HermitianOperator) -> Self {
        let n = op.dim();
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = op.get(i, j);
                if v != C64::new(0.0, 0.0) {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, triplets).expect("indices are in range")
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: (0..=dim).collect(),
            cols: (0..dim).collect(),
            vals: vec![C64::new(1.0, 0.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `y += scale · A x`.
    pub fn apply_scaled_add(&self, scale: f64, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (row, out) in y.iter_mut().enumerate() {
            let (lo, hi) = (self.row_ptr[row], self.row_ptr[row + 1]);
            let mut acc = C64::new(0.0, 0.0);
            for k in lo..hi {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out += acc * scale;
        }
    }

    /// Adds `scale · A` into a dense matrix.
    pub fn add_scaled_into(&self, scale: f64, dense: &mut DMatrix<C64>) {
        for row in 0..self.dim {
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                dense[(row, self.cols[k])] += self.vals[k] * scale;
            }
        }
    }

    pub fn to_dense(&self) -> Result<HermitianOperator> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        self.add_scaled_into(1.0, &mut m);
        HermitianOperator::new(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_non_hermitian() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)]);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn rejects_non_square() {
        let m = DMatrix::<C64>::zeros(2, 3);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn construction_symmetrizes_tiny_asymmetry() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.5, 1e-14), c(0.5, 0.0), c(-1.0, 0.0)],
        );
        let h = HermitianOperator::new(m).unwrap();
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
    }

    #[test]
    fn sparse_sums_duplicates_and_drops_zeros() {
        let s = SparseOperator::from_triplets(
            2,
            vec![
                (0, 1, c(1.0, 0.0)),
                (0, 1, c(-1.0, 0.0)),
                (1, 1, c(2.0, 0.0)),
                (1, 1, c(1.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(s.nnz(), 1);
        let mut y = vec![c(0.0, 0.0); 2];
        s.apply_scaled_add(2.0, &[c(1.0, 0.0), c(1.0, 1.0)], &mut y);
        assert_eq!(y, vec![c(0.0, 0.0), c(6.0, 6.0)]);
    }

    #[test]
    fn sparse_dense_roundtrip() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, -2.0), c(0.0, 2.0), c(0.0, 0.0)]);
        let h = HermitianOperator::new(m).unwrap();
        assert_eq!(SparseOperator::from_dense(&h).to_dense().unwrap(), h);
    }
}
