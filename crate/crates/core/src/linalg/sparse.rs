//! Compressed-row sparse matrices.

use crate::error::{Error, Result};

/// Symmetric-capable sparse matrix in compressed-row storage.
///
/// Entries within each row are sorted by column index. The `symmetric` flag
/// is an assertion by the constructor (duplicate triplets are summed in
/// insertion order, so matrices assembled from symmetric element matrices
/// come out exactly symmetric).
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseMatrix {
    /// Build from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
        symmetric: bool,
    ) -> Result<Self> {
        if symmetric && nrows != ncols {
            return Err(Error::InvalidArgument(
                "symmetric matrix must be square".into(),
            ));
        }
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            if r >= nrows || c >= ncols {
                return Err(Error::InvalidArgument(format!(
                    "triplet ({r},{c}) outside {nrows}x{ncols}"
                )));
            }
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let nnz = counts[nrows];
        let mut cols = vec![0usize; nnz];
        let mut vals = vec![0.0; nnz];
        let mut next = counts.clone();
        for &(r, c, v) in triplets {
            let k = next[r];
            cols[k] = c;
            vals[k] = v;
            next[r] += 1;
        }
        // Sort each row by column and merge duplicates in place.
        let mut row_offsets = Vec::with_capacity(nrows + 1);
        let mut out_cols = Vec::with_capacity(nnz);
        let mut out_vals = Vec::with_capacity(nnz);
        row_offsets.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for r in 0..nrows {
            scratch.clear();
            scratch.extend(
                cols[counts[r]..counts[r + 1]]
                    .iter()
                    .copied()
                    .zip(vals[counts[r]..counts[r + 1]].iter().copied()),
            );
            scratch.sort_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < scratch.len() {
                let c = scratch[i].0;
                let mut sum = 0.0;
                while i < scratch.len() && scratch[i].0 == c {
                    sum += scratch[i].1;
                    i += 1;
                }
                out_cols.push(c);
                out_vals.push(sum);
            }
            row_offsets.push(out_cols.len());
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices: out_cols,
            values: out_vals,
            symmetric,
        })
    }

    /// Identity matrix (handy in tests).
    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
            symmetric: true,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_symmetric_flagged(&self) -> bool {
        self.symmetric
    }

    /// Sorted (column, value) pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_offsets[r];
        let hi = self.row_offsets[r + 1];
        self.col_indices[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    /// Stored value at (r, c), or 0 if the entry is not stored.
    pub fn value_at(&self, r: usize, c: usize) -> f64 {
        let lo = self.row_offsets[r];
        let hi = self.row_offsets[r + 1];
        match self.col_indices[lo..hi].binary_search(&c) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    /// y = A x.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for r in 0..self.nrows {
            let lo = self.row_offsets[r];
            let hi = self.row_offsets[r + 1];
            let mut acc = 0.0;
            for k in lo..hi {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            y[r] = acc;
        }
    }

    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch(format!(
                "spmv: vector length {} vs {} columns",
                x.len(),
                self.ncols
            )));
        }
        let mut y = vec![0.0; self.nrows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// a*A + b*B with merged sparsity patterns.
    pub fn linear_combination(a: f64, ma: &SparseMatrix, b: f64, mb: &SparseMatrix) -> Result<Self> {
        if ma.nrows != mb.nrows || ma.ncols != mb.ncols {
            return Err(Error::DimensionMismatch(format!(
                "linear_combination: {}x{} vs {}x{}",
                ma.nrows, ma.ncols, mb.nrows, mb.ncols
            )));
        }
        let mut row_offsets = Vec::with_capacity(ma.nrows + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_offsets.push(0);
        for r in 0..ma.nrows {
            let mut ia = ma.row_offsets[r];
            let ea = ma.row_offsets[r + 1];
            let mut ib = mb.row_offsets[r];
            let eb = mb.row_offsets[r + 1];
            while ia < ea || ib < eb {
                let ca = if ia < ea { ma.col_indices[ia] } else { usize::MAX };
                let cb = if ib < eb { mb.col_indices[ib] } else { usize::MAX };
                if ca < cb {
                    cols.push(ca);
                    vals.push(a * ma.values[ia]);
                    ia += 1;
                } else if cb < ca {
                    cols.push(cb);
                    vals.push(b * mb.values[ib]);
                    ib += 1;
                } else {
                    cols.push(ca);
                    vals.push(a * ma.values[ia] + b * mb.values[ib]);
                    ia += 1;
                    ib += 1;
                }
            }
            row_offsets.push(cols.len());
        }
        Ok(SparseMatrix {
            nrows: ma.nrows,
            ncols: ma.ncols,
            row_offsets,
            col_indices: cols,
            values: vals,
            symmetric: ma.symmetric && mb.symmetric,
        })
    }

    /// Dense copy, for oracle-sized problems only.
    pub fn to_dense(&self) -> crate::linalg::DenseMatrix {
        let mut dense = crate::linalg::DenseMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                dense[(r, c)] = v;
            }
        }
        dense
    }

    /// Max |A[i][j] - A[j][i]| over stored entries (0 for exact symmetry).
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.value_at(c, r)).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let m = SparseMatrix::from_triplets(
            2,
            2,
            &[(0, 1, 2.0), (0, 0, 1.0), (0, 1, 3.0), (1, 1, 4.0)],
            false,
        )
        .unwrap();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.value_at(0, 0), 1.0);
        assert_eq!(m.value_at(0, 1), 5.0);
        assert_eq!(m.value_at(1, 1), 4.0);
        assert_eq!(m.value_at(1, 0), 0.0);
    }

    #[test]
    fn out_of_range_triplet_rejected() {
        assert!(SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)], false).is_err());
    }

    #[test]
    fn spmv_matches_dense() {
        let m = SparseMatrix::from_triplets(
            3,
            3,
            &[(0, 0, 2.0), (0, 2, -1.0), (1, 1, 3.0), (2, 0, -1.0), (2, 2, 2.0)],
            true,
        )
        .unwrap();
        let x = [1.0, 2.0, 3.0];
        let y = m.spmv(&x).unwrap();
        assert_eq!(y, vec![-1.0, 6.0, 5.0]);
        assert!(m.spmv(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn linear_combination_merges_patterns() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)], true).unwrap();
        let b = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)], true).unwrap();
        let c = SparseMatrix::linear_combination(2.0, &a, 3.0, &b).unwrap();
        assert_eq!(c.value_at(0, 0), 2.0);
        assert_eq!(c.value_at(0, 1), 3.0);
        assert_eq!(c.value_at(1, 0), 3.0);
        assert_eq!(c.value_at(1, 1), 2.0);
        assert_eq!(c.symmetry_defect(), 0.0);
    }
}
