//! Dense matrices and symmetric eigensolvers.
//!
//! The eigensolver is a cyclic Jacobi rotation scheme. It is slower than
//! tridiagonalization+QL but foolproof for real symmetric matrices and more
//! than accurate enough at the sizes used here (coupling matrices of order
//! J <= 8 and oracle systems of a few hundred rows).

use crate::error::{Error, Result};
use std::ops::{Index, IndexMut};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseMatrix {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Build from nested rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            data.extend_from_slice(row);
        }
        Ok(DenseMatrix { nrows, ncols, data })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch(format!(
                "matmul: {}x{} * {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut out = DenseMatrix::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.ncols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch(format!(
                "matvec: vector length {} vs {} columns",
                x.len(),
                self.ncols
            )));
        }
        let mut y = vec![0.0; self.nrows];
        for i in 0..self.nrows {
            y[i] = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
        Ok(y)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the off-diagonal part.
    pub fn off_diagonal_frobenius(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                if i != j {
                    acc += self[(i, j)] * self[(i, j)];
                }
            }
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            for j in (i + 1)..self.ncols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.ncols + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.ncols + c]
    }
}

fn check_square_symmetric(s: &DenseMatrix, what: &str) -> Result<()> {
    if s.nrows != s.ncols {
        return Err(Error::InvalidArgument(format!("{what}: matrix not square")));
    }
    if !s.is_finite() {
        return Err(Error::NonFinite(format!("{what}: non-finite entries")));
    }
    let defect = s.symmetry_defect();
    if defect > 1e-12 * s.max_abs().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "{what}: matrix not symmetric (defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the orthonormal eigenvector
/// matrix `Q` with matching column order, so `S = Q diag(w) Q^T`.
/// Sweeps stop once the off-diagonal Frobenius norm drops below
/// `1e-14 * ||S||_F`.
pub fn dense_sym_eig(s: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    check_square_symmetric(s, "dense_sym_eig")?;
    let n = s.nrows;
    if n == 0 {
        return Ok((Vec::new(), DenseMatrix::zeros(0, 0)));
    }
    // Work on the symmetrized copy so tiny input asymmetry cannot bias sweeps.
    let mut a = s.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let mut q = DenseMatrix::identity(n);
    let norm = a.frobenius_norm();
    let threshold = 1e-14 * norm;
    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        if a.off_diagonal_frobenius() <= threshold {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let arr = a[(r, r)];
                let theta = (arr - app) / (2.0 * apr);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                // Rotate rows/columns p and r of A.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = c * akp - sn * akr;
                    a[(k, r)] = sn * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = c * apk - sn * ark;
                    a[(r, k)] = sn * apk + c * ark;
                }
                // Accumulate eigenvectors.
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - sn * qkr;
                    q[(k, r)] = sn * qkp + c * qkr;
                }
            }
        }
    }
    // Sort ascending, permuting eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, new)] = q[(k, old)];
        }
    }
    Ok((eigenvalues, vectors))
}

/// Lower Cholesky factor of a symmetric positive definite dense matrix.
pub fn dense_cholesky(a: &DenseMatrix) -> Result<DenseMatrix> {
    check_square_symmetric(a, "dense_cholesky")?;
    let n = a.nrows;
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::NotSpd(format!(
                        "dense_cholesky: pivot {sum:.3e} at row {i}"
                    )));
                }
                l[(i, i)] = sum.sqrt();
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    Ok(l)
}

/// Solve L x = b for lower-triangular L.
pub fn forward_substitute(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.nrows();
    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            x[i] -= l[(i, k)] * x[k];
        }
        x[i] /= l[(i, i)];
    }
    x
}

/// Solve L^T x = b for lower-triangular L.
pub fn backward_substitute(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.nrows();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            x[i] -= l[(k, i)] * x[k];
        }
        x[i] /= l[(i, i)];
    }
    x
}

/// Eigenvalues (ascending) of the symmetric-definite generalized problem
/// `A x = lambda B x`, i.e. the spectrum of `B^{-1} A`.
///
/// Reduces to a standard symmetric problem `L^{-1} A L^{-T}` with `B = L L^T`.
pub fn generalized_sym_eig(a: &DenseMatrix, b: &DenseMatrix) -> Result<Vec<f64>> {
    check_square_symmetric(a, "generalized_sym_eig(a)")?;
    check_square_symmetric(b, "generalized_sym_eig(b)")?;
    if a.nrows != b.nrows {
        return Err(Error::DimensionMismatch(format!(
            "generalized_sym_eig: {} vs {}",
            a.nrows, b.nrows
        )));
    }
    let l = dense_cholesky(b)?;
    let n = a.nrows;
    // Y = L^{-1} A, column by column.
    let mut y = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| a[(i, j)]).collect();
        let sol = forward_substitute(&l, &col);
        for i in 0..n {
            y[(i, j)] = sol[i];
        }
    }
    // W = Y L^{-T} = (L^{-1} Y^T)^T, again column by column.
    let mut w = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| y[(j, i)]).collect();
        let sol = forward_substitute(&l, &col);
        for i in 0..n {
            w[(j, i)] = sol[i];
        }
    }
    // Round-off can leave W very slightly asymmetric; symmetrize.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (w[(i, j)] + w[(j, i)]);
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    let (eigenvalues, _) = dense_sym_eig(&w)?;
    Ok(eigenvalues)
}
