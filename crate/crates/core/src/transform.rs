//! Simultaneous diagonalization by congruence.
//!
//! An invertible J x J matrix `T` decouples the coupled networks when both
//! `T^T K T` and `T^T E T` are diagonal. Since `K` is diagonal positive, the
//! canonical choice used here is `T = K^{-1/2} Q` where `Q` diagonalizes the
//! symmetric matrix `S = K^{-1/2} E K^{-1/2}`: then `T^T K T = I` and
//! `T^T E T = diag(eigenvalues of S)`, which equal the eigenvalues of
//! `K^{-1} E` by similarity. Unlike raw eigenvectors of `K^{-1} E`, this
//! works unchanged for repeated eigenvalues.

use crate::error::{Error, Result};
use crate::linalg::{dense_sym_eig, DenseMatrix, SparseMatrix};
use crate::system::{build_coupling, BlockOperator, NetworkParams};
use std::sync::Arc;

/// A congruence transform together with the diagonals it produces and the
/// off-diagonal residuals of the transformed coefficient matrices.
#[derive(Debug, Clone)]
pub struct CongruenceTransform {
    matrix: DenseMatrix,
    k_tilde: Vec<f64>,
    xi_tilde: Vec<f64>,
    residual_k: f64,
    residual_e: f64,
}

impl CongruenceTransform {
    /// The transformation matrix `T`.
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn networks(&self) -> usize {
        self.matrix.nrows()
    }

    /// Diagonal of `T^T K T` (all ones for the canonical construction).
    pub fn k_tilde(&self) -> &[f64] {
        &self.k_tilde
    }

    /// Diagonal of `T^T E T`: the decoupled exchange weights, ascending.
    pub fn xi_tilde(&self) -> &[f64] {
        &self.xi_tilde
    }

    /// Off-diagonal Frobenius norm of `T^T K T`.
    pub fn residual_k(&self) -> f64 {
        self.residual_k
    }

    /// Off-diagonal Frobenius norm of `T^T E T`.
    pub fn residual_e(&self) -> f64 {
        self.residual_e
    }
}

fn congruence(t: &DenseMatrix, m: &DenseMatrix) -> Result<DenseMatrix> {
    t.transpose().matmul(m)?.matmul(t)
}

/// Compute the canonical congruence transform for the given parameters.
///
/// With all exchange coefficients zero the eigensolver is skipped and
/// `T = K^{-1/2}` is returned directly.
pub fn diagonalize_by_congruence(params: &NetworkParams) -> Result<CongruenceTransform> {
    let j = params.networks();
    let coupling = build_coupling(params)?;
    let inv_sqrt_k: Vec<f64> = params.permeability().iter().map(|k| 1.0 / k.sqrt()).collect();

    let coupled = params
        .exchange_matrix()
        .data()
        .iter()
        .any(|&v| v != 0.0);
    let t = if !coupled {
        DenseMatrix::diagonal(&inv_sqrt_k)
    } else {
        // S = K^{-1/2} E K^{-1/2}, symmetric with the spectrum of K^{-1} E.
        let mut s = DenseMatrix::zeros(j, j);
        for a in 0..j {
            for b in 0..j {
                s[(a, b)] = inv_sqrt_k[a] * coupling.exchange[(a, b)] * inv_sqrt_k[b];
            }
        }
        let (_, mut q) = dense_sym_eig(&s)?;
        // Deterministic sign: largest-magnitude entry of each column positive.
        for col in 0..j {
            let mut best = 0usize;
            for row in 1..j {
                if q[(row, col)].abs() > q[(best, col)].abs() {
                    best = row;
                }
            }
            if q[(best, col)] < 0.0 {
                for row in 0..j {
                    q[(row, col)] = -q[(row, col)];
                }
            }
        }
        let mut t = q;
        for row in 0..j {
            for col in 0..j {
                t[(row, col)] *= inv_sqrt_k[row];
            }
        }
        t
    };

    let k_transformed = congruence(&t, &coupling.k_diag)?;
    let e_transformed = congruence(&t, &coupling.exchange)?;
    let k_tilde: Vec<f64> = (0..j).map(|i| k_transformed[(i, i)]).collect();
    // Eigenvalues of a positive semidefinite matrix; clamp round-off negatives.
    let xi_tilde: Vec<f64> = (0..j).map(|i| e_transformed[(i, i)].max(0.0)).collect();
    if k_tilde.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::NotSpd(
            "congruence produced a nonpositive permeability weight".into(),
        ));
    }
    Ok(CongruenceTransform {
        matrix: t,
        k_tilde,
        xi_tilde,
        residual_k: k_transformed.off_diagonal_frobenius(),
        residual_e: e_transformed.off_diagonal_frobenius(),
    })
}

/// Off-diagonal Frobenius norms of `T^T K T` and `T^T E T` for an arbitrary
/// candidate transform `T` (not only the canonical one).
pub fn verify_congruence(t: &DenseMatrix, params: &NetworkParams) -> Result<(f64, f64)> {
    let j = params.networks();
    if t.nrows() != j || t.ncols() != j {
        return Err(Error::DimensionMismatch(format!(
            "verify_congruence: {}x{} transform for {} networks",
            t.nrows(),
            t.ncols(),
            j
        )));
    }
    let coupling = build_coupling(params)?;
    let k_transformed = congruence(t, &coupling.k_diag)?;
    let e_transformed = congruence(t, &coupling.exchange)?;
    Ok((
        k_transformed.off_diagonal_frobenius(),
        e_transformed.off_diagonal_frobenius(),
    ))
}

fn blockwise_map(
    t: &DenseMatrix,
    transpose: bool,
    stacked: &[f64],
    networks: usize,
) -> Result<Vec<f64>> {
    if networks == 0 || stacked.len() % networks != 0 {
        return Err(Error::DimensionMismatch(format!(
            "stacked vector length {} not divisible into {} blocks",
            stacked.len(),
            networks
        )));
    }
    let m = stacked.len() / networks;
    let mut out = vec![0.0; stacked.len()];
    for row in 0..networks {
        for col in 0..networks {
            let w = if transpose { t[(col, row)] } else { t[(row, col)] };
            if w == 0.0 {
                continue;
            }
            let src = &stacked[col * m..(col + 1) * m];
            let dst = &mut out[row * m..(row + 1) * m];
            for (o, v) in dst.iter_mut().zip(src) {
                *o += w * v;
            }
        }
    }
    Ok(out)
}

/// Map a stacked load vector into transformed variables: `g_tilde = T^T g`
/// applied across the network index at every dof.
pub fn transform_rhs(ct: &CongruenceTransform, g: &[f64]) -> Result<Vec<f64>> {
    blockwise_map(&ct.matrix, true, g, ct.networks())
}

/// Map a transformed solution back to the original variables: `p = T p_tilde`.
pub fn recover_solution(ct: &CongruenceTransform, p_tilde: &[f64]) -> Result<Vec<f64>> {
    blockwise_map(&ct.matrix, false, p_tilde, ct.networks())
}

/// Assemble the transformed operator: block-diagonal with block `j` equal to
/// `k_tilde_j * Stiffness + xi_tilde_j * Mass`.
pub fn assemble_transformed(
    ct: &CongruenceTransform,
    stiffness: &Arc<SparseMatrix>,
    mass: &Arc<SparseMatrix>,
) -> Result<BlockOperator> {
    BlockOperator::new(
        DenseMatrix::diagonal(&ct.k_tilde),
        DenseMatrix::diagonal(&ct.xi_tilde),
        stiffness,
        mass,
    )
}
