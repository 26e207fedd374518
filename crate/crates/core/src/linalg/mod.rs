//! Sparse and dense linear-algebra kernels: compressed-row matrices, exact
//! sparse SPD factorization, symmetric (generalized) eigensolvers and
//! tridiagonal extreme eigenvalues.

mod cholesky;
mod dense;
mod sparse;
mod tridiag;

pub use cholesky::{spd_factorize, SpdFactorization};
pub use dense::{
    backward_substitute, dense_cholesky, dense_sym_eig, forward_substitute, generalized_sym_eig,
    DenseMatrix,
};
pub use sparse::SparseMatrix;
pub use tridiag::tridiag_eig_extremes;
