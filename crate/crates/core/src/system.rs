//! Coupled multi-network block operators.
//!
//! A J-network problem couples one pressure field per network through a
//! zeroth-order exchange term. At the discrete level every block of the
//! coupled operator is a scalar multiple of the shared stiffness or mass
//! matrix, so the block operator stores two J x J weight matrices plus the
//! two shared sparse matrices and applies itself matrix-free.

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SparseMatrix};
use std::sync::Arc;

/// Material parameters of a J-network problem: positive permeability per
/// network and a symmetric, nonnegative exchange-coefficient matrix with
/// zero diagonal (self-exchange cancels identically).
#[derive(Debug, Clone)]
pub struct NetworkParams {
    permeability: Vec<f64>,
    exchange: DenseMatrix,
}

impl NetworkParams {
    pub fn new(permeability: Vec<f64>, exchange: DenseMatrix) -> Result<Self> {
        let j = permeability.len();
        if j == 0 {
            return Err(Error::InvalidArgument("need at least one network".into()));
        }
        if permeability.iter().any(|&k| !(k > 0.0) || !k.is_finite()) {
            return Err(Error::InvalidArgument(
                "permeabilities must be positive and finite".into(),
            ));
        }
        if exchange.nrows() != j || exchange.ncols() != j {
            return Err(Error::DimensionMismatch(format!(
                "exchange matrix {}x{} for {} networks",
                exchange.nrows(),
                exchange.ncols(),
                j
            )));
        }
        for a in 0..j {
            if exchange[(a, a)] != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "exchange diagonal must be zero (network {a})"
                )));
            }
            for b in 0..j {
                let v = exchange[(a, b)];
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "exchange coefficient ({a},{b}) = {v} must be nonnegative"
                    )));
                }
                if v != exchange[(b, a)] {
                    return Err(Error::InvalidArgument(format!(
                        "exchange coefficients must be symmetric: ({a},{b})"
                    )));
                }
            }
        }
        Ok(NetworkParams {
            permeability,
            exchange,
        })
    }

    /// Networks with no exchange coupling.
    pub fn uncoupled(permeability: Vec<f64>) -> Result<Self> {
        let j = permeability.len();
        Self::new(permeability, DenseMatrix::zeros(j, j))
    }

    /// Two networks with a single exchange coefficient.
    pub fn two_network(k1: f64, k2: f64, xi: f64) -> Result<Self> {
        Self::with_pairs(vec![k1, k2], &[(0, 1, xi)])
    }

    /// Build from a pair list `(a, b, xi_ab)` with `a != b` (0-based).
    pub fn with_pairs(permeability: Vec<f64>, pairs: &[(usize, usize, f64)]) -> Result<Self> {
        let j = permeability.len();
        let mut exchange = DenseMatrix::zeros(j, j);
        for &(a, b, v) in pairs {
            if a >= j || b >= j || a == b {
                return Err(Error::InvalidArgument(format!(
                    "exchange pair ({a},{b}) invalid for {j} networks"
                )));
            }
            exchange[(a, b)] = v;
            exchange[(b, a)] = v;
        }
        Self::new(permeability, exchange)
    }

    pub fn networks(&self) -> usize {
        self.permeability.len()
    }

    pub fn permeability(&self) -> &[f64] {
        &self.permeability
    }

    /// Exchange coefficient into network `a` from network `b`.
    pub fn exchange(&self, a: usize, b: usize) -> f64 {
        self.exchange[(a, b)]
    }

    pub fn exchange_matrix(&self) -> &DenseMatrix {
        &self.exchange
    }

    /// Lumped exchange of one network: the row sum of exchange coefficients.
    pub fn lumped_exchange(&self, a: usize) -> f64 {
        (0..self.networks()).map(|b| self.exchange[(a, b)]).sum()
    }
}

/// The J x J coefficient matrices of the coupled problem: the diagonal
/// permeability matrix and the graph-Laplacian-like exchange matrix with
/// row sums zero.
#[derive(Debug, Clone)]
pub struct CouplingMatrices {
    pub k_diag: DenseMatrix,
    pub exchange: DenseMatrix,
    pub xi_lumped: Vec<f64>,
}

/// Build the coupling matrices from network parameters. The exchange matrix
/// has `sum_i xi_{j<-i}` on the diagonal and `-xi_{j<-i}` off the diagonal,
/// which makes it symmetric positive semidefinite with zero row sums.
pub fn build_coupling(params: &NetworkParams) -> Result<CouplingMatrices> {
    let j = params.networks();
    let k_diag = DenseMatrix::diagonal(params.permeability());
    let mut exchange = DenseMatrix::zeros(j, j);
    let mut xi_lumped = Vec::with_capacity(j);
    for a in 0..j {
        let lumped = params.lumped_exchange(a);
        exchange[(a, a)] = lumped;
        xi_lumped.push(lumped);
        for b in 0..j {
            if a != b {
                exchange[(a, b)] = -params.exchange(a, b);
            }
        }
    }
    Ok(CouplingMatrices {
        k_diag,
        exchange,
        xi_lumped,
    })
}

/// Block operator over shared stiffness/mass matrices: block (j,i) acts as
/// `stiff_weights[j][i] * Stiffness + mass_weights[j][i] * Mass`.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    stiff_weights: DenseMatrix,
    mass_weights: DenseMatrix,
    stiffness: Arc<SparseMatrix>,
    mass: Arc<SparseMatrix>,
}

impl BlockOperator {
    pub fn new(
        stiff_weights: DenseMatrix,
        mass_weights: DenseMatrix,
        stiffness: &Arc<SparseMatrix>,
        mass: &Arc<SparseMatrix>,
    ) -> Result<Self> {
        let j = stiff_weights.nrows();
        if stiff_weights.ncols() != j || mass_weights.nrows() != j || mass_weights.ncols() != j {
            return Err(Error::DimensionMismatch(
                "block weight matrices must be square and equal-sized".into(),
            ));
        }
        if stiffness.nrows() != stiffness.ncols()
            || mass.nrows() != mass.ncols()
            || stiffness.nrows() != mass.nrows()
        {
            return Err(Error::DimensionMismatch(
                "stiffness and mass must be square with equal dimensions".into(),
            ));
        }
        Ok(BlockOperator {
            stiff_weights,
            mass_weights,
            stiffness: Arc::clone(stiffness),
            mass: Arc::clone(mass),
        })
    }

    pub fn blocks(&self) -> usize {
        self.stiff_weights.nrows()
    }

    /// Scalar dofs per network block.
    pub fn block_dim(&self) -> usize {
        self.stiffness.nrows()
    }

    /// Total dimension `J * block_dim`.
    pub fn dim(&self) -> usize {
        self.blocks() * self.block_dim()
    }

    pub fn stiff_weights(&self) -> &DenseMatrix {
        &self.stiff_weights
    }

    pub fn mass_weights(&self) -> &DenseMatrix {
        &self.mass_weights
    }

    pub fn stiffness(&self) -> &Arc<SparseMatrix> {
        &self.stiffness
    }

    pub fn mass(&self) -> &Arc<SparseMatrix> {
        &self.mass
    }

    /// Exact block matrix-vector product `y = A x` on stacked coefficient
    /// vectors, without materializing the coupled matrix.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "apply: vector length {} vs operator dimension {}",
                x.len(),
                self.dim()
            )));
        }
        let j = self.blocks();
        let m = self.block_dim();
        // One stiffness and one mass product per network serves all J^2 blocks.
        let mut stiff_products = vec![vec![0.0; m]; j];
        let mut mass_products = vec![vec![0.0; m]; j];
        for i in 0..j {
            let xi = &x[i * m..(i + 1) * m];
            self.stiffness.spmv_into(xi, &mut stiff_products[i]);
            self.mass.spmv_into(xi, &mut mass_products[i]);
        }
        let mut y = vec![0.0; self.dim()];
        for row in 0..j {
            let out = &mut y[row * m..(row + 1) * m];
            for col in 0..j {
                let sw = self.stiff_weights[(row, col)];
                if sw != 0.0 {
                    for (o, v) in out.iter_mut().zip(&stiff_products[col]) {
                        *o += sw * v;
                    }
                }
                let mw = self.mass_weights[(row, col)];
                if mw != 0.0 {
                    for (o, v) in out.iter_mut().zip(&mass_products[col]) {
                        *o += mw * v;
                    }
                }
            }
        }
        Ok(y)
    }

    /// Dense materialization for oracle-sized problems (dimension <= 2048).
    pub fn materialize_dense(&self) -> Result<DenseMatrix> {
        if self.dim() > 2048 {
            return Err(Error::SizeLimit(format!(
                "materialize_dense: dimension {} exceeds 2048",
                self.dim()
            )));
        }
        let j = self.blocks();
        let m = self.block_dim();
        let mut dense = DenseMatrix::zeros(self.dim(), self.dim());
        for row in 0..j {
            for col in 0..j {
                let sw = self.stiff_weights[(row, col)];
                let mw = self.mass_weights[(row, col)];
                if sw == 0.0 && mw == 0.0 {
                    continue;
                }
                for r in 0..m {
                    if sw != 0.0 {
                        for (c, v) in self.stiffness.row(r) {
                            dense[(row * m + r, col * m + c)] += sw * v;
                        }
                    }
                    if mw != 0.0 {
                        for (c, v) in self.mass.row(r) {
                            dense[(row * m + r, col * m + c)] += mw * v;
                        }
                    }
                }
            }
        }
        Ok(dense)
    }
}

/// Assemble the standard coupled operator: block (j,j) is
/// `K_j * Stiffness + xi_j * Mass` and block (j,i) is `-xi_{j<-i} * Mass`.
pub fn assemble_standard(
    params: &NetworkParams,
    stiffness: &Arc<SparseMatrix>,
    mass: &Arc<SparseMatrix>,
) -> Result<BlockOperator> {
    let coupling = build_coupling(params)?;
    BlockOperator::new(coupling.k_diag, coupling.exchange, stiffness, mass)
}
