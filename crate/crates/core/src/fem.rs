//! P1 finite-element assembly on structured meshes.
//!
//! Stiffness and consistent mass matrices are assembled from exact element
//! integrals and restricted to a degree-of-freedom subset. Homogeneous
//! Dirichlet conditions are imposed by restriction to interior vertices,
//! which keeps every operator symmetric positive definite.

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::mesh::StructuredMesh;

/// Maps mesh vertices to matrix rows. Ordering follows vertex order
/// (row-major), so the layout is deterministic.
#[derive(Debug, Clone)]
pub struct DofMap {
    dofs: Vec<usize>,
    index_of: Vec<Option<usize>>,
}

impl DofMap {
    /// Interior vertices only: realizes the zero boundary condition by
    /// eliminating boundary rows and columns.
    pub fn interior(mesh: &StructuredMesh) -> Self {
        Self::from_mask(mesh, |on_boundary| !on_boundary)
    }

    /// All vertices, no boundary condition (used by mass-matrix tests and
    /// partition-of-unity checks).
    pub fn all(mesh: &StructuredMesh) -> Self {
        Self::from_mask(mesh, |_| true)
    }

    fn from_mask(mesh: &StructuredMesh, keep: impl Fn(bool) -> bool) -> Self {
        let mut dofs = Vec::new();
        let mut index_of = vec![None; mesh.num_vertices()];
        for (v, &on_boundary) in mesh.boundary_mask().iter().enumerate() {
            if keep(on_boundary) {
                index_of[v] = Some(dofs.len());
                dofs.push(v);
            }
        }
        DofMap { dofs, index_of }
    }

    pub fn n_dofs(&self) -> usize {
        self.dofs.len()
    }

    /// Vertex index of a dof.
    pub fn vertex(&self, dof: usize) -> usize {
        self.dofs[dof]
    }

    /// Dof index of a vertex, if the vertex carries one.
    pub fn dof_of(&self, vertex: usize) -> Option<usize> {
        self.index_of[vertex]
    }
}

fn check_dof_map(mesh: &StructuredMesh, dofs: &DofMap) -> Result<()> {
    if dofs.index_of.len() != mesh.num_vertices() {
        return Err(Error::DimensionMismatch(
            "dof map does not match mesh".into(),
        ));
    }
    Ok(())
}

/// Element geometry factors for a P1 triangle: area and the gradient
/// coefficients of the three barycentric basis functions.
fn element_gradients(mesh: &StructuredMesh, cell: &[usize; 3]) -> (f64, [f64; 3], [f64; 3]) {
    let p: Vec<[f64; 2]> = cell.iter().map(|&v| mesh.vertices()[v]).collect();
    let area = 0.5
        * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
            - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
    let two_a = 2.0 * area;
    let bx = [
        (p[1][1] - p[2][1]) / two_a,
        (p[2][1] - p[0][1]) / two_a,
        (p[0][1] - p[1][1]) / two_a,
    ];
    let by = [
        (p[2][0] - p[1][0]) / two_a,
        (p[0][0] - p[2][0]) / two_a,
        (p[1][0] - p[0][0]) / two_a,
    ];
    (area, bx, by)
}

/// Assemble the P1 stiffness matrix (integrals of grad phi_i . grad phi_j)
/// restricted to the given dofs.
pub fn assemble_stiffness(mesh: &StructuredMesh, dofs: &DofMap) -> Result<SparseMatrix> {
    check_dof_map(mesh, dofs)?;
    let mut triplets = Vec::with_capacity(mesh.num_cells() * 9);
    for cell in mesh.cells() {
        let (area, bx, by) = element_gradients(mesh, cell);
        for i in 0..3 {
            let Some(di) = dofs.dof_of(cell[i]) else {
                continue;
            };
            for j in 0..3 {
                let Some(dj) = dofs.dof_of(cell[j]) else {
                    continue;
                };
                triplets.push((di, dj, area * (bx[i] * bx[j] + by[i] * by[j])));
            }
        }
    }
    SparseMatrix::from_triplets(dofs.n_dofs(), dofs.n_dofs(), &triplets, true)
}

/// Assemble the consistent P1 mass matrix (integrals of phi_i phi_j)
/// restricted to the given dofs. Element matrix is (area/12)(1 + I).
pub fn assemble_mass(mesh: &StructuredMesh, dofs: &DofMap) -> Result<SparseMatrix> {
    check_dof_map(mesh, dofs)?;
    let mut triplets = Vec::with_capacity(mesh.num_cells() * 9);
    for cell in mesh.cells() {
        let (area, _, _) = element_gradients(mesh, cell);
        for i in 0..3 {
            let Some(di) = dofs.dof_of(cell[i]) else {
                continue;
            };
            for j in 0..3 {
                let Some(dj) = dofs.dof_of(cell[j]) else {
                    continue;
                };
                let w = if i == j { 2.0 } else { 1.0 };
                triplets.push((di, dj, w * area / 12.0));
            }
        }
    }
    SparseMatrix::from_triplets(dofs.n_dofs(), dofs.n_dofs(), &triplets, true)
}

/// L2 inner product of two coefficient vectors: `u^T M v`.
pub fn l2_inner(mass: &SparseMatrix, u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != mass.nrows() || v.len() != mass.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "l2_inner: {} and {} against {}x{}",
            u.len(),
            v.len(),
            mass.nrows(),
            mass.ncols()
        )));
    }
    let mv = mass.spmv(v)?;
    Ok(u.iter().zip(&mv).map(|(a, b)| a * b).sum())
}
