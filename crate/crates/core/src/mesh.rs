//! Uniform structured triangulations of the unit square.
//!
//! The mesh splits an `n x n` grid of squares into `2n^2` right triangles,
//! all along the same (lower-left to upper-right) diagonal. Vertices are
//! ordered row-major, cells lexicographically by square, so the layout is
//! fully deterministic and safe to share read-only between threads.

use crate::error::{Error, Result};

/// Triangulation of `[0,1]^2` with `n` subdivisions per side.
#[derive(Debug, Clone)]
pub struct StructuredMesh {
    n: usize,
    h: f64,
    vertices: Vec<[f64; 2]>,
    cells: Vec<[usize; 3]>,
    boundary_mask: Vec<bool>,
}

impl StructuredMesh {
    /// Subdivisions per side.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid spacing `1/n`.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Vertex coordinates, row-major: index `iy*(n+1) + ix`.
    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Vertex-index triples, counter-clockwise.
    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    /// True iff the vertex lies on `x in {0,1}` or `y in {0,1}`.
    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary_mask
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_boundary_vertices(&self) -> usize {
        self.boundary_mask.iter().filter(|&&b| b).count()
    }

    /// Signed area of a cell (positive for counter-clockwise orientation).
    pub fn signed_area(&self, cell: usize) -> f64 {
        let [a, b, c] = self.cells[cell];
        let pa = self.vertices[a];
        let pb = self.vertices[b];
        let pc = self.vertices[c];
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
    }
}

/// Build the uniform triangulation of the unit square with `n` subdivisions
/// per side: `(n+1)^2` vertices, `2n^2` cells, every square split along the
/// lower-left to upper-right diagonal.
pub fn build_unit_square_mesh(n: usize) -> Result<StructuredMesh> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "mesh subdivisions must be >= 1".into(),
        ));
    }
    let nv = n + 1;
    let mut vertices = Vec::with_capacity(nv * nv);
    let mut boundary_mask = Vec::with_capacity(nv * nv);
    for iy in 0..nv {
        for ix in 0..nv {
            vertices.push([ix as f64 / n as f64, iy as f64 / n as f64]);
            boundary_mask.push(ix == 0 || ix == n || iy == 0 || iy == n);
        }
    }
    let mut cells = Vec::with_capacity(2 * n * n);
    for iy in 0..n {
        for ix in 0..n {
            let a = iy * nv + ix; // lower-left
            let b = a + 1; // lower-right
            let c = a + nv + 1; // upper-right
            let d = a + nv; // upper-left
            cells.push([a, b, c]);
            cells.push([a, c, d]);
        }
    }
    Ok(StructuredMesh {
        n,
        h: 1.0 / n as f64,
        vertices,
        cells,
        boundary_mask,
    })
}
