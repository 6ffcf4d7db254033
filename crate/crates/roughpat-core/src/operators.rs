//! Differentiation matrices and the discrete Laplace-Beltrami operator.
//!
//! `D1` and `D2` are second-order centered differences on the periodic grid;
//! the duplicated endpoint rows repeat their partner's stencil so the
//! identification `u(first) = u(last)` is preserved by every operator built
//! from them. The surface Laplacian is assembled from nodal metric data as
//!
//! ```text
//! L = (1/sqrt(g)) (*) [ D1 (A1 (*) D1) + D2 (A4 (*) D2)
//!                     + D1 (A2 (*) D2) + D2 (A2 (*) D1) ]
//! ```
//!
//! where `a (*) M` scales row `i` of `M` by the nodal value `a_i`.

use crate::grid::Grid;
use crate::sparse::CsrMatrix;
use crate::surface::MetricField;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("metric field has {field} nodes but the operators are {dim}-dimensional")]
    ShapeMismatch { field: usize, dim: usize },
    #[error("differentiation matrices have mismatched dimensions ({d1} vs {d2})")]
    OperatorMismatch { d1: usize, d2: usize },
}

/// Centered-difference matrices for d/dx and d/dy on the periodic grid.
pub fn build_diff_matrices(grid: &Grid) -> (CsrMatrix, CsrMatrix) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let dim = grid.len();
    let cx = 1.0 / (2.0 * grid.hx());
    let cy = 1.0 / (2.0 * grid.hy());
    let mut tx = Vec::with_capacity(2 * dim);
    let mut ty = Vec::with_capacity(2 * dim);
    for j in 0..ny {
        for i in 0..nx {
            let r = grid.node_index(i, j);
            tx.push((r, grid.node_index(grid.right(i), j), cx));
            tx.push((r, grid.node_index(grid.left(i), j), -cx));
            ty.push((r, grid.node_index(i, grid.up(j)), cy));
            ty.push((r, grid.node_index(i, grid.down(j)), -cy));
        }
    }
    let d1 = CsrMatrix::from_triplets(dim, dim, &tx).prune_zeros();
    let d2 = CsrMatrix::from_triplets(dim, dim, &ty).prune_zeros();
    (d1, d2)
}

/// Assembles the discrete Laplace-Beltrami operator from nodal metric data.
pub fn assemble_laplace_beltrami(
    d1: &CsrMatrix,
    d2: &CsrMatrix,
    field: &MetricField,
) -> Result<CsrMatrix, OperatorError> {
    if d1.rows() != d2.rows() || d1.cols() != d2.cols() {
        return Err(OperatorError::OperatorMismatch { d1: d1.rows(), d2: d2.rows() });
    }
    if field.len() != d1.rows() {
        return Err(OperatorError::ShapeMismatch { field: field.len(), dim: d1.rows() });
    }
    let term_xx = d1.matmul(&d1.scale_rows(&field.a1));
    let term_yy = d2.matmul(&d2.scale_rows(&field.a4));
    let term_xy = d1.matmul(&d2.scale_rows(&field.a2));
    let term_yx = d2.matmul(&d1.scale_rows(&field.a2));
    let sum = term_xx.add(&term_yy).add(&term_xy).add(&term_yx);
    Ok(sum.scale_rows(&field.inv_sqrt_g).prune_zeros())
}
