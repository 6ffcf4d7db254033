//! Compressed sparse row matrices and direct linear solves.
//!
//! The assembly pipeline only needs a handful of operations: triplet
//! construction, row scaling, matrix products, sums, and shifted-identity
//! combinations. Those are implemented here directly so the operator algebra
//! stays transparent. Factorization and triangular solves are delegated to
//! `faer`'s sparse LU behind [`FactorizedMatrix`]; every solve is verified
//! against a residual bound before it is returned.

use faer::prelude::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use std::sync::Once;
use thiserror::Error;

/// Relative residual bound enforced by [`FactorizedMatrix::solve`].
pub const SOLVE_RESIDUAL_RTOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("matrix must be square to factorize (got {rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("rhs length {got} does not match system dimension {dim}")]
    RhsLength { dim: usize, got: usize },
    #[error("sparse LU factorization failed: {0}")]
    Factorization(String),
    #[error(
        "linear solve failed the residual check (|Ax-b|/|b| = {residual_ratio:.3e}, \
         bound {bound:.1e}); matrix is singular or severely ill-conditioned"
    )]
    ResidualTooLarge { residual_ratio: f64, bound: f64 },
}

/// Sparse matrix in CSR form with sorted, duplicate-free column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from (row, col, value) triplets. Duplicate positions
    /// are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; rows + 1];
        for &(r, c, _) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) out of bounds");
            counts[r + 1] += 1;
        }
        for r in 0..rows {
            counts[r + 1] += counts[r];
        }
        let mut col_idx = vec![0usize; triplets.len()];
        let mut values = vec![0.0; triplets.len()];
        let mut fill = counts.clone();
        for &(r, c, v) in triplets {
            let slot = fill[r];
            col_idx[slot] = c;
            values[slot] = v;
            fill[r] += 1;
        }
        // sort each row by column and merge duplicates
        let mut out_ptr = Vec::with_capacity(rows + 1);
        let mut out_col = Vec::with_capacity(triplets.len());
        let mut out_val = Vec::with_capacity(triplets.len());
        out_ptr.push(0);
        let mut order: Vec<usize> = Vec::new();
        for r in 0..rows {
            let (lo, hi) = (counts[r], counts[r + 1]);
            order.clear();
            order.extend(lo..hi);
            order.sort_by_key(|&k| col_idx[k]);
            let mut k = 0;
            while k < order.len() {
                let c = col_idx[order[k]];
                let mut v = values[order[k]];
                k += 1;
                while k < order.len() && col_idx[order[k]] == c {
                    v += values[order[k]];
                    k += 1;
                }
                out_col.push(c);
                out_val.push(v);
            }
            out_ptr.push(out_col.len());
        }
        CsrMatrix {
            rows,
            cols,
            row_ptr: out_ptr,
            col_idx: out_col,
            values: out_val,
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// Iterates stored entries as (row, col, value).
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols, "input length mismatch");
        assert_eq!(y.len(), self.rows, "output length mismatch");
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[r] = acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.apply_into(x, &mut y);
        y
    }

    /// Scales row `i` by `d[i]` (the nodal Hadamard product `d (*) M`).
    pub fn scale_rows(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.rows, "row scaling vector length mismatch");
        let mut out = self.clone();
        for r in 0..self.rows {
            let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
            for v in &mut out.values[lo..hi] {
                *v *= d[r];
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= c;
        }
        out
    }

    /// Sparse matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut acc = vec![0.0; rhs.cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut out_ptr = Vec::with_capacity(self.rows + 1);
        let mut out_col = Vec::new();
        let mut out_val = Vec::new();
        out_ptr.push(0);
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            for (&k, &a) in cols.iter().zip(vals) {
                let (rcols, rvals) = rhs.row(k);
                for (&c, &b) in rcols.iter().zip(rvals) {
                    if acc[c] == 0.0 && !touched.contains(&c) {
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                out_col.push(c);
                out_val.push(acc[c]);
                acc[c] = 0.0;
            }
            touched.clear();
            out_ptr.push(out_col.len());
        }
        CsrMatrix {
            rows: self.rows,
            cols: rhs.cols,
            row_ptr: out_ptr,
            col_idx: out_col,
            values: out_val,
        }
    }

    /// Entrywise sum `self + other`.
    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add shape mismatch");
        let mut out_ptr = Vec::with_capacity(self.rows + 1);
        let mut out_col = Vec::new();
        let mut out_val = Vec::new();
        out_ptr.push(0);
        for r in 0..self.rows {
            let (ac, av) = self.row(r);
            let (bc, bv) = other.row(r);
            let (mut i, mut j) = (0, 0);
            while i < ac.len() || j < bc.len() {
                if j >= bc.len() || (i < ac.len() && ac[i] < bc[j]) {
                    out_col.push(ac[i]);
                    out_val.push(av[i]);
                    i += 1;
                } else if i >= ac.len() || bc[j] < ac[i] {
                    out_col.push(bc[j]);
                    out_val.push(bv[j]);
                    j += 1;
                } else {
                    out_col.push(ac[i]);
                    out_val.push(av[i] + bv[j]);
                    i += 1;
                    j += 1;
                }
            }
            out_ptr.push(out_col.len());
        }
        CsrMatrix {
            rows: self.rows,
            cols: self.cols,
            row_ptr: out_ptr,
            col_idx: out_col,
            values: out_val,
        }
    }

    /// Builds `c*I + s*self`, inserting diagonal entries where missing.
    pub fn scaled_add_identity(&self, s: f64, c: f64) -> CsrMatrix {
        assert_eq!(self.rows, self.cols, "shifted identity needs a square matrix");
        let mut out_ptr = Vec::with_capacity(self.rows + 1);
        let mut out_col = Vec::new();
        let mut out_val = Vec::new();
        out_ptr.push(0);
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            let mut placed = false;
            for (&col, &v) in cols.iter().zip(vals) {
                if !placed && col >= r {
                    if col == r {
                        out_col.push(r);
                        out_val.push(c + s * v);
                    } else {
                        out_col.push(r);
                        out_val.push(c);
                        out_col.push(col);
                        out_val.push(s * v);
                    }
                    placed = true;
                    continue;
                }
                out_col.push(col);
                out_val.push(s * v);
            }
            if !placed {
                out_col.push(r);
                out_val.push(c);
            }
            out_ptr.push(out_col.len());
        }
        CsrMatrix {
            rows: self.rows,
            cols: self.cols,
            row_ptr: out_ptr,
            col_idx: out_col,
            values: out_val,
        }
    }

    /// Drops entries stored as exact zero.
    pub fn prune_zeros(&self) -> CsrMatrix {
        let mut out_ptr = Vec::with_capacity(self.rows + 1);
        let mut out_col = Vec::new();
        let mut out_val = Vec::new();
        out_ptr.push(0);
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if v != 0.0 {
                    out_col.push(c);
                    out_val.push(v);
                }
            }
            out_ptr.push(out_col.len());
        }
        CsrMatrix {
            rows: self.rows,
            cols: self.cols,
            row_ptr: out_ptr,
            col_idx: out_col,
            values: out_val,
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.row(r).1.iter().sum())
            .collect()
    }

    /// Maximum absolute row sum (the induced infinity norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Dense row-major copy, for small oracle comparisons.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.rows * self.cols];
        for (r, c, v) in self.entries() {
            dense[r * self.cols + c] += v;
        }
        dense
    }
}

fn configure_faer() {
    static INIT: Once = Once::new();
    // sequential factorization keeps solves bit-reproducible run to run
    INIT.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Sparse LU factorization with the original matrix retained for residual
/// verification. Factorization happens eagerly in [`FactorizedMatrix::new`],
/// so a shared reference can be used from multiple threads.
pub struct FactorizedMatrix {
    matrix: CsrMatrix,
    lu: Lu<usize, f64>,
}

impl FactorizedMatrix {
    pub fn new(matrix: CsrMatrix) -> Result<Self, SolveError> {
        if matrix.rows() != matrix.cols() {
            return Err(SolveError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        configure_faer();
        let triplets: Vec<Triplet<usize, usize, f64>> = matrix
            .entries()
            .map(|(r, c, v)| Triplet::new(r, c, v))
            .collect();
        let dim = matrix.rows();
        let sparse = SparseColMat::<usize, f64>::try_new_from_triplets(dim, dim, &triplets)
            .map_err(|e| SolveError::Factorization(format!("{e:?}")))?;
        let symbolic = SymbolicLu::try_new(sparse.symbolic())
            .map_err(|e| SolveError::Factorization(format!("{e:?}")))?;
        let lu = Lu::try_new_with_symbolic(symbolic, sparse.as_ref())
            .map_err(|e| SolveError::Factorization(format!("{e:?}")))?;
        Ok(FactorizedMatrix { matrix, lu })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// Solves `A x = rhs`, enforcing `|Ax - rhs| <= 1e-10 |rhs|`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, SolveError> {
        let dim = self.dim();
        if rhs.len() != dim {
            return Err(SolveError::RhsLength { dim, got: rhs.len() });
        }
        let mut work = faer::Mat::<f64>::from_fn(dim, 1, |i, _| rhs[i]);
        self.lu.solve_in_place(work.as_mut());
        let x: Vec<f64> = (0..dim).map(|i| work[(i, 0)]).collect();

        let mut residual = self.matrix.apply(&x);
        for (r, b) in residual.iter_mut().zip(rhs) {
            *r -= b;
        }
        let res_norm = l2_norm(&residual);
        let rhs_norm = l2_norm(rhs);
        if !res_norm.is_finite() || res_norm > SOLVE_RESIDUAL_RTOL * rhs_norm {
            let ratio = if rhs_norm > 0.0 { res_norm / rhs_norm } else { res_norm };
            return Err(SolveError::ResidualTooLarge {
                residual_ratio: ratio,
                bound: SOLVE_RESIDUAL_RTOL,
            });
        }
        Ok(x)
    }
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
