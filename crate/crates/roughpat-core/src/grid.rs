//! Periodic tensor-product grids on the square parameter domain `[-L, L]^2`.
//!
//! Nodes are stored row-major with x varying fastest. Both endpoints of each
//! axis are kept in the node list: the last node per axis is the same physical
//! point as the first, and all nodal fields carry equal values there. Periodic
//! neighbor lookups skip the duplicated endpoint.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("{axis} must be >= 3 (got {got})")]
    TooFewNodes { axis: &'static str, got: usize },
    #[error("half-width L must be positive (got {0})")]
    NonPositiveHalfWidth(f64),
}

/// Uniform periodic grid over `[-L, L]^2` with duplicated endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    half_width: f64,
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
}

impl Grid {
    pub fn new(half_width: f64, nx: usize, ny: usize) -> Result<Self, GridError> {
        if !(half_width > 0.0) {
            return Err(GridError::NonPositiveHalfWidth(half_width));
        }
        if nx < 3 {
            return Err(GridError::TooFewNodes { axis: "nx", got: nx });
        }
        if ny < 3 {
            return Err(GridError::TooFewNodes { axis: "ny", got: ny });
        }
        let hx = 2.0 * half_width / (nx - 1) as f64;
        let hy = 2.0 * half_width / (ny - 1) as f64;
        Ok(Grid { half_width, nx, ny, hx, hy })
    }

    /// Square grid with `n` nodes per axis.
    pub fn square(half_width: f64, n: usize) -> Result<Self, GridError> {
        Self::new(half_width, n, n)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        self.hx
    }

    pub fn hy(&self) -> f64 {
        self.hy
    }

    /// Total node count including the duplicated endpoints.
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest nodal spacing (the fill distance of the node set).
    pub fn fill_distance(&self) -> f64 {
        self.hx.max(self.hy)
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.hx
    }

    pub fn y(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.hy
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Periodic left neighbor in x, skipping the duplicated endpoint.
    pub fn left(&self, i: usize) -> usize {
        if i == 0 {
            self.nx - 2
        } else {
            i - 1
        }
    }

    /// Periodic right neighbor in x; the duplicated endpoint wraps past it.
    pub fn right(&self, i: usize) -> usize {
        if i == self.nx - 1 {
            1
        } else {
            i + 1
        }
    }

    pub fn down(&self, j: usize) -> usize {
        if j == 0 {
            self.ny - 2
        } else {
            j - 1
        }
    }

    pub fn up(&self, j: usize) -> usize {
        if j == self.ny - 1 {
            1
        } else {
            j + 1
        }
    }

    /// Evaluates `f` at the distinct nodes and mirrors the duplicated
    /// endpoints, so periodic identification holds bit-exactly.
    pub fn eval_nodal(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut values = vec![0.0; self.len()];
        for j in 0..self.ny - 1 {
            let yj = self.y(j);
            for i in 0..self.nx - 1 {
                values[self.node_index(i, j)] = f(self.x(i), yj);
            }
        }
        self.make_periodic(&mut values);
        values
    }

    /// Copies values from the first row/column into the duplicated last
    /// row/column.
    pub fn make_periodic(&self, values: &mut [f64]) {
        assert_eq!(values.len(), self.len(), "nodal vector has wrong length");
        for j in 0..self.ny - 1 {
            values[self.node_index(self.nx - 1, j)] = values[self.node_index(0, j)];
        }
        let top = self.node_index(0, self.ny - 1);
        for i in 0..self.nx {
            values[top + i] = values[i];
        }
    }

    /// Iterates node coordinates in storage order.
    pub fn positions(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (self.x(i), self.y(j))))
    }

    /// Mean over the distinct nodes (duplicated endpoints counted once).
    pub fn unique_mean(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len());
        let mut sum = 0.0;
        for j in 0..self.ny - 1 {
            for i in 0..self.nx - 1 {
                sum += values[self.node_index(i, j)];
            }
        }
        sum / ((self.nx - 1) * (self.ny - 1)) as f64
    }
}
