//! Rough surfaces from filtered random nodal data.
//!
//! Uniform noise in `[-1, 1]` is smoothed by `J` explicit steps of
//! `Z <- Z + kappa h Lf Z`, where `Lf` is the unit-spacing anisotropic
//! 5-point stencil weighted by the diagonal filter tensor `F` and `h` is the
//! fill distance of the grid. Under `mu_x + mu_y <= 1/2` with
//! `mu = kappa h F`, each step is a contraction in Dirichlet energy. The
//! result is scaled to the target amplitude and differentiated with the
//! centered-difference matrices to obtain a metric field.

use crate::grid::Grid;
use crate::rng::SeededRng;
use crate::sparse::CsrMatrix;
use crate::surface::{scale_to_amplitude, MetricField, SurfaceError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FilterError {
    #[error(
        "filter step is unstable: mu_x = {mu_x:.4} plus mu_y = {mu_y:.4} exceeds 1/2 \
         (mu = kappa * h * F with h = {fill:.4})"
    )]
    Unstable { mu_x: f64, mu_y: f64, fill: f64 },
    #[error("filter weight kappa must be positive (got {0})")]
    NonPositiveKappa(f64),
    #[error("filter tensor entries must be positive (got diag({0}, {1}))")]
    NonPositiveTensor(f64, f64),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// How the smoothing matrix `Q` in `Z <- (Q + kappa h Lf) Z` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmoothingKernel {
    /// `Q = I`: an explicit heat step. This is the filter used everywhere.
    #[default]
    Identity,
    /// `Q = ones`: kept only for side-by-side comparison; every iterate
    /// collapses onto the constant vector plus a Laplacian correction.
    AllOnes,
}

/// Parameters of the heat-filter surface construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    /// Filter weight kappa > 0.
    pub kappa: f64,
    /// Diagonal filter-diffusion tensor F = diag(f11, f22).
    pub f11: f64,
    pub f22: f64,
    /// Number of filter steps J.
    pub steps: usize,
    /// Target amplitude after scaling.
    pub amplitude: f64,
    pub seed: u64,
}

impl FilterSpec {
    /// Step weights `mu = kappa * h * F` under the unit-spacing stencil.
    pub fn step_weights(&self, grid: &Grid) -> (f64, f64) {
        let h = grid.fill_distance();
        (self.kappa * h * self.f11, self.kappa * h * self.f22)
    }

    pub fn validate(&self, grid: &Grid) -> Result<(), FilterError> {
        if !(self.kappa > 0.0) {
            return Err(FilterError::NonPositiveKappa(self.kappa));
        }
        if !(self.f11 > 0.0 && self.f22 > 0.0) {
            return Err(FilterError::NonPositiveTensor(self.f11, self.f22));
        }
        if self.amplitude < 0.0 {
            return Err(SurfaceError::NegativeAmplitude(self.amplitude).into());
        }
        let (mu_x, mu_y) = self.step_weights(grid);
        if mu_x + mu_y > 0.5 {
            return Err(FilterError::Unstable { mu_x, mu_y, fill: grid.fill_distance() });
        }
        Ok(())
    }
}

/// I.i.d. uniform nodal values in `[-1, 1]`, periodic on the duplicated
/// endpoints.
pub fn sample_initial_nodal(grid: &Grid, seed: u64) -> Vec<f64> {
    let mut rng = SeededRng::new(seed);
    let mut values = vec![0.0; grid.len()];
    for j in 0..grid.ny() - 1 {
        for i in 0..grid.nx() - 1 {
            values[grid.node_index(i, j)] = rng.uniform_in(-1.0, 1.0);
        }
    }
    grid.make_periodic(&mut values);
    values
}

/// Applies `J` filter steps with the default identity smoothing kernel.
pub fn heat_filter(z0: &[f64], spec: &FilterSpec, grid: &Grid) -> Result<Vec<f64>, FilterError> {
    heat_filter_with_kernel(z0, spec, grid, SmoothingKernel::Identity)
}

pub fn heat_filter_with_kernel(
    z0: &[f64],
    spec: &FilterSpec,
    grid: &Grid,
    kernel: SmoothingKernel,
) -> Result<Vec<f64>, FilterError> {
    spec.validate(grid)?;
    assert_eq!(z0.len(), grid.len(), "nodal vector does not match grid");
    let (mu_x, mu_y) = spec.step_weights(grid);
    let mut cur = z0.to_vec();
    let mut next = vec![0.0; cur.len()];
    for _ in 0..spec.steps {
        let ones_base = match kernel {
            SmoothingKernel::Identity => None,
            SmoothingKernel::AllOnes => Some(cur.iter().sum::<f64>()),
        };
        for j in 0..grid.ny() - 1 {
            for i in 0..grid.nx() - 1 {
                let c = cur[grid.node_index(i, j)];
                let lap = mu_x
                    * (cur[grid.node_index(grid.left(i), j)] - 2.0 * c
                        + cur[grid.node_index(grid.right(i), j)])
                    + mu_y
                        * (cur[grid.node_index(i, grid.down(j))] - 2.0 * c
                            + cur[grid.node_index(i, grid.up(j))]);
                next[grid.node_index(i, j)] = ones_base.unwrap_or(c) + lap;
            }
        }
        grid.make_periodic(&mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(cur)
}

/// Discrete Dirichlet energy of the filtered field: half the F-weighted sum
/// of squared neighbor differences over the distinct nodes.
pub fn dirichlet_energy(values: &[f64], grid: &Grid, f11: f64, f22: f64) -> f64 {
    assert_eq!(values.len(), grid.len());
    let mut e = 0.0;
    for j in 0..grid.ny() - 1 {
        for i in 0..grid.nx() - 1 {
            let c = values[grid.node_index(i, j)];
            let dx = values[grid.node_index(grid.right(i), j)] - c;
            let dy = values[grid.node_index(i, grid.up(j))] - c;
            e += f11 * dx * dx + f22 * dy * dy;
        }
    }
    0.5 * e
}

/// A type-S surface: nodal heights, centered-difference gradients, and the
/// metric field assembled from them.
#[derive(Debug, Clone)]
pub struct NodalSurface {
    pub heights: Vec<f64>,
    pub grad_x: Vec<f64>,
    pub grad_y: Vec<f64>,
    pub metric: MetricField,
}

/// Scales the filtered field to the target amplitude and builds its metric
/// from finite-difference gradients.
pub fn finalize_surface_s(
    z_filtered: &[f64],
    amplitude: f64,
    d1: &CsrMatrix,
    d2: &CsrMatrix,
) -> Result<NodalSurface, SurfaceError> {
    let s = scale_to_amplitude(z_filtered, amplitude)?;
    let heights: Vec<f64> = z_filtered.iter().map(|&z| s * z).collect();
    let grad_x = d1.apply(&heights);
    let grad_y = d2.apply(&heights);
    let metric = MetricField::from_gradients(&grad_x, &grad_y)
        .expect("gradients from the same operator have equal length");
    Ok(NodalSurface { heights, grad_x, grad_y, metric })
}
