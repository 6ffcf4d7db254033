//! Rough-surface synthesis and pattern formation on those surfaces.
//!
//! The crate builds periodic rough surfaces two ways: analytically, as random
//! cosine superpositions with a frequency cutoff, and discretely, by running
//! a heat filter over uniform nodal noise. On either surface it assembles the
//! discrete Laplace-Beltrami operator from second-order periodic
//! differentiation matrices and the nodal diffusion tensor, then integrates
//! the heat equation (theta-method) and a two-species reaction-diffusion
//! system (IMEX-BDF2) to steady state, producing spot and stripe patterns
//! whose irregularity tracks the surface roughness.
//!
//! Modules:
//! - [`grid`]: periodic tensor-product grids with duplicated endpoints
//! - [`sparse`]: CSR matrices and residual-checked sparse LU solves
//! - [`operators`]: differentiation matrices and Laplace-Beltrami assembly
//! - [`surface`]: wave surfaces, metric fields, diffusion-tensor eigensystem
//! - [`filter`]: heat-filtered random surfaces
//! - [`pde`]: theta-method and IMEX-BDF2 time integration, error measures
//! - [`experiments`]: scripted pipelines (eigen maps, heat demos, pattern
//!   sweeps, amplitude continuation, animal presets, convergence studies)
//! - [`io`]: grid dumps, convergence tables, heatmap rendering

pub mod experiments;
pub mod filter;
pub mod grid;
pub mod io;
pub mod operators;
pub mod pde;
pub mod rng;
pub mod sparse;
pub mod surface;

pub use grid::Grid;
pub use pde::RdsParams;
pub use sparse::{CsrMatrix, FactorizedMatrix};
pub use surface::{MetricField, WaveSurface, WaveSurfaceSpec};
