//! Rough surfaces defined analytically by random wave superpositions, and the
//! metric quantities every surface operator is assembled from.

mod metric;
mod wave;

pub use metric::{diffusion_eigensystem, EigenField, MetricField, MetricError};
pub use wave::{
    scale_to_amplitude, SurfaceError, SurfaceFields, SurfaceJet, WaveCoefficients, WaveSurface,
    WaveSurfaceSpec,
};
