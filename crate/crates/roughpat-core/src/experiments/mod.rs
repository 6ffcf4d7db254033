//! Scripted experiment pipelines: eigen-field maps, heat-flow demos, pattern
//! formation with amplitude continuation and parameter sweeps, animal-coat
//! presets, and convergence studies. Every run is a pure function of its
//! configuration and seed, and writes all outputs (grid dumps, tables,
//! rendered images, a manifest) under its own run directory.

mod components;
mod convergence;
mod outdir;
mod presets;
mod runs;

pub use components::{component_areas, max_area, median_area, mid_range_threshold, area_std};
pub use convergence::{run_convergence, ConvergenceAxis, ConvergenceKind, ConvergenceOutput, ForcingMode};
pub use outdir::RunDir;
pub use presets::{
    animal_presets, find_animal_preset, AnimalPreset, ReactionPattern, SurfaceRecipe,
};
pub use runs::{
    amplitude_schedule, build_surface, run_amplitude_continuation, run_animal, run_eigen_maps,
    run_heat_demo, run_rds_single, run_sweep, spatial_std, BuiltSurface, ContinuationOutput,
    EigenMapsOutput, HeatDemoOutput, RdsSingleOutput, SweepCombo, SweepOutput, ZoomRect,
};

use crate::filter::FilterError;
use crate::grid::GridError;
use crate::io::{DumpError, RenderError};
use crate::operators::OperatorError;
use crate::pde::{MeasureError, PdeError};
use crate::surface::{MetricError, SurfaceError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Pde(#[from] PdeError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Dump(#[from] DumpError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("continuation stage {stage} (amplitude {amplitude}) diverged: {source}")]
    StageDiverged {
        stage: usize,
        amplitude: f64,
        #[source]
        source: PdeError,
    },
    #[error("output path {0} is already claimed by a running experiment")]
    PathClaimed(String),
}
