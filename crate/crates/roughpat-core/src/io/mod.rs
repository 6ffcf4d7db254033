//! File formats: grid dumps, convergence tables, and rendered heatmaps.

mod dump;
mod heatmap;
mod table;

pub use dump::{DumpError, GridDump};
pub use heatmap::{render_heatmap, Colormap, RenderError};
pub use table::{write_convergence_table, ConvergenceRow};
