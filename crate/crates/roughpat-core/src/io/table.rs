//! Delimited convergence tables: one `(resolution, spacing, error)` row per
//! refinement level plus the least-squares observed order.

use std::fs;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    /// Grid nodes per axis, or the time-step count for temporal studies.
    pub resolution: f64,
    /// Mesh size h or time step tau.
    pub spacing: f64,
    pub error: f64,
}

pub fn write_convergence_table(
    path: &Path,
    kind: &str,
    axis: &str,
    rows: &[ConvergenceRow],
    observed_order: f64,
) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# roughpat-convergence kind={kind} axis={axis}\n"));
    out.push_str("# columns: resolution spacing error\n");
    for r in rows {
        out.push_str(&format!("{} {} {}\n", r.resolution, r.spacing, r.error));
    }
    out.push_str(&format!("# observed_order={observed_order}\n"));
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())
}
