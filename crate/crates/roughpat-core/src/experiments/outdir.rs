//! Per-run output directories with a claim registry and a manifest.

use super::ExperimentError;
use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

static CLAIMED: Mutex<Option<HashSet<PathBuf>>> = Mutex::new(None);

fn claim(path: &Path) -> bool {
    let mut guard = CLAIMED.lock().unwrap();
    guard.get_or_insert_with(HashSet::new).insert(path.to_path_buf())
}

fn release(path: &Path) {
    if let Some(set) = CLAIMED.lock().unwrap().as_mut() {
        set.remove(path);
    }
}

/// A claimed output directory. All files of a run are registered through
/// [`RunDir::file`] and listed in the manifest written on completion.
pub struct RunDir {
    path: PathBuf,
    outputs: Mutex<Vec<String>>,
    started: Instant,
}

impl RunDir {
    /// Claims `path` for exclusive use and creates it. Fails if another
    /// in-process run currently owns the same path.
    pub fn create(path: impl Into<PathBuf>) -> Result<Self, ExperimentError> {
        let path = path.into();
        if !claim(&path) {
            return Err(ExperimentError::PathClaimed(path.display().to_string()));
        }
        fs::create_dir_all(&path)?;
        Ok(RunDir { path, outputs: Mutex::new(Vec::new()), started: Instant::now() })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Registers and returns the path of an output file inside the run dir.
    pub fn file(&self, name: &str) -> PathBuf {
        self.outputs.lock().unwrap().push(name.to_string());
        self.path.join(name)
    }

    /// Writes the run manifest: configuration entries, seed, crate version,
    /// wall time, and the list of outputs.
    pub fn write_manifest(&self, entries: &[(String, String)]) -> Result<(), ExperimentError> {
        let mut text = String::new();
        text.push_str(&format!("crate_version = \"{}\"\n", env!("CARGO_PKG_VERSION")));
        for (k, v) in entries {
            text.push_str(&format!("{k} = \"{v}\"\n"));
        }
        text.push_str(&format!(
            "wall_time_secs = {:.3}\n",
            self.started.elapsed().as_secs_f64()
        ));
        let outputs = self.outputs.lock().unwrap();
        text.push_str("outputs = [");
        for (i, o) in outputs.iter().enumerate() {
            if i > 0 {
                text.push_str(", ");
            }
            text.push_str(&format!("\"{o}\""));
        }
        text.push_str("]\n");
        fs::write(self.path.join("manifest.toml"), text)?;
        Ok(())
    }
}

impl Drop for RunDir {
    fn drop(&mut self) {
        release(&self.path);
    }
}
