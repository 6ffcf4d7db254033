//! Configuration file parsing and flag merging.
//!
//! Config files are TOML with one table per subsystem. Unknown keys are
//! rejected. Command-line flags override file values, which override
//! defaults. All numeric fields are validated against the library
//! preconditions before any computation starts.

use roughpat_core::experiments::{ReactionPattern, SurfaceRecipe};
use roughpat_core::filter::FilterSpec;
use roughpat_core::grid::Grid;
use roughpat_core::pde::RdsParams;
use serde::Deserialize;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub surface: SurfaceSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub reaction: ReactionSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSection {
    /// "m" (wave superposition) or "s" (heat-filtered noise).
    pub method: Option<String>,
    /// Maximum x frequency (M) for method m.
    pub freq_x: Option<i64>,
    /// Maximum y frequency (N) for method m.
    pub freq_y: Option<i64>,
    pub amplitude: Option<f64>,
    pub decay: Option<f64>,
    pub kappa: Option<f64>,
    pub f11: Option<f64>,
    pub f22: Option<f64>,
    pub filter_steps: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub half_width: Option<f64>,
    pub nx: Option<i64>,
    pub ny: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub theta: Option<f64>,
    pub tau: Option<f64>,
    pub t_end: Option<f64>,
    pub steady_tol: Option<f64>,
    pub snapshot_every: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionSection {
    /// "spots" or "stripes"; explicit constants override preset fields.
    pub preset: Option<String>,
    pub delta_u: Option<f64>,
    pub delta_v: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub xi1: Option<f64>,
    pub xi2: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
    pub render: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| err(format!("{}: {e}", path.display())))
    }
}

/// Validated, fully resolved run inputs shared by the subcommands.
pub struct Resolved {
    pub seed: u64,
    pub out_root: PathBuf,
    pub render: bool,
    pub grid: Grid,
    pub surface: SurfaceRecipe,
    pub amplitude: f64,
    pub decay: f64,
    pub theta: f64,
    pub tau: f64,
    pub t_end: f64,
    pub steady_tol: Option<f64>,
    pub snapshot_every: Option<usize>,
    pub pattern: ReactionPattern,
    pub params: RdsParams,
}

/// Flag-level overrides collected by the CLI; `None` defers to the config
/// file and defaults.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub render: bool,
    pub method: Option<String>,
    pub freq_x: Option<i64>,
    pub freq_y: Option<i64>,
    pub amplitude: Option<f64>,
    pub decay: Option<f64>,
    pub kappa: Option<f64>,
    pub f11: Option<f64>,
    pub f22: Option<f64>,
    pub filter_steps: Option<i64>,
    pub half_width: Option<f64>,
    pub nx: Option<i64>,
    pub ny: Option<i64>,
    pub theta: Option<f64>,
    pub tau: Option<f64>,
    pub t_end: Option<f64>,
    pub steady_tol: Option<f64>,
    pub snapshot_every: Option<i64>,
    pub preset: Option<String>,
}

fn non_negative_int(name: &str, value: i64) -> Result<u32, ConfigError> {
    if value < 0 {
        return Err(err(format!("{name} must be >= 0 (got {value})")));
    }
    u32::try_from(value).map_err(|_| err(format!("{name} is out of range (got {value})")))
}

pub struct Defaults {
    pub nx: i64,
    pub half_width: f64,
    pub tau: f64,
    pub t_end: Option<f64>,
    pub amplitude: f64,
}

/// Merge defaults <- file <- flags and validate everything.
pub fn resolve(
    file: &FileConfig,
    flags: &Overrides,
    defaults: &Defaults,
) -> Result<Resolved, ConfigError> {
    let seed = flags.seed.or(file.seed).unwrap_or(1);

    let out_root = flags
        .out
        .clone()
        .or_else(|| file.output.dir.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var_os("ROUGHPAT_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"));
    let render = flags.render || file.output.render.unwrap_or(false);

    // grid
    let nx_raw = flags.nx.or(file.grid.nx).unwrap_or(defaults.nx);
    let ny_raw = flags.ny.or(file.grid.ny).unwrap_or(nx_raw);
    if nx_raw < 3 {
        return Err(err(format!("nx must be >= 3 (got {nx_raw})")));
    }
    if ny_raw < 3 {
        return Err(err(format!("ny must be >= 3 (got {ny_raw})")));
    }
    let half_width = flags
        .half_width
        .or(file.grid.half_width)
        .unwrap_or(defaults.half_width);
    let grid = Grid::new(half_width, nx_raw as usize, ny_raw as usize)
        .map_err(|e| err(e.to_string()))?;

    // surface
    let method = flags
        .method
        .clone()
        .or_else(|| file.surface.method.clone())
        .unwrap_or_else(|| "m".into());
    let amplitude = flags
        .amplitude
        .or(file.surface.amplitude)
        .unwrap_or(defaults.amplitude);
    if amplitude < 0.0 {
        return Err(err(format!("amplitude must be >= 0 (got {amplitude})")));
    }
    let decay = flags.decay.or(file.surface.decay).unwrap_or(0.0);
    if decay < 0.0 {
        return Err(err(format!("decay must be >= 0 (got {decay})")));
    }
    let surface = match method.as_str() {
        "m" | "M" => {
            let m = non_negative_int("freq_x", flags.freq_x.or(file.surface.freq_x).unwrap_or(5))?;
            let n = non_negative_int("freq_y", flags.freq_y.or(file.surface.freq_y).unwrap_or(5))?;
            SurfaceRecipe::Wave { max_freq_x: m, max_freq_y: n }
        }
        "s" | "S" => {
            let kappa = flags.kappa.or(file.surface.kappa).unwrap_or(5.0);
            let f11 = flags.f11.or(file.surface.f11).unwrap_or(1.0);
            let f22 = flags.f22.or(file.surface.f22).unwrap_or(1.0);
            let steps = non_negative_int(
                "filter_steps",
                flags.filter_steps.or(file.surface.filter_steps).unwrap_or(15),
            )? as usize;
            let spec = FilterSpec { kappa, f11, f22, steps, amplitude, seed };
            spec.validate(&grid).map_err(|e| err(e.to_string()))?;
            SurfaceRecipe::Filtered { kappa, f11, f22, steps }
        }
        other => return Err(err(format!("method must be m or s (got {other})"))),
    };

    // solver
    let theta = flags.theta.or(file.solver.theta).unwrap_or(1.0);
    if !(0.0..=1.0).contains(&theta) {
        return Err(err(format!("theta must lie in [0, 1] (got {theta})")));
    }
    let tau = flags.tau.or(file.solver.tau).unwrap_or(defaults.tau);
    if tau <= 0.0 {
        return Err(err(format!("tau must be > 0 (got {tau})")));
    }

    // reaction
    let preset_name = flags
        .preset
        .clone()
        .or_else(|| file.reaction.preset.clone())
        .unwrap_or_else(|| "spots".into());
    let pattern = ReactionPattern::from_name(&preset_name)
        .ok_or_else(|| err(format!("preset must be spots or stripes (got {preset_name})")))?;
    let base = pattern.params();
    let r = &file.reaction;
    let params = RdsParams::new(
        r.delta_u.unwrap_or(base.delta_u),
        r.delta_v.unwrap_or(base.delta_v),
        r.alpha.unwrap_or(base.alpha),
        r.beta.unwrap_or(base.beta),
        r.gamma.unwrap_or(base.gamma),
        r.xi1.unwrap_or(base.xi1),
        r.xi2.unwrap_or(base.xi2),
    )
    .map_err(|e| err(e.to_string()))?;

    let t_end = flags
        .t_end
        .or(file.solver.t_end)
        .or(defaults.t_end)
        .unwrap_or_else(|| pattern.default_t_end());
    if t_end < 0.0 {
        return Err(err(format!("t_end must be >= 0 (got {t_end})")));
    }
    let steady_tol = match flags.steady_tol.or(file.solver.steady_tol) {
        Some(v) if v <= 0.0 => None,
        Some(v) => Some(v),
        None => Some(1e-5),
    };
    let snapshot_every = match flags.snapshot_every.or(file.solver.snapshot_every) {
        Some(v) if v < 0 => return Err(err(format!("snapshot_every must be >= 0 (got {v})"))),
        Some(0) | None => None,
        Some(v) => Some(v as usize),
    };

    Ok(Resolved {
        seed,
        out_root,
        render,
        grid,
        surface,
        amplitude,
        decay,
        theta,
        tau,
        t_end,
        steady_tol,
        snapshot_every,
        pattern,
        params,
    })
}

/// Parses a comma-separated list of floats ("0.05,0.1").
pub fn parse_float_list(name: &str, text: &str) -> Result<Vec<f64>, ConfigError> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| err(format!("{name}: `{p}` is not a number")))
        })
        .collect()
}

/// Parses frequency pairs ("5x15,15x15").
pub fn parse_freq_pairs(text: &str) -> Result<Vec<(u32, u32)>, ConfigError> {
    text.split(',')
        .map(|p| {
            let (a, b) = p
                .trim()
                .split_once('x')
                .ok_or_else(|| err(format!("freqs: `{p}` is not of the form MxN")))?;
            let m = a.parse::<u32>().map_err(|_| err(format!("freqs: `{a}` is not a frequency")))?;
            let n = b.parse::<u32>().map_err(|_| err(format!("freqs: `{b}` is not a frequency")))?;
            Ok((m, n))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> Defaults {
        Defaults { nx: 90, half_width: 1.0, tau: 0.5, t_end: None, amplitude: 0.1 }
    }

    #[test]
    fn minimal_spots_config_resolves_table_constants() {
        let file: FileConfig = toml::from_str(
            "[reaction]\npreset = \"spots\"\n[grid]\nnx = 90\n[solver]\ntau = 0.5\nt_end = 800.0\n",
        )
        .unwrap();
        let r = resolve(&file, &Overrides::default(), &defaults()).unwrap();
        assert_eq!(r.params, RdsParams::spots());
        assert_eq!(r.grid.nx(), 90);
        assert_eq!(r.tau, 0.5);
        assert_eq!(r.t_end, 800.0);
    }

    #[test]
    fn tiny_grid_is_a_configuration_error() {
        let file: FileConfig = toml::from_str("[grid]\nnx = 2\n").unwrap();
        let e = resolve(&file, &Overrides::default(), &defaults()).unwrap_err();
        assert!(e.to_string().contains("nx must be >= 3"), "{e}");
    }

    #[test]
    fn unknown_key_is_rejected_by_name() {
        let result: Result<FileConfig, _> = toml::from_str("[solver]\ntaau = 0.5\n");
        let msg = result.unwrap_err().to_string();
        assert!(msg.contains("taau"), "{msg}");
    }

    #[test]
    fn flags_override_file_values() {
        let file: FileConfig = toml::from_str("[solver]\ntau = 0.5\n").unwrap();
        let flags = Overrides { tau: Some(0.25), ..Default::default() };
        let r = resolve(&file, &flags, &defaults()).unwrap();
        assert_eq!(r.tau, 0.25);
    }

    #[test]
    fn negative_frequency_is_rejected() {
        let file = FileConfig::default();
        let flags = Overrides { freq_x: Some(-1), ..Default::default() };
        let e = resolve(&file, &flags, &defaults()).unwrap_err();
        assert!(e.to_string().contains("freq_x"), "{e}");
    }

    #[test]
    fn list_parsers() {
        assert_eq!(parse_float_list("deltas", "0.05, 0.1").unwrap(), vec![0.05, 0.1]);
        assert!(parse_float_list("deltas", "0.05,x").is_err());
        assert_eq!(parse_freq_pairs("5x15,15x15").unwrap(), vec![(5, 15), (15, 15)]);
        assert!(parse_freq_pairs("5-15").is_err());
    }
}
