//! Command-line driver for rough-surface pattern formation runs.

mod config;

use clap::{Args, Parser, Subcommand};
use config::{parse_float_list, parse_freq_pairs, ConfigError, Defaults, FileConfig, Overrides, Resolved};
use roughpat_core::experiments::{
    amplitude_schedule, animal_presets, build_surface, find_animal_preset, run_amplitude_continuation,
    run_animal, run_convergence, run_eigen_maps, run_heat_demo, run_rds_single, run_sweep,
    spatial_std, ConvergenceAxis, ConvergenceKind, ExperimentError, ForcingMode, ReactionPattern,
    RunDir, SurfaceRecipe, ZoomRect,
};
use roughpat_core::io::{render_heatmap, Colormap, GridDump};
use roughpat_core::operators::build_diff_matrices;
use roughpat_core::surface::WaveSurfaceSpec;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "roughpat",
    version,
    about = "Rough-surface synthesis and Turing-pattern simulation",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every stochastic input of the run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output root; defaults to $ROUGHPAT_OUT or ./runs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also render heatmap images for the written dumps.
    #[arg(long, global = true)]
    render: bool,
    /// Parallel runs for multi-run subcommands.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

/// Flags mirroring the config file keys.
#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Surface method: m (wave superposition) or s (filtered noise).
    #[arg(long)]
    method: Option<String>,
    /// Maximum x frequency of a wave surface.
    #[arg(long = "M")]
    freq_x: Option<i64>,
    /// Maximum y frequency of a wave surface.
    #[arg(long = "N")]
    freq_y: Option<i64>,
    /// Target surface amplitude.
    #[arg(long)]
    amplitude: Option<f64>,
    /// Frequency decay exponent of the coefficient distribution.
    #[arg(long)]
    decay: Option<f64>,
    /// Filter weight kappa (method s).
    #[arg(long)]
    kappa: Option<f64>,
    /// Filter tensor entry F11 (method s).
    #[arg(long)]
    f11: Option<f64>,
    /// Filter tensor entry F22 (method s).
    #[arg(long)]
    f22: Option<f64>,
    /// Number of filter steps J (method s).
    #[arg(long)]
    filter_steps: Option<i64>,
    /// Domain half-width L.
    #[arg(long = "L")]
    half_width: Option<f64>,
    /// Nodes per x axis.
    #[arg(long)]
    nx: Option<i64>,
    /// Nodes per y axis (defaults to nx).
    #[arg(long)]
    ny: Option<i64>,
    /// Theta-method parameter for heat runs.
    #[arg(long)]
    theta: Option<f64>,
    /// Time step.
    #[arg(long)]
    tau: Option<f64>,
    /// Final time.
    #[arg(long = "T")]
    t_end: Option<f64>,
    /// Steady-state tolerance for pattern runs (0 disables).
    #[arg(long)]
    steady_tol: Option<f64>,
    /// Snapshot stride in steps (0 disables).
    #[arg(long)]
    snap_every: Option<i64>,
    /// Reaction preset: spots or stripes.
    #[arg(long)]
    preset: Option<String>,
}

impl CommonArgs {
    fn overrides(&self, cli: &Cli) -> Overrides {
        Overrides {
            seed: cli.seed,
            out: cli.out.clone(),
            render: cli.render,
            method: self.method.clone(),
            freq_x: self.freq_x,
            freq_y: self.freq_y,
            amplitude: self.amplitude,
            decay: self.decay,
            kappa: self.kappa,
            f11: self.f11,
            f22: self.f22,
            filter_steps: self.filter_steps,
            half_width: self.half_width,
            nx: self.nx,
            ny: self.ny,
            theta: self.theta,
            tau: self.tau,
            t_end: self.t_end,
            steady_tol: self.steady_tol,
            snapshot_every: self.snap_every,
            preset: self.preset.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a rough surface and dump its heights.
    GenSurface(CommonArgs),
    /// Eigenvalue and eigendirection maps of the diffusion tensor.
    EigMaps {
        #[command(flatten)]
        common: CommonArgs,
        /// Keep every k-th node in the quiver export.
        #[arg(long, default_value_t = 4)]
        quiver_stride: usize,
    },
    /// Heat flow on one surface at several amplitudes.
    Heat {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated amplitude list.
        #[arg(long, default_value = "0.1,0.5,1")]
        amplitudes: String,
    },
    /// One reaction-diffusion pattern run.
    Rds(CommonArgs),
    /// Amplitude continuation: re-solve while growing the roughness.
    Continue {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0.0)]
        delta_from: f64,
        #[arg(long, default_value_t = 0.1)]
        delta_to: f64,
        #[arg(long, default_value_t = 0.01)]
        delta_step: f64,
    },
    /// Pattern runs over amplitude x frequency combinations.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated amplitudes.
        #[arg(long, default_value = "0.05,0.1")]
        deltas: String,
        /// Comma-separated MxN pairs.
        #[arg(long, default_value = "5x15,15x15")]
        freqs: String,
        /// Full-scale resolution instead of the half-resolution default.
        #[arg(long)]
        paper: bool,
        /// Zoom sub-rectangle "x0,x1,y0,y1" for the 3-D export.
        #[arg(long)]
        zoom: Option<String>,
    },
    /// Run an animal-coat preset.
    Animal {
        #[command(flatten)]
        common: CommonArgs,
        /// Preset name (see --list), or use --all.
        #[arg(long)]
        name: Option<String>,
        /// Run every preset.
        #[arg(long)]
        all: bool,
        /// List preset names and exit.
        #[arg(long)]
        list: bool,
        /// Full-scale resolution instead of the half-resolution default.
        #[arg(long)]
        paper: bool,
    },
    /// Manufactured-solution convergence study.
    Converge {
        #[command(flatten)]
        common: CommonArgs,
        /// heat or rds.
        #[arg(long, default_value = "heat")]
        kind: String,
        /// space or time.
        #[arg(long, default_value = "space")]
        axis: String,
        /// Forcing construction: analytic or discrete (default per study).
        #[arg(long)]
        forcing: Option<String>,
    },
}

enum CliError {
    Config(ConfigError),
    Experiment(ExperimentError),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        CliError::Experiment(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Experiment(e) => match e {
                ExperimentError::Pde(_) | ExperimentError::Operator(_) => 3,
                ExperimentError::Io(_)
                | ExperimentError::Dump(_)
                | ExperimentError::Render(_)
                | ExperimentError::PathClaimed(_) => 4,
                _ => 2,
            },
        }
    }

    fn report(&self) {
        match self {
            CliError::Config(e) => eprintln!("{e}"),
            CliError::Experiment(e) => {
                eprintln!("error: {e}");
                let mut source = std::error::Error::source(e);
                while let Some(s) = source {
                    eprintln!("  caused by: {s}");
                    source = s.source();
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            e.report();
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_file(cli: &Cli) -> Result<FileConfig, ConfigError> {
    match &cli.config {
        Some(path) => FileConfig::load(path),
        None => Ok(FileConfig::default()),
    }
}

fn manifest_entries(cmd: &str, r: &Resolved) -> Vec<(String, String)> {
    let surface = match r.surface {
        SurfaceRecipe::Wave { max_freq_x, max_freq_y } => {
            format!("wave M={max_freq_x} N={max_freq_y}")
        }
        SurfaceRecipe::Filtered { kappa, f11, f22, steps } => {
            format!("filtered kappa={kappa} F=diag({f11},{f22}) J={steps}")
        }
    };
    vec![
        ("subcommand".into(), cmd.into()),
        ("seed".into(), r.seed.to_string()),
        ("surface".into(), surface),
        ("amplitude".into(), r.amplitude.to_string()),
        ("grid".into(), format!("L={} nx={} ny={}", r.grid.half_width(), r.grid.nx(), r.grid.ny())),
        ("tau".into(), r.tau.to_string()),
        ("t_end".into(), r.t_end.to_string()),
        ("pattern".into(), r.pattern.name().into()),
    ]
}

fn wave_spec_of(r: &Resolved) -> Result<WaveSurfaceSpec, ConfigError> {
    match r.surface {
        SurfaceRecipe::Wave { max_freq_x, max_freq_y } => Ok(WaveSurfaceSpec {
            max_freq_x,
            max_freq_y,
            amplitude: r.amplitude,
            decay: r.decay,
            half_width: r.grid.half_width(),
            seed: r.seed,
        }),
        SurfaceRecipe::Filtered { .. } => Err(ConfigError(
            "this subcommand works on wave surfaces; use method = \"m\"".into(),
        )),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let file = load_file(cli)?;
    match &cli.command {
        Command::GenSurface(common) => {
            let r = config::resolve(
                &file,
                &common.overrides(cli),
                &Defaults { nx: 90, half_width: 1.0, tau: 0.5, t_end: Some(0.0), amplitude: 0.1 },
            )?;
            let dir = RunDir::create(r.out_root.join("gen-surface")).map_err(CliError::from)?;
            let (d1, d2) = build_diff_matrices(&r.grid);
            let surface = build_surface(&r.surface, r.amplitude, &r.grid, r.seed, &d1, &d2)?;
            let mut dump = GridDump::new(&r.grid, surface.method, r.seed, "z", surface.heights.clone());
            for (k, v) in &surface.params {
                dump = dump.with_param(k, v);
            }
            let path = dir.file("surface_z.txt");
            dump.write_file(&path).map_err(ExperimentError::from)?;
            if r.render {
                render_heatmap(&dump, Colormap::Viridis, 4, &dir.file("surface_z.png"))
                    .map_err(ExperimentError::from)?;
            }
            dir.write_manifest(&manifest_entries("gen-surface", &r))?;
            println!("surface written to {}", path.display());
            Ok(())
        }
        Command::EigMaps { common, quiver_stride } => {
            let r = config::resolve(
                &file,
                &common.overrides(cli),
                &Defaults { nx: 90, half_width: 1.0, tau: 0.5, t_end: Some(0.0), amplitude: 0.1 },
            )?;
            let spec = wave_spec_of(&r)?;
            let dir = RunDir::create(r.out_root.join("eig-maps"))?;
            let out = run_eigen_maps(&dir, spec, &r.grid, *quiver_stride, r.render)?;
            dir.write_manifest(&manifest_entries("eig-maps", &r))?;
            println!("eigen maps written ({} files) to {}", out.dumps.len(), dir.path().display());
            Ok(())
        }
        Command::Heat { common, amplitudes } => {
            let r = config::resolve(
                &file,
                &common.overrides(cli),
                &Defaults { nx: 41, half_width: 1.0, tau: 1e-3, t_end: Some(1.0), amplitude: 0.1 },
            )?;
            let spec = wave_spec_of(&r)?;
            let amplitudes = parse_float_list("amplitudes", amplitudes)?;
            if amplitudes.iter().any(|&a| a < 0.0) {
                return Err(ConfigError("amplitudes must be >= 0".into()).into());
            }
            let dir = RunDir::create(r.out_root.join("heat"))?;
            let out = run_heat_demo(&dir, spec, &amplitudes, &r.grid, r.theta, r.tau, r.t_end, r.render)?;
            dir.write_manifest(&manifest_entries("heat", &r))?;
            for (amplitude, _, range, monotone) in &out.results {
                println!(
                    "amplitude {amplitude}: final range {range:.6}, max-norm non-increasing: {monotone}"
                );
            }
            Ok(())
        }
        Command::Rds(common) => {
            let r = config::resolve(
                &file,
                &common.overrides(cli),
                &Defaults { nx: 90, half_width: 1.0, tau: 0.5, t_end: None, amplitude: 0.1 },
            )?;
            let dir = RunDir::create(r.out_root.join(format!("rds-{}", r.pattern.name())))?;
            let out = run_rds_single(
                &dir,
                &r.surface,
                r.amplitude,
                &r.params,
                &r.grid,
                r.tau,
                r.t_end,
                r.seed,
                r.steady_tol,
                r.snapshot_every,
                r.render,
            )?;
            dir.write_manifest(&manifest_entries("rds", &r))?;
            println!(
                "pattern run: {} steps to t = {}, steady = {}, spatial std = {:.4}",
                out.run.steps,
                out.run.t_final,
                out.run.steady_reached,
                spatial_std(out.run.u())
            );
            Ok(())
        }
        Command::Continue { common, delta_from, delta_to, delta_step } => {
            let r = config::resolve(
                &file,
                &common.overrides(cli),
                &Defaults { nx: 90, half_width: 1.0, tau: 0.5, t_end: None, amplitude: 0.0 },
            )?;
            let spec = wave_spec_of(&r)?;
            if *delta_step <= 0.0 {
                return Err(ConfigError(format!("delta_step must be > 0 (got {delta_step})")).into());
            }
            let schedule = amplitude_schedule(*delta_from, *delta_to, *delta_step);
            let dir = RunDir::create(r.out_root.join(format!("continue-{}", r.pattern.name())))?;
            let out = run_amplitude_continuation(
                &dir,
                spec.max_freq_x,
                spec.max_freq_y,
                r.pattern,
                &r.grid,
                r.tau,
                r.t_end,
                &schedule,
                r.seed,
                r.steady_tol,
                r.render,
            )?;
            dir.write_manifest(&manifest_entries("continue", &r))?;
            for (amplitude, state) in &out.stages {
                println!("stage amplitude {amplitude}: t = {}, std = {:.4}", state.t, spatial_std(&state.u));
            }
            Ok(())
        }
        Command::Sweep { common, deltas, freqs, paper, zoom } => {
            let mut overrides = common.overrides(cli);
            let default_nx = if *paper { 170 } else { 85 };
            let r = config::resolve(
                &file,
                &overrides,
                &Defaults { nx: default_nx, half_width: 0.5, tau: 0.5, t_end: None, amplitude: 0.1 },
            )?;
            overrides.nx = None;
            let deltas = parse_float_list("deltas", deltas)?;
            let pairs = parse_freq_pairs(freqs)?;
            let l = r.grid.half_width();
            let zoom_rect = match zoom {
                Some(text) => {
                    let v = parse_float_list("zoom", text)?;
                    if v.len() != 4 {
                        return Err(ConfigError("zoom needs x0,x1,y0,y1".into()).into());
                    }
                    ZoomRect { x0: v[0], x1: v[1], y0: v[2], y1: v[3] }
                }
                None => ZoomRect { x0: -0.6 * l, x1: 0.2 * l, y0: -0.6 * l, y1: 0.0 },
            };
            let dir = RunDir::create(r.out_root.join(format!("sweep-{}", r.pattern.name())))?;
            let out = run_sweep(
                &dir,
                &deltas,
                &pairs,
                r.pattern,
                &r.grid,
                r.tau,
                r.t_end,
                r.seed,
                zoom_rect,
                cli.jobs,
                r.render,
            )?;
            dir.write_manifest(&manifest_entries("sweep", &r))?;
            for combo in &out.combos {
                println!(
                    "delta {} M {} N {}: steady = {}, std = {:.4}",
                    combo.amplitude,
                    combo.max_freq_x,
                    combo.max_freq_y,
                    combo.steady_reached,
                    spatial_std(&combo.final_u)
                );
            }
            Ok(())
        }
        Command::Animal { common, name, all, list, paper } => {
            if *list {
                for p in animal_presets() {
                    println!("{}", p.name);
                }
                return Ok(());
            }
            let seed = cli.seed.or(file.seed).unwrap_or(1);
            let out_root = cli
                .out
                .clone()
                .or_else(|| file.output.dir.as_ref().map(PathBuf::from))
                .or_else(|| std::env::var_os("ROUGHPAT_OUT").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("runs"));
            let render = cli.render || file.output.render.unwrap_or(false);
            let selected: Vec<roughpat_core::experiments::AnimalPreset> = if *all {
                animal_presets().to_vec()
            } else {
                let name = name
                    .as_deref()
                    .ok_or_else(|| ConfigError("animal needs --name <preset> or --all".into()))?;
                vec![*find_animal_preset(name)
                    .ok_or_else(|| ExperimentError::UnknownPreset(name.to_string()))?]
            };
            // tau / T / nx flags adjust the run without touching the registry;
            // an explicit nx replaces the desk/paper choice entirely
            let mut desk = !*paper;
            let selected: Vec<roughpat_core::experiments::AnimalPreset> = selected
                .into_iter()
                .map(|mut p| {
                    if let Some(tau) = common.tau {
                        p.tau = tau;
                    }
                    if let Some(t_end) = common.t_end {
                        p.t_end = t_end;
                    }
                    if let Some(nx) = common.nx {
                        p.nodes_per_axis = nx.max(3) as usize;
                        desk = false;
                    }
                    p
                })
                .collect();
            let desk = desk;
            let jobs = cli.jobs.max(1).min(selected.len());
            let errors = std::sync::Mutex::new(Vec::<CliError>::new());
            std::thread::scope(|scope| {
                for chunk in selected.chunks(selected.len().div_ceil(jobs)) {
                    let errors = &errors;
                    let out_root = &out_root;
                    scope.spawn(move || {
                        for preset in chunk {
                            let result = (|| -> Result<(), CliError> {
                                let dir =
                                    RunDir::create(out_root.join(format!("animal-{}", preset.name)))?;
                                let out = run_animal(&dir, preset, desk, seed, render)?;
                                dir.write_manifest(&[
                                    ("subcommand".into(), "animal".into()),
                                    ("preset".into(), preset.name.into()),
                                    ("seed".into(), seed.to_string()),
                                    ("desk_scale".into(), desk.to_string()),
                                ])?;
                                println!(
                                    "{}: {} steps to t = {}, steady = {}",
                                    preset.name, out.run.steps, out.run.t_final, out.run.steady_reached
                                );
                                Ok(())
                            })();
                            if let Err(e) = result {
                                errors.lock().unwrap().push(e);
                            }
                        }
                    });
                }
            });
            match errors.into_inner().unwrap().into_iter().next() {
                Some(e) => Err(e),
                None => Ok(()),
            }
        }
        Command::Converge { common, kind, axis, forcing } => {
            let r = config::resolve(
                &file,
                &common.overrides(cli),
                &Defaults { nx: 90, half_width: 1.0, tau: 1e-3, t_end: Some(0.1), amplitude: 1e-2 },
            )?;
            let kind = match kind.as_str() {
                "heat" => ConvergenceKind::Heat,
                "rds" => ConvergenceKind::Rds,
                other => return Err(ConfigError(format!("kind must be heat or rds (got {other})")).into()),
            };
            let axis = match axis.as_str() {
                "space" => ConvergenceAxis::Space,
                "time" => ConvergenceAxis::Time,
                other => return Err(ConfigError(format!("axis must be space or time (got {other})")).into()),
            };
            let mode = match forcing.as_deref() {
                None => None,
                Some("analytic") => Some(ForcingMode::Analytic),
                Some("discrete") => Some(ForcingMode::DiscreteOperator),
                Some(other) => {
                    return Err(ConfigError(format!(
                        "forcing must be analytic or discrete (got {other})"
                    ))
                    .into())
                }
            };
            let kind_name = match kind {
                ConvergenceKind::Heat => "heat",
                ConvergenceKind::Rds => "rds",
            };
            let axis_name = match axis {
                ConvergenceAxis::Space => "space",
                ConvergenceAxis::Time => "time",
            };
            let dir = RunDir::create(r.out_root.join(format!("converge-{kind_name}-{axis_name}")))?;
            let out = run_convergence(&dir, kind, axis, mode, r.seed)?;
            dir.write_manifest(&[
                ("subcommand".into(), "converge".into()),
                ("kind".into(), kind_name.into()),
                ("axis".into(), axis_name.into()),
                ("seed".into(), r.seed.to_string()),
            ])?;
            for row in &out.rows {
                println!("resolution {:>8} spacing {:<12} error {:.6e}", row.resolution, row.spacing, row.error);
            }
            println!("observed order: {:.3}", out.observed_order);
            Ok(())
        }
    }
}

// keep the reaction pattern import used even when only presets flow through
#[allow(dead_code)]
fn _pattern_names() -> [&'static str; 2] {
    [ReactionPattern::Spots.name(), ReactionPattern::Stripes.name()]
}
