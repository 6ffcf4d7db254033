//! The experiment operations behind the CLI subcommands.

use super::{AnimalPreset, ExperimentError, ReactionPattern, RunDir, SurfaceRecipe};
use crate::filter::{finalize_surface_s, heat_filter, sample_initial_nodal, FilterSpec};
use crate::grid::Grid;
use crate::io::{render_heatmap, Colormap, GridDump};
use crate::operators::{assemble_laplace_beltrami, build_diff_matrices};
use crate::pde::{bdf2_run, run_heat, HeatRunOptions, RdsParams, RdsRun, RdsRunOptions, SimState};
use crate::rng::SeededRng;
use crate::sparse::CsrMatrix;
use crate::surface::{
    diffusion_eigensystem, EigenField, MetricField, SurfaceFields, WaveSurface, WaveSurfaceSpec,
};
use std::fmt::Write as _;
use std::path::PathBuf;

/// A surface realized on a grid, whatever its construction method.
pub struct BuiltSurface {
    pub method: &'static str,
    pub heights: Vec<f64>,
    pub grad_x: Vec<f64>,
    pub grad_y: Vec<f64>,
    pub metric: MetricField,
    /// Header parameters describing the construction.
    pub params: Vec<(String, String)>,
}

/// Realizes a surface recipe at the given amplitude on `grid`.
pub fn build_surface(
    recipe: &SurfaceRecipe,
    amplitude: f64,
    grid: &Grid,
    seed: u64,
    d1: &CsrMatrix,
    d2: &CsrMatrix,
) -> Result<BuiltSurface, ExperimentError> {
    match *recipe {
        SurfaceRecipe::Wave { max_freq_x, max_freq_y } => {
            let spec = WaveSurfaceSpec {
                max_freq_x,
                max_freq_y,
                amplitude,
                decay: 0.0,
                half_width: grid.half_width(),
                seed,
            };
            let surface = WaveSurface::build(spec, grid)?;
            let SurfaceFields { z, zx, zy } = surface.nodal_fields(grid);
            let metric = MetricField::from_gradients(&zx, &zy)?;
            Ok(BuiltSurface {
                method: "M",
                heights: z,
                grad_x: zx,
                grad_y: zy,
                metric,
                params: vec![
                    ("M".into(), max_freq_x.to_string()),
                    ("N".into(), max_freq_y.to_string()),
                    ("delta".into(), amplitude.to_string()),
                ],
            })
        }
        SurfaceRecipe::Filtered { kappa, f11, f22, steps } => {
            let spec = FilterSpec { kappa, f11, f22, steps, amplitude, seed };
            let noise = sample_initial_nodal(grid, seed);
            let filtered = heat_filter(&noise, &spec, grid)?;
            let surface = finalize_surface_s(&filtered, amplitude, d1, d2)?;
            Ok(BuiltSurface {
                method: "S",
                heights: surface.heights,
                grad_x: surface.grad_x,
                grad_y: surface.grad_y,
                metric: surface.metric,
                params: vec![
                    ("kappa".into(), kappa.to_string()),
                    ("F11".into(), f11.to_string()),
                    ("F22".into(), f22.to_string()),
                    ("J".into(), steps.to_string()),
                    ("delta".into(), amplitude.to_string()),
                ],
            })
        }
    }
}

fn dump_of(
    grid: &Grid,
    surface: &BuiltSurface,
    seed: u64,
    field: &str,
    values: Vec<f64>,
) -> GridDump {
    let mut dump = GridDump::new(grid, surface.method, seed, field, values);
    for (k, v) in &surface.params {
        dump = dump.with_param(k, v);
    }
    dump
}

fn write_and_render(
    dir: &RunDir,
    dump: &GridDump,
    stem: &str,
    render: bool,
) -> Result<PathBuf, ExperimentError> {
    let path = dir.file(&format!("{stem}.txt"));
    dump.write_file(&path)?;
    if render {
        render_heatmap(dump, Colormap::Viridis, 4, &dir.file(&format!("{stem}.png")))?;
    }
    Ok(path)
}

/// Random initial species concentrations in `[-0.5, 0.5]`, periodic on the
/// duplicated endpoints.
fn random_species_ic(grid: &Grid, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = SeededRng::new(seed);
    let mut u = vec![0.0; grid.len()];
    let mut v = vec![0.0; grid.len()];
    for j in 0..grid.ny() - 1 {
        for i in 0..grid.nx() - 1 {
            u[grid.node_index(i, j)] = rng.uniform_in(-0.5, 0.5);
        }
    }
    for j in 0..grid.ny() - 1 {
        for i in 0..grid.nx() - 1 {
            v[grid.node_index(i, j)] = rng.uniform_in(-0.5, 0.5);
        }
    }
    grid.make_periodic(&mut u);
    grid.make_periodic(&mut v);
    (u, v)
}

/// Population standard deviation of a nodal field (pattern "nonuniformity").
pub fn spatial_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

// ---------------------------------------------------------------------------
// eigen maps
// ---------------------------------------------------------------------------

pub struct EigenMapsOutput {
    pub eigen: EigenField,
    pub fields: SurfaceFields,
    pub dumps: Vec<PathBuf>,
}

/// Writes eigenvalue and eigendirection maps of the diffusion tensor for a
/// wave surface: four scalar dumps (both eigenvalues, both direction angles)
/// plus a subsampled quiver file for the dominant direction.
pub fn run_eigen_maps(
    dir: &RunDir,
    spec: WaveSurfaceSpec,
    grid: &Grid,
    quiver_stride: usize,
    render: bool,
) -> Result<EigenMapsOutput, ExperimentError> {
    let surface = WaveSurface::build(spec, grid)?;
    let fields = surface.nodal_fields(grid);
    let metric = MetricField::from_gradients(&fields.zx, &fields.zy)?;
    let eigen = diffusion_eigensystem(&metric, &fields.zx, &fields.zy);

    let built = BuiltSurface {
        method: "M",
        heights: fields.z.clone(),
        grad_x: fields.zx.clone(),
        grad_y: fields.zy.clone(),
        metric,
        params: vec![
            ("M".into(), spec.max_freq_x.to_string()),
            ("N".into(), spec.max_freq_y.to_string()),
            ("delta".into(), spec.amplitude.to_string()),
        ],
    };
    let angle = |d: &[f64; 2]| d[1].atan2(d[0]);
    let mut dumps = Vec::new();
    let outputs: [(&str, Vec<f64>); 5] = [
        ("surface_z", fields.z.clone()),
        ("lambda_max", eigen.lam_max.clone()),
        ("lambda_min", eigen.lam_min.clone()),
        ("dir_max_angle", eigen.dir_max.iter().map(angle).collect()),
        ("dir_min_angle", eigen.dir_min.iter().map(angle).collect()),
    ];
    for (name, values) in outputs {
        let dump = dump_of(grid, &built, spec.seed, name, values);
        dumps.push(write_and_render(dir, &dump, name, render)?);
    }

    // quiver rows: x y dx dy, subsampled
    let stride = quiver_stride.max(1);
    let mut quiver = String::from("# columns: x y dx dy\n");
    for j in (0..grid.ny()).step_by(stride) {
        for i in (0..grid.nx()).step_by(stride) {
            let k = grid.node_index(i, j);
            let d = eigen.dir_max[k];
            let _ = writeln!(quiver, "{} {} {} {}", grid.x(i), grid.y(j), d[0], d[1]);
        }
    }
    let quiver_path = dir.file("quiver_dir_max.txt");
    std::fs::write(&quiver_path, quiver)?;
    dumps.push(quiver_path);

    Ok(EigenMapsOutput { eigen, fields, dumps })
}

// ---------------------------------------------------------------------------
// heat demo
// ---------------------------------------------------------------------------

pub struct HeatDemoOutput {
    /// (amplitude, final state, range of final state, max-norm monotone)
    pub results: Vec<(f64, Vec<f64>, f64, bool)>,
    pub dumps: Vec<PathBuf>,
}

/// Heat flow on the same underlying surface at several amplitudes, zero
/// source, initial condition `cos(pi x / 2L) cos(pi y / 2L)`.
#[allow(clippy::too_many_arguments)]
pub fn run_heat_demo(
    dir: &RunDir,
    base: WaveSurfaceSpec,
    amplitudes: &[f64],
    grid: &Grid,
    theta: f64,
    tau: f64,
    t_end: f64,
    render: bool,
) -> Result<HeatDemoOutput, ExperimentError> {
    let (d1, d2) = build_diff_matrices(grid);
    let reference = WaveSurface::build(base, grid)?;
    let l = grid.half_width();
    let half_pi = std::f64::consts::FRAC_PI_2;
    let ic = grid.eval_nodal(|x, y| (half_pi * x / l).cos() * (half_pi * y / l).cos());

    let mut results = Vec::new();
    let mut dumps = Vec::new();
    for (idx, &amplitude) in amplitudes.iter().enumerate() {
        let surface = reference.with_amplitude(amplitude, grid)?;
        let fields = surface.nodal_fields(grid);
        let metric = MetricField::from_gradients(&fields.zx, &fields.zy)?;
        let lb = assemble_laplace_beltrami(&d1, &d2, &metric)?;
        let run = run_heat(&lb, &ic, theta, tau, t_end, None, &HeatRunOptions::default())?;
        let (lo, hi) = run
            .state
            .u
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let built = BuiltSurface {
            method: "M",
            heights: fields.z,
            grad_x: fields.zx,
            grad_y: fields.zy,
            metric,
            params: vec![
                ("M".into(), base.max_freq_x.to_string()),
                ("N".into(), base.max_freq_y.to_string()),
                ("delta".into(), amplitude.to_string()),
            ],
        };
        let dump = dump_of(grid, &built, base.seed, "u", run.state.u.clone()).at_time(run.t_final);
        dumps.push(write_and_render(dir, &dump, &format!("heat_final_{idx}"), render)?);
        results.push((amplitude, run.state.u, hi - lo, run.max_norm_monotone));
    }
    Ok(HeatDemoOutput { results, dumps })
}

// ---------------------------------------------------------------------------
// single pattern run
// ---------------------------------------------------------------------------

pub struct RdsSingleOutput {
    pub run: RdsRun,
    pub surface_dump: PathBuf,
    pub u_dump: PathBuf,
    pub v_dump: PathBuf,
}

/// One reaction-diffusion integration on a freshly built surface with a
/// seeded random initial condition.
#[allow(clippy::too_many_arguments)]
pub fn run_rds_single(
    dir: &RunDir,
    recipe: &SurfaceRecipe,
    amplitude: f64,
    params: &RdsParams,
    grid: &Grid,
    tau: f64,
    t_end: f64,
    seed: u64,
    steady_tol: Option<f64>,
    snapshot_every: Option<usize>,
    render: bool,
) -> Result<RdsSingleOutput, ExperimentError> {
    let (d1, d2) = build_diff_matrices(grid);
    let surface = build_surface(recipe, amplitude, grid, seed, &d1, &d2)?;
    let lb = assemble_laplace_beltrami(&d1, &d2, &surface.metric)?;
    let (u0, v0) = random_species_ic(grid, seed.wrapping_add(1));
    let opts = RdsRunOptions { steady_tol, snapshot_every, ..Default::default() };
    let run = bdf2_run(&lb, params, &u0, &v0, tau, t_end, &opts)?;

    let surface_dump = dump_of(grid, &surface, seed, "z", surface.heights.clone());
    let surface_path = write_and_render(dir, &surface_dump, "surface_z", render)?;
    let u_dump = dump_of(grid, &surface, seed, "u", run.u().to_vec()).at_time(run.t_final);
    let u_path = write_and_render(dir, &u_dump, "u_final", render)?;
    let v_dump = dump_of(grid, &surface, seed, "v", run.v().to_vec()).at_time(run.t_final);
    let v_path = write_and_render(dir, &v_dump, "v_final", render)?;
    for snap in &run.snapshots {
        let dump = dump_of(grid, &surface, seed, "u", snap.u.clone()).at_time(snap.t);
        write_and_render(dir, &dump, &format!("u_step{:06}", snap.step), false)?;
    }
    Ok(RdsSingleOutput { run, surface_dump: surface_path, u_dump: u_path, v_dump: v_path })
}

// ---------------------------------------------------------------------------
// amplitude continuation
// ---------------------------------------------------------------------------

pub struct ContinuationOutput {
    /// Final state per stage, in schedule order.
    pub stages: Vec<(f64, SimState)>,
    pub dumps: Vec<PathBuf>,
}

/// Solves to steady state along an increasing amplitude schedule, seeding
/// each stage with the previous stage's final state. Surface coefficients
/// are sampled once; only the amplitude scaling changes between stages.
#[allow(clippy::too_many_arguments)]
pub fn run_amplitude_continuation(
    dir: &RunDir,
    max_freq_x: u32,
    max_freq_y: u32,
    pattern: ReactionPattern,
    grid: &Grid,
    tau: f64,
    t_end: f64,
    schedule: &[f64],
    seed: u64,
    steady_tol: Option<f64>,
    render: bool,
) -> Result<ContinuationOutput, ExperimentError> {
    assert!(!schedule.is_empty(), "continuation needs at least one amplitude");
    let (d1, d2) = build_diff_matrices(grid);
    let base_spec = WaveSurfaceSpec {
        max_freq_x,
        max_freq_y,
        amplitude: schedule[0],
        decay: 0.0,
        half_width: grid.half_width(),
        seed,
    };
    let reference = WaveSurface::build(base_spec, grid)?;
    let params = pattern.params();
    let (mut u, mut v) = random_species_ic(grid, seed.wrapping_add(1));

    let mut stages = Vec::new();
    let mut dumps = Vec::new();
    for (stage, &amplitude) in schedule.iter().enumerate() {
        let surface = reference.with_amplitude(amplitude, grid)?;
        let fields = surface.nodal_fields(grid);
        let metric = MetricField::from_gradients(&fields.zx, &fields.zy)?;
        let lb = assemble_laplace_beltrami(&d1, &d2, &metric)?;
        let opts = RdsRunOptions { steady_tol, ..Default::default() };
        let run = bdf2_run(&lb, &params, &u, &v, tau, t_end, &opts).map_err(|source| {
            ExperimentError::StageDiverged { stage, amplitude, source }
        })?;
        u = run.state.u.clone();
        v = run.state.v.clone().expect("rds state carries v");
        let built = BuiltSurface {
            method: "M",
            heights: fields.z,
            grad_x: fields.zx,
            grad_y: fields.zy,
            metric,
            params: vec![
                ("M".into(), max_freq_x.to_string()),
                ("N".into(), max_freq_y.to_string()),
                ("delta".into(), amplitude.to_string()),
                ("stage".into(), stage.to_string()),
            ],
        };
        let dump = dump_of(grid, &built, seed, "u", u.clone()).at_time(run.t_final);
        dumps.push(write_and_render(dir, &dump, &format!("u_stage{stage:02}"), render)?);
        stages.push((amplitude, run.state));
    }
    Ok(ContinuationOutput { stages, dumps })
}

/// Builds the amplitude schedule `from, from+step, ..., to`.
pub fn amplitude_schedule(from: f64, to: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0, "amplitude step must be positive");
    let mut schedule = Vec::new();
    let n = ((to - from) / step).round() as i64;
    for k in 0..=n.max(0) {
        schedule.push(from + k as f64 * step);
    }
    schedule
}

// ---------------------------------------------------------------------------
// frequency/amplitude sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct ZoomRect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

pub struct SweepCombo {
    pub amplitude: f64,
    pub max_freq_x: u32,
    pub max_freq_y: u32,
    pub final_u: Vec<f64>,
    pub steady_reached: bool,
    pub dump: PathBuf,
}

pub struct SweepOutput {
    pub combos: Vec<SweepCombo>,
}

/// Pattern runs over the cross product of amplitudes and frequency pairs,
/// writing a 2-D dump and a 3-D zoom export per combination.
#[allow(clippy::too_many_arguments)]
pub fn run_sweep(
    dir: &RunDir,
    amplitudes: &[f64],
    freq_pairs: &[(u32, u32)],
    pattern: ReactionPattern,
    grid: &Grid,
    tau: f64,
    t_end: f64,
    seed: u64,
    zoom: ZoomRect,
    jobs: usize,
    render: bool,
) -> Result<SweepOutput, ExperimentError> {
    let combos: Vec<(f64, u32, u32)> = amplitudes
        .iter()
        .flat_map(|&a| freq_pairs.iter().map(move |&(m, n)| (a, m, n)))
        .collect();
    let jobs = jobs.max(1).min(combos.len().max(1));

    let run_one = |&(amplitude, m, n): &(f64, u32, u32)| -> Result<SweepCombo, ExperimentError> {
        let (d1, d2) = build_diff_matrices(grid);
        let recipe = SurfaceRecipe::Wave { max_freq_x: m, max_freq_y: n };
        let surface = build_surface(&recipe, amplitude, grid, seed, &d1, &d2)?;
        let lb = assemble_laplace_beltrami(&d1, &d2, &surface.metric)?;
        let (u0, v0) = random_species_ic(grid, seed.wrapping_add(1));
        let run = bdf2_run(&lb, &pattern.params(), &u0, &v0, tau, t_end, &RdsRunOptions::default())?;

        let tag = format!("{}_d{amplitude}_m{m}n{n}", pattern.name());
        let dump = dump_of(grid, &surface, seed, "u", run.u().to_vec()).at_time(run.t_final);
        let dump_path = write_and_render(dir, &dump, &format!("u_{tag}"), render)?;

        // 3-D zoom export: x y z u rows over the sub-rectangle
        let mut text = String::from("# columns: x y z u\n");
        for j in 0..grid.ny() {
            let y = grid.y(j);
            if y < zoom.y0 || y > zoom.y1 {
                continue;
            }
            for i in 0..grid.nx() {
                let x = grid.x(i);
                if x < zoom.x0 || x > zoom.x1 {
                    continue;
                }
                let k = grid.node_index(i, j);
                let _ = writeln!(text, "{x} {y} {} {}", surface.heights[k], run.u()[k]);
            }
        }
        std::fs::write(dir.file(&format!("zoom_{tag}.txt")), text)?;

        Ok(SweepCombo {
            amplitude,
            max_freq_x: m,
            max_freq_y: n,
            final_u: run.u().to_vec(),
            steady_reached: run.steady_reached,
            dump: dump_path,
        })
    };

    let mut results: Vec<Option<SweepCombo>> = Vec::new();
    results.resize_with(combos.len(), || None);
    if jobs <= 1 {
        for (slot, combo) in results.iter_mut().zip(&combos) {
            *slot = Some(run_one(combo)?);
        }
    } else {
        let errors = std::sync::Mutex::new(Vec::<ExperimentError>::new());
        std::thread::scope(|scope| {
            for (worker, chunk) in results.chunks_mut(combos.len().div_ceil(jobs)).enumerate() {
                let combos = &combos;
                let errors = &errors;
                let run_one = &run_one;
                let offset = worker * combos.len().div_ceil(jobs);
                scope.spawn(move || {
                    for (k, slot) in chunk.iter_mut().enumerate() {
                        match run_one(&combos[offset + k]) {
                            Ok(result) => *slot = Some(result),
                            Err(e) => errors.lock().unwrap().push(e),
                        }
                    }
                });
            }
        });
        if let Some(e) = errors.into_inner().unwrap().into_iter().next() {
            return Err(e);
        }
    }
    Ok(SweepOutput { combos: results.into_iter().map(|c| c.expect("combo completed")).collect() })
}

// ---------------------------------------------------------------------------
// animal presets
// ---------------------------------------------------------------------------

/// Runs one animal preset (desk scale halves the resolution; the final time
/// is preserved).
pub fn run_animal(
    dir: &RunDir,
    preset: &AnimalPreset,
    desk_scale: bool,
    seed: u64,
    render: bool,
) -> Result<RdsSingleOutput, ExperimentError> {
    let grid = Grid::square(preset.half_width, preset.nodes(desk_scale))?;
    run_rds_single(
        dir,
        &preset.surface,
        preset.amplitude,
        &preset.pattern.params(),
        &grid,
        preset.tau,
        preset.t_end,
        seed,
        Some(1e-5),
        None,
        render,
    )
}
