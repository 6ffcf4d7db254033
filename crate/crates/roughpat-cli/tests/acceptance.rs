//! Acceptance suite: one test per shipping criterion, each printing a single
//! PASS/FAIL line (run with `-- --nocapture` to see them).

use roughpat_core::experiments::{
    run_convergence, run_heat_demo, spatial_std, ConvergenceAxis, ConvergenceKind, RunDir,
};
use roughpat_core::filter::{dirichlet_energy, heat_filter, sample_initial_nodal, FilterSpec};
use roughpat_core::grid::Grid;
use roughpat_core::operators::{assemble_laplace_beltrami, build_diff_matrices};
use roughpat_core::pde::{bdf2_run, reaction_point, RdsParams, RdsRunOptions};
use roughpat_core::rng::SeededRng;
use roughpat_core::sparse::l2_norm;
use roughpat_core::surface::{
    diffusion_eigensystem, MetricField, WaveSurface, WaveSurfaceSpec,
};
use std::path::{Path, PathBuf};
use std::time::Instant;

fn verdict(num: usize, label: &str, pass: bool, detail: &str) {
    let state = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {num:>2} [{label}]: {state} ({detail})");
    assert!(pass, "criterion {num} failed: {detail}");
}

fn rundir(tag: &str) -> RunDir {
    let path = std::env::temp_dir().join(format!("roughpat-acceptance-{tag}"));
    std::fs::remove_dir_all(&path).ok();
    RunDir::create(path).unwrap()
}

fn cleanup(dir: RunDir) {
    let path = dir.path().to_path_buf();
    drop(dir);
    std::fs::remove_dir_all(path).ok();
}

fn wave_spec(m: u32, n: u32, amplitude: f64, seed: u64) -> WaveSurfaceSpec {
    WaveSurfaceSpec { max_freq_x: m, max_freq_y: n, amplitude, decay: 0.0, half_width: 1.0, seed }
}

fn species_ic(grid: &Grid, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = SeededRng::new(seed);
    let mut u = vec![0.0; grid.len()];
    let mut v = vec![0.0; grid.len()];
    for x in u.iter_mut() {
        *x = rng.uniform_in(-0.5, 0.5);
    }
    for x in v.iter_mut() {
        *x = rng.uniform_in(-0.5, 0.5);
    }
    grid.make_periodic(&mut u);
    grid.make_periodic(&mut v);
    (u, v)
}

#[test]
fn criterion_01_heat_spatial_convergence() {
    let start = Instant::now();
    let dir = rundir("c1");
    let out = run_convergence(&dir, ConvergenceKind::Heat, ConvergenceAxis::Space, None, 7).unwrap();
    cleanup(dir);
    let wall = start.elapsed().as_secs_f64();
    let order = out.observed_order;
    verdict(
        1,
        "heat spatial order 2.0 +- 0.3",
        (order - 2.0).abs() <= 0.3 && wall < 120.0,
        &format!("order {order:.3}, wall {wall:.1}s"),
    );
}

#[test]
fn criterion_02_heat_temporal_convergence() {
    let start = Instant::now();
    let dir = rundir("c2");
    let out = run_convergence(&dir, ConvergenceKind::Heat, ConvergenceAxis::Time, None, 7).unwrap();
    cleanup(dir);
    let wall = start.elapsed().as_secs_f64();
    let order = out.observed_order;
    verdict(
        2,
        "heat temporal order 1.0 +- 0.2",
        (order - 1.0).abs() <= 0.2 && wall < 300.0,
        &format!("order {order:.3}, wall {wall:.1}s"),
    );
}

#[test]
fn criterion_03_rds_convergence() {
    let start = Instant::now();
    let dir = rundir("c3");
    let space = run_convergence(&dir, ConvergenceKind::Rds, ConvergenceAxis::Space, None, 7).unwrap();
    let time = run_convergence(&dir, ConvergenceKind::Rds, ConvergenceAxis::Time, None, 7).unwrap();
    cleanup(dir);
    let wall = start.elapsed().as_secs_f64();
    let (so, to) = (space.observed_order, time.observed_order);
    verdict(
        3,
        "rds spatial 2.0 +- 0.3, temporal 2.0 +- 0.2",
        (so - 2.0).abs() <= 0.3 && (to - 2.0).abs() <= 0.2 && wall < 600.0,
        &format!("space {so:.3}, time {to:.3}, wall {wall:.1}s"),
    );
}

/// Closed-form symmetric 2x2 eigenvalues, independent of the library path.
fn eigen_2x2(a: f64, b: f64, d: f64) -> (f64, f64) {
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    (0.5 * (tr + disc), 0.5 * (tr - disc))
}

#[test]
fn criterion_04_eigen_formulas_match_numeric_decomposition() {
    let grid = Grid::square(1.0, 90).unwrap();
    let surf = WaveSurface::build(wave_spec(1, 1, 0.1, 7), &grid).unwrap();
    let fields = surf.nodal_fields(&grid);
    let metric = MetricField::from_gradients(&fields.zx, &fields.zy).unwrap();
    let eigen = diffusion_eigensystem(&metric, &fields.zx, &fields.zy);
    let mut worst_val = 0.0f64;
    let mut worst_dot = 0.0f64;
    for k in 0..grid.len() {
        let (hi, lo) = eigen_2x2(metric.a1[k], metric.a2[k], metric.a4[k]);
        worst_val = worst_val
            .max((hi - metric.g[k].sqrt()).abs())
            .max((lo - 1.0 / metric.g[k].sqrt()).abs())
            .max((hi - eigen.lam_max[k]).abs())
            .max((lo - eigen.lam_min[k]).abs());
        let dot = eigen.dir_max[k][0] * eigen.dir_min[k][0] + eigen.dir_max[k][1] * eigen.dir_min[k][1];
        worst_dot = worst_dot.max(dot.abs());
    }
    verdict(
        4,
        "eigenvalues {sqrt(g), 1/sqrt(g)} and orthogonal directions",
        worst_val <= 1e-12 && worst_dot <= 1e-12,
        &format!("max eigenvalue deviation {worst_val:.2e}, max |dot| {worst_dot:.2e}"),
    );
}

#[test]
fn criterion_05_eigendirections_amplitude_invariant() {
    let grid = Grid::square(1.0, 90).unwrap();
    let base = WaveSurface::build(wave_spec(1, 1, 0.05, 7), &grid).unwrap();
    let doubled = base.with_amplitude(0.1, &grid).unwrap();
    let fa = base.nodal_fields(&grid);
    let fb = doubled.nodal_fields(&grid);
    let ma = MetricField::from_gradients(&fa.zx, &fa.zy).unwrap();
    let mb = MetricField::from_gradients(&fb.zx, &fb.zy).unwrap();
    let ea = diffusion_eigensystem(&ma, &fa.zx, &fa.zy);
    let eb = diffusion_eigensystem(&mb, &fb.zx, &fb.zy);
    let mut worst = 0.0f64;
    let mut counted = 0usize;
    for k in 0..grid.len() {
        if ma.g[k] <= 1.0 + 1e-8 {
            continue;
        }
        counted += 1;
        for (u, v) in [(&ea.dir_max[k], &eb.dir_max[k]), (&ea.dir_min[k], &eb.dir_min[k])] {
            let plus = ((u[0] + v[0]).abs()).max((u[1] + v[1]).abs());
            let minus = ((u[0] - v[0]).abs()).max((u[1] - v[1]).abs());
            worst = worst.max(plus.min(minus));
        }
    }
    verdict(
        5,
        "eigendirections agree up to sign for delta and 2 delta",
        worst <= 1e-10 && counted > 0,
        &format!("max componentwise deviation {worst:.2e} over {counted} nodes"),
    );
}

#[test]
fn criterion_06_flat_surface_reduction() {
    let grid = Grid::square(1.0, 21).unwrap();
    let (d1, d2) = build_diff_matrices(&grid);
    let surf = WaveSurface::build(wave_spec(5, 5, 0.0, 7), &grid).unwrap();
    let fields = surf.nodal_fields(&grid);
    let metric = MetricField::from_gradients(&fields.zx, &fields.zy).unwrap();
    let lb_surface = assemble_laplace_beltrami(&d1, &d2, &metric).unwrap();
    let lb_plain = d1.matmul(&d1).add(&d2.matmul(&d2)).prune_zeros();
    let operators_equal = lb_surface == lb_plain;

    // trajectories: zero-amplitude surface vs explicit flat metric, same IC
    let lb_flat = assemble_laplace_beltrami(&d1, &d2, &MetricField::flat(grid.len())).unwrap();
    let (u0, v0) = species_ic(&grid, 8);
    let opts = || RdsRunOptions { steady_tol: None, ..Default::default() };
    let run_a = bdf2_run(&lb_surface, &RdsParams::spots(), &u0, &v0, 0.5, 25.0, &opts()).unwrap();
    let run_b = bdf2_run(&lb_flat, &RdsParams::spots(), &u0, &v0, 0.5, 25.0, &opts()).unwrap();
    let bits_equal = run_a
        .u()
        .iter()
        .zip(run_b.u())
        .all(|(a, b)| a.to_bits() == b.to_bits())
        && run_a
            .v()
            .iter()
            .zip(run_b.v())
            .all(|(a, b)| a.to_bits() == b.to_bits());
    verdict(
        6,
        "flat reduction: operator entrywise exact, trajectories bit-identical",
        operators_equal && bits_equal,
        &format!("operator equal: {operators_equal}, trajectories bit-identical: {bits_equal}"),
    );
}

#[test]
fn criterion_07_amplitude_scaling_both_methods() {
    let grid = Grid::square(1.0, 64).unwrap();
    let (d1, d2) = build_diff_matrices(&grid);
    let mut worst = 0.0f64;
    for &delta in &[1e-3, 0.05, 0.1, 1.0] {
        let surf = WaveSurface::build(wave_spec(5, 3, delta, 13), &grid).unwrap();
        let max_m = surf
            .nodal_fields(&grid)
            .z
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        worst = worst.max((max_m - delta).abs() / delta);

        let spec = FilterSpec { kappa: 2.0, f11: 1.0, f22: 1.0, steps: 6, amplitude: delta, seed: 13 };
        let noise = sample_initial_nodal(&grid, 13);
        let filtered = heat_filter(&noise, &spec, &grid).unwrap();
        let surface_s =
            roughpat_core::filter::finalize_surface_s(&filtered, delta, &d1, &d2).unwrap();
        let max_s = surface_s.heights.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        worst = worst.max((max_s - delta).abs() / delta);
    }
    verdict(
        7,
        "max grid |z| equals delta to 1e-12 relative, both methods",
        worst <= 1e-12,
        &format!("worst relative deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_08_heat_demo_range_grows_with_amplitude() {
    let grid = Grid::square(1.0, 41).unwrap();
    let dir = rundir("c8");
    let out =
        run_heat_demo(&dir, wave_spec(1, 1, 0.1, 7), &[0.1, 1.0], &grid, 1.0, 1e-3, 1.0, false)
            .unwrap();
    cleanup(dir);
    let monotone = out.results.iter().all(|(_, _, _, m)| *m);
    let range_small = out.results[0].2;
    let range_large = out.results[1].2;
    verdict(
        8,
        "max norm non-increasing; range grows from delta 0.1 to 1",
        monotone && range_large > range_small,
        &format!("monotone {monotone}, ranges {range_small:.4} -> {range_large:.4}"),
    );
}

#[test]
fn criterion_09_filter_energy_and_mean() {
    let grid = Grid::square(1.0, 90).unwrap();
    // reference parameter triples for the filtered surfaces
    let rows = [(5.0, 1.0, 1.0, 15usize), (8.0, 1.0, 0.01, 10), (0.2, 20.0, 20.0, 2)];
    let mut energy_ok = true;
    let mut worst_mean = 0.0f64;
    for (row, &(kappa, f11, f22, steps)) in rows.iter().enumerate() {
        let z0 = sample_initial_nodal(&grid, 40 + row as u64);
        let mean0 = grid.unique_mean(&z0);
        let mut prev_energy = dirichlet_energy(&z0, &grid, f11, f22);
        for j in 1..=steps {
            let spec = FilterSpec { kappa, f11, f22, steps: j, amplitude: 1e-3, seed: 0 };
            let z = heat_filter(&z0, &spec, &grid).unwrap();
            let e = dirichlet_energy(&z, &grid, f11, f22);
            if e > prev_energy {
                energy_ok = false;
            }
            prev_energy = e;
            worst_mean = worst_mean.max((grid.unique_mean(&z) - mean0).abs());
        }
    }
    verdict(
        9,
        "filter energy non-increasing, mean preserved to 1e-12",
        energy_ok && worst_mean <= 1e-12,
        &format!("energy monotone {energy_ok}, worst mean drift {worst_mean:.2e}"),
    );
}

/// Straightforward dense re-implementation of the fully discrete scheme:
/// dense differentiation matrices, dense operator products, dense Gaussian
/// solves, explicit-reaction BDF2 with a backward-Euler first step.
fn dense_bdf2_flat(
    n: usize,
    params: &RdsParams,
    u0: &[f64],
    v0: &[f64],
    tau: f64,
    steps: usize,
) -> (Vec<f64>, Vec<f64>) {
    let grid = Grid::square(1.0, n).unwrap();
    let dim = grid.len();
    let idx = |i: usize, j: usize| j * n + i;
    let h = grid.hx();
    let mut d1 = vec![0.0; dim * dim];
    let mut d2 = vec![0.0; dim * dim];
    for j in 0..n {
        for i in 0..n {
            let r = idx(i, j);
            let il = if i == 0 { n - 2 } else { i - 1 };
            let ir = if i == n - 1 { 1 } else { i + 1 };
            let jd = if j == 0 { n - 2 } else { j - 1 };
            let ju = if j == n - 1 { 1 } else { j + 1 };
            d1[r * dim + idx(ir, j)] += 1.0 / (2.0 * h);
            d1[r * dim + idx(il, j)] -= 1.0 / (2.0 * h);
            d2[r * dim + idx(i, ju)] += 1.0 / (2.0 * h);
            d2[r * dim + idx(i, jd)] -= 1.0 / (2.0 * h);
        }
    }
    let matmul = |a: &[f64], b: &[f64]| {
        let mut c = vec![0.0; dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let aik = a[i * dim + k];
                if aik != 0.0 {
                    for jj in 0..dim {
                        c[i * dim + jj] += aik * b[k * dim + jj];
                    }
                }
            }
        }
        c
    };
    let mut lap = matmul(&d1, &d1);
    for (a, b) in lap.iter_mut().zip(matmul(&d2, &d2)) {
        *a += b;
    }
    let solve = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let mut m = a.to_vec();
        let mut x = b.to_vec();
        for k in 0..dim {
            let piv = (k..dim)
                .max_by(|&i, &jj| m[i * dim + k].abs().total_cmp(&m[jj * dim + k].abs()))
                .unwrap();
            if piv != k {
                for c in 0..dim {
                    m.swap(k * dim + c, piv * dim + c);
                }
                x.swap(k, piv);
            }
            for i in k + 1..dim {
                let f = m[i * dim + k] / m[k * dim + k];
                for c in k..dim {
                    m[i * dim + c] -= f * m[k * dim + c];
                }
                x[i] -= f * x[k];
            }
        }
        for i in (0..dim).rev() {
            let mut s = x[i];
            for c in i + 1..dim {
                s -= m[i * dim + c] * x[c];
            }
            x[i] = s / m[i * dim + i];
        }
        x
    };
    let sys = |diff: f64, c_ident: f64, c_tau: f64| -> Vec<f64> {
        let mut a = vec![0.0; dim * dim];
        for i in 0..dim {
            for jj in 0..dim {
                a[i * dim + jj] =
                    if i == jj { c_ident } else { 0.0 } - c_tau * diff * lap[i * dim + jj];
            }
        }
        a
    };
    let au_boot = sys(params.delta_u, 1.0, tau);
    let av_boot = sys(params.delta_v, 1.0, tau);
    let au = sys(params.delta_u, 3.0, 2.0 * tau);
    let av = sys(params.delta_v, 3.0, 2.0 * tau);
    let react = |u: &[f64], v: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let mut fu = vec![0.0; dim];
        let mut fv = vec![0.0; dim];
        for k in 0..dim {
            let (a, b) = reaction_point(u[k], v[k], params);
            fu[k] = a;
            fv[k] = b;
        }
        (fu, fv)
    };
    let mut u_prev = u0.to_vec();
    let mut v_prev = v0.to_vec();
    let f0 = react(&u_prev, &v_prev);
    let rhs_u: Vec<f64> = (0..dim).map(|k| u_prev[k] + tau * f0.0[k]).collect();
    let rhs_v: Vec<f64> = (0..dim).map(|k| v_prev[k] + tau * f0.1[k]).collect();
    let mut u_cur = solve(&au_boot, &rhs_u);
    let mut v_cur = solve(&av_boot, &rhs_v);
    let mut f_prev = f0;
    for _ in 1..steps {
        let f_cur = react(&u_cur, &v_cur);
        let rhs_u: Vec<f64> = (0..dim)
            .map(|k| 4.0 * tau * f_cur.0[k] - 2.0 * tau * f_prev.0[k] + 4.0 * u_cur[k] - u_prev[k])
            .collect();
        let rhs_v: Vec<f64> = (0..dim)
            .map(|k| 4.0 * tau * f_cur.1[k] - 2.0 * tau * f_prev.1[k] + 4.0 * v_cur[k] - v_prev[k])
            .collect();
        let u_next = solve(&au, &rhs_u);
        let v_next = solve(&av, &rhs_v);
        u_prev = std::mem::replace(&mut u_cur, u_next);
        v_prev = std::mem::replace(&mut v_cur, v_next);
        f_prev = f_cur;
    }
    (u_cur, v_cur)
}

#[test]
fn criterion_10_pattern_formation_reference_run() {
    // dense-oracle agreement on a 15x15 grid for 20 steps
    let oracle_grid = Grid::square(1.0, 15).unwrap();
    let (d1, d2) = build_diff_matrices(&oracle_grid);
    let lb =
        assemble_laplace_beltrami(&d1, &d2, &MetricField::flat(oracle_grid.len())).unwrap();
    let params = RdsParams::spots();
    let (u0, v0) = species_ic(&oracle_grid, 8);
    let sparse = bdf2_run(
        &lb,
        &params,
        &u0,
        &v0,
        0.5,
        10.0,
        &RdsRunOptions { steady_tol: None, ..Default::default() },
    )
    .unwrap();
    let (dense_u, dense_v) = dense_bdf2_flat(15, &params, &u0, &v0, 0.5, 20);
    let mut oracle_diff = 0.0f64;
    for k in 0..oracle_grid.len() {
        oracle_diff = oracle_diff
            .max((sparse.u()[k] - dense_u[k]).abs())
            .max((sparse.v()[k] - dense_v[k]).abs());
    }

    // reference pattern run at the stated desk-scale parameters
    let grid = Grid::square(1.0, 45).unwrap();
    let (d1, d2) = build_diff_matrices(&grid);
    let lb = assemble_laplace_beltrami(&d1, &d2, &MetricField::flat(grid.len())).unwrap();
    let (u0, v0) = species_ic(&grid, 8);
    let run = bdf2_run(&lb, &params, &u0, &v0, 0.5, 800.0, &RdsRunOptions::default()).unwrap();
    let finite = run.u().iter().chain(run.v()).all(|x| x.is_finite());
    let std_u = spatial_std(run.u());
    let steady = run.last_rel_change < 1e-5;

    verdict(
        10,
        "desk-scale pattern: steady < 1e-5, std > 0.01, finite, dense oracle 1e-8",
        steady && std_u > 0.01 && finite && oracle_diff <= 1e-8,
        &format!(
            "rel step change {:.2e} (threshold 1e-5{}), spatial std {:.3}, finite {}, dense-oracle diff {:.2e}",
            run.last_rel_change,
            if steady {
                ""
            } else {
                "; NOT reached: the tau=0.5 map at nX=45 settles into a stable period-2 \
                 orbit (2-step change ~1e-7) rather than a fixed point; nX>=49 or \
                 tau<=0.25 converges below 1e-5"
            },
            std_u,
            finite,
            oracle_diff,
        ),
    );
}

// ---------------------------------------------------------------------------
// criterion 11: CLI determinism
// ---------------------------------------------------------------------------

fn collect_files(root: &Path, base: &Path, out: &mut Vec<PathBuf>) {
    for entry in std::fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect_files(&path, base, out);
        } else {
            out.push(path.strip_prefix(base).unwrap().to_path_buf());
        }
    }
}

fn run_cli(args: &[&str], out: &Path) {
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_roughpat"))
        .args(args)
        .arg("--out")
        .arg(out)
        .status()
        .expect("binary runs");
    assert!(status.success(), "roughpat {args:?} failed");
}

/// Runs a subcommand twice and verifies every output file except the
/// manifest (which records wall time) is byte-identical.
fn assert_deterministic(tag: &str, args: &[&str]) {
    let base = std::env::temp_dir().join(format!("roughpat-acceptance-det-{tag}"));
    std::fs::remove_dir_all(&base).ok();
    let (a, b) = (base.join("a"), base.join("b"));
    run_cli(args, &a);
    run_cli(args, &b);
    let mut files_a = Vec::new();
    let mut files_b = Vec::new();
    collect_files(&a, &a, &mut files_a);
    collect_files(&b, &b, &mut files_b);
    files_a.sort();
    files_b.sort();
    assert_eq!(files_a, files_b, "{tag}: output file sets differ");
    assert!(
        files_a.iter().any(|f| f.file_name().unwrap() != "manifest.toml"),
        "{tag}: no data outputs produced"
    );
    for rel in &files_a {
        if rel.file_name().unwrap() == "manifest.toml" {
            continue;
        }
        let bytes_a = std::fs::read(a.join(rel)).unwrap();
        let bytes_b = std::fs::read(b.join(rel)).unwrap();
        assert_eq!(bytes_a, bytes_b, "{tag}: {} differs between reruns", rel.display());
    }
    std::fs::remove_dir_all(&base).ok();
}

#[test]
fn criterion_11_cli_determinism() {
    let cases: &[(&str, &[&str])] = &[
        (
            "gen-surface",
            &["gen-surface", "--method", "s", "--nx", "25", "--kappa", "1", "--f11", "1", "--f22", "1", "--filter-steps", "3", "--amplitude", "0.1", "--seed", "11"],
        ),
        (
            "eig-maps",
            &["eig-maps", "--nx", "21", "--M", "1", "--N", "1", "--amplitude", "0.1", "--seed", "11", "--render"],
        ),
        (
            "heat",
            &["heat", "--nx", "17", "--M", "1", "--N", "1", "--tau", "0.01", "--T", "0.05", "--amplitudes", "0.1,1", "--seed", "11"],
        ),
        ("rds", &["rds", "--nx", "17", "--tau", "0.5", "--T", "5", "--seed", "11"]),
        (
            "continue",
            &["continue", "--nx", "15", "--M", "2", "--N", "2", "--tau", "0.5", "--T", "5", "--delta-from", "0", "--delta-to", "0.02", "--delta-step", "0.01", "--seed", "11"],
        ),
        (
            "sweep",
            &["sweep", "--nx", "15", "--deltas", "0.05", "--freqs", "2x3", "--T", "5", "--seed", "11"],
        ),
        (
            "animal",
            &["animal", "--name", "cheetah-m", "--nx", "17", "--T", "10", "--seed", "11"],
        ),
        ("converge", &["converge", "--kind", "heat", "--axis", "space", "--seed", "11"]),
    ];
    for (tag, args) in cases {
        assert_deterministic(tag, args);
    }
    verdict(
        11,
        "every subcommand reruns bit-identically under a fixed seed",
        true,
        &format!("{} subcommands checked", cases.len()),
    );
}
