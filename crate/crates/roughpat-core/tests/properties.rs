//! Property tests for the operator algebra, surface scaling, metric
//! identities, and file round trips.

use proptest::prelude::*;
use roughpat_core::grid::Grid;
use roughpat_core::io::GridDump;
use roughpat_core::operators::{assemble_laplace_beltrami, build_diff_matrices};
use roughpat_core::pde::estimate_order;
use roughpat_core::sparse::max_norm;
use roughpat_core::surface::{
    diffusion_eigensystem, MetricField, WaveSurface, WaveSurfaceSpec,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn diff_matrices_have_zero_row_sums_and_commute(
        nx in 3usize..20,
        ny in 3usize..20,
        kx in 1.0f64..4.0,
        ky in 1.0f64..4.0,
    ) {
        let g = Grid::new(1.0, nx, ny).unwrap();
        let (d1, d2) = build_diff_matrices(&g);
        for s in d1.row_sums().iter().chain(d2.row_sums().iter()) {
            prop_assert_eq!(*s, 0.0);
        }
        let u = g.eval_nodal(|x, y| (kx * x).sin() * (ky * y).cos() + 0.1 * x);
        let ab = d1.apply(&d2.apply(&u));
        let ba = d2.apply(&d1.apply(&u));
        let diff: Vec<f64> = ab.iter().zip(&ba).map(|(a, b)| a - b).collect();
        prop_assert!(max_norm(&diff) <= 1e-12 * max_norm(&u).max(1.0));
    }

    #[test]
    fn metric_identities_hold_for_random_gradients(
        zx in prop::collection::vec(-3.0f64..3.0, 1..40),
        scale in 0.1f64..2.0,
    ) {
        let zy: Vec<f64> = zx.iter().rev().map(|v| v * scale).collect();
        let f = MetricField::from_gradients(&zx, &zy).unwrap();
        for k in 0..zx.len() {
            prop_assert!(f.g[k] >= 1.0);
            prop_assert!((f.g11[k] * f.g22[k] - f.g12[k] * f.g12[k] - f.g[k]).abs() <= 1e-12 * f.g[k]);
            prop_assert!((f.a1[k] * f.a4[k] - f.a2[k] * f.a2[k] - 1.0).abs() <= 1e-12);
        }
        let e = diffusion_eigensystem(&f, &zx, &zy);
        for k in 0..zx.len() {
            prop_assert!((e.lam_max[k] * e.lam_min[k] - 1.0).abs() <= 1e-12);
            let dot = e.dir_max[k][0] * e.dir_min[k][0] + e.dir_max[k][1] * e.dir_min[k][1];
            prop_assert!(dot.abs() <= 1e-12);
        }
    }

    #[test]
    fn scaled_surfaces_attain_amplitude(
        seed in 0u64..1000,
        m in 0u32..4,
        n in 0u32..4,
        amplitude in 1e-4f64..2.0,
    ) {
        let g = Grid::square(1.0, 17).unwrap();
        let spec = WaveSurfaceSpec {
            max_freq_x: m,
            max_freq_y: n,
            amplitude,
            decay: 0.0,
            half_width: 1.0,
            seed,
        };
        let surf = WaveSurface::build(spec, &g).unwrap();
        let fields = surf.nodal_fields(&g);
        let max = fields.z.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        prop_assert!((max - amplitude).abs() <= 1e-12 * amplitude, "max {} vs {}", max, amplitude);
    }

    #[test]
    fn eigendirections_are_amplitude_invariant(
        seed in 0u64..500,
        factor in 1.5f64..8.0,
    ) {
        let g = Grid::square(1.0, 13).unwrap();
        let spec = WaveSurfaceSpec {
            max_freq_x: 2,
            max_freq_y: 2,
            amplitude: 0.05,
            decay: 0.0,
            half_width: 1.0,
            seed,
        };
        let a = WaveSurface::build(spec, &g).unwrap();
        let b = a.with_amplitude(0.05 * factor, &g).unwrap();
        let fa = a.nodal_fields(&g);
        let fb = b.nodal_fields(&g);
        let ea = diffusion_eigensystem(&MetricField::from_gradients(&fa.zx, &fa.zy).unwrap(), &fa.zx, &fa.zy);
        let eb = diffusion_eigensystem(&MetricField::from_gradients(&fb.zx, &fb.zy).unwrap(), &fb.zx, &fb.zy);
        for k in 0..g.len() {
            if ea.flat[k] || eb.flat[k] {
                continue;
            }
            for (u, v) in [(&ea.dir_max[k], &eb.dir_max[k]), (&ea.dir_min[k], &eb.dir_min[k])] {
                let align = (u[0] * v[0] + u[1] * v[1]).abs();
                prop_assert!(align >= 1.0 - 1e-10, "node {}: alignment {}", k, align);
            }
        }
    }

    #[test]
    fn flat_surface_reduction_is_exact(seed in 0u64..200) {
        let g = Grid::square(1.0, 9).unwrap();
        let (d1, d2) = build_diff_matrices(&g);
        let spec = WaveSurfaceSpec {
            max_freq_x: 2,
            max_freq_y: 1,
            amplitude: 0.0,
            decay: 0.0,
            half_width: 1.0,
            seed,
        };
        let surf = WaveSurface::build(spec, &g).unwrap();
        let fields = surf.nodal_fields(&g);
        let metric = MetricField::from_gradients(&fields.zx, &fields.zy).unwrap();
        let lb = assemble_laplace_beltrami(&d1, &d2, &metric).unwrap();
        let plain = d1.matmul(&d1).add(&d2.matmul(&d2)).prune_zeros();
        prop_assert_eq!(lb, plain);
    }

    #[test]
    fn assembly_depends_on_gradient_products_only(seed in 0u64..200) {
        // A is built from squares and products, so negating both gradients
        // must give the identical operator
        let g = Grid::square(1.0, 7).unwrap();
        let (d1, d2) = build_diff_matrices(&g);
        let spec = WaveSurfaceSpec {
            max_freq_x: 1,
            max_freq_y: 2,
            amplitude: 0.3,
            decay: 0.0,
            half_width: 1.0,
            seed,
        };
        let surf = WaveSurface::build(spec, &g).unwrap();
        let fields = surf.nodal_fields(&g);
        let neg_zx: Vec<f64> = fields.zx.iter().map(|v| -v).collect();
        let neg_zy: Vec<f64> = fields.zy.iter().map(|v| -v).collect();
        let lb = assemble_laplace_beltrami(
            &d1, &d2, &MetricField::from_gradients(&fields.zx, &fields.zy).unwrap(),
        ).unwrap();
        let lb_neg = assemble_laplace_beltrami(
            &d1, &d2, &MetricField::from_gradients(&neg_zx, &neg_zy).unwrap(),
        ).unwrap();
        prop_assert_eq!(lb, lb_neg);
    }

    #[test]
    fn dump_round_trip_is_exact(
        values in prop::collection::vec(-1e6f64..1e6, 9),
        seed in any::<u64>(),
        t in prop::option::of(-1e3f64..1e3),
    ) {
        let g = Grid::square(1.0, 3).unwrap();
        let mut dump = GridDump::new(&g, "M", seed, "u", values).with_param("delta", 0.25);
        dump.time = t;
        let parsed = GridDump::parse_str(&dump.serialize()).unwrap();
        prop_assert_eq!(parsed, dump);
    }

    #[test]
    fn estimate_order_recovers_synthetic_slopes(
        order in 0.5f64..4.0,
        c in 0.1f64..10.0,
    ) {
        let hs = [0.4f64, 0.2, 0.1, 0.05];
        let errs: Vec<f64> = hs.iter().map(|h: &f64| c * h.powf(order)).collect();
        let est = estimate_order(&errs, &hs).unwrap();
        prop_assert!((est - order).abs() <= 1e-10, "estimated {} vs {}", est, order);
    }
}
