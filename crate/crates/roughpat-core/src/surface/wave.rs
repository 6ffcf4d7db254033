//! Random wave-superposition surfaces.
//!
//! A surface is a finite cosine sum
//!
//! ```text
//! z(x, y) = sum_{m=-M..M} sum_{n=-N..N} a_{m,n} cos(2 pi (m x + n y) + phi_{m,n})
//! ```
//!
//! with normal pre-coefficients and uniform phases in `[0, pi)`. The
//! pre-surface is rescaled so its largest nodal magnitude over the evaluation
//! grid equals the requested amplitude. Heights and derivatives up to second
//! order are evaluated analytically from the coefficients.

use crate::grid::Grid;
use crate::rng::SeededRng;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SurfaceError {
    #[error("pre-surface is identically zero; cannot scale to amplitude {0}")]
    DegenerateSurface(f64),
    #[error("amplitude must be non-negative (got {0})")]
    NegativeAmplitude(f64),
}

/// Parameters of a wave-superposition surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSurfaceSpec {
    /// Maximum x frequency M.
    pub max_freq_x: u32,
    /// Maximum y frequency N.
    pub max_freq_y: u32,
    /// Target amplitude: max |z| over the evaluation grid after scaling.
    pub amplitude: f64,
    /// Frequency decay exponent beta (0 disables decay).
    pub decay: f64,
    /// Half-width L of the parameter domain.
    pub half_width: f64,
    pub seed: u64,
}

/// Sampled pre-coefficients and phases, shape `(2M+1) x (2N+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveCoefficients {
    max_freq_x: u32,
    max_freq_y: u32,
    pre_coeffs: Vec<f64>,
    phases: Vec<f64>,
}

impl WaveCoefficients {
    /// Draws pre-coefficients `N(0,1)` and phases `U[0, pi)`; with
    /// `decay > 0` each coefficient is damped by `(m^2+n^2)^(-decay/2)` and
    /// the `(0,0)` term is dropped (no DC offset).
    pub fn sample(max_freq_x: u32, max_freq_y: u32, decay: f64, seed: u64) -> Self {
        let (m, n) = (max_freq_x as i64, max_freq_y as i64);
        let count = ((2 * m + 1) * (2 * n + 1)) as usize;
        let mut pre_coeffs = Vec::with_capacity(count);
        let mut phases = Vec::with_capacity(count);
        let mut rng = SeededRng::new(seed);
        for mi in -m..=m {
            for ni in -n..=n {
                let mut a = rng.standard_normal();
                let phi = PI * rng.uniform();
                if decay > 0.0 {
                    let freq_sq = (mi * mi + ni * ni) as f64;
                    a = if freq_sq == 0.0 { 0.0 } else { a * freq_sq.powf(-decay / 2.0) };
                }
                pre_coeffs.push(a);
                phases.push(phi);
            }
        }
        WaveCoefficients { max_freq_x, max_freq_y, pre_coeffs, phases }
    }

    pub fn shape(&self) -> (usize, usize) {
        (2 * self.max_freq_x as usize + 1, 2 * self.max_freq_y as usize + 1)
    }

    pub fn pre_coeffs(&self) -> &[f64] {
        &self.pre_coeffs
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Coefficient and phase storage order: m varies slowest.
    fn terms(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        let (m, n) = (self.max_freq_x as i64, self.max_freq_y as i64);
        (-m..=m).flat_map(move |mi| (-n..=n).map(move |ni| (mi, ni))).zip(
            self.pre_coeffs.iter().zip(&self.phases),
        )
        .map(|((mi, ni), (&a, &phi))| (mi as f64, ni as f64, a, phi))
    }

    /// Unscaled height and first derivatives at a point.
    pub fn eval_raw(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let (mut z, mut zx, mut zy) = (0.0, 0.0, 0.0);
        for (m, n, a, phi) in self.terms() {
            if a == 0.0 {
                continue;
            }
            let arg = TAU * (m * x + n * y) + phi;
            let (s, c) = arg.sin_cos();
            z += a * c;
            zx -= a * TAU * m * s;
            zy -= a * TAU * n * s;
        }
        (z, zx, zy)
    }

    /// Unscaled height plus first and second derivatives at a point.
    pub fn eval_raw_jet(&self, x: f64, y: f64) -> SurfaceJet {
        let mut jet = SurfaceJet::default();
        for (m, n, a, phi) in self.terms() {
            if a == 0.0 {
                continue;
            }
            let (wx, wy) = (TAU * m, TAU * n);
            let arg = wx * x + wy * y + phi;
            let (s, c) = arg.sin_cos();
            jet.z += a * c;
            jet.zx -= a * wx * s;
            jet.zy -= a * wy * s;
            jet.zxx -= a * wx * wx * c;
            jet.zxy -= a * wx * wy * c;
            jet.zyy -= a * wy * wy * c;
        }
        jet
    }
}

/// Height and derivatives of a surface at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SurfaceJet {
    pub z: f64,
    pub zx: f64,
    pub zy: f64,
    pub zxx: f64,
    pub zxy: f64,
    pub zyy: f64,
}

impl SurfaceJet {
    fn scaled(mut self, s: f64) -> Self {
        self.z *= s;
        self.zx *= s;
        self.zy *= s;
        self.zxx *= s;
        self.zxy *= s;
        self.zyy *= s;
        self
    }
}

/// Nodal height and gradient fields on a grid.
#[derive(Debug, Clone)]
pub struct SurfaceFields {
    pub z: Vec<f64>,
    pub zx: Vec<f64>,
    pub zy: Vec<f64>,
}

/// Scale factor `s = amplitude / max|pre|`, so that `s * pre` attains the
/// requested amplitude. `amplitude = 0` yields `s = 0` (a flat surface).
pub fn scale_to_amplitude(pre_values: &[f64], amplitude: f64) -> Result<f64, SurfaceError> {
    if amplitude < 0.0 {
        return Err(SurfaceError::NegativeAmplitude(amplitude));
    }
    if amplitude == 0.0 {
        return Ok(0.0);
    }
    let max = pre_values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return Err(SurfaceError::DegenerateSurface(amplitude));
    }
    Ok(amplitude / max)
}

/// A wave surface whose coefficients have been scaled against a grid.
#[derive(Debug, Clone)]
pub struct WaveSurface {
    spec: WaveSurfaceSpec,
    coeffs: WaveCoefficients,
    scale: f64,
}

impl WaveSurface {
    /// Samples coefficients from the spec's seed and scales the surface so
    /// max |z| over `grid` equals the spec amplitude.
    pub fn build(spec: WaveSurfaceSpec, grid: &Grid) -> Result<Self, SurfaceError> {
        let coeffs = WaveCoefficients::sample(spec.max_freq_x, spec.max_freq_y, spec.decay, spec.seed);
        Self::from_coefficients(spec, coeffs, grid)
    }

    /// Builds from existing coefficients (shared randomness across
    /// amplitudes); only the scale factor depends on the spec amplitude.
    pub fn from_coefficients(
        spec: WaveSurfaceSpec,
        coeffs: WaveCoefficients,
        grid: &Grid,
    ) -> Result<Self, SurfaceError> {
        let pre: Vec<f64> = grid
            .positions()
            .map(|(x, y)| coeffs.eval_raw(x, y).0)
            .collect();
        let scale = scale_to_amplitude(&pre, spec.amplitude)?;
        Ok(WaveSurface { spec, coeffs, scale })
    }

    /// Same coefficients, rescaled to a new amplitude on `grid`.
    pub fn with_amplitude(&self, amplitude: f64, grid: &Grid) -> Result<Self, SurfaceError> {
        let spec = WaveSurfaceSpec { amplitude, ..self.spec };
        Self::from_coefficients(spec, self.coeffs.clone(), grid)
    }

    pub fn spec(&self) -> &WaveSurfaceSpec {
        &self.spec
    }

    pub fn coefficients(&self) -> &WaveCoefficients {
        &self.coeffs
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn height(&self, x: f64, y: f64) -> f64 {
        self.scale * self.coeffs.eval_raw(x, y).0
    }

    /// Height and analytic gradient at a point.
    pub fn height_gradient(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let (z, zx, zy) = self.coeffs.eval_raw(x, y);
        (self.scale * z, self.scale * zx, self.scale * zy)
    }

    /// Height plus first and second derivatives at a point.
    pub fn jet(&self, x: f64, y: f64) -> SurfaceJet {
        self.coeffs.eval_raw_jet(x, y).scaled(self.scale)
    }

    /// Nodal height and gradient fields, periodic-consistent on the
    /// duplicated endpoints.
    pub fn nodal_fields(&self, grid: &Grid) -> SurfaceFields {
        let dim = grid.len();
        let mut z = vec![0.0; dim];
        let mut zx = vec![0.0; dim];
        let mut zy = vec![0.0; dim];
        for j in 0..grid.ny() - 1 {
            for i in 0..grid.nx() - 1 {
                let (h, gx, gy) = self.height_gradient(grid.x(i), grid.y(j));
                let k = grid.node_index(i, j);
                z[k] = h;
                zx[k] = gx;
                zy[k] = gy;
            }
        }
        grid.make_periodic(&mut z);
        grid.make_periodic(&mut zx);
        grid.make_periodic(&mut zy);
        SurfaceFields { z, zx, zy }
    }
}
