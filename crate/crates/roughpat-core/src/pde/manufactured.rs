//! Closed-form test solutions and the analytic surface Laplacian used to
//! build their forcing terms.

use crate::surface::SurfaceJet;

/// Separable test field `f(x, y, t) = e^t sin(kx x) sin(ky y)`.
#[derive(Debug, Clone, Copy)]
pub struct ProductSineField {
    pub kx: f64,
    pub ky: f64,
}

impl ProductSineField {
    pub fn new(kx: f64, ky: f64) -> Self {
        ProductSineField { kx, ky }
    }

    pub fn value(&self, x: f64, y: f64, t: f64) -> f64 {
        t.exp() * (self.kx * x).sin() * (self.ky * y).sin()
    }

    pub fn dt(&self, x: f64, y: f64, t: f64) -> f64 {
        self.value(x, y, t)
    }

    pub fn dx(&self, x: f64, y: f64, t: f64) -> f64 {
        t.exp() * self.kx * (self.kx * x).cos() * (self.ky * y).sin()
    }

    pub fn dy(&self, x: f64, y: f64, t: f64) -> f64 {
        t.exp() * self.ky * (self.kx * x).sin() * (self.ky * y).cos()
    }

    pub fn dxx(&self, x: f64, y: f64, t: f64) -> f64 {
        -self.kx * self.kx * self.value(x, y, t)
    }

    pub fn dyy(&self, x: f64, y: f64, t: f64) -> f64 {
        -self.ky * self.ky * self.value(x, y, t)
    }

    pub fn dxy(&self, x: f64, y: f64, t: f64) -> f64 {
        t.exp() * self.kx * self.ky * (self.kx * x).cos() * (self.ky * y).cos()
    }
}

/// Analytic surface Laplacian of a field with known partials, from the
/// divergence form `(1/sqrt(g)) div(A grad f)` expanded by the chain rule.
///
/// `jet` carries the surface height derivatives at the point; `fx .. fyy`
/// are the field partials there.
pub fn laplace_beltrami_analytic(
    jet: &SurfaceJet,
    fx: f64,
    fy: f64,
    fxx: f64,
    fxy: f64,
    fyy: f64,
) -> f64 {
    let (zx, zy, zxx, zxy, zyy) = (jet.zx, jet.zy, jet.zxx, jet.zxy, jet.zyy);
    let g = 1.0 + zx * zx + zy * zy;
    let sg = g.sqrt();
    let a1 = (1.0 + zy * zy) / sg;
    let a2 = -zx * zy / sg;
    let a4 = (1.0 + zx * zx) / sg;
    let gx = 2.0 * (zx * zxx + zy * zxy);
    let gy = 2.0 * (zx * zxy + zy * zyy);
    let a1x = 2.0 * zy * zxy / sg - (1.0 + zy * zy) * gx / (2.0 * g * sg);
    let a2x = -(zxx * zy + zx * zxy) / sg + zx * zy * gx / (2.0 * g * sg);
    let a2y = -(zxy * zy + zx * zyy) / sg + zx * zy * gy / (2.0 * g * sg);
    let a4y = 2.0 * zx * zxy / sg - (1.0 + zx * zx) * gy / (2.0 * g * sg);
    (a1 * fxx + 2.0 * a2 * fxy + a4 * fyy + (a1x + a2y) * fx + (a2x + a4y) * fy) / sg
}
