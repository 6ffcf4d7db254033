//! First fundamental form, diffusion tensor, and its eigensystem.
//!
//! For a height surface the metric is `G = [[1+zx^2, zx zy], [zx zy, 1+zy^2]]`
//! with determinant `g = 1 + zx^2 + zy^2`. The diffusion tensor is
//! `A = sqrt(g) G^{-1}`; its eigenvalues are `sqrt(g)` (along height
//! contours) and `1/sqrt(g)` (along the height gradient).

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("gradient arrays must have equal length ({zx} vs {zy})")]
    ShapeMismatch { zx: usize, zy: usize },
}

/// Nodal metric and diffusion-tensor data.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    pub g11: Vec<f64>,
    pub g12: Vec<f64>,
    pub g22: Vec<f64>,
    /// det G = 1 + zx^2 + zy^2
    pub g: Vec<f64>,
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub a4: Vec<f64>,
    pub inv_sqrt_g: Vec<f64>,
}

impl MetricField {
    pub fn from_gradients(zx: &[f64], zy: &[f64]) -> Result<Self, MetricError> {
        if zx.len() != zy.len() {
            return Err(MetricError::ShapeMismatch { zx: zx.len(), zy: zy.len() });
        }
        let n = zx.len();
        let mut field = MetricField {
            g11: Vec::with_capacity(n),
            g12: Vec::with_capacity(n),
            g22: Vec::with_capacity(n),
            g: Vec::with_capacity(n),
            a1: Vec::with_capacity(n),
            a2: Vec::with_capacity(n),
            a4: Vec::with_capacity(n),
            inv_sqrt_g: Vec::with_capacity(n),
        };
        for (&gx, &gy) in zx.iter().zip(zy) {
            let g11 = 1.0 + gx * gx;
            let g22 = 1.0 + gy * gy;
            let g12 = gx * gy;
            let g = 1.0 + gx * gx + gy * gy;
            let sqrt_g = g.sqrt();
            field.g11.push(g11);
            field.g12.push(g12);
            field.g22.push(g22);
            field.g.push(g);
            field.a1.push(g22 / sqrt_g);
            field.a2.push(-g12 / sqrt_g);
            field.a4.push(g11 / sqrt_g);
            field.inv_sqrt_g.push(1.0 / sqrt_g);
        }
        Ok(field)
    }

    /// Identity metric (flat surface) on `n` nodes.
    pub fn flat(n: usize) -> Self {
        MetricField {
            g11: vec![1.0; n],
            g12: vec![0.0; n],
            g22: vec![1.0; n],
            g: vec![1.0; n],
            a1: vec![1.0; n],
            a2: vec![0.0; n],
            a4: vec![1.0; n],
            inv_sqrt_g: vec![1.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }
}

/// Nodal eigenvalues and unit eigendirections of the diffusion tensor.
#[derive(Debug, Clone)]
pub struct EigenField {
    pub lam_max: Vec<f64>,
    pub lam_min: Vec<f64>,
    pub dir_max: Vec<[f64; 2]>,
    pub dir_min: Vec<[f64; 2]>,
    /// Nodes where both gradients vanish; directions default to the axes.
    pub flat: Vec<bool>,
}

/// Eigen-decomposition of the diffusion tensor at every node.
///
/// `lam_max = sqrt(g)` with direction along `(-zy, zx)` and
/// `lam_min = 1/sqrt(g)` with direction along `(zx, zy)`. At flat nodes both
/// eigenvalues are 1 and the coordinate axes are returned.
pub fn diffusion_eigensystem(field: &MetricField, zx: &[f64], zy: &[f64]) -> EigenField {
    assert_eq!(field.len(), zx.len());
    assert_eq!(field.len(), zy.len());
    let n = field.len();
    let mut out = EigenField {
        lam_max: Vec::with_capacity(n),
        lam_min: Vec::with_capacity(n),
        dir_max: Vec::with_capacity(n),
        dir_min: Vec::with_capacity(n),
        flat: Vec::with_capacity(n),
    };
    for k in 0..n {
        let (gx, gy) = (zx[k], zy[k]);
        let sqrt_g = field.g[k].sqrt();
        out.lam_max.push(sqrt_g);
        out.lam_min.push(field.inv_sqrt_g[k]);
        if gx == 0.0 && gy == 0.0 {
            out.dir_max.push([1.0, 0.0]);
            out.dir_min.push([0.0, 1.0]);
            out.flat.push(true);
        } else {
            let r = (gx * gx + gy * gy).sqrt();
            out.dir_max.push([-gy / r, gx / r]);
            out.dir_min.push([gx / r, gy / r]);
            out.flat.push(false);
        }
    }
    out
}
