//! Lossless raster rendering of grid dumps.
//!
//! The value range is mapped linearly onto the colormap; the actual range is
//! written to a `<image>.range.txt` sidecar since the pixels carry no
//! precision contract.

use super::GridDump;
use std::fs;
use std::io::BufWriter;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("png encoding failed: {0}")]
    Encode(#[from] png::EncodingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Colormap {
    #[default]
    Viridis,
    Gray,
}

// viridis control points (matplotlib's public-domain table, subsampled)
const VIRIDIS: [[f64; 3]; 9] = [
    [0.267004, 0.004874, 0.329415],
    [0.275191, 0.194905, 0.496005],
    [0.212395, 0.359683, 0.551710],
    [0.153364, 0.497000, 0.557724],
    [0.122312, 0.633153, 0.530398],
    [0.288921, 0.758394, 0.428426],
    [0.626579, 0.854645, 0.223353],
    [0.876168, 0.891125, 0.095051],
    [0.993248, 0.906157, 0.143936],
];

impl Colormap {
    fn rgb(&self, t: f64) -> [u8; 3] {
        let t = t.clamp(0.0, 1.0);
        match self {
            Colormap::Gray => {
                let v = (t * 255.0).round() as u8;
                [v, v, v]
            }
            Colormap::Viridis => {
                let pos = t * (VIRIDIS.len() - 1) as f64;
                let lo = pos.floor() as usize;
                let hi = (lo + 1).min(VIRIDIS.len() - 1);
                let w = pos - lo as f64;
                let mut out = [0u8; 3];
                for c in 0..3 {
                    let v = VIRIDIS[lo][c] * (1.0 - w) + VIRIDIS[hi][c] * w;
                    out[c] = (v * 255.0).round() as u8;
                }
                out
            }
        }
    }
}

/// Renders a dump as an RGB PNG of `nx * upscale` by `ny * upscale` pixels.
pub fn render_heatmap(
    dump: &GridDump,
    colormap: Colormap,
    upscale: usize,
    path: &Path,
) -> Result<(), RenderError> {
    let upscale = upscale.max(1);
    let (lo, hi) = dump.min_max();
    let span = hi - lo;
    let width = dump.nx * upscale;
    let height = dump.ny * upscale;
    let mut pixels = Vec::with_capacity(width * height * 3);
    for py in 0..height {
        // image rows run top-down; grid rows bottom-up
        let j = dump.ny - 1 - py / upscale;
        for px in 0..width {
            let i = px / upscale;
            let v = dump.values[j * dump.nx + i];
            let t = if span > 0.0 { (v - lo) / span } else { 0.5 };
            pixels.extend_from_slice(&colormap.rgb(t));
        }
    }
    let io_err = |source| RenderError::Io { path: path.display().to_string(), source };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), width as u32, height as u32);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(&pixels)?;
    writer.finish()?;

    let sidecar = path.with_extension("range.txt");
    fs::write(&sidecar, format!("field={}\nmin={lo}\nmax={hi}\n", dump.field))
        .map_err(|source| RenderError::Io { path: sidecar.display().to_string(), source })?;
    Ok(())
}
