//! Delimited-text grid dumps.
//!
//! A dump is a `#`-prefixed header followed by one `x y value` row per node
//! in row-major order (x fastest). Numbers are written in shortest
//! round-trip decimal form, so `parse(serialize(d)) == d` holds exactly.
//!
//! ```text
//! # roughpat-dump v1
//! # nx=5 ny=5 L=1 method=M seed=42 field=z
//! # param M=5
//! # param delta=0.1
//! # columns: x y value
//! -1 -1 0.0123
//! ...
//! ```

use crate::grid::Grid;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use thiserror::Error;

const MAGIC: &str = "# roughpat-dump v1";

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("missing magic line (expected `{MAGIC}`)")]
    BadMagic,
    #[error("header is missing key `{0}`")]
    MissingKey(&'static str),
    #[error("header value for `{key}` is malformed: {value}")]
    BadValue { key: String, value: String },
    #[error("data row {row} is malformed: {line}")]
    BadRow { row: usize, line: String },
    #[error("expected {expected} data rows, found {found}")]
    RowCount { expected: usize, found: usize },
}

/// A scalar field on a grid, together with the run metadata needed to
/// reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDump {
    pub nx: usize,
    pub ny: usize,
    pub half_width: f64,
    /// Surface construction method tag (`M`, `S`, or `flat`).
    pub method: String,
    pub seed: u64,
    /// Name of the stored field (`z`, `u`, `v`, `lambda_max`, ...).
    pub field: String,
    /// Simulation time of the snapshot, when applicable.
    pub time: Option<f64>,
    /// Extra key=value parameters, order-preserving.
    pub params: Vec<(String, String)>,
    /// Row-major nodal values, x fastest.
    pub values: Vec<f64>,
}

impl GridDump {
    pub fn new(grid: &Grid, method: &str, seed: u64, field: &str, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "value count must match the grid");
        GridDump {
            nx: grid.nx(),
            ny: grid.ny(),
            half_width: grid.half_width(),
            method: method.to_string(),
            seed,
            field: field.to_string(),
            time: None,
            params: Vec::new(),
            values,
        }
    }

    pub fn at_time(mut self, t: f64) -> Self {
        self.time = Some(t);
        self
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.half_width, self.nx, self.ny).expect("dump carries a valid grid")
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(MAGIC);
        out.push('\n');
        let _ = write!(
            out,
            "# nx={} ny={} L={} method={} seed={} field={}",
            self.nx, self.ny, self.half_width, self.method, self.seed, self.field
        );
        if let Some(t) = self.time {
            let _ = write!(out, " t={t}");
        }
        out.push('\n');
        for (k, v) in &self.params {
            let _ = writeln!(out, "# param {k}={v}");
        }
        out.push_str("# columns: x y value\n");
        let grid = self.grid();
        for (idx, (x, y)) in grid.positions().enumerate() {
            let _ = writeln!(out, "{x} {y} {}", self.values[idx]);
        }
        out
    }

    pub fn write_file(&self, path: &Path) -> Result<(), DumpError> {
        let mut file = fs::File::create(path).map_err(|source| DumpError::Io {
            path: path.display().to_string(),
            source,
        })?;
        file.write_all(self.serialize().as_bytes())
            .map_err(|source| DumpError::Io { path: path.display().to_string(), source })
    }

    pub fn read_file(path: &Path) -> Result<Self, DumpError> {
        let file = fs::File::open(path).map_err(|source| DumpError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(BufReader::new(file), path)
    }

    pub fn parse_str(text: &str) -> Result<Self, DumpError> {
        Self::parse(BufReader::new(text.as_bytes()), Path::new("<memory>"))
    }

    fn parse(reader: impl BufRead, path: &Path) -> Result<Self, DumpError> {
        let mut lines = reader.lines();
        let io_err = |source| DumpError::Io { path: path.display().to_string(), source };
        let magic = lines.next().ok_or(DumpError::BadMagic)?.map_err(io_err)?;
        if magic.trim_end() != MAGIC {
            return Err(DumpError::BadMagic);
        }
        let header = lines.next().ok_or(DumpError::MissingKey("nx"))?.map_err(io_err)?;
        let mut nx = None;
        let mut ny = None;
        let mut half_width = None;
        let mut method = None;
        let mut seed = None;
        let mut field = None;
        let mut time = None;
        for part in header.trim_start_matches('#').split_whitespace() {
            let (key, value) = part.split_once('=').ok_or_else(|| DumpError::BadValue {
                key: part.to_string(),
                value: String::new(),
            })?;
            let bad = || DumpError::BadValue { key: key.to_string(), value: value.to_string() };
            match key {
                "nx" => nx = Some(value.parse().map_err(|_| bad())?),
                "ny" => ny = Some(value.parse().map_err(|_| bad())?),
                "L" => half_width = Some(value.parse().map_err(|_| bad())?),
                "method" => method = Some(value.to_string()),
                "seed" => seed = Some(value.parse().map_err(|_| bad())?),
                "field" => field = Some(value.to_string()),
                "t" => time = Some(value.parse().map_err(|_| bad())?),
                other => {
                    return Err(DumpError::BadValue {
                        key: other.to_string(),
                        value: value.to_string(),
                    })
                }
            }
        }
        let nx: usize = nx.ok_or(DumpError::MissingKey("nx"))?;
        let ny: usize = ny.ok_or(DumpError::MissingKey("ny"))?;
        let half_width = half_width.ok_or(DumpError::MissingKey("L"))?;
        let method = method.ok_or(DumpError::MissingKey("method"))?;
        let seed = seed.ok_or(DumpError::MissingKey("seed"))?;
        let field = field.ok_or(DumpError::MissingKey("field"))?;

        let mut params = Vec::new();
        let mut values = Vec::with_capacity(nx * ny);
        let mut row = 0usize;
        for line in lines {
            let line = line.map_err(io_err)?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(p) = rest.strip_prefix("param ") {
                    let (k, v) = p.split_once('=').ok_or_else(|| DumpError::BadValue {
                        key: p.to_string(),
                        value: String::new(),
                    })?;
                    params.push((k.to_string(), v.to_string()));
                }
                continue;
            }
            row += 1;
            let mut cols = trimmed.split_whitespace();
            let (_x, _y, v) = match (cols.next(), cols.next(), cols.next()) {
                (Some(a), Some(b), Some(c)) => (a, b, c),
                _ => return Err(DumpError::BadRow { row, line: line.clone() }),
            };
            let value: f64 = v
                .parse()
                .map_err(|_| DumpError::BadRow { row, line: line.clone() })?;
            values.push(value);
        }
        if values.len() != nx * ny {
            return Err(DumpError::RowCount { expected: nx * ny, found: values.len() });
        }
        Ok(GridDump { nx, ny, half_width, method, seed, field, time, params, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GridDump {
        let grid = Grid::square(1.0, 3).unwrap();
        let values: Vec<f64> = (0..9).map(|i| (i as f64) * 0.1 - 0.33).collect();
        GridDump::new(&grid, "M", 42, "z", values)
            .at_time(0.125)
            .with_param("M", 5)
            .with_param("delta", 0.1)
    }

    #[test]
    fn round_trip_is_exact() {
        let d = sample();
        let parsed = GridDump::parse_str(&d.serialize()).unwrap();
        assert_eq!(parsed, d);
    }

    #[test]
    fn missing_header_key_is_a_parse_error() {
        let text = "# roughpat-dump v1\n# nx=3 L=1 method=M seed=1 field=z\n# columns: x y value\n";
        match GridDump::parse_str(text) {
            Err(DumpError::MissingKey("ny")) => {}
            other => panic!("expected missing ny, got {other:?}"),
        }
    }

    #[test]
    fn row_count_is_validated() {
        let d = sample();
        let mut text = d.serialize();
        text.truncate(text.rfind('\n').unwrap());
        text.truncate(text.rfind('\n').unwrap() + 1);
        match GridDump::parse_str(&text) {
            Err(DumpError::RowCount { expected: 9, found: 8 }) => {}
            other => panic!("expected row count error, got {other:?}"),
        }
    }

    #[test]
    fn dump_has_one_row_per_node() {
        let grid = Grid::square(0.5, 4).unwrap();
        let d = GridDump::new(&grid, "S", 7, "u", vec![0.0; 16]);
        let text = d.serialize();
        let data_rows = text.lines().filter(|l| !l.starts_with('#')).count();
        assert_eq!(data_rows, 16);
    }
}
