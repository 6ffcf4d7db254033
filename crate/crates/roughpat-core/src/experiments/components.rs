//! Connected-component statistics of thresholded pattern fields.
//!
//! The irregularity of a steady pattern is quantified by thresholding the
//! field at mid-range and measuring the spread of connected-component areas
//! on the periodic torus (4-adjacency, duplicated endpoints dropped).

/// Midpoint of the value range, the default pattern threshold.
pub fn mid_range_threshold(values: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    0.5 * (lo + hi)
}

/// Areas of the connected components of `{v > threshold}` on the unique
/// periodic torus of an `nx` by `ny` duplicated-endpoint grid.
pub fn component_areas(values: &[f64], nx: usize, ny: usize, threshold: f64) -> Vec<usize> {
    let (ux, uy) = (nx - 1, ny - 1);
    let id = |i: usize, j: usize| j * ux + i;
    let full = |i: usize, j: usize| j * nx + i;
    let mut mask = vec![false; ux * uy];
    for j in 0..uy {
        for i in 0..ux {
            mask[id(i, j)] = values[full(i, j)] > threshold;
        }
    }
    let mut seen = vec![false; ux * uy];
    let mut areas = Vec::new();
    let mut stack = Vec::new();
    for j0 in 0..uy {
        for i0 in 0..ux {
            if !mask[id(i0, j0)] || seen[id(i0, j0)] {
                continue;
            }
            let mut area = 0usize;
            stack.push((i0, j0));
            seen[id(i0, j0)] = true;
            while let Some((i, j)) = stack.pop() {
                area += 1;
                let neighbors = [
                    ((i + ux - 1) % ux, j),
                    ((i + 1) % ux, j),
                    (i, (j + uy - 1) % uy),
                    (i, (j + 1) % uy),
                ];
                for (ni, nj) in neighbors {
                    let k = id(ni, nj);
                    if mask[k] && !seen[k] {
                        seen[k] = true;
                        stack.push((ni, nj));
                    }
                }
            }
            areas.push(area);
        }
    }
    areas
}

/// Population standard deviation of component areas.
pub fn area_std(areas: &[usize]) -> f64 {
    if areas.is_empty() {
        return 0.0;
    }
    let n = areas.len() as f64;
    let mean = areas.iter().sum::<usize>() as f64 / n;
    let var = areas
        .iter()
        .map(|&a| (a as f64 - mean) * (a as f64 - mean))
        .sum::<f64>()
        / n;
    var.sqrt()
}

pub fn median_area(areas: &[usize]) -> f64 {
    if areas.is_empty() {
        return 0.0;
    }
    let mut sorted = areas.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    }
}

pub fn max_area(areas: &[usize]) -> usize {
    areas.iter().copied().max().unwrap_or(0)
}
