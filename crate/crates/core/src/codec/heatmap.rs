//! Gaussian keypoint splatting and peak extraction on center heatmaps.

use ndarray::{ArrayView2, ArrayViewMut2};

/// Minimum IoU a box shifted by the radius must keep with the original.
pub const GAUSSIAN_MIN_OVERLAP: f64 = 0.7;

/// CenterNet's radius heuristic for a box of `height x width` grid cells,
/// kept verbatim (including its `/ 2` denominators) so targets match the
/// reference implementation.
pub fn gaussian_radius(height: f64, width: f64, min_overlap: f64) -> f64 {
    let (h, w, mo) = (height, width, min_overlap);

    let b1 = h + w;
    let c1 = w * h * (1.0 - mo) / (1.0 + mo);
    let r1 = (b1 + (b1 * b1 - 4.0 * c1).max(0.0).sqrt()) / 2.0;

    let b2 = 2.0 * (h + w);
    let c2 = (1.0 - mo) * w * h;
    let r2 = (b2 + (b2 * b2 - 16.0 * c2).max(0.0).sqrt()) / 2.0;

    let a3 = 4.0 * mo;
    let b3 = -2.0 * mo * (h + w);
    let c3 = (mo - 1.0) * w * h;
    let r3 = (b3 + (b3 * b3 - 4.0 * a3 * c3).max(0.0).sqrt()) / 2.0;

    r1.min(r2).min(r3)
}

/// Max-merges a unit-peak Gaussian of integer `radius` centered on
/// `(row, col)`. The center cell ends up exactly 1.0.
pub fn draw_gaussian(mut heat: ArrayViewMut2<'_, f64>, row: usize, col: usize, radius: usize) {
    let (rows, cols) = heat.dim();
    let diameter = (2 * radius + 1) as f64;
    let sigma = diameter / 6.0;
    let r = radius as isize;
    for dy in -r..=r {
        for dx in -r..=r {
            let (y, x) = (row as isize + dy, col as isize + dx);
            if y < 0 || x < 0 || y >= rows as isize || x >= cols as isize {
                continue;
            }
            let g = (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp();
            let cell = &mut heat[[y as usize, x as usize]];
            if g > *cell {
                *cell = g;
            }
        }
    }
}

/// Cells whose value is at least `floor`, strictly positive and not smaller
/// than any of their eight neighbors. Returned as `(row, col, value)` in
/// row-major order.
pub fn local_maxima(heat: ArrayView2<'_, f64>, floor: f64) -> Vec<(usize, usize, f64)> {
    let (rows, cols) = heat.dim();
    let mut peaks = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = heat[[r, c]];
            if !(v > 0.0 && v >= floor) {
                continue;
            }
            let is_max = (r.saturating_sub(1)..=(r + 1).min(rows - 1))
                .flat_map(|rr| (c.saturating_sub(1)..=(c + 1).min(cols - 1)).map(move |cc| (rr, cc)))
                .all(|(rr, cc)| heat[[rr, cc]] <= v);
            if is_max {
                peaks.push((r, c, v));
            }
        }
    }
    peaks
}
